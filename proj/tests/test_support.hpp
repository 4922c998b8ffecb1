// Copyright 2026 The nvrepeater Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <random>

#include "nvrepeater/state_algebra.hpp"

namespace nvrepeater::testing {

// G G^dagger / Tr for Gaussian G: full-rank with probability one.
inline DensityMatrix random_state(int qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const int d = 1 << qubits;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  Matrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

inline double max_abs_diff(const DensityMatrix& a, const DensityMatrix& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace nvrepeater::testing
