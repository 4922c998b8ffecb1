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

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include "state_algebra.hpp"

namespace nvrepeater {

struct QberTriple {
  double e_x = 0.0;
  double e_y = 0.0;
  double e_z = 0.0;

  double e_xy() const { return 0.5 * (e_x + e_y); }
};

enum class ExtractionBasis { kZ, kXY };

enum class Protocol {
  kBB84AsymOneWay,
  kSixStateSymAD,
  kSixStateAsymAD,
  kAuto,
};

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::kBB84AsymOneWay: return "bb84-asym-oneway";
    case Protocol::kSixStateSymAD: return "sixstate-sym-ad";
    case Protocol::kSixStateAsymAD: return "sixstate-asym-ad";
    case Protocol::kAuto: return "auto";
  }
  return "?";
}

inline std::string to_string(ExtractionBasis b) {
  return b == ExtractionBasis::kZ ? "Z" : "XY";
}

// Errors relative to the target |Psi+>: equal Z outcomes, different X or Y
// outcomes.
inline QberTriple qber_against_psi_plus(const DensityMatrix& rho) {
  if (rho.qubits() != 2) throw std::invalid_argument("need a two-qubit state");
  const double w = rho.trace();
  if (!(w > 0.0)) throw std::domain_error("state has zero weight");
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  Vector plus(2), minus(2), yp(2), ym(2);
  plus << s, s;
  minus << s, -s;
  yp << s, i * s;
  ym << s, -i * s;
  QberTriple q;
  q.e_z = (rho(0, 0).real() + rho(3, 3).real()) / w;
  q.e_x = (rho.overlap(kron(plus, minus)) + rho.overlap(kron(minus, plus))) / w;
  q.e_y = (rho.overlap(kron(yp, ym)) + rho.overlap(kron(ym, yp))) / w;
  return q;
}

inline double binary_entropy(double x) {
  constexpr double kSlack = 1e-12;
  if (!(x >= -kSlack && x <= 1.0 + kSlack)) {
    throw std::domain_error("binary entropy argument outside [0, 1]");
  }
  x = std::clamp(x, 0.0, 1.0);
  if (x == 0.0 || x == 1.0) return 0.0;
  return -(x * std::log2(x) + (1.0 - x) * std::log2(1.0 - x));
}

inline double shannon_entropy(std::initializer_list<double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

struct BellDiagCoefficients {
  double p00, p01, p10, p11;
};

inline constexpr double kBellSlack = 1e-12;

inline BellDiagCoefficients bell_coefficients(const QberTriple& e,
                                              ExtractionBasis basis) {
  const double ez = e.e_z;
  const double exy = e.e_xy();
  BellDiagCoefficients c{};
  c.p00 = 1.0 - 0.5 * ez - exy;
  if (basis == ExtractionBasis::kZ) {
    c.p01 = exy - 0.5 * ez;
    c.p10 = 0.5 * ez;
  } else {
    c.p01 = 0.5 * ez;
    c.p10 = exy - 0.5 * ez;
  }
  c.p11 = 0.5 * ez;
  for (double* v : {&c.p00, &c.p01, &c.p10, &c.p11}) {
    if (*v < -kBellSlack) {
      throw std::domain_error("unphysical QBER combination");
    }
    *v = std::max(*v, 0.0);
  }
  return c;
}

inline double bb84_oneway(const QberTriple& e) {
  return std::max(0.0, 1.0 - binary_entropy(e.e_x) - binary_entropy(e.e_z));
}

inline double sixstate_oneway(const QberTriple& e) {
  const double ex = e.e_x, ey = e.e_y, ez = e.e_z;
  double r = 1.0 - binary_entropy(ez);
  if (ez > 0.0) {
    const double arg = std::clamp(0.5 * (1.0 + (ex - ey) / ez), 0.0, 1.0);
    r -= ez * binary_entropy(arg);
  }
  if (ez < 1.0) {
    const double arg =
        std::clamp((1.0 - 0.5 * (ex + ey + ez)) / (1.0 - ez), 0.0, 1.0);
    r -= (1.0 - ez) * binary_entropy(arg);
  }
  return std::clamp(r, 0.0, 1.0);
}

// Two-way post-processing with one round of advantage distillation.
inline double sixstate_ad(const QberTriple& e, ExtractionBasis basis) {
  const auto c = bell_coefficients(e, basis);
  const double P0 = (c.p00 + c.p01) * (c.p00 + c.p01) +
                    (c.p10 + c.p11) * (c.p10 + c.p11);
  const double P1 = 1.0 - P0;
  double first = 1.0 - shannon_entropy({c.p00, c.p01, c.p10, c.p11});
  const double den = (c.p00 + c.p01) * (c.p10 + c.p11);
  if (den > 0.0) {
    const double arg = (c.p00 * c.p10 + c.p01 * c.p11) / den;
    first += 0.5 * P1 * binary_entropy(std::clamp(arg, 0.0, 1.0));
  }
  double second = 0.0;
  if (P0 > 0.0) {
    const double q00 = (c.p00 * c.p00 + c.p01 * c.p01) / P0;
    const double q01 = 2.0 * c.p00 * c.p01 / P0;
    const double q10 = (c.p10 * c.p10 + c.p11 * c.p11) / P0;
    const double q11 = 2.0 * c.p10 * c.p11 / P0;
    second = 0.5 * P0 * (1.0 - shannon_entropy({q00, q01, q10, q11}));
  }
  return std::clamp(std::max(first, second), 0.0, 1.0);
}

inline ExtractionBasis higher_qber_basis(const QberTriple& e) {
  return e.e_z >= e.e_xy() ? ExtractionBasis::kZ : ExtractionBasis::kXY;
}

inline double symmetric_sifting(double r_x, double r_y, double r_z) {
  for (double r : {r_x, r_y, r_z}) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw std::domain_error("key fraction outside [0, 1]");
    }
  }
  return (r_x + r_y + r_z) / 9.0;
}

// Symmetric six-state with advantage distillation: every basis is used for
// key with probability 1/3 and sifting keeps 1/3 of the rounds.
inline double sixstate_symmetric_ad(const QberTriple& e) {
  const double r_xy = sixstate_ad(e, ExtractionBasis::kXY);
  const double r_z = sixstate_ad(e, ExtractionBasis::kZ);
  return symmetric_sifting(r_xy, r_xy, r_z);
}

inline double secret_key_fraction(Protocol p, const QberTriple& e) {
  switch (p) {
    case Protocol::kBB84AsymOneWay: return bb84_oneway(e);
    case Protocol::kSixStateSymAD: return sixstate_symmetric_ad(e);
    case Protocol::kSixStateAsymAD:
      return sixstate_ad(e, higher_qber_basis(e));
    case Protocol::kAuto: break;
  }
  throw std::invalid_argument("protocol must be resolved before evaluation");
}

inline double assemble_rate(double Y, double r, int n_modes) {
  if (!(Y >= 0.0 && Y <= 1.0) || !(r >= 0.0 && r <= 1.0)) {
    throw std::domain_error("yield and key fraction must lie in [0, 1]");
  }
  if (n_modes != 1 && n_modes != 2) {
    throw std::invalid_argument("mode count must be 1 or 2");
  }
  return Y * r / n_modes;
}

}  // namespace nvrepeater
