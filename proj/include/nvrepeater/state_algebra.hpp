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
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace nvrepeater {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 4;
inline constexpr int kMaxDim = 1 << kMaxQubits;

// Dynamic size with a fixed upper bound keeps every matrix on the stack.
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vector =
    Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

namespace tolerance {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-10;
inline constexpr double kEigenvalue = 1e-10;
inline constexpr double kCompleteness = 1e-10;
}  // namespace tolerance

inline int qubits_for_dim(Eigen::Index dim) {
  for (int n = 1; n <= kMaxQubits; ++n) {
    if (dim == (Eigen::Index{1} << n)) return n;
  }
  throw std::invalid_argument("dimension " + std::to_string(dim) +
                              " is not 2^n with 1 <= n <= 4");
}

//---------------------------------------------------------------------------//
// Density matrix over 1..4 qubits. Qubit 0 is the most significant bit of
// the basis index. The trace is not forced to one: post-selected branches
// are carried unnormalized and their trace is the branch weight.
//---------------------------------------------------------------------------//
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) {
      throw std::invalid_argument("density matrix must be square");
    }
    n_ = qubits_for_dim(m_.rows());
  }

  static DensityMatrix from_state(const Vector& psi) {
    return DensityMatrix(Matrix(psi * psi.adjoint()));
  }

  static DensityMatrix maximally_mixed(int qubits) {
    if (qubits < 1 || qubits > kMaxQubits) {
      throw std::invalid_argument("qubit count out of range");
    }
    const int d = 1 << qubits;
    return DensityMatrix(Matrix(Matrix::Identity(d, d) / double(d)));
  }

  static DensityMatrix zero(int qubits) {
    const int d = 1 << qubits;
    return DensityMatrix(Matrix(Matrix::Zero(d, d)));
  }

  int qubits() const { return n_; }
  int dim() const { return 1 << n_; }
  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  double trace() const { return m_.trace().real(); }

  // Re Tr[op rho]
  double expectation(const Matrix& op) const {
    if (op.rows() != m_.rows() || op.cols() != m_.cols()) {
      throw std::invalid_argument("operator dimension mismatch");
    }
    return (op.cwiseProduct(m_.transpose())).sum().real();
  }

  // <psi|rho|psi>
  double overlap(const Vector& psi) const {
    if (psi.size() != m_.rows()) {
      throw std::invalid_argument("state dimension mismatch");
    }
    return (psi.adjoint() * m_ * psi)(0, 0).real();
  }

  DensityMatrix& operator+=(const DensityMatrix& o) {
    if (o.n_ != n_) throw std::invalid_argument("qubit count mismatch");
    m_ += o.m_;
    return *this;
  }
  DensityMatrix& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  friend DensityMatrix operator+(DensityMatrix a, const DensityMatrix& b) {
    a += b;
    return a;
  }
  friend DensityMatrix operator*(double s, DensityMatrix a) {
    a *= s;
    return a;
  }
  friend DensityMatrix operator*(DensityMatrix a, double s) {
    a *= s;
    return a;
  }

 private:
  Matrix m_;
  int n_ = 1;
};

//---------------------------------------------------------------------------//
// Standard kets and operators
//---------------------------------------------------------------------------//
inline Vector basis_ket(int dim, int index) {
  qubits_for_dim(dim);
  if (index < 0 || index >= dim) {
    throw std::invalid_argument("basis index out of range");
  }
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return v;
}

enum class BellState { kPhiPlus, kPhiMinus, kPsiPlus, kPsiMinus };

inline constexpr BellState kAllBellStates[] = {
    BellState::kPhiPlus, BellState::kPhiMinus, BellState::kPsiPlus,
    BellState::kPsiMinus};

inline Vector bell_state(BellState b) {
  const double s = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  switch (b) {
    case BellState::kPhiPlus: v(0) = s; v(3) = s; break;
    case BellState::kPhiMinus: v(0) = s; v(3) = -s; break;
    case BellState::kPsiPlus: v(1) = s; v(2) = s; break;
    case BellState::kPsiMinus: v(1) = s; v(2) = -s; break;
  }
  return v;
}

inline Matrix pauli_i() { return Matrix::Identity(2, 2); }
inline Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}
inline Matrix pauli_y() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = Complex(0, -1);
  m(1, 0) = Complex(0, 1);
  return m;
}
inline Matrix pauli_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  if (a.rows() * b.rows() > kMaxDim || a.cols() * b.cols() > kMaxDim) {
    throw std::invalid_argument("tensor product exceeds 4 qubits");
  }
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          a(i, j) * b;
    }
  }
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  if (a.size() * b.size() > kMaxDim) {
    throw std::invalid_argument("tensor product exceeds 4 qubits");
  }
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

namespace detail {

inline void check_targets(const std::vector<int>& targets, int n) {
  if (targets.empty()) throw std::invalid_argument("empty target list");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= n) {
      throw std::invalid_argument("qubit index out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) {
        throw std::invalid_argument("duplicate qubit index");
      }
    }
  }
}

inline std::vector<int> complement(const std::vector<int>& targets, int n) {
  std::vector<int> rest;
  for (int q = 0; q < n; ++q) {
    if (std::find(targets.begin(), targets.end(), q) == targets.end()) {
      rest.push_back(q);
    }
  }
  return rest;
}

// offsets[v] is the full-register index contribution of the bit pattern v
// (MSB first) placed on the listed qubits.
inline std::vector<int> offsets(const std::vector<int>& qs, int n) {
  const int k = static_cast<int>(qs.size());
  std::vector<int> out(std::size_t(1) << k, 0);
  for (int v = 0; v < (1 << k); ++v) {
    int idx = 0;
    for (int b = 0; b < k; ++b) {
      if ((v >> (k - 1 - b)) & 1) idx |= 1 << (n - 1 - qs[b]);
    }
    out[v] = idx;
  }
  return out;
}

}  // namespace detail

// Output qubit j is input qubit order[j].
inline DensityMatrix permute_qubits(const DensityMatrix& rho,
                                    const std::vector<int>& order) {
  const int n = rho.qubits();
  if (static_cast<int>(order.size()) != n) {
    throw std::invalid_argument("permutation length mismatch");
  }
  detail::check_targets(order, n);
  const auto off = detail::offsets(order, n);
  const int d = rho.dim();
  Matrix out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out(i, j) = rho(off[i], off[j]);
  }
  return DensityMatrix(std::move(out));
}

// Reduced state on `keep`, in the listed order.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<int>& keep) {
  const int n = rho.qubits();
  detail::check_targets(keep, n);
  const auto rest = detail::complement(keep, n);
  const auto ko = detail::offsets(keep, n);
  const auto to = detail::offsets(rest, n);
  const int dk = static_cast<int>(ko.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (int i = 0; i < dk; ++i) {
    for (int j = 0; j < dk; ++j) {
      Complex s = 0.0;
      for (int t : to) s += rho(ko[i] | t, ko[j] | t);
      out(i, j) = s;
    }
  }
  return DensityMatrix(std::move(out));
}

// Tr_targets[rho] (x) I/D placed back on the target qubits.
inline DensityMatrix replace_with_maximally_mixed(
    const DensityMatrix& rho, const std::vector<int>& targets) {
  const int n = rho.qubits();
  detail::check_targets(targets, n);
  const auto rest = detail::complement(targets, n);
  const auto to = detail::offsets(targets, n);
  const double inv_d = 1.0 / double(to.size());
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  if (rest.empty()) {
    out.diagonal().setConstant(rho.trace() * inv_d);
    return DensityMatrix(std::move(out));
  }
  const auto ro = detail::offsets(rest, n);
  for (int ri : ro) {
    for (int rj : ro) {
      Complex s = 0.0;
      for (int t : to) s += rho(ri | t, rj | t);
      s *= inv_d;
      for (int t : to) out(ri | t, rj | t) = s;
    }
  }
  return DensityMatrix(std::move(out));
}

inline DensityMatrix apply_pauli_z(const DensityMatrix& rho, int qubit) {
  const int n = rho.qubits();
  detail::check_targets({qubit}, n);
  const int mask = 1 << (n - 1 - qubit);
  Matrix out = rho.matrix();
  for (int i = 0; i < rho.dim(); ++i) {
    for (int j = 0; j < rho.dim(); ++j) {
      if (((i & mask) != 0) != ((j & mask) != 0)) out(i, j) = -out(i, j);
    }
  }
  return DensityMatrix(std::move(out));
}

// Lift an operator on `targets` (listed order) to the full register.
inline Matrix embed_operator(const Matrix& op, const std::vector<int>& targets,
                             int n) {
  detail::check_targets(targets, n);
  const int k = static_cast<int>(targets.size());
  if (op.rows() != (1 << k) || op.cols() != (1 << k)) {
    throw std::invalid_argument("operator size does not match target count");
  }
  const auto to = detail::offsets(targets, n);
  const auto ro = detail::offsets(detail::complement(targets, n), n);
  const int d = 1 << n;
  Matrix out = Matrix::Zero(d, d);
  for (int r : ro) {
    for (int a = 0; a < (1 << k); ++a) {
      for (int b = 0; b < (1 << k); ++b) out(r | to[a], r | to[b]) = op(a, b);
    }
  }
  return out;
}

inline DensityMatrix conjugate(const DensityMatrix& rho, const Matrix& full) {
  return DensityMatrix(Matrix(full * rho.matrix() * full.adjoint()));
}

// Unnormalized reduced state on the complement of `targets` after the
// targets are found in |beta>: Tr_targets[(|beta><beta| (x) I) rho].
inline DensityMatrix project_subsystem(const DensityMatrix& rho,
                                       const Vector& beta,
                                       const std::vector<int>& targets) {
  const int n = rho.qubits();
  detail::check_targets(targets, n);
  const int k = static_cast<int>(targets.size());
  if (k >= n) throw std::invalid_argument("nothing left after projection");
  if (beta.size() != (1 << k)) {
    throw std::invalid_argument("projector size does not match target count");
  }
  const auto to = detail::offsets(targets, n);
  const auto ro = detail::offsets(detail::complement(targets, n), n);
  const int dr = static_cast<int>(ro.size());
  Matrix out = Matrix::Zero(dr, dr);
  for (int i = 0; i < dr; ++i) {
    for (int j = 0; j < dr; ++j) {
      Complex s = 0.0;
      for (int a = 0; a < (1 << k); ++a) {
        if (beta(a) == 0.0) continue;
        for (int b = 0; b < (1 << k); ++b) {
          if (beta(b) == 0.0) continue;
          s += std::conj(beta(a)) * rho(ro[i] | to[a], ro[j] | to[b]) * beta(b);
        }
      }
      out(i, j) = s;
    }
  }
  return DensityMatrix(std::move(out));
}

//---------------------------------------------------------------------------//
// Channels
//---------------------------------------------------------------------------//
struct Dephasing {
  double lambda = 1.0;  // rho -> lambda rho + (1 - lambda) Z rho Z
};
struct Depolarizing {
  double lambda = 1.0;  // rho -> lambda rho + (1 - lambda) Tr[rho] I/D
  int dim = 2;
};
struct AmplitudeDamping {
  double gamma = 0.0;
};
struct PauliZCorrection {};
struct KrausChannel {
  std::vector<Matrix> operators;
};

using QuantumChannel = std::variant<Dephasing, Depolarizing, AmplitudeDamping,
                                    PauliZCorrection, KrausChannel>;

inline Matrix amplitude_damping_kraus(double gamma, int which) {
  Matrix k = Matrix::Zero(2, 2);
  if (which == 0) {
    k(0, 0) = 1.0;
    k(1, 1) = std::sqrt(1.0 - gamma);
  } else {
    k(0, 1) = std::sqrt(gamma);
  }
  return k;
}

inline double completeness_error(const std::vector<Matrix>& ops) {
  if (ops.empty()) throw std::invalid_argument("empty operator set");
  Matrix s = Matrix::Zero(ops[0].cols(), ops[0].cols());
  for (const auto& k : ops) {
    if (k.cols() != s.cols()) {
      throw std::invalid_argument("inconsistent operator sizes");
    }
    s += k.adjoint() * k;
  }
  return (s - Matrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

inline void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0, 1]");
  }
}

namespace detail {

inline DensityMatrix apply_single_qubit_each(
    const DensityMatrix& rho, const std::vector<int>& targets,
    const auto& fn) {
  DensityMatrix out = rho;
  for (int q : targets) out = fn(out, q);
  return out;
}

}  // namespace detail

// Single-qubit channels act independently on each target. Depolarizing acts
// jointly on all targets, whose combined dimension must equal `dim`.
inline DensityMatrix apply_channel(const DensityMatrix& rho,
                                   const QuantumChannel& ch,
                                   const std::vector<int>& targets) {
  detail::check_targets(targets, rho.qubits());
  return std::visit(
      [&](const auto& c) -> DensityMatrix {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Dephasing>) {
          check_unit_interval(c.lambda, "dephasing parameter");
          return detail::apply_single_qubit_each(
              rho, targets, [&](const DensityMatrix& r, int q) {
                return c.lambda * r + (1.0 - c.lambda) * apply_pauli_z(r, q);
              });
        } else if constexpr (std::is_same_v<T, Depolarizing>) {
          check_unit_interval(c.lambda, "depolarizing parameter");
          if ((1 << targets.size()) != c.dim) {
            throw std::invalid_argument(
                "depolarizing dimension does not match targets");
          }
          return c.lambda * rho +
                 (1.0 - c.lambda) * replace_with_maximally_mixed(rho, targets);
        } else if constexpr (std::is_same_v<T, AmplitudeDamping>) {
          check_unit_interval(c.gamma, "damping parameter");
          const Matrix k0 = amplitude_damping_kraus(c.gamma, 0);
          const Matrix k1 = amplitude_damping_kraus(c.gamma, 1);
          return detail::apply_single_qubit_each(
              rho, targets, [&](const DensityMatrix& r, int q) {
                const int n = r.qubits();
                return conjugate(r, embed_operator(k0, {q}, n)) +
                       conjugate(r, embed_operator(k1, {q}, n));
              });
        } else if constexpr (std::is_same_v<T, PauliZCorrection>) {
          return detail::apply_single_qubit_each(
              rho, targets,
              [](const DensityMatrix& r, int q) { return apply_pauli_z(r, q); });
        } else {
          if (completeness_error(c.operators) > tolerance::kCompleteness) {
            throw std::domain_error("Kraus operators are not trace preserving");
          }
          DensityMatrix out = DensityMatrix::zero(rho.qubits());
          for (const auto& k : c.operators) {
            out += conjugate(rho, embed_operator(k, targets, rho.qubits()));
          }
          return out;
        }
      },
      ch);
}

//---------------------------------------------------------------------------//
// Post-selection and validation
//---------------------------------------------------------------------------//
struct Projected {
  DensityMatrix state;  // normalized, or all zeros when weight is negligible
  double weight;        // Tr[P rho P^dagger]
};

inline constexpr double kNegligibleWeight = 1e-300;

// Accepts any measurement operator with 0 <= P^dagger P <= I.
inline Projected project_and_renormalize(const DensityMatrix& rho,
                                         const Matrix& projector) {
  if (projector.rows() != rho.dim() || projector.cols() != rho.dim()) {
    throw std::invalid_argument("projector dimension mismatch");
  }
  const Matrix e = projector.adjoint() * projector;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (e + e.adjoint())),
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tolerance::kCompleteness ||
      es.eigenvalues().maxCoeff() > 1.0 + tolerance::kCompleteness) {
    throw std::domain_error("not a valid POVM element");
  }
  Matrix branch = projector * rho.matrix() * projector.adjoint();
  const double w = branch.trace().real();
  if (!(w >= kNegligibleWeight)) {
    return {DensityMatrix::zero(rho.qubits()), std::max(w, 0.0)};
  }
  branch /= w;
  return {DensityMatrix(std::move(branch)), w};
}

inline double hermiticity_error(const DensityMatrix& rho) {
  return (rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const DensityMatrix& rho) {
  Matrix h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Trace and Hermiticity only; the eigenvalue check is left to tests.
inline void check_normalized(const DensityMatrix& rho) {
  if (hermiticity_error(rho) > tolerance::kHermitian) {
    throw std::domain_error("state is not Hermitian");
  }
  if (std::abs(rho.trace() - 1.0) > tolerance::kTrace) {
    throw std::domain_error("state trace differs from one");
  }
}

}  // namespace nvrepeater
