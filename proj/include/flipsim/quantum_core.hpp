// Copyright 2026 The flipsim authors
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

// Dense linear algebra for small complex Hermitian systems: tensor products,
// partial traces, eigendecomposition and the state metrics used everywhere
// else in the library. All functions are pure; all types are immutable after
// construction and safe to share across threads.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace flipsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double hermiticity = 1e-10;
inline constexpr double psd = 1e-10;       // min eigenvalue must exceed -psd
inline constexpr double trace_one = 1e-12;
inline constexpr double unitarity = 1e-10;
inline constexpr double pure_norm = 1e-12;
}  // namespace tol

/// Numeric failure that should abort a run (maps to CLI exit code 3).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A validated density matrix: Hermitian, trace one, positive semi-definite
/// (up to the tolerances in flipsim::tol). The stored matrix is symmetrized
/// as (M + M^dag)/2 on construction to absorb quadrature round-off.
class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix& m);

  /// |psi><psi| for a normalized state vector. Positive semi-definite by
  /// construction, so the eigenvalue check is skipped.
  static DensityMatrix pure(const ComplexVector& psi);

  /// I/d.
  static DensityMatrix maximally_mixed(Eigen::Index dim);

  Eigen::Index dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }

 private:
  struct Trusted {};
  DensityMatrix(Trusted, ComplexMatrix m) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

/// Dual-rail qubit state; basis index 0 <-> |0,1>, index 1 <-> |1,0>.
/// Holds either a pure amplitude pair or a 2x2 density matrix.
class QubitState {
 public:
  static QubitState pure(Complex alpha, Complex beta);
  static QubitState mixed(const DensityMatrix& rho);

  bool is_pure() const { return pure_; }
  /// Amplitudes of the pure form; throws for mixed states.
  Complex alpha() const;
  Complex beta() const;
  DensityMatrix density() const;

 private:
  QubitState(bool pure, Complex a, Complex b, const DensityMatrix& rho)
      : pure_(pure), alpha_(a), beta_(b), rho_(rho) {}
  bool pure_;
  Complex alpha_, beta_;
  DensityMatrix rho_;
};

/// Kronecker product with the left factor's index major.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Tensor product of density matrices (a's index major).
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

enum class Keep { A, B };

/// Partial trace of a state on A (x) B with dims (dim_a, dim_b).
/// Throws std::invalid_argument on dimension mismatch.
DensityMatrix partial_trace(const DensityMatrix& rho, Eigen::Index dim_a,
                            Eigen::Index dim_b, Keep keep);

struct EigResult {
  RealVector eigenvalues;    // sorted descending
  ComplexMatrix eigenvectors;  // column k pairs with eigenvalues[k]
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
/// Throws std::invalid_argument if the input is not Hermitian within
/// tol::hermiticity.
EigResult eig_hermitian(const ComplexMatrix& m);

/// Uhlmann fidelity [Tr sqrt(sqrt(a) b sqrt(a))]^2, clamped to [0, 1].
double uhlmann_fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// Tr[rho^2].
double purity(const DensityMatrix& rho);

}  // namespace flipsim
