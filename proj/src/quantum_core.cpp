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

#include "flipsim/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flipsim {

namespace {

double max_abs(const ComplexMatrix& m) {
  return m.cwiseAbs().maxCoeff();
}

[[noreturn]] void fail_arg(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

DensityMatrix::DensityMatrix(const ComplexMatrix& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    fail_arg("DensityMatrix: matrix must be square and non-empty");
  }
  const double herm_residual = max_abs(m - m.adjoint());
  if (herm_residual > tol::hermiticity) {
    std::ostringstream os;
    os << "DensityMatrix: not Hermitian, |M - M^dag|_max = " << herm_residual;
    fail_arg(os.str());
  }
  mat_ = 0.5 * (m + m.adjoint().eval());
  const double tr_err = std::abs(mat_.trace() - Complex(1.0, 0.0));
  if (tr_err > tol::trace_one) {
    std::ostringstream os;
    os << "DensityMatrix: trace differs from 1 by " << tr_err;
    fail_arg(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(mat_,
                                                  Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol::psd) {
    std::ostringstream os;
    os << "DensityMatrix: not positive semi-definite, min eigenvalue = "
       << min_eig;
    fail_arg(os.str());
  }
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-9) {
    fail_arg("DensityMatrix::pure: state vector is not normalized");
  }
  ComplexVector v = psi / n;
  ComplexMatrix m = v * v.adjoint();
  m = 0.5 * (m + m.adjoint().eval());
  const Complex tr = m.trace();
  m /= tr.real();
  return DensityMatrix(Trusted{}, std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  if (dim < 1) fail_arg("maximally_mixed: dim must be >= 1");
  return DensityMatrix(Trusted{}, ComplexMatrix::Identity(dim, dim) /
                                      static_cast<double>(dim));
}

QubitState QubitState::pure(Complex alpha, Complex beta) {
  const double n2 = std::norm(alpha) + std::norm(beta);
  if (std::abs(n2 - 1.0) > tol::pure_norm) {
    fail_arg("QubitState::pure: |alpha|^2 + |beta|^2 must be 1");
  }
  ComplexVector v(2);
  v << alpha, beta;
  return QubitState(true, alpha, beta, DensityMatrix::pure(v));
}

QubitState QubitState::mixed(const DensityMatrix& rho) {
  if (rho.dim() != 2) fail_arg("QubitState::mixed: density matrix must be 2x2");
  return QubitState(false, Complex(0), Complex(0), rho);
}

Complex QubitState::alpha() const {
  if (!pure_) fail_arg("QubitState::alpha: state is not pure");
  return alpha_;
}

Complex QubitState::beta() const {
  if (!pure_) fail_arg("QubitState::beta: state is not pure");
  return beta_;
}

DensityMatrix QubitState::density() const { return rho_; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Eigen::Index dim_a,
                            Eigen::Index dim_b, Keep keep) {
  if (dim_a < 1 || dim_b < 1 || rho.dim() != dim_a * dim_b) {
    fail_arg("partial_trace: dim(rho) != dim_a * dim_b");
  }
  const ComplexMatrix& m = rho.matrix();
  if (keep == Keep::A) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
    for (Eigen::Index i = 0; i < dim_a; ++i) {
      for (Eigen::Index j = 0; j < dim_a; ++j) {
        Complex s(0.0, 0.0);
        for (Eigen::Index k = 0; k < dim_b; ++k) {
          s += m(i * dim_b + k, j * dim_b + k);
        }
        out(i, j) = s;
      }
    }
    return DensityMatrix(out);
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
  for (Eigen::Index i = 0; i < dim_b; ++i) {
    for (Eigen::Index j = 0; j < dim_b; ++j) {
      Complex s(0.0, 0.0);
      for (Eigen::Index k = 0; k < dim_a; ++k) {
        s += m(k * dim_b + i, k * dim_b + j);
      }
      out(i, j) = s;
    }
  }
  return DensityMatrix(out);
}

EigResult eig_hermitian(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) fail_arg("eig_hermitian: matrix must be square");
  const double herm_residual = max_abs(m - m.adjoint());
  if (herm_residual > tol::hermiticity) {
    std::ostringstream os;
    os << "eig_hermitian: not Hermitian, |M - M^dag|_max = " << herm_residual;
    fail_arg(os.str());
  }
  ComplexMatrix sym = 0.5 * (m + m.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw NumericError("eig_hermitian: eigendecomposition failed");
  }
  // Eigen sorts ascending; flip to descending, ties keep the flipped native
  // order so the "maximal eigenvalue" accessor is deterministic.
  const Eigen::Index n = sym.rows();
  EigResult r;
  r.eigenvalues = es.eigenvalues().reverse();
  r.eigenvectors = ComplexMatrix(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    r.eigenvectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  return r;
}

double uhlmann_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    fail_arg("uhlmann_fidelity: dimension mismatch");
  }
  // Rank-deficient inputs carry noise eigenvalues of order eps whose square
  // roots would contaminate the result at sqrt(eps); zero them relative to
  // the dominant eigenvalue before taking roots.
  auto clamped_sqrt = [](const RealVector& eigs) {
    const double floor_at = eigs.cwiseAbs().maxCoeff() * 1e-13;
    RealVector out(eigs.size());
    for (Eigen::Index k = 0; k < eigs.size(); ++k) {
      out(k) = eigs(k) > floor_at ? std::sqrt(eigs(k)) : 0.0;
    }
    return out;
  };
  EigResult ea = eig_hermitian(a.matrix());
  ComplexMatrix sqrt_a = ea.eigenvectors *
                         clamped_sqrt(ea.eigenvalues).asDiagonal() *
                         ea.eigenvectors.adjoint();
  ComplexMatrix inner = sqrt_a * b.matrix() * sqrt_a;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      ComplexMatrix(0.5 * (inner + inner.adjoint())), Eigen::EigenvaluesOnly);
  const double root_sum = clamped_sqrt(es.eigenvalues()).sum();
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

}  // namespace flipsim
