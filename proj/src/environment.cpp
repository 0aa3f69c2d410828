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

#include "flipsim/environment.hpp"

#include <cmath>
#include <sstream>

namespace flipsim {

namespace {

constexpr double kWitnessTol = 1e-10;
constexpr double kImagGate = 1e-9;

Complex flip_expectation_raw(const EnvState& env) {
  const Eigen::Index d = env.dim_s();
  const ComplexMatrix& m = env.rho().matrix();
  Complex sum(0.0, 0.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      sum += m(i * d + j, j * d + i);
    }
  }
  return sum;
}

void require_square(const EnvState& env, const char* where) {
  if (!env.square()) {
    std::ostringstream os;
    os << where << ": environment subsystem dims differ (" << env.dim_s()
       << " vs " << env.dim_t() << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

EnvState::EnvState(Eigen::Index dim_s, Eigen::Index dim_t,
                   const DensityMatrix& rho)
    : dim_s_(dim_s), dim_t_(dim_t), rho_(rho) {
  if (dim_s < 1 || dim_t < 1 || rho.dim() != dim_s * dim_t) {
    throw std::invalid_argument(
        "EnvState: density matrix dim must equal dim_s * dim_t");
  }
  if (square()) {
    const double d = flip_expectation(*this);
    if (d < -1.0 - kWitnessTol || d > 1.0 + kWitnessTol) {
      std::ostringstream os;
      os << "EnvState: flip expectation " << d << " outside [-1, 1]";
      throw std::invalid_argument(os.str());
    }
  }
}

EnvState EnvState::pure(Eigen::Index dim_s, Eigen::Index dim_t,
                        const ComplexVector& amplitudes) {
  if (amplitudes.size() != dim_s * dim_t) {
    throw std::invalid_argument(
        "EnvState::pure: amplitude vector length must be dim_s * dim_t");
  }
  return EnvState(dim_s, dim_t, DensityMatrix::pure(amplitudes));
}

ComplexMatrix build_flip(Eigen::Index d) {
  if (d < 1) throw std::invalid_argument("build_flip: d must be >= 1");
  ComplexMatrix f = ComplexMatrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      f(k * d + i, i * d + k) = Complex(1.0, 0.0);
    }
  }
  return f;
}

double flip_expectation(const EnvState& env) {
  require_square(env, "flip_expectation");
  const Complex sum = flip_expectation_raw(env);
  if (std::abs(sum.imag()) > kImagGate) {
    std::ostringstream os;
    os << "flip_expectation: imaginary residue " << sum.imag()
       << " exceeds 1e-9; state is corrupted";
    throw NumericError(os.str());
  }
  return sum.real();
}

FlipDecomposition flip_decompose(const EnvState& env) {
  const double d = flip_expectation(env);
  return FlipDecomposition{0.5 * (1.0 + d), 0.5 * (1.0 - d)};
}

WitnessResult witness_entanglement(const EnvState& env) {
  return flip_expectation(env) < -kWitnessTol ? WitnessResult::witnessed
                                              : WitnessResult::inconclusive;
}

EnvState twirl(const EnvState& env) {
  require_square(env, "twirl");
  const Eigen::Index d = env.dim_s();
  const Eigen::Index n = d * d;
  const FlipDecomposition w = flip_decompose(env);
  const ComplexMatrix f = build_flip(d);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix p_sym = 0.5 * (id + f);
  const ComplexMatrix p_anti = 0.5 * (id - f);
  const double dim_sym = static_cast<double>(d * (d + 1)) / 2.0;
  const double dim_anti = static_cast<double>(d * (d - 1)) / 2.0;
  ComplexMatrix out = (w.p_sym / dim_sym) * p_sym;
  if (dim_anti > 0.0) {
    out += (w.p_anti / dim_anti) * p_anti;
  }
  return EnvState(d, d, DensityMatrix(out));
}

EnvState apply_local_unitary(const EnvState& env, const ComplexMatrix& u,
                             const ComplexMatrix& v) {
  if (u.rows() != env.dim_s() || u.cols() != env.dim_s() ||
      v.rows() != env.dim_t() || v.cols() != env.dim_t()) {
    throw std::invalid_argument(
        "apply_local_unitary: operator dims must match subsystem dims");
  }
  auto unitarity_residual = [](const ComplexMatrix& m) {
    ComplexMatrix r = m.adjoint() * m -
                      ComplexMatrix::Identity(m.rows(), m.cols());
    return r.cwiseAbs().maxCoeff();
  };
  if (unitarity_residual(u) > tol::unitarity ||
      unitarity_residual(v) > tol::unitarity) {
    throw std::invalid_argument("apply_local_unitary: input is not unitary");
  }
  const ComplexMatrix uv = kron(u, v);
  return EnvState(env.dim_s(), env.dim_t(),
                  DensityMatrix(uv * env.rho().matrix() * uv.adjoint()));
}

namespace {

// (|01> +- |10>)/sqrt(2) written with exact dyadic matrix entries, so the
// flip expectation comes out as exactly -+1.
EnvState bell_pair(double sign) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(1, 1) = Complex(0.5, 0.0);
  m(2, 2) = Complex(0.5, 0.0);
  m(1, 2) = Complex(sign * 0.5, 0.0);
  m(2, 1) = Complex(sign * 0.5, 0.0);
  return EnvState(2, 2, DensityMatrix(m));
}

}  // namespace

EnvState make_singlet() { return bell_pair(-1.0); }

EnvState make_symmetric_bell() { return bell_pair(+1.0); }

EnvState make_product_with_overlap(double c) {
  if (c < -1.0 || c > 1.0) {
    throw std::invalid_argument(
        "make_product_with_overlap: overlap must lie in [-1, 1]");
  }
  ComplexVector a(2), b(2);
  a << Complex(1.0, 0.0), Complex(0.0, 0.0);
  b << Complex(c, 0.0), Complex(std::sqrt(1.0 - c * c), 0.0);
  ComplexVector joint(4);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index k = 0; k < 2; ++k) {
      joint(i * 2 + k) = a(i) * b(k);
    }
  }
  return EnvState::pure(2, 2, joint);
}

EnvState make_werner(Eigen::Index d, double d_value) {
  if (d < 2) throw std::invalid_argument("make_werner: d must be >= 2");
  if (d_value < -1.0 || d_value > 1.0) {
    throw std::invalid_argument("make_werner: D must lie in [-1, 1]");
  }
  const Eigen::Index n = d * d;
  const ComplexMatrix f = build_flip(d);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const double p_sym = 0.5 * (1.0 + d_value);
  const double p_anti = 0.5 * (1.0 - d_value);
  const double dim_sym = static_cast<double>(d * (d + 1)) / 2.0;
  const double dim_anti = static_cast<double>(d * (d - 1)) / 2.0;
  ComplexMatrix out = (p_sym / dim_sym) * 0.5 * (id + f) +
                      (p_anti / dim_anti) * 0.5 * (id - f);
  return EnvState(d, d, DensityMatrix(out));
}

}  // namespace flipsim
