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

#include "flipsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace flipsim {

namespace {

constexpr double kEquatorialTol = 1e-10;

// Checks |alpha| = |beta| = 1/sqrt(2) and returns the relative phase.
double equatorial_phase_of(const QubitState& q, const char* role) {
  if (!q.is_pure()) {
    throw std::invalid_argument(std::string(role) +
                                " qubit must be a pure state");
  }
  const double half = 0.5;
  if (std::abs(std::norm(q.alpha()) - half) > kEquatorialTol ||
      std::abs(std::norm(q.beta()) - half) > kEquatorialTol) {
    throw std::invalid_argument(
        std::string(role) +
        " qubit must be equatorial (|alpha| = |beta| = 1/sqrt(2))");
  }
  return std::arg(q.beta() * std::conj(q.alpha()));
}

// Dephased equatorial state (1+D)/2 |Psi><Psi| + (1-D)/2 |Psi_perp><Psi_perp|.
DensityMatrix dephased_equatorial(double theta, double d_value) {
  ComplexMatrix m(2, 2);
  const Complex coh =
      0.5 * d_value * Complex(std::cos(theta), std::sin(theta));
  m(0, 0) = Complex(0.5, 0.0);
  m(1, 1) = Complex(0.5, 0.0);
  m(1, 0) = coh;             // <1,0| row, |0,1| column carries D e^{i theta}/2
  m(0, 1) = std::conj(coh);
  return DensityMatrix(m);
}

// pi-flip |1,0> -> -|1,0| on a 2x2 state.
ComplexMatrix pi_flip(const ComplexMatrix& rho) {
  ComplexMatrix out = rho;
  out(0, 1) = -out(0, 1);
  out(1, 0) = -out(1, 0);
  return out;
}

// Rail relabeling |0,1> <-> |1,0> on a 2x2 state.
ComplexMatrix rail_swap(const ComplexMatrix& rho) {
  ComplexMatrix out(2, 2);
  out(0, 0) = rho(1, 1);
  out(1, 1) = rho(0, 0);
  out(0, 1) = rho(1, 0);
  out(1, 0) = rho(0, 1);
  return out;
}

enum class MeasuredQubit { source, target };

// Projects the measured qubit on (|0,1> +- |1,0>)/sqrt(2) and traces out the
// environment, returning the unnormalized conditional state of the other
// qubit. Composite layout: ((s*2 + t) * d + i) * d + k.
ComplexMatrix project_and_trace(const Composite& composite, MeasuredQubit who,
                                int sign) {
  const Eigen::Index d = composite.env_dim;
  const Eigen::Index env2 = d * d;
  const ComplexMatrix& m = composite.state.matrix();
  const double s = static_cast<double>(sign);
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (Eigen::Index q = 0; q < 2; ++q) {
    for (Eigen::Index qp = 0; qp < 2; ++qp) {
      Complex acc(0.0, 0.0);
      for (Eigen::Index a = 0; a < 2; ++a) {
        for (Eigen::Index b = 0; b < 2; ++b) {
          // a, b run over the measured qubit's index on ket and bra side.
          const double w = (a == 0 ? 1.0 : s) * (b == 0 ? 1.0 : s) * 0.5;
          const Eigen::Index row =
              who == MeasuredQubit::source ? a * 2 + q : q * 2 + a;
          const Eigen::Index col =
              who == MeasuredQubit::source ? b * 2 + qp : qp * 2 + b;
          for (Eigen::Index e = 0; e < env2; ++e) {
            acc += w * m(row * env2 + e, col * env2 + e);
          }
        }
      }
      out(q, qp) = acc;
    }
  }
  return out;
}

TransferOutcome run_protocol(const Composite& composite, MeasuredQubit who,
                             bool compensate_sign) {
  // The D in force, recovered from the composite itself: tracing out both
  // qubits leaves (rho_env + F rho_env F)/2, which has the same flip
  // expectation as rho_env.
  const Eigen::Index d = composite.env_dim;
  DensityMatrix env_marginal =
      partial_trace(composite.state, 4, d * d, Keep::B);
  const double d_eff = flip_expectation(EnvState(d, d, env_marginal));

  ComplexMatrix plus_raw = project_and_trace(composite, who, +1);
  ComplexMatrix minus_raw = project_and_trace(composite, who, -1);
  const double p_plus = plus_raw.trace().real();
  const double p_minus = minus_raw.trace().real();

  ComplexMatrix plus = plus_raw / p_plus;
  ComplexMatrix minus = minus_raw / p_minus;
  if (who == MeasuredQubit::target) {
    // Completing the role swap: the reconstructed qubit's rails are
    // relabeled so the recovered phase matches the source convention.
    plus = rail_swap(plus);
    minus = rail_swap(minus);
  }

  // Feed-forward: the "-" outcome gets the pi-flip.
  ComplexMatrix corrected = p_plus * plus + p_minus * pi_flip(minus);
  if (compensate_sign && d_eff < 0.0) {
    corrected = pi_flip(corrected);
  }
  return TransferOutcome{DensityMatrix(plus), DensityMatrix(minus),
                         DensityMatrix(corrected), p_plus, p_minus, d_eff};
}

}  // namespace

EquatorialPhase EquatorialPhase::degrees(double deg) {
  return EquatorialPhase{deg * std::numbers::pi / 180.0};
}

QubitState make_source(EquatorialPhase phase) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  return QubitState::pure(
      Complex(inv_sqrt2, 0.0),
      inv_sqrt2 * Complex(std::cos(phase.theta_rad), std::sin(phase.theta_rad)));
}

QubitState make_target() { return make_source(EquatorialPhase{0.0}); }

Composite partial_exchange(const QubitState& source, const QubitState& target,
                           const EnvState& env) {
  if (!env.square()) {
    throw std::invalid_argument(
        "partial_exchange: environment subsystem dims must match");
  }
  const double theta = equatorial_phase_of(source, "source");
  const double target_phase = equatorial_phase_of(target, "target");
  if (std::abs(target_phase) > 1e-9) {
    throw std::invalid_argument(
        "partial_exchange: target must be the fixed (|0,1> + |1,0>)/sqrt(2) "
        "input");
  }

  const Eigen::Index d = env.dim_s();
  const Eigen::Index env2 = d * d;
  const Eigen::Index dim = 4 * env2;
  const ComplexMatrix& rho_e = env.rho().matrix();
  const Complex phase(std::cos(theta), std::sin(theta));

  // Of the four rail-occupation branches, only two leave one photon per
  // qubit after the swap: |1,0>_S |0,1>_T keeps its environment order while
  // |0,1>_S |1,0>_T carries the exchanged one. Each surviving branch has
  // qubit amplitude 1/2, so post-selection succeeds with probability 1/2
  // and the surviving state is normalized by construction.
  const Eigen::Index branch_a = 1 * 2 + 0;  // |1,0>_S |0,1>_T
  const Eigen::Index branch_b = 0 * 2 + 1;  // |0,1>_S |1,0>_T
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const Eigen::Index ket_a = branch_a * env2 + i * d + k;
      const Eigen::Index ket_b = branch_b * env2 + k * d + i;
      for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index l = 0; l < d; ++l) {
          const Complex c = 0.5 * rho_e(i * d + k, j * d + l);
          const Eigen::Index bra_a = branch_a * env2 + j * d + l;
          const Eigen::Index bra_b = branch_b * env2 + l * d + j;
          out(ket_a, bra_a) += c;
          out(ket_a, bra_b) += c * std::conj(phase);
          out(ket_b, bra_a) += c * phase;
          out(ket_b, bra_b) += c;
        }
      }
    }
  }
  return Composite{DensityMatrix(out), d, 0.5};
}

TransferOutcome measure_and_feedforward(const Composite& composite,
                                        bool compensate_sign) {
  return run_protocol(composite, MeasuredQubit::source, compensate_sign);
}

TransferOutcome erase(const Composite& composite, bool compensate_sign) {
  return run_protocol(composite, MeasuredQubit::target, compensate_sign);
}

TransferOutcome transfer_analytic(EquatorialPhase phase, double d_value) {
  if (std::abs(d_value) > 1.0 + 1e-9) {
    throw std::invalid_argument("transfer_analytic: |D| must not exceed 1");
  }
  d_value = std::clamp(d_value, -1.0, 1.0);
  const double theta = phase.theta_rad;
  return TransferOutcome{dephased_equatorial(theta, d_value),
                         dephased_equatorial(theta, -d_value),
                         dephased_equatorial(theta, d_value), 0.5, 0.5,
                         d_value};
}

}  // namespace flipsim
