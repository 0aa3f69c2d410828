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

// Joint environmental state of two particles and the flip (exchange)
// operator F. The expectation D = Tr[F rho] quantifies effective
// indistinguishability: D = 1 for identical environments, D < 0 witnesses
// entanglement between them. F = P_sym - P_anti splits the joint space into
// symmetric and antisymmetric subspaces; twirling projects any state onto
// the span of those projectors while preserving D.

#pragma once

#include "flipsim/quantum_core.hpp"

namespace flipsim {

/// State of the joint environment of particles S and T. The joint basis
/// index is (i, k) <-> i * dim_t + k, so the stored matrix element
/// rho[(i,k),(j,l)] is the coefficient c_{ij,kl} = <psi_i psi_k|rho|psi_j psi_l>.
class EnvState {
 public:
  EnvState(Eigen::Index dim_s, Eigen::Index dim_t, const DensityMatrix& rho);

  /// Pure joint state from a normalized amplitude vector of length
  /// dim_s * dim_t.
  static EnvState pure(Eigen::Index dim_s, Eigen::Index dim_t,
                       const ComplexVector& amplitudes);

  Eigen::Index dim_s() const { return dim_s_; }
  Eigen::Index dim_t() const { return dim_t_; }
  bool square() const { return dim_s_ == dim_t_; }
  const DensityMatrix& rho() const { return rho_; }

 private:
  Eigen::Index dim_s_, dim_t_;
  DensityMatrix rho_;
};

/// The d^2 x d^2 permutation matrix F with F|i>|k> = |k>|i>.
/// Hermitian and unitary; F^2 = I exactly.
ComplexMatrix build_flip(Eigen::Index d);

/// D = Tr[F rho] = sum_{i,j} c_{ij,ji}, evaluated as the O(d^2) sum of
/// index-swapped entries without materializing F. Requires a square
/// environment; throws NumericError if the imaginary residue exceeds 1e-9
/// (a corrupted state), otherwise the residue is discarded.
double flip_expectation(const EnvState& env);

/// Weights on the symmetric and antisymmetric subspaces.
struct FlipDecomposition {
  double p_sym;
  double p_anti;
};

/// p_sym = Tr[P_sym rho], p_anti = Tr[P_anti rho] with P_sym = (I+F)/2,
/// P_anti = (I-F)/2.
FlipDecomposition flip_decompose(const EnvState& env);

enum class WitnessResult { witnessed, inconclusive };

/// D < 0 witnesses entanglement; separable states always have D >= 0.
/// Never claims separability, so a non-negative D is only inconclusive.
WitnessResult witness_entanglement(const EnvState& env);

/// Analytic twirl: projection onto the commutant of {U (x) U}, i.e. the
/// Werner state p_sym P_sym/Tr[P_sym] + p_anti P_anti/Tr[P_anti].
/// Preserves D and is idempotent.
EnvState twirl(const EnvState& env);

/// rho -> (U (x) V) rho (U (x) V)^dag. Inputs must be unitary within
/// tol::unitarity.
EnvState apply_local_unitary(const EnvState& env, const ComplexMatrix& u,
                             const ComplexMatrix& v);

// Named analytic environments (d = 2 unless stated otherwise).

/// (|01> - |10>)/sqrt(2); D = -1.
EnvState make_singlet();
/// (|01> + |10>)/sqrt(2); D = +1.
EnvState make_symmetric_bell();
/// Product of two pure states with real inner product c; D = c^2.
EnvState make_product_with_overlap(double c);
/// Werner state on d (x) d with the given flip expectation.
EnvState make_werner(Eigen::Index d, double d_value);

}  // namespace flipsim
