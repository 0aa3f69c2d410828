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

// Qubit-state transfer by partial exchange, projective measurement and
// feed-forward, plus its mirror (quantum erasure). The source qubit carries
// an equatorial state (|0,1> + e^{i theta} |1,0>)/sqrt(2); swapping one rail
// of each qubit and post-selecting on one photon per qubit entangles the
// qubits with their environments. Measuring the source in the |+->
// basis and applying a conditional pi-flip leaves the target in
//   rho_T = (1+D)/2 |Psi><Psi| + (1-D)/2 |Psi_perp><Psi_perp|,
// so the environment enters only through D = Tr[F rho_env]. The measurement
// and feed-forward never read theta.

#pragma once

#include "flipsim/environment.hpp"

namespace flipsim {

struct EquatorialPhase {
  double theta_rad;
  static EquatorialPhase radians(double t) { return EquatorialPhase{t}; }
  static EquatorialPhase degrees(double deg);
};

/// (|0,1> + e^{i theta} |1,0>)/sqrt(2).
QubitState make_source(EquatorialPhase phase);

/// The fixed target input (|0,1> + |1,0>)/sqrt(2).
QubitState make_target();

/// Post-selected state of qubits S, T and the joint environment after the
/// rail swap. Index layout: ((s*2 + t) * d + i) * d + k with s, t the
/// dual-rail indices and (i, k) the environment pair.
struct Composite {
  DensityMatrix state;
  Eigen::Index env_dim;
  /// Probability that the post-selection (one photon per qubit) succeeds.
  double post_select_prob;
};

/// Builds the post-selected composite state. The source must be a pure
/// equatorial state and the target the fixed (|0,1> + |1,0>)/sqrt(2) input;
/// the environment must have equal subsystem dims. The branch where the
/// photons were exchanged carries swapped environment indices.
Composite partial_exchange(const QubitState& source, const QubitState& target,
                           const EnvState& env);

struct TransferOutcome {
  DensityMatrix rho_plus;       // conditional state on the "+" outcome
  DensityMatrix rho_minus;      // conditional state on the "-" outcome
  DensityMatrix rho_corrected;  // after feed-forward (and sign compensation)
  double p_plus;
  double p_minus;
  double d_effective;           // the D value in force
};

/// Projects qubit S on |+-> = (|0,1> +- |1,0>)/sqrt(2); the "-" outcome
/// triggers the pi-flip |1,0>_T -> -|1,0>_T. With compensate_sign set and
/// D < 0 a further pi-flip is applied, turning D into |D| in the output.
/// The D in force is recovered from the composite's own environment
/// marginal, never from the phase.
TransferOutcome measure_and_feedforward(const Composite& composite,
                                        bool compensate_sign = false);

/// Closed-form outcome for a given D in [-1, 1]: overlap with the input is
/// (1+D)/2 and the eigenvalues are (1+-D)/2. Bypasses the composite
/// simulation entirely.
TransferOutcome transfer_analytic(EquatorialPhase phase, double d_value);

/// Quantum erasure: the same measurement and feed-forward with the roles of
/// S and T swapped, concentrating the phase back onto qubit S. The role
/// swap includes the deterministic rail relabeling of the reconstructed
/// qubit, after which the output obeys the same closed form with the same D
/// and matches the transfer output entrywise.
TransferOutcome erase(const Composite& composite, bool compensate_sign = false);

}  // namespace flipsim
