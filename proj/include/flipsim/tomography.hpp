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

// Three-basis qubit measurement with Poissonian counting statistics and
// detector-efficiency imbalance, and maximum-likelihood reconstruction by
// the RrhoR fixed-point iteration rho <- N[R(rho) rho R(rho)] with
// R(rho) = sum_k (n_k / Tr[Pi_k rho]) Pi_k. Iterates stay positive
// semi-definite and the (per-count) log-likelihood never decreases.

#pragma once

#include "flipsim/quantum_core.hpp"
#include "flipsim/random.hpp"

#include <array>
#include <vector>

namespace flipsim {

enum class BasisLabel { Z, X, Y };

const char* to_string(BasisLabel label);
BasisLabel basis_from_string(const std::string& s);

/// A pair of orthogonal rank-1 projectors summing to the identity.
/// Z: {|0,1>, |1,0>}; X: {(|0,1> +- |1,0>)/sqrt(2)};
/// Y: {(|0,1> +- i |1,0>)/sqrt(2)}.
struct MeasurementBasis {
  BasisLabel label;
  std::array<ComplexMatrix, 2> projectors;

  static MeasurementBasis standard(BasisLabel label);
  static std::array<MeasurementBasis, 3> standard_three();
};

/// Detector counts for one basis. Simulated counts are integers; efficiency
/// correction turns them into real-valued rates that are carried forward as
/// weights.
struct CountRecord {
  BasisLabel basis;
  std::array<double, 2> counts;
  std::array<double, 2> efficiencies;
};

/// counts[k] ~ Poisson(mean_total_per_basis * eta_k * Tr[Pi_k rho]),
/// deterministic for a given seed.
std::vector<CountRecord> simulate_counts(
    const DensityMatrix& rho, const std::array<MeasurementBasis, 3>& bases,
    double mean_total_per_basis, const std::array<double, 2>& efficiencies,
    std::uint64_t seed);

/// Scales counts by 1/eta_k. Throws on a non-positive efficiency.
CountRecord correct_efficiencies(const CountRecord& record);

struct ReconstructionResult {
  DensityMatrix rho_rec;
  double log_likelihood;  // per total count, sum_k (n_k/N) ln Tr[Pi_k rho]
  int iterations;
  bool converged;
  std::vector<double> log_likelihood_trace;  // one entry per iteration
};

/// Maximum-likelihood reconstruction from (efficiency-corrected) count
/// records. Starts from I/2 and stops when the log-likelihood gain drops
/// below tol or max_iters is reached. Requires all three bases and at least
/// one positive count per basis.
ReconstructionResult mle_reconstruct(const std::vector<CountRecord>& records,
                                     int max_iters = 10000, double tol = 1e-10);

struct StateMetrics {
  double fidelity;     // Uhlmann fidelity vs. the theory state
  double overlap;      // <Psi_in| rho |Psi_in>
  double purity;
  RealVector eigenvalues;  // descending
};

StateMetrics analyze(const DensityMatrix& rho_rec,
                     const DensityMatrix& rho_theory,
                     const ComplexVector& psi_in);

}  // namespace flipsim
