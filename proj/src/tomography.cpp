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

#include "flipsim/tomography.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace flipsim {

namespace {

// Rate floor inside R(rho); keeps the iteration finite on boundary states.
constexpr double kRateFloor = 1e-15;

ComplexMatrix projector_from(const ComplexVector& v) {
  return v * v.adjoint();
}

}  // namespace

std::uint64_t sample_poisson(RandomEngine& rng, double lambda) {
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw std::invalid_argument("sample_poisson: lambda must be finite and >= 0");
  }
  if (lambda == 0.0) return 0;
  if (lambda < 10.0) {
    // Inversion by sequential search.
    const double l = std::exp(-lambda);
    double p = 1.0;
    std::uint64_t k = 0;
    do {
      ++k;
      p *= uniform_double(rng);
    } while (p > l);
    return k - 1;
  }
  // Hormann's PTRS transformed rejection (The transformed rejection method
  // for generating Poisson random variables, 1993).
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lambda = std::log(lambda);
  for (;;) {
    double u = uniform_double(rng) - 0.5;
    const double v = uniform_double(rng);
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r && kf >= 0.0) {
      return static_cast<std::uint64_t>(kf);
    }
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = kf * log_lambda - lambda - std::lgamma(kf + 1.0);
    if (lhs <= rhs) {
      return static_cast<std::uint64_t>(kf);
    }
  }
}

const char* to_string(BasisLabel label) {
  switch (label) {
    case BasisLabel::Z: return "Z";
    case BasisLabel::X: return "X";
    case BasisLabel::Y: return "Y";
  }
  return "?";
}

BasisLabel basis_from_string(const std::string& s) {
  if (s == "Z") return BasisLabel::Z;
  if (s == "X") return BasisLabel::X;
  if (s == "Y") return BasisLabel::Y;
  throw std::invalid_argument("basis_from_string: unknown label '" + s + "'");
}

MeasurementBasis MeasurementBasis::standard(BasisLabel label) {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexVector v0(2), v1(2);
  switch (label) {
    case BasisLabel::Z:
      v0 << Complex(1, 0), Complex(0, 0);
      v1 << Complex(0, 0), Complex(1, 0);
      break;
    case BasisLabel::X:
      v0 << Complex(s, 0), Complex(s, 0);
      v1 << Complex(s, 0), Complex(-s, 0);
      break;
    case BasisLabel::Y:
      v0 << Complex(s, 0), Complex(0, s);
      v1 << Complex(s, 0), Complex(0, -s);
      break;
  }
  return MeasurementBasis{label, {projector_from(v0), projector_from(v1)}};
}

std::array<MeasurementBasis, 3> MeasurementBasis::standard_three() {
  return {standard(BasisLabel::Z), standard(BasisLabel::X),
          standard(BasisLabel::Y)};
}

std::vector<CountRecord> simulate_counts(
    const DensityMatrix& rho, const std::array<MeasurementBasis, 3>& bases,
    double mean_total_per_basis, const std::array<double, 2>& efficiencies,
    std::uint64_t seed) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("simulate_counts: state must be 2x2");
  }
  if (mean_total_per_basis <= 0.0) {
    throw std::invalid_argument(
        "simulate_counts: mean_total_per_basis must be positive");
  }
  for (double eta : efficiencies) {
    if (eta <= 0.0 || eta > 1.0) {
      throw std::invalid_argument(
          "simulate_counts: efficiencies must lie in (0, 1]");
    }
  }
  RandomEngine rng(seed);
  std::vector<CountRecord> records;
  records.reserve(bases.size());
  for (const MeasurementBasis& basis : bases) {
    CountRecord rec{basis.label, {0.0, 0.0}, efficiencies};
    for (int k = 0; k < 2; ++k) {
      const double p =
          std::max(0.0, (basis.projectors[static_cast<size_t>(k)] *
                         rho.matrix()).trace().real());
      const double mean =
          mean_total_per_basis * efficiencies[static_cast<size_t>(k)] * p;
      rec.counts[static_cast<size_t>(k)] =
          static_cast<double>(sample_poisson(rng, mean));
    }
    records.push_back(rec);
  }
  return records;
}

CountRecord correct_efficiencies(const CountRecord& record) {
  CountRecord out = record;
  for (int k = 0; k < 2; ++k) {
    const double eta = record.efficiencies[static_cast<size_t>(k)];
    if (eta <= 0.0) {
      throw std::invalid_argument(
          "correct_efficiencies: efficiency must be positive");
    }
    out.counts[static_cast<size_t>(k)] =
        record.counts[static_cast<size_t>(k)] / eta;
    out.efficiencies[static_cast<size_t>(k)] = 1.0;
  }
  return out;
}

ReconstructionResult mle_reconstruct(const std::vector<CountRecord>& records,
                                     int max_iters, double tol) {
  if (records.empty()) {
    throw std::invalid_argument("mle_reconstruct: no count records");
  }
  std::set<BasisLabel> seen;
  double total = 0.0;
  for (const CountRecord& r : records) {
    seen.insert(r.basis);
    if (r.counts[0] < 0.0 || r.counts[1] < 0.0) {
      throw std::invalid_argument("mle_reconstruct: negative counts");
    }
    if (r.counts[0] + r.counts[1] <= 0.0) {
      throw std::invalid_argument(
          "mle_reconstruct: a basis has no counts at all");
    }
    total += r.counts[0] + r.counts[1];
  }
  if (seen.size() < 3) {
    throw std::invalid_argument(
        "mle_reconstruct: records must span all three bases (informationally "
        "complete set)");
  }

  // Flatten to (projector, weight) pairs; weights are per total count so the
  // log-likelihood is an order-one quantity.
  std::vector<std::pair<ComplexMatrix, double>> terms;
  for (const CountRecord& r : records) {
    const MeasurementBasis basis = MeasurementBasis::standard(r.basis);
    for (int k = 0; k < 2; ++k) {
      terms.emplace_back(basis.projectors[static_cast<size_t>(k)],
                         r.counts[static_cast<size_t>(k)] / total);
    }
  }

  auto log_likelihood = [&](const ComplexMatrix& rho) {
    double ll = 0.0;
    for (const auto& [proj, w] : terms) {
      if (w <= 0.0) continue;
      const double p =
          std::max(kRateFloor, (proj * rho).trace().real());
      ll += w * std::log(p);
    }
    return ll;
  };

  ComplexMatrix rho = ComplexMatrix::Identity(2, 2) * 0.5;
  double ll = log_likelihood(rho);
  std::vector<double> trace{ll};
  int iters = 0;
  bool converged = false;
  for (; iters < max_iters; ++iters) {
    ComplexMatrix r_op = ComplexMatrix::Zero(2, 2);
    for (const auto& [proj, w] : terms) {
      if (w <= 0.0) continue;
      const double p = std::max(kRateFloor, (proj * rho).trace().real());
      r_op += (w / p) * proj;
    }
    ComplexMatrix next = r_op * rho * r_op;
    next = 0.5 * (next + next.adjoint().eval());
    const double tr = next.trace().real();
    if (!(tr > 0.0) || !std::isfinite(tr)) {
      throw NumericError("mle_reconstruct: iteration lost normalization");
    }
    rho = next / tr;
    const double ll_next = log_likelihood(rho);
    trace.push_back(ll_next);
    const double gain = ll_next - ll;
    ll = ll_next;
    if (gain < tol) {
      converged = true;
      ++iters;
      break;
    }
  }
  return ReconstructionResult{DensityMatrix(rho), ll, iters, converged,
                              std::move(trace)};
}

StateMetrics analyze(const DensityMatrix& rho_rec,
                     const DensityMatrix& rho_theory,
                     const ComplexVector& psi_in) {
  if (rho_rec.dim() != rho_theory.dim() || psi_in.size() != rho_rec.dim()) {
    throw std::invalid_argument("analyze: dimension mismatch");
  }
  StateMetrics m{};
  m.fidelity = uhlmann_fidelity(rho_rec, rho_theory);
  m.overlap = (psi_in.adjoint() * rho_rec.matrix() * psi_in)(0, 0).real();
  m.purity = purity(rho_rec);
  m.eigenvalues = eig_hermitian(rho_rec.matrix()).eigenvalues;
  return m;
}

}  // namespace flipsim
