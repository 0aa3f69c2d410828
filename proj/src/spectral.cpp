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

#include "flipsim/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace flipsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Reference points closer to the dip than this D magnitude are rejected.
// An ideal rectangular filter at the conventional 2 ps reference still has
// |D| = |sinc(v dt)| ~ 0.013, so the gate must sit above that.
constexpr double kReferenceGate = 0.02;

constexpr double kCoverageMargin = 1.5;

double gaussian_sigma(double v) {
  // |phi|^2 has FWHM v; sigma of the underlying normal density.
  return v / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

}  // namespace

AngularBand wavelength_to_angular(double center_nm, double fwhm_nm) {
  if (center_nm <= 0.0 || fwhm_nm <= 0.0) {
    throw std::invalid_argument(
        "wavelength_to_angular: wavelengths must be positive");
  }
  const double omega_c = 2.0 * kPi * kSpeedOfLightNmPerPs / center_nm;
  const double v =
      2.0 * kPi * kSpeedOfLightNmPerPs * fwhm_nm / (center_nm * center_nm);
  return AngularBand{omega_c, v};
}

FilterShape::FilterShape(FilterKind kind, double center_nm, double fwhm_nm)
    : kind_(kind),
      center_nm_(center_nm),
      fwhm_nm_(fwhm_nm),
      band_(wavelength_to_angular(center_nm, fwhm_nm)) {}

double FilterShape::support_halfwidth() const {
  if (kind_ == FilterKind::rectangular) return 0.5 * band_.v;
  return 6.0 * gaussian_sigma(band_.v);
}

Complex FilterShape::amplitude(double omega) const {
  if (kind_ == FilterKind::rectangular) {
    const double half = 0.5 * band_.v;
    if (omega >= band_.omega_c - half && omega <= band_.omega_c + half) {
      return Complex(1.0 / std::sqrt(band_.v), 0.0);
    }
    return Complex(0.0, 0.0);
  }
  const double sigma = gaussian_sigma(band_.v);
  const double x = omega - band_.omega_c;
  const double norm = std::pow(2.0 * kPi * sigma * sigma, -0.25);
  return Complex(norm * std::exp(-x * x / (4.0 * sigma * sigma)), 0.0);
}

SpectralGrid::SpectralGrid(int bins, double lo, double hi)
    : n_bins(bins), omega_min(lo), omega_max(hi) {
  if (n_bins < 2) {
    throw std::invalid_argument("SpectralGrid: n_bins must be >= 2");
  }
  if (!(omega_max > omega_min)) {
    throw std::invalid_argument("SpectralGrid: omega_max must exceed omega_min");
  }
}

SpectralGrid SpectralGrid::for_filter(const FilterShape& filter, int n_bins,
                                      double margin) {
  if (margin < kCoverageMargin) {
    throw std::invalid_argument("SpectralGrid::for_filter: margin must be >= 1.5");
  }
  const double half = margin * filter.support_halfwidth();
  return SpectralGrid(n_bins, filter.omega_center() - half,
                      filter.omega_center() + half);
}

bool SpectralGrid::covers(const FilterShape& filter, double margin) const {
  const double half = margin * filter.support_halfwidth();
  return omega_min <= filter.omega_center() - half &&
         omega_max >= filter.omega_center() + half;
}

SpdcState::SpdcState(const FilterShape& filter, double delay_ps,
                     const SpectralGrid& grid, ComplexVector amplitudes)
    : filter_(filter), delay_ps_(delay_ps), grid_(grid),
      amps_(std::move(amplitudes)) {
  if (amps_.size() != grid_.n_bins) {
    throw std::invalid_argument("SpdcState: amplitude count != n_bins");
  }
  const double norm = amps_.squaredNorm() * grid_.bin_width();
  if (std::abs(norm - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "SpdcState: amplitudes not normalized, sum|a|^2 dw = " << norm;
    throw std::invalid_argument(os.str());
  }
}

SpdcState build_spdc(const FilterShape& filter, double delay_ps,
                     const SpectralGrid& grid) {
  if (!grid.covers(filter, kCoverageMargin)) {
    throw std::invalid_argument(
        "build_spdc: grid does not cover the filter support with margin 1.5");
  }
  const double omega_0 = 2.0 * filter.omega_center();
  ComplexVector amps(grid.n_bins);
  double norm2 = 0.0;
  for (int i = 0; i < grid.n_bins; ++i) {
    const double w = grid.midpoint(i);
    const Complex mag = filter.amplitude(w) * filter.amplitude(omega_0 - w);
    const Complex phase(std::cos(w * delay_ps), -std::sin(w * delay_ps));
    amps(i) = mag * phase;
    norm2 += std::norm(amps(i));
  }
  norm2 *= grid.bin_width();
  if (norm2 <= 0.0) {
    throw std::invalid_argument(
        "build_spdc: filter support carries no amplitude on this grid");
  }
  amps /= std::sqrt(norm2);
  return SpdcState(filter, delay_ps, grid, std::move(amps));
}

double spdc_flip_expectation(const SpdcState& state) {
  // D = int psi*(w) psi(w0 - w) dw. The mirrored amplitude is evaluated from
  // the filter directly (the grid need not contain w0 - w as a midpoint);
  // both factors share the discrete normalization of the state, so D(0) = 1
  // exactly. The integrand reduces to |phi phi~|^2 e^{i (2w - w0) dt}.
  const FilterShape& filter = state.filter();
  const SpectralGrid& grid = state.grid();
  const double omega_0 = 2.0 * filter.omega_center();
  const double dt = state.delay();
  double raw_norm2 = 0.0;
  Complex overlap(0.0, 0.0);
  for (int i = 0; i < grid.n_bins; ++i) {
    const double w = grid.midpoint(i);
    const double mag2 =
        std::norm(filter.amplitude(w) * filter.amplitude(omega_0 - w));
    if (mag2 == 0.0) continue;
    const double arg = (2.0 * w - omega_0) * dt;
    overlap += mag2 * Complex(std::cos(arg), std::sin(arg));
    raw_norm2 += mag2;
  }
  if (raw_norm2 <= 0.0) {
    throw NumericError("spdc_flip_expectation: empty spectral support");
  }
  overlap /= raw_norm2;
  if (std::abs(overlap.imag()) > 1e-9) {
    throw NumericError("spdc_flip_expectation: imaginary residue exceeds 1e-9");
  }
  return overlap.real();
}

double sinc_closed_form(double delay_ps, double v) {
  const double x = delay_ps * v;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

EnvState spdc_to_env(const SpdcState& state, Eigen::Index truncation_dim) {
  if (truncation_dim < 2) {
    throw std::invalid_argument("spdc_to_env: truncation_dim must be >= 2");
  }
  const SpectralGrid& grid = state.grid();
  const ComplexVector& amps = state.amplitudes();

  // Populated bin range (the filter support on this grid).
  int lo = -1, hi = -1;
  for (int i = 0; i < grid.n_bins; ++i) {
    if (std::abs(amps(i)) > 1e-14) {
      if (lo < 0) lo = i;
      hi = i;
    }
  }
  if (lo < 0 || hi - lo + 1 < truncation_dim) {
    throw std::invalid_argument(
        "spdc_to_env: truncation_dim exceeds the populated grid rank");
  }

  // Contiguous coarse modes over the support; mode m of one photon pairs
  // with mode d-1-m of the other because the pair frequencies mirror about
  // w0/2. Group boundaries are made palindromic so that the mirror of group
  // d-1-m is exactly group m. Averaging the bin amplitudes per group is the
  // projection <h_m (x) h_{d-1-m} | psi> onto the flat group modes; the
  // coarse kernel is antidiagonal with these averages as its singular
  // values, i.e. already in Schmidt form.
  const Eigen::Index d = truncation_dim;
  const int support = hi - lo + 1;
  // Assignment of support bins to groups, symmetric by construction:
  // g(mirror(r)) = d - 1 - g(r). A self-mirrored central bin is droppable
  // only into a central group, which exists only for odd d; for even d it
  // is left out of the projection (the truncation discards mass anyway).
  auto group_of = [&](int r) -> Eigen::Index {
    const int mirror = support - 1 - r;
    if (r < mirror) {
      return static_cast<Eigen::Index>(
          (static_cast<long long>(2 * r + 1) * d) / (2LL * support));
    }
    if (r > mirror) {
      return d - 1 -
             static_cast<Eigen::Index>(
                 (static_cast<long long>(2 * mirror + 1) * d) /
                 (2LL * support));
    }
    return (d % 2 == 1) ? (d - 1) / 2 : Eigen::Index(-1);
  };
  ComplexVector gamma = ComplexVector::Zero(d);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(d);
  for (int i = lo; i <= hi; ++i) {
    const Eigen::Index m = group_of(i - lo);
    if (m < 0) continue;
    gamma(m) += amps(i);
    counts(m) += 1.0;
  }
  if (counts.minCoeff() <= 0.0) {
    throw std::invalid_argument(
        "spdc_to_env: truncation_dim exceeds the populated grid rank");
  }
  gamma = gamma.cwiseQuotient(counts.cast<Complex>());
  ComplexVector joint = ComplexVector::Zero(d * d);
  for (Eigen::Index m = 0; m < d; ++m) {
    joint(m * d + (d - 1 - m)) = gamma(m);
  }
  const double norm = joint.norm();
  if (norm <= 0.0) {
    throw NumericError("spdc_to_env: truncated state has zero norm");
  }
  joint /= norm;
  return EnvState::pure(d, d, joint);
}

std::vector<HomPoint> hom_scan(const FilterShape& filter,
                               const std::vector<double>& delays,
                               double reference_delay_ps, double mode_overlap,
                               int n_bins, double margin) {
  if (mode_overlap < 0.0 || mode_overlap > 1.0) {
    throw std::invalid_argument("hom_scan: mode_overlap must lie in [0, 1]");
  }
  const SpectralGrid grid = SpectralGrid::for_filter(filter, n_bins, margin);
  const double d_ref =
      mode_overlap *
      spdc_flip_expectation(build_spdc(filter, reference_delay_ps, grid));
  if (std::abs(d_ref) >= kReferenceGate) {
    std::ostringstream os;
    os << "hom_scan: reference delay " << reference_delay_ps
       << " ps is too close to the dip (|D| = " << std::abs(d_ref) << ")";
    throw std::invalid_argument(os.str());
  }
  std::vector<HomPoint> points;
  points.reserve(delays.size());
  for (double dt : delays) {
    const double d =
        mode_overlap * spdc_flip_expectation(build_spdc(filter, dt, grid));
    points.push_back(HomPoint{dt, d, 0.5 * (1.0 - d), 1.0 - d});
  }
  return points;
}

double beam_splitter_coincidence_probability(const EnvState& env) {
  if (!env.square()) {
    throw std::invalid_argument(
        "beam_splitter_coincidence_probability: environment must be square");
  }
  const Eigen::Index d = env.dim_s();
  EigResult eig = eig_hermitian(env.rho().matrix());
  double p_c = 0.0;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    const double weight = eig.eigenvalues(k);
    if (weight <= 1e-15) continue;
    // Pure component C[m,n]: photon in arm a carries mode m, arm b mode n.
    // After a'(w) = [i c' + d']/sqrt(2), b'(w) = [c' + i d']/sqrt(2) the
    // one-photon-per-output amplitude for (c-mode m, d-mode n) is
    // (C[n,m] - C[m,n])/2; the i factors stay with the bunched branches.
    const ComplexVector& chi = eig.eigenvectors.col(k);
    double sum = 0.0;
    for (Eigen::Index m = 0; m < d; ++m) {
      for (Eigen::Index n = 0; n < d; ++n) {
        const Complex amp = 0.5 * (chi(n * d + m) - chi(m * d + n));
        sum += std::norm(amp);
      }
    }
    p_c += weight * sum;
  }
  return p_c;
}

}  // namespace flipsim
