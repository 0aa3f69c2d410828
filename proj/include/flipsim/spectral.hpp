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

// Two-photon spectral states from a degenerate down-conversion source with a
// monochromatic pump: photon pairs are perfectly anticorrelated in frequency
// (omega_a + omega_b = omega_0) with amplitude phi(omega) phi(omega_0 - omega)
// e^{-i omega dt}, phi being the spectral filter. The flip expectation
// D(dt) follows by quadrature of the overlap integral; for an ideal
// rectangular filter of width v it collapses to sinc(v dt) = sin(v dt)/(v dt).
// A balanced beam splitter then gives the coincidence probability
// P_C = (1 - D)/2, the Hong-Ou-Mandel dip.
//
// Units: angular frequency in rad/ps, delays in ps. Wavelengths enter in nm
// and are converted once, at FilterShape construction.

#pragma once

#include "flipsim/environment.hpp"

#include <vector>

namespace flipsim {

/// Speed of light in nm/ps.
inline constexpr double kSpeedOfLightNmPerPs = 299792.458;

enum class FilterKind { rectangular, gaussian };

struct AngularBand {
  double omega_c;  // central angular frequency, rad/ps
  double v;        // angular-frequency width (FWHM image), rad/ps
};

/// omega_c = 2 pi c / lambda; v = 2 pi c dlambda / lambda^2.
AngularBand wavelength_to_angular(double center_nm, double fwhm_nm);

/// Spectral amplitude phi(omega) with unit L2 norm. Rectangular: 1/sqrt(v)
/// on [omega_c - v/2, omega_c + v/2], edges inclusive. Gaussian: |phi|^2 is
/// a normal density whose FWHM matches the configured width.
class FilterShape {
 public:
  FilterShape(FilterKind kind, double center_nm, double fwhm_nm);

  FilterKind kind() const { return kind_; }
  double center_wavelength_nm() const { return center_nm_; }
  double fwhm_nm() const { return fwhm_nm_; }
  double omega_center() const { return band_.omega_c; }
  double width() const { return band_.v; }
  /// Nominal support half-width: v/2 for rectangular, 6 sigma for gaussian.
  double support_halfwidth() const;

  Complex amplitude(double omega) const;

 private:
  FilterKind kind_;
  double center_nm_, fwhm_nm_;
  AngularBand band_;
};

/// Uniform frequency grid; quadrature is midpoint on the bins.
struct SpectralGrid {
  int n_bins;
  double omega_min;
  double omega_max;

  SpectralGrid(int n_bins, double omega_min, double omega_max);

  /// Grid centered on the filter, spanning margin * support on each side.
  /// With the default margin 2 and n_bins divisible by 4, rectangular
  /// filter edges fall exactly on bin boundaries, which keeps the midpoint
  /// quadrature clean across the discontinuity.
  static SpectralGrid for_filter(const FilterShape& filter, int n_bins = 4096,
                                 double margin = 2.0);

  double bin_width() const {
    return (omega_max - omega_min) / static_cast<double>(n_bins);
  }
  double midpoint(int i) const {
    return omega_min + (static_cast<double>(i) + 0.5) * bin_width();
  }
  /// True when [center - margin*hw, center + margin*hw] fits in the grid.
  bool covers(const FilterShape& filter, double margin) const;
};

/// Discretized two-photon state: amplitudes over the omega_a bins, with
/// omega_b = omega_0 - omega_a slaved. Normalized so that
/// sum |amp|^2 * d_omega = 1.
class SpdcState {
 public:
  SpdcState(const FilterShape& filter, double delay_ps,
            const SpectralGrid& grid, ComplexVector amplitudes);

  const FilterShape& filter() const { return filter_; }
  double pump_frequency() const { return 2.0 * filter_.omega_center(); }
  double delay() const { return delay_ps_; }
  const SpectralGrid& grid() const { return grid_; }
  const ComplexVector& amplitudes() const { return amps_; }

 private:
  FilterShape filter_;
  double delay_ps_;
  SpectralGrid grid_;
  ComplexVector amps_;
};

/// amplitudes[i] ~ phi(omega_i) phi(omega_0 - omega_i) e^{-i omega_i dt},
/// normalized on the grid. Throws if the grid does not cover the filter
/// support with margin >= 1.5.
SpdcState build_spdc(const FilterShape& filter, double delay_ps,
                     const SpectralGrid& grid);

/// D by midpoint quadrature of the overlap integral
/// int psi*(omega) psi(omega_0 - omega) d_omega; equals 1 at dt = 0 by
/// construction (the filtered product amplitude is mirror symmetric).
double spdc_flip_expectation(const SpdcState& state);

/// sin(v dt)/(v dt); 1 at v dt = 0.
double sinc_closed_form(double delay_ps, double v);

/// Projects the two-photon wavefunction onto truncation_dim orthonormal
/// spectral modes per photon (contiguous coarse bins over the common filter
/// support; the coarse kernel is antidiagonal so this is its Schmidt form).
/// The result is a pure EnvState whose flip expectation converges to the
/// quadrature D as truncation_dim grows. Throws if truncation_dim exceeds
/// the number of populated grid bins.
EnvState spdc_to_env(const SpdcState& state, Eigen::Index truncation_dim);

struct HomPoint {
  double delay_ps;
  double d_value;        // D in force at this delay (mode overlap applied)
  double p_coincidence;  // (1 - D)/2
  double r_rel;          // coincidence rate relative to the far-delay rate
};

/// HOM scan over the given delays. The reference delay is validated to sit
/// far from the dip (|D(reference)| below a small gate); rates are then
/// normalized by the asymptotic far-delay rate so that r_rel = 1 - D holds
/// identically. mode_overlap in [0, 1] scales D to emulate non-ideal
/// visibility. Delay points are independent; evaluating them in parallel is
/// safe, output order follows input order.
std::vector<HomPoint> hom_scan(const FilterShape& filter,
                               const std::vector<double>& delays,
                               double reference_delay_ps,
                               double mode_overlap = 1.0, int n_bins = 4096,
                               double margin = 2.0);

/// Explicit balanced-beam-splitter model: transforms the two-photon input by
/// a'(w) = [i c'(w) + d'(w)]/sqrt(2), b'(w) = [c'(w) + i d'(w)]/sqrt(2) and
/// post-selects one photon per output arm. Independent of the flip-trace
/// path; used to check P_C = (1 - D)/2.
double beam_splitter_coincidence_probability(const EnvState& env);

}  // namespace flipsim
