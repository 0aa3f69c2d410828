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

#include "doctest.h"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace flipsim;

namespace {

const FilterShape ref_filter(FilterKind::rectangular, 810.0, 2.7);

// Grid scan for the first minimum of sin(x)/x on [pi, 2 pi].
struct SincMin {
  double x;
  double value;
};

SincMin scan_first_sinc_minimum() {
  SincMin best{0.0, 1.0};
  for (double x = std::numbers::pi; x < 2.0 * std::numbers::pi; x += 1e-5) {
    const double v = std::sin(x) / x;
    if (v < best.value) best = SincMin{x, v};
  }
  return best;
}

double quadrature_norm(const FilterShape& f, int bins, double margin) {
  const SpectralGrid grid = SpectralGrid::for_filter(f, bins, margin);
  double s = 0.0;
  for (int i = 0; i < grid.n_bins; ++i) {
    s += std::norm(f.amplitude(grid.midpoint(i)));
  }
  return s * grid.bin_width();
}

}  // namespace

TEST_SUITE_BEGIN("spectral");

TEST_CASE("wavelength conversion against the pocket-calculator oracle") {
  const AngularBand band = wavelength_to_angular(810.0, 2.7);
  const double c = 299792.458;
  CHECK(band.omega_c ==
        doctest::Approx(2.0 * std::numbers::pi * c / 810.0).epsilon(1e-14));
  CHECK(band.omega_c == doctest::Approx(2325.49).epsilon(1e-4));
  CHECK(band.v == doctest::Approx(2.0 * std::numbers::pi * c * 2.7 /
                                  (810.0 * 810.0))
                      .epsilon(1e-14));
  CHECK(band.v == doctest::Approx(7.7516).epsilon(1e-4));

  const AngularBand doubled = wavelength_to_angular(810.0, 5.4);
  CHECK(doubled.v == doctest::Approx(2.0 * band.v).epsilon(1e-14));
  CHECK_THROWS_AS(wavelength_to_angular(-1.0, 2.7), std::invalid_argument);
}

TEST_CASE("rectangular filter amplitude with inclusive edges") {
  const double v = ref_filter.width();
  const double wc = ref_filter.omega_center();
  const double expected = 1.0 / std::sqrt(v);
  CHECK(ref_filter.amplitude(wc).real() == doctest::Approx(expected));
  CHECK(ref_filter.amplitude(wc + 0.5 * v).real() ==
        doctest::Approx(expected));
  CHECK(ref_filter.amplitude(wc - 0.5 * v).real() ==
        doctest::Approx(expected));
  CHECK(ref_filter.amplitude(wc + v) == Complex(0.0, 0.0));
}

TEST_CASE("filter amplitudes are unit normalized under quadrature") {
  CHECK(quadrature_norm(ref_filter, 4096, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-8));
  const FilterShape gauss(FilterKind::gaussian, 810.0, 2.7);
  CHECK(quadrature_norm(gauss, 4096, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("build_spdc at zero delay is real and confined to the support") {
  const SpectralGrid grid = SpectralGrid::for_filter(ref_filter, 4096, 2.0);
  const SpdcState state = build_spdc(ref_filter, 0.0, grid);
  const double v = ref_filter.width();
  const double wc = ref_filter.omega_center();
  int populated = 0;
  for (int i = 0; i < grid.n_bins; ++i) {
    const Complex a = state.amplitudes()(i);
    CHECK(a.imag() == 0.0);
    CHECK(a.real() >= 0.0);
    if (std::abs(a) > 0.0) {
      ++populated;
      CHECK(std::abs(grid.midpoint(i) - wc) <= 0.5 * v + 1e-9);
    }
  }
  // Margin 2 with 4096 bins puts exactly half of them inside the support.
  CHECK(populated == 2048);
}

TEST_CASE("spdc amplitudes stay normalized over random delays and widths") {
  test::Rng rng(41);
  std::uniform_real_distribution<double> fwhm(0.5, 8.0);
  std::uniform_real_distribution<double> delay(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const FilterShape f(i % 2 == 0 ? FilterKind::rectangular
                                   : FilterKind::gaussian,
                        810.0, fwhm(rng));
    const SpectralGrid grid = SpectralGrid::for_filter(f, 2048, 2.0);
    const SpdcState state = build_spdc(f, delay(rng), grid);
    const double norm =
        state.amplitudes().squaredNorm() * grid.bin_width();
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("build_spdc rejects grids that miss the support") {
  const SpectralGrid narrow(128, ref_filter.omega_center() - 1.0,
                            ref_filter.omega_center() + 1.0);
  CHECK_THROWS_AS(build_spdc(ref_filter, 0.0, narrow), std::invalid_argument);
}

TEST_CASE("sinc closed form fixed points") {
  CHECK(sinc_closed_form(0.0, 7.75) == 1.0);
  CHECK(sinc_closed_form(std::numbers::pi / 7.75, 7.75) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sinc_closed_form(0.5 * std::numbers::pi / 7.75, 7.75) ==
        doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
  // Series branch continuity near zero.
  CHECK(sinc_closed_form(1e-5, 1.0) ==
        doctest::Approx(1.0 - 1e-10 / 6.0).epsilon(1e-12));
}

TEST_CASE("quadrature D is 1 at zero delay and matches the sinc law") {
  const SpectralGrid grid = SpectralGrid::for_filter(ref_filter, 4096, 2.0);
  const double v = ref_filter.width();
  CHECK(spdc_flip_expectation(build_spdc(ref_filter, 0.0, grid)) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(spdc_flip_expectation(
            build_spdc(ref_filter, std::numbers::pi / v, grid))) < 1e-6);

  double max_err = 0.0;
  for (double x = -10.0; x <= 10.0; x += 0.37) {
    const double dt = x / v;
    const double q = spdc_flip_expectation(build_spdc(ref_filter, dt, grid));
    max_err = std::max(max_err, std::abs(q - sinc_closed_form(dt, v)));
  }
  CHECK(max_err < 1e-6);
}

TEST_CASE("quadrature D at the first sinc minimum") {
  const SincMin m = scan_first_sinc_minimum();
  CHECK(m.x == doctest::Approx(4.4934).epsilon(1e-4));
  CHECK(m.value == doctest::Approx(-0.2172).epsilon(1e-3));
  const SpectralGrid grid = SpectralGrid::for_filter(ref_filter, 4096, 2.0);
  const double dt = m.x / ref_filter.width();
  CHECK(spdc_flip_expectation(build_spdc(ref_filter, dt, grid)) ==
        doctest::Approx(m.value).epsilon(1e-4));
}

TEST_CASE("quadrature D is even in the delay") {
  const SpectralGrid grid = SpectralGrid::for_filter(ref_filter, 2048, 2.0);
  for (double dt : {0.05, 0.17, 0.31, 0.52, 0.9}) {
    const double plus = spdc_flip_expectation(build_spdc(ref_filter, dt, grid));
    const double minus =
        spdc_flip_expectation(build_spdc(ref_filter, -dt, grid));
    CHECK(std::abs(plus - minus) < 1e-10);
  }
}

TEST_CASE("gaussian filter follows its own closed form") {
  const FilterShape gauss(FilterKind::gaussian, 810.0, 2.7);
  const SpectralGrid grid = SpectralGrid::for_filter(gauss, 4096, 1.5);
  const double sigma =
      gauss.width() / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  for (double dt : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    const double expected = std::exp(-sigma * sigma * dt * dt);
    CHECK(spdc_flip_expectation(build_spdc(gauss, dt, grid)) ==
          doctest::Approx(expected).epsilon(1e-7));
  }
}

TEST_CASE("spdc_to_env produces a pure trace-one environment") {
  const SpectralGrid grid = SpectralGrid::for_filter(ref_filter, 4096, 2.0);
  const SpdcState state = build_spdc(ref_filter, 0.2, grid);
  const EnvState env = spdc_to_env(state, 8);
  CHECK(env.dim_s() == 8);
  CHECK(std::abs(env.rho().matrix().trace().real() - 1.0) < 1e-10);
  CHECK(purity(env.rho()) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spdc_to_env tracks the quadrature D") {
  const SpectralGrid grid = SpectralGrid::for_filter(ref_filter, 4096, 2.0);
  // At zero delay the truncation is exact for any dimension.
  const SpdcState at_zero = build_spdc(ref_filter, 0.0, grid);
  CHECK(flip_expectation(spdc_to_env(at_zero, 16)) ==
        doctest::Approx(1.0).epsilon(1e-3));

  // Negative-D shoulder: the d = 16 truncation must still witness
  // entanglement.
  const double dt = 4.4934 / ref_filter.width();
  const SpdcState shoulder = build_spdc(ref_filter, dt, grid);
  const EnvState env16 = spdc_to_env(shoulder, 16);
  CHECK(witness_entanglement(env16) == WitnessResult::witnessed);
  CHECK(flip_expectation(env16) ==
        doctest::Approx(spdc_flip_expectation(shoulder)).epsilon(0.05));
}

TEST_CASE("spdc_to_env truncation error shrinks monotonically") {
  const SpectralGrid grid = SpectralGrid::for_filter(ref_filter, 4096, 2.0);
  const SpdcState state = build_spdc(ref_filter, 0.25, grid);
  const double target = spdc_flip_expectation(state);
  double prev = 1e9;
  for (Eigen::Index d : {4, 8, 16, 32}) {
    const double err =
        std::abs(target - flip_expectation(spdc_to_env(state, d)));
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
  CHECK(prev < 5e-4);
}

TEST_CASE("spdc_to_env rejects dims beyond the grid rank") {
  const FilterShape f(FilterKind::rectangular, 810.0, 2.7);
  const SpectralGrid tiny = SpectralGrid::for_filter(f, 16, 2.0);
  const SpdcState state = build_spdc(f, 0.0, tiny);
  CHECK_THROWS_AS(spdc_to_env(state, 12), std::invalid_argument);
}

TEST_CASE("hom scan across the dip and shoulder") {
  std::vector<double> delays{0.0, 0.2, std::numbers::pi / ref_filter.width(),
                             4.4934 / ref_filter.width()};
  const auto points = hom_scan(ref_filter, delays, 2.0);
  CHECK(points.size() == 4);
  CHECK(points[0].d_value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(points[0].r_rel == doctest::Approx(0.0).epsilon(1e-9));
  // Exact construction identities.
  for (const HomPoint& p : points) {
    CHECK(p.p_coincidence == 0.5 * (1.0 - p.d_value));
    CHECK(p.r_rel == 1.0 - p.d_value);
    CHECK(p.p_coincidence >= 0.0);
    CHECK(p.p_coincidence <= 1.0);
  }
  // Raised shoulder: R_rel = 1 - sinc minimum = 1.217.
  CHECK(points[3].r_rel == doctest::Approx(1.2172).epsilon(1e-3));
  // First unity crossing of R_rel sits at pi / v.
  CHECK(points[2].r_rel == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hom scan validates the reference point") {
  CHECK_THROWS_AS(hom_scan(ref_filter, {0.0}, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(hom_scan(ref_filter, {0.0}, 2.0, 1.5),
                  std::invalid_argument);
}

TEST_CASE("mode overlap scales the dip") {
  const auto points = hom_scan(ref_filter, {0.0}, 2.0, 0.964);
  CHECK(points[0].d_value == doctest::Approx(0.964).epsilon(1e-9));
  CHECK(points[0].r_rel == doctest::Approx(0.036).epsilon(1e-7));
}

TEST_CASE("explicit beam splitter reproduces (1 - D)/2") {
  // Named environments first.
  CHECK(beam_splitter_coincidence_probability(make_singlet()) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(beam_splitter_coincidence_probability(make_symmetric_bell()) ==
        doctest::Approx(0.0).epsilon(1e-12));
  for (double c : {0.0, 0.3, 0.8}) {
    CHECK(beam_splitter_coincidence_probability(make_product_with_overlap(c)) ==
          doctest::Approx(0.5 * (1.0 - c * c)).epsilon(1e-12));
  }
  // Truncated spectral environments, including the negative-D shoulder.
  const SpectralGrid grid = SpectralGrid::for_filter(ref_filter, 2048, 2.0);
  for (double x : {0.0, 1.2, 3.14159, 4.4934}) {
    const SpdcState state =
        build_spdc(ref_filter, x / ref_filter.width(), grid);
    for (Eigen::Index d : {4, 8}) {
      const EnvState env = spdc_to_env(state, d);
      const double lhs = beam_splitter_coincidence_probability(env);
      const double rhs = 0.5 * (1.0 - flip_expectation(env));
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
  }
  // Random mixed environments.
  test::Rng rng(42);
  for (int i = 0; i < 20; ++i) {
    const EnvState env = test::random_env(3, rng);
    CHECK(std::abs(beam_splitter_coincidence_probability(env) -
                   0.5 * (1.0 - flip_expectation(env))) < 1e-10);
  }
}

TEST_SUITE_END();
