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

// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.
// An optional argv[1] pointing at the flipsim binary additionally checks
// process-level determinism of the tomo command.

#include "flipsim/run.hpp"

#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace flipsim;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int g_failures = 0;

void run_criterion(int id, const std::string& name,
                   const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out{false, ""};
  try {
    out = body();
  } catch (const std::exception& e) {
    out = Outcome{false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("[%s] %2d %-28s %s (%.2fs)\n", out.pass ? "PASS" : "FAIL", id,
              name.c_str(), out.detail.c_str(), secs);
  std::fflush(stdout);
  if (!out.pass) ++g_failures;
}

const double kPhasesDeg[] = {0.0, 30.0, 60.0, 90.0, 120.0, 150.0, 180.0};

const FilterShape kRefFilter(FilterKind::rectangular, 810.0, 2.7);

ComplexVector equatorial(double theta_rad) {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexVector v(2);
  v << Complex(s, 0.0),
      s * Complex(std::cos(theta_rad), std::sin(theta_rad));
  return v;
}

double overlap_with(const DensityMatrix& rho, const ComplexVector& psi) {
  return (psi.adjoint() * rho.matrix() * psi)(0, 0).real();
}

// 1. Full composite simulation against the closed form, 200 random
//    environments (d <= 6) x 7 phases, entrywise within 1e-11.
Outcome analytic_oracle_equivalence() {
  test::Rng rng(1001);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const Eigen::Index d = 2 + (n % 5);
    const EnvState env = test::random_env(d, rng);
    const double d_value = flip_expectation(env);
    for (double deg : kPhasesDeg) {
      const EquatorialPhase phase = EquatorialPhase::degrees(deg);
      const Composite comp =
          partial_exchange(make_source(phase), make_target(), env);
      const TransferOutcome sim = measure_and_feedforward(comp);
      const TransferOutcome ana = transfer_analytic(phase, d_value);
      worst = std::max(worst,
                       test::max_abs_diff(sim.rho_corrected.matrix(),
                                          ana.rho_corrected.matrix()));
      worst = std::max(worst, test::max_abs_diff(sim.rho_plus.matrix(),
                                                 ana.rho_plus.matrix()));
      worst = std::max(worst, test::max_abs_diff(sim.rho_minus.matrix(),
                                                 ana.rho_minus.matrix()));
      worst = std::max(worst, std::abs(sim.p_plus - ana.p_plus));
      worst = std::max(worst, std::abs(sim.p_minus - ana.p_minus));
    }
  }
  std::ostringstream os;
  os << "max entrywise diff " << worst;
  return Outcome{worst < 1e-11, os.str()};
}

// 2. O(d^2) flip trace against the materialized operator, 100 states per
//    d in {2..8}, within 1e-12.
Outcome flip_trace_brute_force() {
  test::Rng rng(1002);
  double worst = 0.0;
  for (Eigen::Index d = 2; d <= 8; ++d) {
    const ComplexMatrix f = build_flip(d);
    for (int n = 0; n < 100; ++n) {
      const EnvState env = test::random_env(d, rng);
      const double fast = flip_expectation(env);
      const double brute = (f * env.rho().matrix()).trace().real();
      worst = std::max(worst, std::abs(fast - brute));
    }
  }
  std::ostringstream os;
  os << "max |fast - brute| " << worst;
  return Outcome{worst < 1e-12, os.str()};
}

// 3. Quadrature D against sinc(v dt) over v dt in [-10, 10], 4096 bins,
//    max abs error < 1e-6.
Outcome sinc_law() {
  const SpectralGrid grid = SpectralGrid::for_filter(kRefFilter, 4096, 2.0);
  const double v = kRefFilter.width();
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -10.0 + 20.0 * static_cast<double>(i) / 400.0;
    const double dt = x / v;
    const double quad =
        spdc_flip_expectation(build_spdc(kRefFilter, dt, grid));
    worst = std::max(worst, std::abs(quad - sinc_closed_form(dt, v)));
  }
  std::ostringstream os;
  os << "max |quad - sinc| " << worst;
  return Outcome{worst < 1e-6, os.str()};
}

// 4. Explicit beam-splitter post-selection reproduces P_C = (1 - D)/2 on
//    truncated environments (d <= 8), including negative-D shoulders.
Outcome hom_identity() {
  const SpectralGrid grid = SpectralGrid::for_filter(kRefFilter, 2048, 2.0);
  const double v = kRefFilter.width();
  double worst = 0.0;
  bool saw_shoulder = false;
  for (double x : {0.0, 0.8, 2.0, std::numbers::pi, 4.4934, 5.5}) {
    const SpdcState state = build_spdc(kRefFilter, x / v, grid);
    for (Eigen::Index d : {2, 4, 8}) {
      const EnvState env = spdc_to_env(state, d);
      const double d_value = flip_expectation(env);
      const double p_c = beam_splitter_coincidence_probability(env);
      worst = std::max(worst, std::abs(p_c - 0.5 * (1.0 - d_value)));
      if (d_value < -0.1) saw_shoulder = true;  // R_rel = 2 P_C > 1 here
    }
  }
  test::Rng rng(1004);
  for (int n = 0; n < 50; ++n) {
    const EnvState env = test::random_env(2 + (n % 4), rng);
    worst = std::max(
        worst, std::abs(beam_splitter_coincidence_probability(env) -
                        0.5 * (1.0 - flip_expectation(env))));
  }
  std::ostringstream os;
  os << "max |P_C - (1-D)/2| " << worst
     << (saw_shoulder ? ", shoulder covered" : ", NO shoulder point");
  return Outcome{worst < 1e-10 && saw_shoulder, os.str()};
}

// 5. The three |D| = 1 environments and their compensated transfers.
Outcome extremal_cases() {
  const EnvState singlet = make_singlet();
  const EnvState bell = make_symmetric_bell();
  const EnvState product = make_product_with_overlap(1.0);
  const double d_singlet = flip_expectation(singlet);
  const double d_bell = flip_expectation(bell);
  const double d_product = flip_expectation(product);

  double worst_overlap_defect = 0.0;
  for (const EnvState* env : {&singlet, &bell, &product}) {
    for (double deg : kPhasesDeg) {
      const EquatorialPhase phase = EquatorialPhase::degrees(deg);
      const Composite comp =
          partial_exchange(make_source(phase), make_target(), *env);
      const TransferOutcome out = measure_and_feedforward(comp, true);
      const double ov =
          overlap_with(out.rho_corrected, equatorial(phase.theta_rad));
      worst_overlap_defect = std::max(worst_overlap_defect, std::abs(1.0 - ov));
    }
  }
  std::ostringstream os;
  os << "D = " << d_singlet << ", " << d_bell << ", " << d_product
     << "; max |1 - overlap| " << worst_overlap_defect;
  const bool pass = d_singlet == -1.0 && std::abs(d_bell - 1.0) < 1e-12 &&
                    std::abs(d_product - 1.0) < 1e-12 &&
                    worst_overlap_defect < 1e-12;
  return Outcome{pass, os.str()};
}

// 6. The straight lines of the summary figure: analytic mode exactly on
//    (1+D)/2, Monte-Carlo means within 3 ensemble sigma for >= 95% of
//    points over 100 seeds.
Outcome figure_lines() {
  const SpectralGrid grid = SpectralGrid::for_filter(kRefFilter, 4096, 2.0);
  std::vector<double> delays;
  for (int i = 0; i < 16; ++i) {
    delays.push_back(0.6 * static_cast<double>(i) / 15.0);
  }

  // Analytic mode.
  double worst_line = 0.0;
  std::vector<double> d_values;
  for (double dt : delays) {
    const double d = spdc_flip_expectation(build_spdc(kRefFilter, dt, grid));
    d_values.push_back(d);
    for (double deg : kPhasesDeg) {
      const EquatorialPhase phase = EquatorialPhase::degrees(deg);
      const TransferOutcome out = transfer_analytic(phase, d);
      const StateMetrics m = analyze(out.rho_corrected, out.rho_corrected,
                                     equatorial(phase.theta_rad));
      worst_line =
          std::max(worst_line, std::abs(m.overlap - 0.5 * (1.0 + d)));
      worst_line = std::max(
          worst_line,
          std::abs(m.eigenvalues(0) - 0.5 * (1.0 + std::abs(d))));
    }
  }
  if (worst_line >= 1e-11) {
    std::ostringstream os;
    os << "analytic-mode deviation " << worst_line;
    return Outcome{false, os.str()};
  }

  // Monte-Carlo mode: per (delay, seed), means over the 7 phases.
  const int n_seeds = 100;
  const auto bases = MeasurementBasis::standard_three();
  size_t within = 0, total = 0;
  for (size_t di = 0; di < delays.size(); ++di) {
    const double d = d_values[di];
    const double theory_overlap = 0.5 * (1.0 + d);
    const double theory_maxeig = 0.5 * (1.0 + std::abs(d));
    std::vector<double> mean_overlap(n_seeds), mean_maxeig(n_seeds);
    for (int s = 0; s < n_seeds; ++s) {
      double ov = 0.0, me = 0.0;
      for (size_t ti = 0; ti < 7; ++ti) {
        const EquatorialPhase phase = EquatorialPhase::degrees(kPhasesDeg[ti]);
        const DensityMatrix truth =
            transfer_analytic(phase, d).rho_corrected;
        const auto records = simulate_counts(
            truth, bases, 1e6, {1.0, 1.0},
            derive_seed(606060, di, ti, static_cast<std::uint64_t>(s)));
        const ReconstructionResult rec = mle_reconstruct(records);
        const StateMetrics m =
            analyze(rec.rho_rec, truth, equatorial(phase.theta_rad));
        ov += m.overlap;
        me += m.eigenvalues(0);
      }
      mean_overlap[static_cast<size_t>(s)] = ov / 7.0;
      mean_maxeig[static_cast<size_t>(s)] = me / 7.0;
    }
    auto ensemble_sigma = [](const std::vector<double>& xs) {
      double m = 0.0;
      for (double x : xs) m += x;
      m /= static_cast<double>(xs.size());
      double v = 0.0;
      for (double x : xs) v += (x - m) * (x - m);
      return std::sqrt(v / static_cast<double>(xs.size() - 1));
    };
    const double sig_ov = ensemble_sigma(mean_overlap);
    const double sig_me = ensemble_sigma(mean_maxeig);
    for (int s = 0; s < n_seeds; ++s) {
      total += 2;
      if (std::abs(mean_overlap[static_cast<size_t>(s)] - theory_overlap) <=
          3.0 * sig_ov) {
        ++within;
      }
      if (std::abs(mean_maxeig[static_cast<size_t>(s)] - theory_maxeig) <=
          3.0 * sig_me) {
        ++within;
      }
    }
  }
  const double fraction =
      static_cast<double>(within) / static_cast<double>(total);
  std::ostringstream os;
  os << "analytic max dev " << worst_line << "; MC within 3 sigma "
     << 100.0 * fraction << "%";
  return Outcome{fraction >= 0.95, os.str()};
}

// 7. Tomography quality: median fidelity at 1e6 counts over 100 seeds,
//    log-likelihood monotone, and the visibility parameter as an input.
Outcome tomography_quality() {
  const DensityMatrix truth =
      transfer_analytic(EquatorialPhase::degrees(60.0), 0.8).rho_corrected;
  const auto bases = MeasurementBasis::standard_three();
  std::vector<double> fidelities;
  size_t ll_violations = 0;
  for (int s = 0; s < 100; ++s) {
    const auto records =
        simulate_counts(truth, bases, 1e6, {1.0, 1.0}, derive_seed(707070, s));
    const ReconstructionResult rec = mle_reconstruct(records);
    for (size_t i = 1; i < rec.log_likelihood_trace.size(); ++i) {
      if (rec.log_likelihood_trace[i] <
          rec.log_likelihood_trace[i - 1] - 1e-12) {
        ++ll_violations;
      }
    }
    fidelities.push_back(uhlmann_fidelity(rec.rho_rec, truth));
  }
  std::sort(fidelities.begin(), fidelities.end());
  const double med = fidelities[50];

  // Visibility enters as a parameter only: m = 0.964 puts the ideal dip
  // minimum at R_rel = 0.036.
  const auto dip = hom_scan(kRefFilter, {0.0}, 2.0, 0.964);
  const double dip_defect = std::abs(dip[0].r_rel - 0.036);

  std::ostringstream os;
  os << "median fidelity " << med << ", ll violations " << ll_violations
     << ", dip minimum defect " << dip_defect;
  return Outcome{med >= 0.999 && ll_violations == 0 && dip_defect < 1e-6,
                 os.str()};
}

// 8. Erasure and transfer agree on the full random-environment suite.
Outcome erasure_symmetry() {
  test::Rng rng(1001);  // same suite as criterion 1
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const Eigen::Index d = 2 + (n % 5);
    const EnvState env = test::random_env(d, rng);
    for (double deg : kPhasesDeg) {
      const EquatorialPhase phase = EquatorialPhase::degrees(deg);
      const Composite comp =
          partial_exchange(make_source(phase), make_target(), env);
      const TransferOutcome fwd = measure_and_feedforward(comp);
      const TransferOutcome back = erase(comp);
      worst = std::max(worst,
                       test::max_abs_diff(fwd.rho_corrected.matrix(),
                                          back.rho_corrected.matrix()));
      worst = std::max(worst, std::abs(fwd.p_plus - back.p_plus));
    }
  }
  std::ostringstream os;
  os << "max |transfer - erase| " << worst;
  return Outcome{worst < 1e-12, os.str()};
}

// 9. Property suites: range of D, separable positivity, U x U invariance,
//    twirl, and F^2 = I.
Outcome property_suites() {
  test::Rng rng(1009);
  double violation = 0.0;

  for (int n = 0; n < 1000; ++n) {
    const double d = flip_expectation(test::random_env(2 + (n % 5), rng));
    violation = std::max(violation, std::max(d - 1.0, -1.0 - d));
  }

  double min_separable = 1.0;
  for (int n = 0; n < 100; ++n) {
    min_separable = std::min(
        min_separable,
        flip_expectation(test::random_separable_env(2 + (n % 3), 4, rng)));
  }

  double uu_drift = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Eigen::Index d = 2 + (n % 3);
    const EnvState env = test::random_env(d, rng);
    const ComplexMatrix u = test::random_unitary(d, rng);
    uu_drift = std::max(
        uu_drift, std::abs(flip_expectation(apply_local_unitary(env, u, u)) -
                           flip_expectation(env)));
  }

  double twirl_defect = 0.0;
  for (int n = 0; n < 50; ++n) {
    const EnvState env = test::random_env(2 + (n % 3), rng);
    const EnvState tw = twirl(env);
    twirl_defect = std::max(
        twirl_defect,
        std::abs(flip_expectation(tw) - flip_expectation(env)));
    twirl_defect = std::max(
        twirl_defect,
        test::max_abs_diff(twirl(tw).rho().matrix(), tw.rho().matrix()));
  }

  double flip_defect = 0.0;
  for (Eigen::Index d = 1; d <= 8; ++d) {
    const ComplexMatrix f = build_flip(d);
    flip_defect = std::max(
        flip_defect,
        (f * f - ComplexMatrix::Identity(d * d, d * d)).cwiseAbs().maxCoeff());
    flip_defect =
        std::max(flip_defect, (f - f.adjoint()).cwiseAbs().maxCoeff());
  }

  std::ostringstream os;
  os << "range excess " << violation << ", min separable D " << min_separable
     << ", UxU drift " << uu_drift << ", twirl defect " << twirl_defect
     << ", flip defect " << flip_defect;
  const bool pass = violation <= 1e-12 && min_separable >= -1e-12 &&
                    uu_drift < 1e-12 && twirl_defect < 1e-12 &&
                    flip_defect == 0.0;
  return Outcome{pass, os.str()};
}

// 10. Byte-identical tomo output for a fixed seed; optionally repeated
//     through the CLI binary when its path is supplied.
Outcome determinism(const char* binary) {
  RunConfig cfg;
  cfg.command = Command::tomo;
  cfg.delays_ps = {0.0, 0.25, 0.5};
  cfg.thetas_deg = {0.0, 60.0, 120.0};
  cfg.reps = 2;
  cfg.counts_per_basis = 1e5;
  cfg.seed = 20260809;
  const std::string a = run_tomo(cfg).files[0].contents;
  const std::string b = run_tomo(cfg).files[0].contents;
  if (a != b) return Outcome{false, "in-process runs differ"};

  std::string detail = "in-process identical";
  if (binary != nullptr) {
    auto invoke = [&](const std::string& out) {
      std::ostringstream cmd;
      cmd << '"' << binary << '"'
          << " tomo --delays 0,0.25 --thetas 0,60 --reps 2 --counts 1e5"
          << " --seed 20260809 --out " << out;
      return std::system(cmd.str().c_str());
    };
    if (invoke("acc_det_a.csv") != 0 || invoke("acc_det_b.csv") != 0) {
      return Outcome{false, "CLI invocation failed"};
    }
    auto slurp = [](const char* p) {
      std::ifstream is(p, std::ios::binary);
      std::ostringstream os;
      os << is.rdbuf();
      return os.str();
    };
    const std::string fa = slurp("acc_det_a.csv");
    const std::string fb = slurp("acc_det_b.csv");
    for (const char* p : {"acc_det_a.csv", "acc_det_b.csv",
                          "acc_det_a.csv.manifest.json",
                          "acc_det_b.csv.manifest.json"}) {
      std::remove(p);
    }
    if (fa.empty() || fa != fb) {
      return Outcome{false, "CLI outputs differ or are empty"};
    }
    detail += "; CLI runs byte-identical";
  }
  return Outcome{true, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const char* binary = argc > 1 ? argv[1] : nullptr;
  std::printf("flipsim acceptance suite\n");

  run_criterion(1, "analytic-oracle-equivalence", analytic_oracle_equivalence);
  run_criterion(2, "flip-trace-brute-force", flip_trace_brute_force);
  run_criterion(3, "sinc-law", sinc_law);
  run_criterion(4, "hom-identity", hom_identity);
  run_criterion(5, "extremal-cases", extremal_cases);
  run_criterion(6, "figure-lines", figure_lines);
  run_criterion(7, "tomography-quality", tomography_quality);
  run_criterion(8, "erasure-symmetry", erasure_symmetry);
  run_criterion(9, "property-suites", property_suites);
  run_criterion(10, "determinism", [&] { return determinism(binary); });

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) FAILED\n", g_failures);
  return 1;
}
