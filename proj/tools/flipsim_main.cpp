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

// flipsim command line. Exit codes: 0 success, 2 configuration error,
// 3 numeric failure (non-convergence and the like).

#include "flipsim/run.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace {

using flipsim::Command;
using flipsim::Engine;
using flipsim::RunConfig;
using flipsim::StatsMode;

// "a,b,c" or "start:stop:count".
std::vector<double> parse_delay_spec(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  if (text.find(':') != std::string::npos) {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 2) {
      throw flipsim::ConfigError(
          "delays: range spec must be start:stop:count with count >= 2, got '" +
          text + "'");
    }
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(n - 1));
    }
    return out;
  }
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw flipsim::ConfigError("delays: cannot parse value '" + item + "'");
    }
  }
  return out;
}

std::vector<double> parse_list(const std::string& text, const char* field) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw flipsim::ConfigError(std::string(field) + ": cannot parse value '" +
                                 item + "'");
    }
  }
  return out;
}

struct CliOptions {
  std::string shape = "rect";
  std::string delays, inset_delays, thetas, env, engine = "analytic",
              stats = "ideal", eta;
};

void add_common_options(CLI::App* cmd, RunConfig& cfg, CliOptions& opt,
                        bool spectral, bool protocol_opts, bool counting) {
  cmd->add_option("--seed", cfg.seed, "Master seed for all randomness");
  cmd->add_option("--out", cfg.out_path, "Output CSV path (fig2: base name)");
  if (spectral) {
    cmd->add_option("--shape", opt.shape, "Filter shape: rect or gaussian")
        ->check(CLI::IsMember({"rect", "gaussian"}));
    cmd->add_option("--center-nm", cfg.center_nm, "Filter central wavelength");
    cmd->add_option("--fwhm-nm", cfg.fwhm_nm, "Filter FWHM");
    cmd->add_option("--delays", opt.delays,
                    "Delay list 'a,b,c' or range 'start:stop:count' (ps)");
    cmd->add_option("--mode-overlap", cfg.mode_overlap,
                    "Mode-overlap factor multiplying D, in [0, 1]");
    cmd->add_option("--bins", cfg.n_bins, "Spectral grid bins");
    cmd->add_option("--margin", cfg.grid_margin,
                    "Grid half-width in units of the filter support");
  }
  if (protocol_opts) {
    cmd->add_option("--thetas", opt.thetas, "Phase grid in degrees, 'a,b,c'");
    cmd->add_option("--env", opt.env,
                    "Environment: spdc[:dim], singlet, symmetric-bell, "
                    "product:<c>, file:<path>");
    cmd->add_flag("--compensate-sign", cfg.compensate_sign,
                  "Compensate a known negative D in the feed-forward");
    cmd->add_option("--engine", opt.engine,
                    "Evaluation engine: analytic or composite")
        ->check(CLI::IsMember({"analytic", "composite"}));
  }
  if (counting) {
    cmd->add_option("--counts", cfg.counts_per_basis,
                    "Mean detected pairs per measurement basis");
    cmd->add_option("--reps", cfg.reps, "Seed-ensemble repetitions per cell");
    cmd->add_option("--eta", opt.eta,
                    "Detector efficiencies 'eta0,eta1' in (0, 1]");
    cmd->add_option("--mle-max-iters", cfg.mle_max_iters,
                    "Iteration cap for the likelihood maximizer");
  }
}

void finalize_config(RunConfig& cfg, const CliOptions& opt) {
  cfg.filter_kind = opt.shape == "gaussian" ? flipsim::FilterKind::gaussian
                                            : flipsim::FilterKind::rectangular;
  if (!opt.delays.empty()) cfg.delays_ps = parse_delay_spec(opt.delays);
  if (!opt.inset_delays.empty()) {
    cfg.inset_delays_ps = parse_delay_spec(opt.inset_delays);
  }
  if (!opt.thetas.empty()) cfg.thetas_deg = parse_list(opt.thetas, "thetas");
  if (!opt.env.empty()) cfg.env = flipsim::EnvSpec::parse(opt.env);
  cfg.engine =
      opt.engine == "composite" ? Engine::composite : Engine::analytic;
  cfg.stats = opt.stats == "mc" ? StatsMode::mc : StatsMode::ideal;
  if (!opt.eta.empty()) {
    const std::vector<double> etas = parse_list(opt.eta, "eta");
    if (etas.size() != 2) {
      throw flipsim::ConfigError("eta: expected exactly two efficiencies");
    }
    cfg.efficiencies = {etas[0], etas[1]};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flipsim: two-photon indistinguishability, HOM interference "
               "and dual-rail qubit transfer, as deterministic CSV"};
  app.require_subcommand(1);
  app.set_version_flag("--version", flipsim::kArtifactVersion);
  app.set_config("--config", "",
                 "key=value config file, keys under a [command] section; "
                 "flags override it");
  app.allow_config_extras(false);

  RunConfig cfg;
  CliOptions opt;

  CLI::App* hom = app.add_subcommand("hom", "Hong-Ou-Mandel dip scan");
  add_common_options(hom, cfg, opt, true, false, false);
  hom->add_option("--reference-delay", cfg.reference_delay_ps,
                  "Far-from-dip normalization point (ps)");

  CLI::App* transfer =
      app.add_subcommand("transfer", "Qubit transfer sweep over (delay, theta)");
  add_common_options(transfer, cfg, opt, true, true, false);

  CLI::App* erase_cmd =
      app.add_subcommand("erase", "Quantum erasure sweep over (delay, theta)");
  add_common_options(erase_cmd, cfg, opt, true, true, false);

  CLI::App* tomo = app.add_subcommand(
      "tomo", "Simulated three-basis tomography of the transferred state");
  add_common_options(tomo, cfg, opt, true, true, true);
  tomo->add_option("--dump-counts", cfg.dump_counts_path,
                   "Also write the simulated count records to this CSV");

  CLI::App* fig2 = app.add_subcommand(
      "fig2", "Overlap/eigenvalue summary table plus HOM dip inset");
  add_common_options(fig2, cfg, opt, true, true, true);
  fig2->add_option("--inset-delays", opt.inset_delays,
                   "Dip inset delays, list or range (ps)");
  fig2->add_option("--stats", opt.stats, "ideal or mc statistics")
      ->check(CLI::IsMember({"ideal", "mc"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    app.exit(e);
    return 2;
  }

  try {
    if (hom->parsed()) cfg.command = Command::hom;
    if (transfer->parsed()) cfg.command = Command::transfer;
    if (erase_cmd->parsed()) cfg.command = Command::erase;
    if (tomo->parsed()) cfg.command = Command::tomo;
    if (fig2->parsed()) cfg.command = Command::fig2;
    finalize_config(cfg, opt);
    flipsim::run_and_write(cfg);
  } catch (const flipsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const flipsim::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
