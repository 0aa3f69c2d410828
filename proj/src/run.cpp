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

#include "flipsim/run.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>

namespace flipsim {

namespace {

using nlohmann::json;

std::string format_full(double x) {
  if (x == 0.0) x = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvBuilder {
 public:
  explicit CsvBuilder(std::vector<std::string> header)
      : width_(header.size()) {
    append_row(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) {
      throw std::logic_error("CsvBuilder: column count mismatch");
    }
    append_row(cells);
  }

  std::string str() const { return out_; }

 private:
  void append_row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += cells[i];
    }
    out_ += '\n';
  }
  size_t width_;
  std::string out_;
};

std::string cell(double x) { return format_csv_number(x); }
std::string cell(int x) { return std::to_string(x); }
std::string cell(std::uint64_t x) { return std::to_string(x); }

double sample_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = sample_mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

ComplexVector equatorial_vector(double theta_rad) {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexVector v(2);
  v << Complex(s, 0.0), s * Complex(std::cos(theta_rad), std::sin(theta_rad));
  return v;
}

// One point of a sweep: the delay, the signed D in force, and (for the
// composite engine or a named environment) the environment itself.
struct SweepPoint {
  double delay_ps;
  double d_signed;
  std::optional<EnvState> env;
};

EnvState named_env(const EnvSpec& spec) {
  switch (spec.kind) {
    case EnvSpec::Kind::singlet:
      return make_singlet();
    case EnvSpec::Kind::symmetric_bell:
      return make_symmetric_bell();
    case EnvSpec::Kind::product:
      return make_product_with_overlap(spec.product_overlap);
    case EnvSpec::Kind::file:
      return read_env_matrix_file(spec.file_path);
    case EnvSpec::Kind::spdc:
      break;
  }
  throw std::logic_error("named_env: spdc environments are delay dependent");
}

std::vector<SweepPoint> build_sweep(const RunConfig& cfg) {
  std::vector<SweepPoint> points;
  if (cfg.env.kind != EnvSpec::Kind::spdc) {
    // Fixed environments have no delay dependence; the sweep collapses to a
    // single point.
    EnvState env = named_env(cfg.env);
    points.push_back(SweepPoint{0.0, flip_expectation(env), std::move(env)});
    return points;
  }
  const FilterShape filter(cfg.filter_kind, cfg.center_nm, cfg.fwhm_nm);
  const SpectralGrid grid =
      SpectralGrid::for_filter(filter, cfg.n_bins, cfg.grid_margin);
  points.reserve(cfg.delays_ps.size());
  for (double dt : cfg.delays_ps) {
    const SpdcState state = build_spdc(filter, dt, grid);
    if (cfg.engine == Engine::composite) {
      EnvState env = spdc_to_env(state, cfg.env.spdc_dim);
      const double d = flip_expectation(env);
      points.push_back(SweepPoint{dt, d, std::move(env)});
    } else {
      points.push_back(
          SweepPoint{dt, cfg.mode_overlap * spdc_flip_expectation(state),
                     std::nullopt});
    }
  }
  return points;
}

struct CellEval {
  DensityMatrix rho_out;
  StateMetrics metrics;
};

// Runs one (point, theta) cell of a transfer or erasure sweep and scores the
// output against the closed form for the D in force.
CellEval evaluate_cell(const RunConfig& cfg, const SweepPoint& point,
                       double theta_deg, bool erasure) {
  const EquatorialPhase phase = EquatorialPhase::degrees(theta_deg);
  const ComplexVector psi = equatorial_vector(phase.theta_rad);
  if (cfg.engine == Engine::composite) {
    const Composite comp =
        partial_exchange(make_source(phase), make_target(), *point.env);
    const TransferOutcome out =
        erasure ? erase(comp, cfg.compensate_sign)
                : measure_and_feedforward(comp, cfg.compensate_sign);
    const double d_theory =
        cfg.compensate_sign ? std::abs(out.d_effective) : out.d_effective;
    const DensityMatrix theory =
        transfer_analytic(phase, d_theory).rho_corrected;
    return CellEval{out.rho_corrected,
                    analyze(out.rho_corrected, theory, psi)};
  }
  const double d_eff =
      cfg.compensate_sign ? std::abs(point.d_signed) : point.d_signed;
  const TransferOutcome out = transfer_analytic(phase, d_eff);
  return CellEval{out.rho_corrected,
                  analyze(out.rho_corrected, out.rho_corrected, psi)};
}

RunResult sweep_command(const RunConfig& cfg, bool erasure) {
  const std::vector<SweepPoint> points = build_sweep(cfg);
  CsvBuilder csv({"delay_ps", "D", "theta_deg", "overlap", "max_eigenvalue",
                  "purity", "fidelity_vs_theory"});
  for (const SweepPoint& point : points) {
    std::vector<double> overlaps, maxeigs, purities, fidelities;
    for (double theta : cfg.thetas_deg) {
      const CellEval ev = evaluate_cell(cfg, point, theta, erasure);
      overlaps.push_back(ev.metrics.overlap);
      maxeigs.push_back(ev.metrics.eigenvalues(0));
      purities.push_back(ev.metrics.purity);
      fidelities.push_back(ev.metrics.fidelity);
      csv.row({cell(point.delay_ps), cell(point.d_signed), cell(theta),
               cell(ev.metrics.overlap), cell(ev.metrics.eigenvalues(0)),
               cell(ev.metrics.purity), cell(ev.metrics.fidelity)});
    }
    // Per-delay aggregate over the phase grid; theta column left empty.
    csv.row({cell(point.delay_ps), cell(point.d_signed), "",
             cell(sample_mean(overlaps)), cell(sample_mean(maxeigs)),
             cell(sample_mean(purities)), cell(sample_mean(fidelities))});
  }
  return RunResult{{OutputFile{cfg.out_path, csv.str()}}};
}

struct TomoCell {
  double fidelity;
  double overlap;
  double maxeig;
  double purity;
  int iterations;
  bool converged;
  std::uint64_t seed;
};

TomoCell run_tomo_cell(const RunConfig& cfg, const SweepPoint& point,
                       size_t delay_idx, size_t theta_idx, int rep,
                       std::vector<CountRecord>* dump) {
  const double theta_deg = cfg.thetas_deg[theta_idx];
  const EquatorialPhase phase = EquatorialPhase::degrees(theta_deg);
  const ComplexVector psi = equatorial_vector(phase.theta_rad);

  DensityMatrix rho_true = [&] {
    if (cfg.engine == Engine::composite) {
      const Composite comp =
          partial_exchange(make_source(phase), make_target(), *point.env);
      return measure_and_feedforward(comp, cfg.compensate_sign).rho_corrected;
    }
    const double d_eff =
        cfg.compensate_sign ? std::abs(point.d_signed) : point.d_signed;
    return transfer_analytic(phase, d_eff).rho_corrected;
  }();

  const std::uint64_t cell_seed =
      derive_seed(cfg.seed, delay_idx, theta_idx,
                  static_cast<std::uint64_t>(rep));
  const auto records =
      simulate_counts(rho_true, MeasurementBasis::standard_three(),
                      cfg.counts_per_basis, cfg.efficiencies, cell_seed);
  if (dump) {
    dump->insert(dump->end(), records.begin(), records.end());
  }
  std::vector<CountRecord> corrected;
  corrected.reserve(records.size());
  for (const CountRecord& r : records) {
    corrected.push_back(correct_efficiencies(r));
  }
  const ReconstructionResult rec =
      mle_reconstruct(corrected, cfg.mle_max_iters);
  if (!rec.converged) {
    std::ostringstream os;
    os << "tomo: reconstruction did not converge at delay "
       << point.delay_ps << " ps, theta " << theta_deg << " deg, rep " << rep;
    throw NumericError(os.str());
  }
  const StateMetrics m = analyze(rec.rho_rec, rho_true, psi);
  return TomoCell{m.fidelity, m.overlap, m.eigenvalues(0), m.purity,
                  rec.iterations, rec.converged, cell_seed};
}

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string strip_csv_suffix(const std::string& path) {
  const std::string suffix = ".csv";
  if (path.size() > suffix.size() &&
      path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return path.substr(0, path.size() - suffix.size());
  }
  return path;
}

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ConfigError(field + ": " + why);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return xs;
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::hom: return "hom";
    case Command::transfer: return "transfer";
    case Command::erase: return "erase";
    case Command::tomo: return "tomo";
    case Command::fig2: return "fig2";
  }
  return "?";
}

const char* to_string(Engine e) {
  return e == Engine::analytic ? "analytic" : "composite";
}

const char* to_string(StatsMode s) {
  return s == StatsMode::ideal ? "ideal" : "mc";
}

std::string format_csv_number(double x) {
  if (x == 0.0) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

EnvSpec EnvSpec::parse(const std::string& text) {
  EnvSpec spec;
  if (text == "singlet") {
    spec.kind = Kind::singlet;
    return spec;
  }
  if (text == "symmetric-bell") {
    spec.kind = Kind::symmetric_bell;
    return spec;
  }
  if (text == "spdc") {
    spec.kind = Kind::spdc;
    return spec;
  }
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    try {
      if (head == "spdc") {
        spec.kind = Kind::spdc;
        spec.spdc_dim = std::stoi(tail);
        return spec;
      }
      if (head == "product") {
        spec.kind = Kind::product;
        spec.product_overlap = std::stod(tail);
        return spec;
      }
    } catch (const std::exception&) {
      throw ConfigError("env: cannot parse '" + text + "'");
    }
    if (head == "file") {
      spec.kind = Kind::file;
      spec.file_path = tail;
      require(!tail.empty(), "env", "file path is empty");
      return spec;
    }
  }
  throw ConfigError(
      "env: expected spdc[:dim], singlet, symmetric-bell, product:<c> or "
      "file:<path>, got '" +
      text + "'");
}

std::string EnvSpec::str() const {
  switch (kind) {
    case Kind::spdc:
      return "spdc:" + std::to_string(spdc_dim);
    case Kind::singlet:
      return "singlet";
    case Kind::symmetric_bell:
      return "symmetric-bell";
    case Kind::product:
      return "product:" + format_csv_number(product_overlap);
    case Kind::file:
      return "file:" + file_path;
  }
  return "?";
}

void RunConfig::validate() const {
  require(center_nm > 0.0, "center-nm", "must be positive");
  require(fwhm_nm > 0.0, "fwhm-nm", "must be positive");
  for (double dt : delays_ps) {
    require(std::isfinite(dt), "delays", "must be finite");
  }
  for (double dt : inset_delays_ps) {
    require(std::isfinite(dt), "inset-delays", "must be finite");
  }
  require(!thetas_deg.empty(), "thetas", "empty phase list");
  for (double t : thetas_deg) {
    require(std::isfinite(t), "thetas", "must be finite");
  }
  require(counts_per_basis > 0.0, "counts", "must be positive");
  require(reps >= 1, "reps", "must be >= 1");
  require(mode_overlap >= 0.0 && mode_overlap <= 1.0, "mode-overlap",
          "must lie in [0, 1]");
  for (double eta : efficiencies) {
    require(eta > 0.0 && eta <= 1.0, "eta", "must lie in (0, 1]");
  }
  require(n_bins >= 2, "bins", "must be >= 2");
  require(grid_margin >= 1.5, "margin", "must be >= 1.5");
  require(std::isfinite(reference_delay_ps), "reference-delay",
          "must be finite");
  require(mle_max_iters >= 1, "mle-max-iters", "must be >= 1");
  if (env.kind == EnvSpec::Kind::spdc) {
    require(env.spdc_dim >= 2 && env.spdc_dim <= 64, "env",
            "spdc truncation dim must lie in [2, 64]");
  }
  if (env.kind == EnvSpec::Kind::product) {
    require(env.product_overlap >= -1.0 && env.product_overlap <= 1.0, "env",
            "product overlap must lie in [-1, 1]");
  }
  if (engine == Engine::composite) {
    require(mode_overlap == 1.0, "mode-overlap",
            "only the analytic engine supports mode-overlap != 1");
    if (env.kind == EnvSpec::Kind::spdc) {
      require(env.spdc_dim <= 8, "env",
              "spdc truncation dim must be <= 8 with the composite engine");
    }
    require(command != Command::fig2, "engine",
            "fig2 uses the analytic engine");
  }
  require(dump_counts_path.empty() || command == Command::tomo, "dump-counts",
          "is a tomo option");
}

RunConfig resolve_defaults(RunConfig cfg) {
  if (cfg.delays_ps.empty()) {
    switch (cfg.command) {
      case Command::hom:
        cfg.delays_ps = linspace(0.0, 0.75, 16);
        break;
      default:
        cfg.delays_ps = linspace(0.0, 0.6, 16);
        break;
    }
  }
  if (cfg.inset_delays_ps.empty() && cfg.command == Command::fig2) {
    cfg.inset_delays_ps = linspace(-1.2, 1.2, 49);
  }
  if (cfg.out_path.empty()) {
    switch (cfg.command) {
      case Command::hom: cfg.out_path = "hom.csv"; break;
      case Command::transfer: cfg.out_path = "transfer.csv"; break;
      case Command::erase: cfg.out_path = "erase.csv"; break;
      case Command::tomo: cfg.out_path = "tomo.csv"; break;
      case Command::fig2: cfg.out_path = "fig2"; break;
    }
  }
  return cfg;
}

RunResult run_hom(const RunConfig& config) {
  RunConfig cfg = resolve_defaults(config);
  cfg.validate();
  require(!cfg.delays_ps.empty(), "delays", "empty delay list");
  const FilterShape filter(cfg.filter_kind, cfg.center_nm, cfg.fwhm_nm);
  std::vector<HomPoint> points =
      hom_scan(filter, cfg.delays_ps, cfg.reference_delay_ps,
               cfg.mode_overlap, cfg.n_bins, cfg.grid_margin);
  std::sort(points.begin(), points.end(),
            [](const HomPoint& a, const HomPoint& b) {
              return a.delay_ps < b.delay_ps;
            });
  CsvBuilder csv({"delay_ps", "D", "P_C", "R_rel"});
  for (const HomPoint& p : points) {
    csv.row({cell(p.delay_ps), cell(p.d_value), cell(p.p_coincidence),
             cell(p.r_rel)});
  }
  return RunResult{{OutputFile{cfg.out_path, csv.str()}}};
}

RunResult run_transfer(const RunConfig& config) {
  RunConfig cfg = resolve_defaults(config);
  cfg.validate();
  RunResult r = sweep_command(cfg, /*erasure=*/false);
  r.files[0].path = cfg.out_path;
  return r;
}

RunResult run_erase(const RunConfig& config) {
  RunConfig cfg = resolve_defaults(config);
  cfg.validate();
  RunResult r = sweep_command(cfg, /*erasure=*/true);
  r.files[0].path = cfg.out_path;
  return r;
}

RunResult run_tomo(const RunConfig& config) {
  RunConfig cfg = resolve_defaults(config);
  cfg.validate();
  const std::vector<SweepPoint> points = build_sweep(cfg);
  CsvBuilder csv({"row", "delay_ps", "theta_deg", "rep", "seed", "D",
                  "overlap", "max_eigenvalue", "purity", "fidelity_vs_theory",
                  "fidelity_std", "iterations", "converged"});
  std::vector<CountRecord> dump;
  std::vector<CountRecord>* dump_ptr =
      cfg.dump_counts_path.empty() ? nullptr : &dump;
  std::vector<double> rep_means(static_cast<size_t>(cfg.reps), 0.0);
  double grand_sum = 0.0;
  size_t cells = 0;
  for (size_t di = 0; di < points.size(); ++di) {
    for (size_t ti = 0; ti < cfg.thetas_deg.size(); ++ti) {
      for (int rep = 0; rep < cfg.reps; ++rep) {
        const TomoCell c =
            run_tomo_cell(cfg, points[di], di, ti, rep, dump_ptr);
        csv.row({"cell", cell(points[di].delay_ps),
                 cell(cfg.thetas_deg[ti]), cell(rep), cell(c.seed),
                 cell(points[di].d_signed), cell(c.overlap), cell(c.maxeig),
                 cell(c.purity), cell(c.fidelity), "", cell(c.iterations),
                 c.converged ? "1" : "0"});
        rep_means[static_cast<size_t>(rep)] += c.fidelity;
        grand_sum += c.fidelity;
        ++cells;
      }
    }
  }
  const double cells_per_rep =
      static_cast<double>(cells) / static_cast<double>(cfg.reps);
  for (double& m : rep_means) m /= cells_per_rep;
  const double grand = grand_sum / static_cast<double>(cells);
  csv.row({"summary", "", "", "", "", "", "", "", "", cell(grand),
           cell(sample_std(rep_means)), "", ""});
  RunResult out{{OutputFile{cfg.out_path, csv.str()}}};
  if (dump_ptr) {
    out.files.push_back(
        OutputFile{cfg.dump_counts_path, count_records_to_csv(dump)});
  }
  return out;
}

RunResult run_fig2(const RunConfig& config) {
  RunConfig cfg = resolve_defaults(config);
  cfg.validate();
  const FilterShape filter(cfg.filter_kind, cfg.center_nm, cfg.fwhm_nm);
  const SpectralGrid grid =
      SpectralGrid::for_filter(filter, cfg.n_bins, cfg.grid_margin);

  CsvBuilder main_csv({"D", "overlap_mean", "overlap_std", "maxeig_mean",
                       "maxeig_std", "overlap_theory", "maxeig_theory"});
  for (size_t di = 0; di < cfg.delays_ps.size(); ++di) {
    const double dt = cfg.delays_ps[di];
    const double d =
        cfg.mode_overlap * spdc_flip_expectation(build_spdc(filter, dt, grid));
    const double d_eff = cfg.compensate_sign ? std::abs(d) : d;
    std::vector<double> overlaps, maxeigs;
    for (size_t ti = 0; ti < cfg.thetas_deg.size(); ++ti) {
      const EquatorialPhase phase =
          EquatorialPhase::degrees(cfg.thetas_deg[ti]);
      const ComplexVector psi = equatorial_vector(phase.theta_rad);
      const DensityMatrix rho_true =
          transfer_analytic(phase, d_eff).rho_corrected;
      if (cfg.stats == StatsMode::ideal) {
        const StateMetrics m = analyze(rho_true, rho_true, psi);
        overlaps.push_back(m.overlap);
        maxeigs.push_back(m.eigenvalues(0));
        continue;
      }
      for (int rep = 0; rep < cfg.reps; ++rep) {
        const std::uint64_t cell_seed =
            derive_seed(cfg.seed, di, ti, static_cast<std::uint64_t>(rep));
        const auto records = simulate_counts(
            rho_true, MeasurementBasis::standard_three(), cfg.counts_per_basis,
            cfg.efficiencies, cell_seed);
        std::vector<CountRecord> corrected;
        for (const CountRecord& r : records) {
          corrected.push_back(correct_efficiencies(r));
        }
        const ReconstructionResult rec =
            mle_reconstruct(corrected, cfg.mle_max_iters);
        if (!rec.converged) {
          throw NumericError("fig2: reconstruction did not converge");
        }
        const StateMetrics m = analyze(rec.rho_rec, rho_true, psi);
        overlaps.push_back(m.overlap);
        maxeigs.push_back(m.eigenvalues(0));
      }
    }
    main_csv.row({cell(d), cell(sample_mean(overlaps)),
                  cell(sample_std(overlaps)), cell(sample_mean(maxeigs)),
                  cell(sample_std(maxeigs)), cell(0.5 * (1.0 + d_eff)),
                  cell(0.5 * (1.0 + std::abs(d_eff)))});
  }

  CsvBuilder inset_csv({"delay_ps", "R_rel"});
  for (double dt : cfg.inset_delays_ps) {
    const double d =
        cfg.mode_overlap * spdc_flip_expectation(build_spdc(filter, dt, grid));
    inset_csv.row({cell(dt), cell(1.0 - d)});
  }

  const std::string base = strip_csv_suffix(cfg.out_path);
  return RunResult{{OutputFile{base + "_main.csv", main_csv.str()},
                    OutputFile{base + "_inset.csv", inset_csv.str()}}};
}

std::string manifest_json(const RunConfig& config, const std::string& file) {
  const RunConfig cfg = resolve_defaults(config);
  const AngularBand band = wavelength_to_angular(cfg.center_nm, cfg.fwhm_nm);
  json j;
  j["artifact"] = kArtifactName;
  j["version"] = kArtifactVersion;
  j["generated_utc"] = iso_utc_now();
  j["output_file"] = file;
  j["seed"] = cfg.seed;
  json c;
  c["command"] = to_string(cfg.command);
  c["filter_shape"] =
      cfg.filter_kind == FilterKind::rectangular ? "rect" : "gaussian";
  c["center_nm"] = cfg.center_nm;
  c["fwhm_nm"] = cfg.fwhm_nm;
  c["delays_ps"] = cfg.delays_ps;
  c["inset_delays_ps"] = cfg.inset_delays_ps;
  c["thetas_deg"] = cfg.thetas_deg;
  c["env"] = cfg.env.str();
  c["counts_per_basis"] = cfg.counts_per_basis;
  c["reps"] = cfg.reps;
  c["seed"] = cfg.seed;
  c["mode_overlap"] = cfg.mode_overlap;
  c["compensate_sign"] = cfg.compensate_sign;
  c["efficiencies"] = cfg.efficiencies;
  c["engine"] = to_string(cfg.engine);
  c["stats"] = to_string(cfg.stats);
  c["bins"] = cfg.n_bins;
  c["margin"] = cfg.grid_margin;
  c["reference_delay_ps"] = cfg.reference_delay_ps;
  c["mle_max_iters"] = cfg.mle_max_iters;
  c["out"] = cfg.out_path;
  c["dump_counts"] = cfg.dump_counts_path;
  j["config"] = c;
  j["derived"] = {{"omega_c_rad_per_ps", band.omega_c},
                  {"v_rad_per_ps", band.v}};
  return j.dump(2) + "\n";
}

RunResult run_and_write(const RunConfig& config) {
  RunConfig cfg = resolve_defaults(config);
  cfg.validate();
  RunResult result;
  switch (cfg.command) {
    case Command::hom: result = run_hom(cfg); break;
    case Command::transfer: result = run_transfer(cfg); break;
    case Command::erase: result = run_erase(cfg); break;
    case Command::tomo: result = run_tomo(cfg); break;
    case Command::fig2: result = run_fig2(cfg); break;
  }
  for (const OutputFile& f : result.files) {
    std::ofstream os(f.path, std::ios::binary);
    if (!os) throw ConfigError("out: cannot open '" + f.path + "' for writing");
    os << f.contents;
    os.close();
    std::ofstream ms(f.path + ".manifest.json", std::ios::binary);
    if (!ms) {
      throw ConfigError("out: cannot open '" + f.path +
                        ".manifest.json' for writing");
    }
    ms << manifest_json(cfg, f.path);
  }
  return result;
}

EnvState read_env_matrix_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("env: cannot open matrix file '" + path + "'");
  std::string header;
  if (!std::getline(is, header) || header.rfind("d=", 0) != 0) {
    throw ConfigError("env: matrix file must start with 'd=<int>'");
  }
  int d = 0;
  try {
    d = std::stoi(header.substr(2));
  } catch (const std::exception&) {
    throw ConfigError("env: cannot parse dimension in '" + header + "'");
  }
  if (d < 1 || d > 64) {
    throw ConfigError("env: matrix file dimension must lie in [1, 64]");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  ComplexMatrix m(n, n);
  std::string line;
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!std::getline(is, line)) {
      throw ConfigError("env: matrix file ended early at row " +
                        std::to_string(r));
    }
    std::stringstream ss(line);
    std::string tok;
    for (Eigen::Index col = 0; col < n; ++col) {
      double re = 0.0, im = 0.0;
      if (!std::getline(ss, tok, ',')) {
        throw ConfigError("env: matrix row " + std::to_string(r) +
                          " is too short");
      }
      re = std::stod(tok);
      if (!std::getline(ss, tok, ',')) {
        throw ConfigError("env: matrix row " + std::to_string(r) +
                          " is missing an imaginary part");
      }
      im = std::stod(tok);
      m(r, col) = Complex(re, im);
    }
  }
  try {
    return EnvState(d, d, DensityMatrix(m));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("env: matrix file is not a valid state: ") +
                      e.what());
  }
}

void write_env_matrix_file(const std::string& path, const EnvState& env) {
  if (!env.square()) {
    throw std::invalid_argument(
        "write_env_matrix_file: environment must be square");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw ConfigError("env: cannot open '" + path + "' for writing");
  }
  const ComplexMatrix& m = env.rho().matrix();
  os << "d=" << env.dim_s() << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      if (col) os << ',';
      os << format_full(m(r, col).real()) << ',' << format_full(m(r, col).imag());
    }
    os << "\n";
  }
}

std::string count_records_to_csv(const std::vector<CountRecord>& records) {
  CsvBuilder csv({"basis_label", "outcome_index", "counts", "efficiency"});
  for (const CountRecord& r : records) {
    for (int k = 0; k < 2; ++k) {
      csv.row({to_string(r.basis), cell(k),
               cell(r.counts[static_cast<size_t>(k)]),
               cell(r.efficiencies[static_cast<size_t>(k)])});
    }
  }
  return csv.str();
}

std::vector<CountRecord> count_records_from_csv(const std::string& csv) {
  std::stringstream ss(csv);
  std::string line;
  if (!std::getline(ss, line) ||
      line != "basis_label,outcome_index,counts,efficiency") {
    throw ConfigError("counts: unexpected CSV header '" + line + "'");
  }
  std::vector<CountRecord> records;
  CountRecord current{BasisLabel::Z, {0.0, 0.0}, {1.0, 1.0}};
  bool have_first = false;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string label, index, counts, eta;
    if (!std::getline(ls, label, ',') || !std::getline(ls, index, ',') ||
        !std::getline(ls, counts, ',') || !std::getline(ls, eta, ',')) {
      throw ConfigError("counts: malformed row '" + line + "'");
    }
    const int k = std::stoi(index);
    if (k != 0 && k != 1) {
      throw ConfigError("counts: outcome_index must be 0 or 1");
    }
    if (k == 0) {
      current = CountRecord{basis_from_string(label), {0.0, 0.0}, {1.0, 1.0}};
      have_first = true;
    } else if (!have_first || basis_from_string(label) != current.basis) {
      throw ConfigError("counts: outcome 1 row does not follow its basis");
    }
    current.counts[static_cast<size_t>(k)] = std::stod(counts);
    current.efficiencies[static_cast<size_t>(k)] = std::stod(eta);
    if (k == 1) {
      records.push_back(current);
      have_first = false;
    }
  }
  return records;
}

}  // namespace flipsim
