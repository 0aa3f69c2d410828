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

// Deterministic command front end: HOM dip scans, transfer and erasure
// sweeps over (delay, theta), tomography pipelines and the summary-figure
// tables, emitted as CSV plus a JSON manifest per output file. Identical
// configs and seeds produce byte-identical CSV.

#pragma once

#include "flipsim/protocol.hpp"
#include "flipsim/spectral.hpp"
#include "flipsim/tomography.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace flipsim {

inline constexpr const char* kArtifactName = "flipsim";
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Invalid configuration (maps to CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Command { hom, transfer, erase, tomo, fig2 };
enum class Engine { analytic, composite };
enum class StatsMode { ideal, mc };

const char* to_string(Command c);
const char* to_string(Engine e);
const char* to_string(StatsMode s);

/// Environment specification: "spdc:<dim>", "singlet", "symmetric-bell",
/// "product:<overlap>" or "file:<path>".
struct EnvSpec {
  enum class Kind { spdc, singlet, symmetric_bell, product, file };
  Kind kind = Kind::spdc;
  int spdc_dim = 16;
  double product_overlap = 1.0;
  std::string file_path;

  static EnvSpec parse(const std::string& text);
  std::string str() const;
};

struct RunConfig {
  Command command = Command::hom;

  FilterKind filter_kind = FilterKind::rectangular;
  double center_nm = 810.0;
  double fwhm_nm = 2.7;

  std::vector<double> delays_ps;        // empty = per-command default
  std::vector<double> inset_delays_ps;  // fig2 dip inset; empty = default
  std::vector<double> thetas_deg = {0, 30, 60, 90, 120, 150, 180};

  EnvSpec env;
  double counts_per_basis = 1e6;
  int reps = 10;
  std::uint64_t seed = 1;
  double mode_overlap = 1.0;
  bool compensate_sign = false;
  std::array<double, 2> efficiencies{1.0, 1.0};
  Engine engine = Engine::analytic;
  StatsMode stats = StatsMode::ideal;

  int n_bins = 4096;
  double grid_margin = 2.0;
  double reference_delay_ps = 2.0;
  int mle_max_iters = 10000;

  std::string out_path;          // empty = per-command default
  std::string dump_counts_path;  // tomo only; empty = off

  /// Range and parameter checks; throws ConfigError naming the field.
  void validate() const;
};

/// Fills in per-command defaults (delay grids, output paths).
RunConfig resolve_defaults(RunConfig config);

struct OutputFile {
  std::string path;
  std::string contents;
};

struct RunResult {
  std::vector<OutputFile> files;  // CSV payloads, in emission order
};

RunResult run_hom(const RunConfig& config);
RunResult run_transfer(const RunConfig& config);
RunResult run_erase(const RunConfig& config);
RunResult run_tomo(const RunConfig& config);
RunResult run_fig2(const RunConfig& config);

/// Dispatches on config.command, writes every output file and a
/// "<file>.manifest.json" next to each.
RunResult run_and_write(const RunConfig& config);

/// Manifest payload (config echo, version, seed, timestamp, derived
/// angular-frequency quantities) as a JSON string.
std::string manifest_json(const RunConfig& config, const std::string& file);

// CSV numeric format: shortest %g form capped at 12 significant digits,
// '.' decimal separator, LF line endings.
std::string format_csv_number(double x);

// EnvState matrix file format: first line "d=<int>", then d^2 rows of
// comma-separated "re,im" pairs (2 d^2 numbers per row, row-major).
EnvState read_env_matrix_file(const std::string& path);
void write_env_matrix_file(const std::string& path, const EnvState& env);

// CountRecord CSV round trip; columns
// basis_label,outcome_index,counts,efficiency (two rows per record).
std::string count_records_to_csv(const std::vector<CountRecord>& records);
std::vector<CountRecord> count_records_from_csv(const std::string& csv);

}  // namespace flipsim
