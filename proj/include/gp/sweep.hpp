#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gp/fpeps.hpp"

namespace gp {

inline constexpr const char* kSweepVersion = "0.1.0";

// Config file (JSON), all sections optional except grid:
//
//   grid:      t, y, z each a number, a list, or {"from", "to", "steps"};
//              "line": {"offset", "slope"} replaces z by offset + slope * y
//   geometry:  L1, L2 (list; used by the finite-lattice tasks)
//   tasks:     subset of gap chern phase_classify wilson_table thooft
//              meson_scan horseshoe correlators
//   output:    dir, format (csv | json), name
//   solver:    tol, max_iter, krylov_dim, workers, max_l1
//   boundary_flux
//   options:   per-task knobs, see TaskOptions
//   validate:  see ValidateOptions
struct TaskOptions {
  int chern_grid = 64;
  int loop_l1 = 2, loop_l2 = 4;
  int buffer = 2;
  std::vector<double> thooft_q = {0.5, 1.3, 3.141592653589793};
  int thooft_size = 1;
  std::vector<int> meson_lengths = {1, 3, 5};
  std::vector<int> horseshoe_lengths = {1, 3, 5, 7};
  int correlator_max_sep = 4;
};

struct ValidateOptions {
  int points = 5;
  std::uint32_t seed = 7;
  std::vector<std::pair<int, int>> sizes = {{2, 2}};
  bool corrupt = false;  // negative control: oracle built from the flipped-side operator
  bool include_t0 = true;
};

struct SweepConfig {
  std::vector<double> t = {1.0}, y, z;
  std::optional<std::pair<double, double>> line;  // z = first + second * y
  int L1 = 4;
  std::vector<int> L2 = {8};
  std::vector<std::string> tasks = {"gap"};
  std::string out_dir = "out";
  std::string format = "csv";
  std::string name = "sweep";
  double tol = 1e-8;
  int max_iter = 2000;
  int krylov_dim = 30;
  int workers = 1;
  int max_l1 = 6;
  int boundary_flux = 0;
  TaskOptions options;
  ValidateOptions validate;
  std::string canonical;  // canonical dump of the parsed file, for the hash
};

// Throws ConfigError("origin:line: field: message").
SweepConfig parse_config(const std::string& text, const std::string& origin = "<config>");
SweepConfig load_config(const std::filesystem::path& file);

// Range and cap checks, repeated after command-line overrides.
void check_config(const SweepConfig& c);

std::uint64_t fnv1a(const std::string& s);
std::string config_hash(const SweepConfig& c);

struct GridPoint {
  double t = 0, y = 0, z = 0;
};
std::vector<GridPoint> grid_points(const SweepConfig& c);

using Value = std::variant<double, std::string>;

struct Record {
  std::size_t point = 0;
  std::string task;
  double t = 0, y = 0, z = 0;
  int L1 = 0, L2 = 0;
  std::string status = "ok";  // or the error kind
  std::string message;
  std::map<std::string, Value> values;
};

struct SweepResult {
  std::vector<Record> records;
  std::size_t failed = 0;
};

// One job per grid point, task and L2 (finite-lattice tasks only); the
// records come back in job order whatever the worker count.
SweepResult run_sweep(const SweepConfig& c);

// Run one task at one point; exceptions are turned into an error record.
Record run_task(const SweepConfig& c, const std::string& task, const GridPoint& g, int L2, std::size_t point);

// Errors of the library mapped to their kind name.
std::string error_kind(const std::exception& e);

// Header lines: tool and library versions plus the config hash.
std::map<std::string, std::string> output_header(const SweepConfig& c, const std::string& command);

// Columns are point, task, t, y, z, L1, L2, status, message and then the
// sorted union of the value keys.  Numbers use 17 significant digits.
void write_records(const std::vector<Record>& records, const std::map<std::string, std::string>& header,
                   const std::filesystem::path& file, const std::string& format);
std::vector<Record> read_records(const std::filesystem::path& file, const std::string& format);

// Fermionic phase label and minimum of E(k) on the chern grid for every
// point, plus the transfer gap when "gap" is among the tasks.
std::vector<Record> phase_map(const SweepConfig& c);

struct ValidationRow {
  std::size_t point = 0;
  int Lx = 0, Ly = 0;
  double t = 0, y = 0, z = 0;
  std::string observable;
  cd transfer, oracle;
  double diff = 0;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  double max_diff = 0;
  bool passed(double threshold = 1e-8) const { return max_diff <= threshold; }
};

ValidationReport validate_against_oracle(const SweepConfig& c);
std::vector<Record> validation_records(const ValidationReport& r);

std::string format_double(double v);

}  // namespace gp
