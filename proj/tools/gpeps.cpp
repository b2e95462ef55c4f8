// gpeps: parameter sweeps, phase maps and oracle validation.
//
//   gpeps sweep <config>      one record per grid point and task
//   gpeps validate <config>   transfer matrix against the brute-force oracle
//   gpeps phase-map <config>  fermionic phase labels (+ transfer gap)
//
// Exit codes: 0 ok, 1 config error, 2 validation failure, 3 some points failed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gp/errors.hpp"
#include "gp/sweep.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  int workers = 0;
  std::string out;
  std::string format;
  int max_l1 = 0;
};

gp::SweepConfig load(const std::string& file, const Overrides& o) {
  gp::SweepConfig c = gp::load_config(file);
  if (o.workers > 0) c.workers = o.workers;
  if (!o.out.empty()) c.out_dir = o.out;
  if (!o.format.empty()) c.format = o.format;
  if (o.max_l1 > 0) c.max_l1 = o.max_l1;
  gp::check_config(c);

  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  const fs::path probe = fs::path(c.out_dir) / ".gpeps_probe";
  std::ofstream test(probe);
  if (ec || !test) throw gp::ConfigError("output.dir: " + c.out_dir + " is not writable");
  test.close();
  fs::remove(probe, ec);
  return c;
}

fs::path target(const gp::SweepConfig& c, const std::string& suffix) {
  return fs::path(c.out_dir) / (c.name + suffix + "." + c.format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauged Gaussian fermionic PEPS: sweeps and checks"};
  app.require_subcommand(1);
  Overrides o;
  std::string config;
  app.add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--max-l1", o.max_l1, "largest circumference the transfer matrix may use")
      ->check(CLI::PositiveNumber);

  CLI::App* sweep = app.add_subcommand("sweep", "run the configured tasks over the grid");
  CLI::App* validate = app.add_subcommand("validate", "compare transfer-matrix and oracle expectations");
  CLI::App* phase = app.add_subcommand("phase-map", "phase labels and gaps over the grid");
  for (CLI::App* sub : {sweep, validate, phase}) {
    sub->add_option("config", config, "JSON config file")->required();
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  gp::SweepConfig c;
  try {
    c = load(config, o);
  } catch (const gp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (sweep->parsed()) {
      const gp::SweepResult res = gp::run_sweep(c);
      const fs::path file = target(c, "");
      gp::write_records(res.records, gp::output_header(c, "sweep"), file, c.format);
      std::printf("%zu records, %zu failed -> %s\n", res.records.size(), res.failed, file.c_str());
      return res.failed ? 3 : 0;
    }
    if (phase->parsed()) {
      const std::vector<gp::Record> recs = gp::phase_map(c);
      const fs::path file = target(c, "_phase_map");
      gp::write_records(recs, gp::output_header(c, "phase-map"), file, c.format);
      std::size_t failed = 0;
      for (const gp::Record& r : recs)
        if (r.status != "ok") ++failed;
      std::printf("%zu points, %zu failed -> %s\n", recs.size(), failed, file.c_str());
      return failed ? 3 : 0;
    }
    const gp::ValidationReport rep = gp::validate_against_oracle(c);
    const fs::path file = target(c, "_validate");
    gp::write_records(gp::validation_records(rep), gp::output_header(c, "validate"), file, c.format);
    std::printf("%-8s %-6s %-28s %-24s %-24s %s\n", "point", "size", "observable", "transfer", "oracle", "diff");
    for (const gp::ValidationRow& r : rep.rows)
      std::printf("%-8zu %dx%-4d %-28s %+.6e%+.6ei %+.6e%+.6ei %.2e\n", r.point, r.Lx, r.Ly, r.observable.c_str(),
                  r.transfer.real(), r.transfer.imag(), r.oracle.real(), r.oracle.imag(), r.diff);
    std::printf("max |diff| = %.3e over %zu rows: %s\n", rep.max_diff, rep.rows.size(),
                rep.passed() ? "PASS" : "FAIL");
    return rep.passed() ? 0 : 2;
  } catch (const gp::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 1;  // geometry beyond the oracle caps
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
