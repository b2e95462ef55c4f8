#include "gp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Core>
#include <json.hpp>

#include "gp/errors.hpp"
#include "gp/observables.hpp"
#include "gp/oracle.hpp"
#include "gp/transfer.hpp"

namespace gp {

using json = nlohmann::json;

namespace {

const std::set<std::string> kTasks = {"gap",    "chern",      "phase_classify", "wilson_table",
                                      "thooft", "meson_scan", "horseshoe",      "correlators"};

// Tasks evaluated on an explicit L1 x L2 lattice; the others choose their own
// length or work in the transfer limit.
bool uses_L2(const std::string& task) { return task == "thooft" || task == "meson_scan"; }

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

struct Diag {
  const std::string& text;
  const std::string& origin;

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    const std::string key = field.substr(field.rfind('.') + 1);
    const std::size_t at = text.find("\"" + key + "\"");
    std::string where = origin;
    if (at != std::string::npos) where += ":" + std::to_string(line_of(text, at));
    throw ConfigError(where + ": " + field + ": " + msg);
  }

  double number(const json& j, const std::string& field) const {
    if (!j.is_number()) fail(field, "expected a number");
    return j.get<double>();
  }

  int integer(const json& j, const std::string& field) const {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    return j.get<int>();
  }

  std::string string(const json& j, const std::string& field) const {
    if (!j.is_string()) fail(field, "expected a string");
    return j.get<std::string>();
  }

  std::vector<double> axis(const json& j, const std::string& field) const {
    std::vector<double> out;
    if (j.is_number()) {
      out.push_back(j.get<double>());
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
    } else if (j.is_object()) {
      for (const char* k : {"from", "to", "steps"})
        if (!j.contains(k)) fail(field, std::string("range without \"") + k + "\"");
      const double a = number(j["from"], field + ".from"), b = number(j["to"], field + ".to");
      const int n = integer(j["steps"], field + ".steps");
      if (n < 1) fail(field + ".steps", "must be at least 1");
      for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    } else {
      fail(field, "expected a number, a list or {from, to, steps}");
    }
    if (out.empty()) fail(field, "empty range");
    return out;
  }

  std::vector<int> ints(const json& j, const std::string& field) const {
    std::vector<int> out;
    if (j.is_number_integer()) return {j.get<int>()};
    if (!j.is_array()) fail(field, "expected an integer or a list");
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], field + "[" + std::to_string(i) + "]"));
    if (out.empty()) fail(field, "empty list");
    return out;
  }

  void known(const json& obj, const std::string& field, const std::set<std::string>& keys) const {
    if (!obj.is_object()) fail(field, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!keys.count(it.key())) fail(field.empty() ? it.key() : field + "." + it.key(), "unknown field");
  }
};

}  // namespace

void check_config(const SweepConfig& c) {
  auto bad = [](const std::string& f, const std::string& m) { throw ConfigError(f + ": " + m); };
  if (c.y.empty() || c.t.empty() || (c.z.empty() && !c.line)) bad("grid", "empty range");
  if (c.L1 < 2) bad("geometry.L1", "below 2");
  if (c.L1 > c.max_l1) bad("geometry.L1", "above the cap max_l1 = " + std::to_string(c.max_l1));
  for (int L2 : c.L2)
    if (L2 < 1) bad("geometry.L2", "must be positive");
  for (double t : c.t)
    if (t < 0) bad("grid.t", "negative");
  for (const std::string& task : c.tasks)
    if (!kTasks.count(task)) bad("tasks", "unknown task " + task);
  if (c.format != "csv" && c.format != "json") bad("output.format", "csv or json");
  if (c.workers < 1) bad("solver.workers", "must be positive");
  if (!(c.tol > 0 && c.tol <= 1e-4)) bad("solver.tol", "outside (0, 1e-4]");
  if (c.max_iter < 1) bad("solver.max_iter", "must be positive");
}

SweepConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" + std::to_string(line_of(text, e.byte ? e.byte - 1 : 0)) + ": " + e.what());
  }
  const Diag d{text, origin};
  SweepConfig c;
  d.known(j, "", {"grid", "geometry", "tasks", "output", "solver", "boundary_flux", "options", "validate", "comment"});
  if (!j.contains("grid")) d.fail("grid", "missing");

  const json& g = j["grid"];
  d.known(g, "grid", {"t", "y", "z", "line"});
  if (g.contains("t")) c.t = d.axis(g["t"], "grid.t");
  if (!g.contains("y")) d.fail("grid.y", "missing");
  c.y = d.axis(g["y"], "grid.y");
  if (g.contains("line")) {
    const json& l = g["line"];
    d.known(l, "grid.line", {"offset", "slope"});
    if (!l.contains("offset") || !l.contains("slope")) d.fail("grid.line", "needs offset and slope");
    if (g.contains("z")) d.fail("grid.z", "z is fixed by grid.line");
    c.line = {d.number(l["offset"], "grid.line.offset"), d.number(l["slope"], "grid.line.slope")};
  } else {
    if (!g.contains("z")) d.fail("grid.z", "missing");
    c.z = d.axis(g["z"], "grid.z");
  }

  if (j.contains("geometry")) {
    const json& geo = j["geometry"];
    d.known(geo, "geometry", {"L1", "L2"});
    if (geo.contains("L1")) c.L1 = d.integer(geo["L1"], "geometry.L1");
    if (geo.contains("L2")) c.L2 = d.ints(geo["L2"], "geometry.L2");
  }
  if (j.contains("tasks")) {
    const json& t = j["tasks"];
    if (!t.is_array() || t.empty()) d.fail("tasks", "expected a nonempty list");
    c.tasks.clear();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string name = d.string(t[i], "tasks[" + std::to_string(i) + "]");
      if (!kTasks.count(name)) d.fail("tasks", "unknown task \"" + name + "\"");
      if (std::find(c.tasks.begin(), c.tasks.end(), name) == c.tasks.end()) c.tasks.push_back(name);
    }
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    d.known(o, "output", {"dir", "format", "name"});
    if (o.contains("dir")) c.out_dir = d.string(o["dir"], "output.dir");
    if (o.contains("format")) c.format = d.string(o["format"], "output.format");
    if (o.contains("name")) c.name = d.string(o["name"], "output.name");
    if (c.format != "csv" && c.format != "json") d.fail("output.format", "expected csv or json");
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    d.known(s, "solver", {"tol", "max_iter", "krylov_dim", "workers", "max_l1"});
    if (s.contains("tol")) c.tol = d.number(s["tol"], "solver.tol");
    if (s.contains("max_iter")) c.max_iter = d.integer(s["max_iter"], "solver.max_iter");
    if (s.contains("krylov_dim")) c.krylov_dim = d.integer(s["krylov_dim"], "solver.krylov_dim");
    if (s.contains("workers")) c.workers = d.integer(s["workers"], "solver.workers");
    if (s.contains("max_l1")) c.max_l1 = d.integer(s["max_l1"], "solver.max_l1");
  }
  if (j.contains("boundary_flux")) c.boundary_flux = d.integer(j["boundary_flux"], "boundary_flux");

  if (j.contains("options")) {
    const json& o = j["options"];
    TaskOptions& t = c.options;
    d.known(o, "options", {"chern_grid", "loop_l1", "loop_l2", "buffer", "thooft_q", "thooft_size",
                           "meson_lengths", "horseshoe_lengths", "correlator_max_sep"});
    if (o.contains("chern_grid")) t.chern_grid = d.integer(o["chern_grid"], "options.chern_grid");
    if (o.contains("loop_l1")) t.loop_l1 = d.integer(o["loop_l1"], "options.loop_l1");
    if (o.contains("loop_l2")) t.loop_l2 = d.integer(o["loop_l2"], "options.loop_l2");
    if (o.contains("buffer")) t.buffer = d.integer(o["buffer"], "options.buffer");
    if (o.contains("thooft_q")) t.thooft_q = d.axis(o["thooft_q"], "options.thooft_q");
    if (o.contains("thooft_size")) t.thooft_size = d.integer(o["thooft_size"], "options.thooft_size");
    if (o.contains("meson_lengths")) t.meson_lengths = d.ints(o["meson_lengths"], "options.meson_lengths");
    if (o.contains("horseshoe_lengths"))
      t.horseshoe_lengths = d.ints(o["horseshoe_lengths"], "options.horseshoe_lengths");
    if (o.contains("correlator_max_sep"))
      t.correlator_max_sep = d.integer(o["correlator_max_sep"], "options.correlator_max_sep");
    if (t.chern_grid < 4) d.fail("options.chern_grid", "below 4");
    if (t.loop_l1 < 1 || t.loop_l2 < 1) d.fail("options.loop_l1", "loop sizes must be positive");
    if (t.buffer < 0) d.fail("options.buffer", "negative");
  }

  if (j.contains("validate")) {
    const json& v = j["validate"];
    ValidateOptions& o = c.validate;
    d.known(v, "validate", {"points", "seed", "sizes", "corrupt", "include_t0"});
    if (v.contains("points")) o.points = d.integer(v["points"], "validate.points");
    if (v.contains("seed")) o.seed = static_cast<std::uint32_t>(d.integer(v["seed"], "validate.seed"));
    if (v.contains("corrupt")) {
      if (!v["corrupt"].is_boolean()) d.fail("validate.corrupt", "expected true or false");
      o.corrupt = v["corrupt"].get<bool>();
    }
    if (v.contains("include_t0")) {
      if (!v["include_t0"].is_boolean()) d.fail("validate.include_t0", "expected true or false");
      o.include_t0 = v["include_t0"].get<bool>();
    }
    if (v.contains("sizes")) {
      const json& s = v["sizes"];
      if (!s.is_array() || s.empty()) d.fail("validate.sizes", "expected a list of [Lx, Ly]");
      o.sizes.clear();
      for (const json& e : s) {
        if (!e.is_array() || e.size() != 2) d.fail("validate.sizes", "expected [Lx, Ly]");
        o.sizes.push_back({d.integer(e[0], "validate.sizes"), d.integer(e[1], "validate.sizes")});
      }
    }
    if (o.points < 1) d.fail("validate.points", "must be positive");
  }

  try {
    check_config(c);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    d.fail(msg.substr(0, msg.find(':')), msg.substr(msg.find(':') + 2));
  }
  c.canonical = j.dump();
  return c;
}

SweepConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string() + ": cannot be read");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.string());
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const SweepConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(c.canonical)));
  return buf;
}

std::vector<GridPoint> grid_points(const SweepConfig& c) {
  std::vector<GridPoint> out;
  for (double t : c.t)
    for (double y : c.y) {
      if (c.line) {
        out.push_back({t, y, c.line->first + c.line->second * y});
        continue;
      }
      for (double z : c.z) out.push_back({t, y, z});
    }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParameterError*>(&e)) return "ParameterError";
  if (dynamic_cast<const GeometryError*>(&e)) return "GeometryError";
  if (dynamic_cast<const StaggeringError*>(&e)) return "StaggeringError";
  if (dynamic_cast<const DimensionError*>(&e)) return "DimensionError";
  if (dynamic_cast<const ShapeError*>(&e)) return "ShapeError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const SingularChannelError*>(&e)) return "SingularChannelError";
  if (dynamic_cast<const ResourceError*>(&e)) return "ResourceError";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
  if (dynamic_cast<const NumericalFloorError*>(&e)) return "NumericalFloorError";
  if (dynamic_cast<const NondeterminateChern*>(&e)) return "NondeterminateChern";
  if (dynamic_cast<const std::bad_alloc*>(&e)) return "OutOfMemory";
  return "Error";
}

namespace {

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void put(Record& r, const std::string& key, cd v) {
  r.values[key + "_re"] = v.real();
  r.values[key + "_im"] = v.imag();
}

PepsParameters params(const GridPoint& g) {
  PepsParameters p;
  p.t = g.t;
  p.y = g.y;
  p.z = g.z;
  return p;
}

void task_gap(const SweepConfig& c, const PepsParameters& p, Record& r, const TransferLimits& lim) {
  SpectrumOptions opt;
  opt.tol = c.tol;
  opt.max_iter = c.max_iter;
  opt.krylov_dim = c.krylov_dim;
  if (p.t == 0.0) opt.flux = c.boundary_flux;
  const Spectrum s = dominant_spectrum(p, c.L1, opt, lim);
  r.values["delta"] = s.gap;
  r.values["lambda2_abs"] = std::abs(s.eigenvalues.at(1));
  put(r, "lambda1", s.lambda1);
  r.values["iterations"] = double(s.iterations);
  r.values["residual"] = s.residual;
}

void task_phase(const SweepConfig& c, const PepsParameters& p, Record& r) {
  r.values["label"] = to_string(classify_phase(p.y, p.z));
  if (!(p.t > 0)) return;  // E(k) needs the fermionic state
  const int n = c.options.chern_grid;
  double lo = INFINITY;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) lo = std::min(lo, dispersion(p, 2 * M_PI * a / n, 2 * M_PI * b / n));
  r.values["min_energy"] = lo;
}

void task_wilson(const SweepConfig& c, const PepsParameters& p, Record& r, const TransferLimits& lim) {
  LoopTableOptions opt;
  opt.max_l1 = c.options.loop_l1;
  opt.max_l2 = c.options.loop_l2;
  opt.buffer = c.options.buffer;
  opt.boundary_flux = c.boundary_flux;
  const LoopStats st = wilson_table(p, c.L1, opt, lim);
  for (auto& [k, w] : st.table) put(r, "W_" + std::to_string(k.first) + "_" + std::to_string(k.second), w);
  for (int a = 2; a <= opt.max_l1; ++a)
    for (int b = 2; b <= opt.max_l2; ++b) {
      const std::string key = "chi_" + std::to_string(a) + "_" + std::to_string(b);
      try {
        r.values[key] = creutz_chi(st, a, b);
      } catch (const std::exception& e) {
        r.values[key] = error_kind(e);
      }
    }
  const LoopFit f = fit_area_perimeter(st);
  r.values["law"] = f.law;
  r.values["kappa_area"] = f.kappa_area;
  r.values["kappa_perimeter"] = f.kappa_perimeter;
  r.values["fit_points"] = double(f.points);
}

void task_thooft(const SweepConfig& c, const PepsParameters& p, int L2, Record& r, const TransferLimits& lim) {
  const Geometry g{c.L1, L2, c.boundary_flux};
  const int h = c.options.thooft_size;
  const int x2 = std::max(0, (L2 - h) / 2);
  std::vector<ObservableSpec> specs;
  std::vector<std::string> keys;
  for (double q : c.options.thooft_q) {
    specs.push_back(thooft_loop_spec(0, x2, h, h, c.L1, q));
    keys.push_back("thooft_q" + tag(q));
    specs.push_back(noncontractible_thooft_spec(L2 / 2 - 1 < 0 ? 0 : L2 / 2 - 1, c.L1, q));
    keys.push_back("flux_q" + tag(q));
  }
  const std::vector<cd> v = expectations(p, g, specs, lim);
  for (std::size_t i = 0; i < v.size(); ++i) put(r, keys[i], v[i]);
}

void task_meson(const SweepConfig& c, const PepsParameters& p, int L2, Record& r, const TransferLimits& lim) {
  const Geometry g{c.L1, L2, c.boundary_flux};
  const int x2 = c.options.buffer + c.options.buffer % 2;  // even start vertex at x1 = 0
  std::vector<ObservableSpec> specs;
  for (int l : c.options.meson_lengths) {
    if (x2 + l >= L2) throw GeometryError("meson of length " + std::to_string(l) + " does not fit in L2");
    specs.push_back(meson_spec(0, x2, std::string(l, 'U'), c.L1));
  }
  const std::vector<cd> v = expectations(p, g, specs, lim);
  for (std::size_t i = 0; i < v.size(); ++i) put(r, "meson_" + std::to_string(c.options.meson_lengths[i]), v[i]);
}

void task_horseshoe(const SweepConfig& c, const PepsParameters& p, Record& r, const TransferLimits& lim) {
  for (int l : c.options.horseshoe_lengths) {
    const std::string k = std::to_string(l);
    try {
      const Horseshoe h = horseshoe(p, c.L1, l, c.options.buffer, lim);
      r.values["rho_" + k] = h.rho;
      r.values["meson_abs_" + k] = std::abs(h.meson);
      r.values["wilson_re_" + k] = h.wilson.real();
    } catch (const NumericalFloorError& e) {
      r.values["rho_" + k] = error_kind(e);
    }
  }
}

void task_correlators(const SweepConfig& c, const PepsParameters& p, Record& r, const TransferLimits& lim) {
  const CorrelationFit f = wilson_correlation_decay(p, c.L1, c.options.correlator_max_sep, c.options.buffer, lim);
  for (std::size_t i = 0; i < f.separations.size(); ++i)
    r.values["corr_" + std::to_string(f.separations[i])] = f.values[i];
  r.values["slope"] = f.slope;
  r.values["r2"] = f.r2;
  r.values["fit_points"] = double(f.used);
  r.values["reliable"] = f.reliable ? 1.0 : 0.0;
}

}  // namespace

Record run_task(const SweepConfig& c, const std::string& task, const GridPoint& g, int L2, std::size_t point) {
  Record r;
  r.point = point;
  r.task = task;
  r.t = g.t;
  r.y = g.y;
  r.z = g.z;
  r.L1 = c.L1;
  r.L2 = L2;
  const PepsParameters p = params(g);
  TransferLimits lim;
  lim.max_L1 = c.max_l1;
  try {
    if (task == "gap") task_gap(c, p, r, lim);
    else if (task == "chern") r.values["chern"] = double(chern_number(p, c.options.chern_grid));
    else if (task == "phase_classify") task_phase(c, p, r);
    else if (task == "wilson_table") task_wilson(c, p, r, lim);
    else if (task == "thooft") task_thooft(c, p, L2, r, lim);
    else if (task == "meson_scan") task_meson(c, p, L2, r, lim);
    else if (task == "horseshoe") task_horseshoe(c, p, r, lim);
    else if (task == "correlators") task_correlators(c, p, r, lim);
    else throw ConfigError("unknown task " + task);
  } catch (const std::exception& e) {
    r.values.clear();
    r.status = error_kind(e);
    r.message = e.what();
  }
  return r;
}

SweepResult run_sweep(const SweepConfig& c) {
  struct Job {
    std::size_t point;
    std::string task;
    int L2;
  };
  const std::vector<GridPoint> pts = grid_points(c);
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (const std::string& task : c.tasks) {
      if (uses_L2(task))
        for (int L2 : c.L2) jobs.push_back({i, task, L2});
      else
        jobs.push_back({i, task, 0});
    }

  SweepResult res;
  res.records.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();)
      res.records[j] = run_task(c, jobs[j].task, pts[jobs[j].point], jobs[j].L2, jobs[j].point);
  };
  const int n = std::max(1, std::min<int>(c.workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  for (const Record& r : res.records)
    if (r.status != "ok") ++res.failed;
  return res;
}

std::map<std::string, std::string> output_header(const SweepConfig& c, const std::string& command) {
  return {
      {"tool", std::string("gpeps ") + kSweepVersion},
      {"command", command},
      {"config_hash", config_hash(c)},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
      {"format", "1"},
  };
}

namespace {

const std::vector<std::string> kFixed = {"point", "task", "t", "y", "z", "L1", "L2", "status", "message"};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string value_text(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return format_double(*d);
  return std::get<std::string>(v);
}

std::string json_number(double v) {
  if (std::isfinite(v)) return format_double(v);
  return json(format_double(v)).dump();  // "nan", "inf" as strings
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') out.back() += '"', ++i;
      else if (ch == '"') quoted = false;
      else out.back() += ch;
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else {
      out.back() += ch;
    }
  }
  return out;
}

std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

void write_records(const std::vector<Record>& records, const std::map<std::string, std::string>& header,
                   const std::filesystem::path& file, const std::string& format) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());

  if (format == "csv") {
    for (auto& [k, v] : header) out << "# " << k << ": " << v << "\n";
    std::set<std::string> keys;
    for (const Record& r : records)
      for (auto& kv : r.values) keys.insert(kv.first);
    std::string line;
    for (const std::string& k : kFixed) line += (line.empty() ? "" : ",") + k;
    for (const std::string& k : keys) line += "," + csv_field(k);
    out << line << "\n";
    for (const Record& r : records) {
      out << r.point << "," << csv_field(r.task) << "," << format_double(r.t) << "," << format_double(r.y) << ","
          << format_double(r.z) << "," << r.L1 << "," << r.L2 << "," << csv_field(r.status) << ","
          << csv_field(r.message);
      for (const std::string& k : keys) {
        out << ",";
        auto it = r.values.find(k);
        if (it != r.values.end()) out << csv_field(value_text(it->second));
      }
      out << "\n";
    }
  } else if (format == "json") {
    out << "{\n  \"header\": {";
    bool first = true;
    for (auto& [k, v] : header) {
      out << (first ? "" : ", ") << json(k).dump() << ": " << json(v).dump();
      first = false;
    }
    out << "},\n  \"records\": [";
    for (std::size_t i = 0; i < records.size(); ++i) {
      const Record& r = records[i];
      out << (i ? ",\n    " : "\n    ") << "{\"point\": " << r.point << ", \"task\": " << json(r.task).dump()
          << ", \"t\": " << json_number(r.t) << ", \"y\": " << json_number(r.y) << ", \"z\": " << json_number(r.z)
          << ", \"L1\": " << r.L1 << ", \"L2\": " << r.L2 << ", \"status\": " << json(r.status).dump()
          << ", \"message\": " << json(r.message).dump() << ", \"values\": {";
      bool f = true;
      for (auto& [k, v] : r.values) {
        out << (f ? "" : ", ") << json(k).dump() << ": ";
        if (const double* d = std::get_if<double>(&v)) out << json_number(*d);
        else out << json(std::get<std::string>(v)).dump();
        f = false;
      }
      out << "}}";
    }
    out << (records.empty() ? "]\n}\n" : "\n  ]\n}\n");
  } else {
    throw ConfigError("output.format: expected csv or json");
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::vector<Record> read_records(const std::filesystem::path& file, const std::string& format) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::vector<Record> out;

  if (format == "csv") {
    std::string line;
    std::vector<std::string> cols;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> f = split_csv(line);
      if (cols.empty()) {
        cols = f;
        continue;
      }
      if (f.size() != cols.size()) throw std::runtime_error("ragged row in " + file.string());
      Record r;
      r.point = std::stoull(f[0]);
      r.task = f[1];
      r.t = std::strtod(f[2].c_str(), nullptr);
      r.y = std::strtod(f[3].c_str(), nullptr);
      r.z = std::strtod(f[4].c_str(), nullptr);
      r.L1 = std::stoi(f[5]);
      r.L2 = std::stoi(f[6]);
      r.status = f[7];
      r.message = f[8];
      for (std::size_t i = kFixed.size(); i < f.size(); ++i) {
        if (f[i].empty()) continue;
        if (auto v = as_number(f[i])) r.values[cols[i]] = *v;
        else r.values[cols[i]] = f[i];
      }
      out.push_back(std::move(r));
    }
    return out;
  }

  const json j = json::parse(in);
  auto number = [](const json& v) {
    return v.is_string() ? std::strtod(v.get<std::string>().c_str(), nullptr) : v.get<double>();
  };
  for (const json& e : j.at("records")) {
    Record r;
    r.point = e.at("point").get<std::size_t>();
    r.task = e.at("task").get<std::string>();
    r.t = number(e.at("t"));
    r.y = number(e.at("y"));
    r.z = number(e.at("z"));
    r.L1 = e.at("L1").get<int>();
    r.L2 = e.at("L2").get<int>();
    r.status = e.at("status").get<std::string>();
    r.message = e.at("message").get<std::string>();
    for (auto it = e.at("values").begin(); it != e.at("values").end(); ++it) {
      if (it->is_number()) r.values[it.key()] = it->get<double>();
      else if (auto v = as_number(it->get<std::string>())) r.values[it.key()] = *v;
      else r.values[it.key()] = it->get<std::string>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Record> phase_map(const SweepConfig& c) {
  SweepConfig pc = c;
  pc.tasks = {"phase_classify"};
  const bool gap = std::find(c.tasks.begin(), c.tasks.end(), "gap") != c.tasks.end();
  if (gap) pc.tasks.push_back("gap");
  const SweepResult res = run_sweep(pc);

  std::vector<Record> out;
  for (const Record& r : res.records) {
    if (r.task == "phase_classify") {
      Record m = r;
      m.task = "phase_map";
      out.push_back(std::move(m));
      continue;
    }
    Record& m = out.back();
    if (r.status == "ok") {
      m.values["delta"] = r.values.at("delta");
    } else {
      m.values["delta"] = r.status;
      if (m.status == "ok") m.status = r.status, m.message = r.message;
    }
  }
  return out;
}

namespace {

ObservableSpec product(const std::string& label, std::vector<PathElement> path) {
  ObservableSpec s;
  s.kind = ObservableKind::FieldProduct;
  s.path = std::move(path);
  s.label = label;
  return s;
}

// Local fields, a few products, every 1 x 1 Wilson loop, short strings and a
// contractible 't Hooft loop.
std::vector<ObservableSpec> validation_set(int Lx, int Ly) {
  std::vector<ObservableSpec> v;
  for (int x2 = 0; x2 < Ly; ++x2)
    for (int x1 = 0; x1 < Lx; ++x1) {
      const std::string at = "(" + std::to_string(x1) + "," + std::to_string(x2) + ")";
      v.push_back(product("n" + at, {{x1, x2, Slot::Psi, OpTag::Number}}));
      v.push_back(product("E_s" + at, {{x1, x2, Slot::S, OpTag::Sigma}}));
      if (x2 + 1 < Ly) v.push_back(product("E_t" + at, {{x1, x2, Slot::T, OpTag::Sigma}}));
      v.push_back(product("E_s E_s" + at, {{x1, x2, Slot::S, OpTag::Sigma}, {(x1 + 1) % Lx, x2, Slot::S, OpTag::Sigma}}));
      v.push_back(product("n E_s" + at, {{x1, x2, Slot::Psi, OpTag::Number}, {x1, x2, Slot::S, OpTag::Sigma}}));
      if (x2 + 1 < Ly) {
        v.push_back(wilson_loop_spec(1, 1, x1, x2, Lx));
        if (vertex_sign(x1, x2) > 0) v.push_back(meson_spec(x1, x2, "U", Lx));
        else v.push_back(meson_spec(x1, x2 + 1, "D", Lx));
      }
    }
  v.push_back(meson_spec(0, 0, "R", Lx));
  v.push_back(thooft_loop_spec(0, 0, 1, 1, Lx, 1.3));
  return v;
}

}  // namespace

ValidationReport validate_against_oracle(const SweepConfig& c) {
  const ValidateOptions& o = c.validate;
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> ut(0.2, 1.5), uyz(-2.0, 2.0);
  std::vector<GridPoint> pts;
  for (int i = 0; i < o.points; ++i) {
    GridPoint g{ut(rng), uyz(rng), uyz(rng)};
    if (i == 0 && o.include_t0) g.t = 0.0;
    pts.push_back(g);
  }

  TransferLimits lim;
  lim.max_L1 = c.max_l1;
  ValidationReport rep;
  for (auto [Lx, Ly] : o.sizes) {
    if (Lx * Ly > 9) throw ResourceError("oracle lattice above 3 x 3 vertices", Lx * Ly);
    const std::vector<ObservableSpec> specs = validation_set(Lx, Ly);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const PepsParameters p = params(pts[i]);
      OracleOptions oo;
      if (o.corrupt) oo.variant = AbVariant::FlippedSide;
      const FockState psi = exact_gauged_state(p, Lx, Ly, oo);
      const std::vector<cd> tm = expectations(p, Geometry{Lx, Ly, 0}, specs, lim);
      for (std::size_t k = 0; k < specs.size(); ++k) {
        ValidationRow row;
        row.point = i;
        row.Lx = Lx;
        row.Ly = Ly;
        row.t = pts[i].t;
        row.y = pts[i].y;
        row.z = pts[i].z;
        row.observable = specs[k].label;
        row.transfer = tm[k];
        row.oracle = oracle_expectation(psi, Lx, specs[k]);
        row.diff = std::abs(row.transfer - row.oracle);
        rep.max_diff = std::max(rep.max_diff, row.diff);
        rep.rows.push_back(std::move(row));
      }
    }
  }
  return rep;
}

std::vector<Record> validation_records(const ValidationReport& rep) {
  std::vector<Record> out;
  for (const ValidationRow& row : rep.rows) {
    Record r;
    r.point = row.point;
    r.task = "validate";
    r.t = row.t;
    r.y = row.y;
    r.z = row.z;
    r.L1 = row.Lx;
    r.L2 = row.Ly;
    r.values["observable"] = row.observable;
    put(r, "transfer", row.transfer);
    put(r, "oracle", row.oracle);
    r.values["abs_diff"] = row.diff;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace gp
