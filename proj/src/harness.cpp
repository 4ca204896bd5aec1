#include "ftl/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "ftl/errors.hpp"

namespace ftl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto item = trim(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) throw ConfigError(key + ": not a number: '" + s + "'");
  return v;
}

std::size_t to_count(const std::string& key, const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || v < 0) throw ConfigError(key + ": not a non-negative integer: '" + s + "'");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": not a boolean: '" + s + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(to_double(key, item));
  return out;
}

class KeyValues {
 public:
  void insert(std::string key, std::string value, std::size_t line) {
    if (!values_.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
  }
  std::optional<std::string> take(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    auto v = it->second;
    values_.erase(it);
    return v;
  }
  void reject_leftovers() const {
    if (!values_.empty()) throw ConfigError("unknown key '" + values_.begin()->first + "'");
  }

 private:
  std::map<std::string, std::string> values_;
};

std::ostringstream csv_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

const ParticleState& state_at(const Trajectory& tr, double t) {
  for (const auto& s : tr.states) {
    if (s.t == t) return s;
  }
  throw InvalidInput("no stored state at t = " + std::to_string(t));
}

std::filesystem::path entry_dir(const ExperimentConfig& config, std::size_t n) {
  return config.out_dir / ("n" + std::to_string(n));
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

// Exits 1 and names the first failing estimate of each n.
int report_failures(const std::vector<RunEntry>& entries, std::ostream& log) {
  int code = 0;
  for (const auto& e : entries) {
    if (const auto* f = e.report.first_failure()) {
      log << "n=" << e.n << " FAIL " << f->name << " worst=" << f->worst_value << " bound=" << f->bound
          << " t=" << f->worst_time << "\n";
      code = 1;
    } else {
      log << "n=" << e.n << " PASS (" << e.report.estimates.size() << " estimates, " << e.trajectory.states.size()
          << " stored states)\n";
    }
  }
  return code;
}

void write_reports(const ExperimentConfig& config, const std::vector<RunEntry>& entries) {
  for (const auto& e : entries) {
    const auto dir = entry_dir(config, e.n);
    ensure_dir(dir);
    write_atomic(dir / "report.json", report_json(e.report));
    write_atomic(dir / "series.csv", series_csv(e.report));
  }
}

struct Reference {
  std::optional<JuxtaposedRiemann> exact;
  std::optional<GridSolution> fine;
  double self_error = 0.0;

  std::size_t slice(double t) const {
    const auto& ts = fine->times;
    const auto it = std::find(ts.begin(), ts.end(), t);
    if (it == ts.end()) throw InvalidInput("finite-volume reference has no slice at t = " + std::to_string(t));
    return static_cast<std::size_t>(it - ts.begin());
  }
};

std::optional<JuxtaposedRiemann> exact_reference(const ExperimentConfig& config, double t_max) {
  if (!config.model.is_power_law()) return std::nullopt;
  JuxtaposedRiemann ex(config.datum, config.model);
  if (t_max > ex.interaction_time()) return std::nullopt;
  return ex;
}

double default_dx(const ExperimentConfig& config) {
  const std::size_t n_max = config.n_values.empty() ? 100 : config.n_values.back();
  return 1.0 / (2.0 * static_cast<double>(n_max) * config.datum.sup_norm());
}

Reference build_reference(const ExperimentConfig& config, bool need_fv) {
  const auto times = config.evaluation_times();
  const double t_max = times.back();
  Reference ref;
  if (config.reference != ReferenceKind::finite_volume) {
    ref.exact = exact_reference(config, t_max);
    if (!ref.exact && config.reference == ReferenceKind::exact) {
      throw ConfigError("reference.kind = exact needs a power-law model and times before the first wave interaction");
    }
  }
  if (!ref.exact || need_fv) {
    const double dx = config.reference_dx.value_or(default_dx(config));
    const auto coarse = fv_reference(config.datum, config.model, dx, t_max, times, config.reference_cfl);
    ref.fine = fv_reference(config.datum, config.model, 0.5 * dx, t_max, times, config.reference_cfl);
    for (double t : times) {
      const auto k = ref.slice(t);
      ref.self_error = std::max(ref.self_error, 2.0 * l1_distance(coarse.field(k), ref.fine->field(k)));
    }
  }
  return ref;
}

}  // namespace

// Config ---------------------------------------------------------------------------

double ExperimentConfig::window() const {
  if (window_m) return *window_m;
  const auto m = model.with_rho_bar(datum.sup_norm());
  const double left = datum.x_min() + solver.t_end * std::min(0.0, m.v(m.rho_bar()));
  const double right = datum.x_max() + solver.t_end * m.v_max();
  return std::max(std::abs(left), std::abs(right));
}

std::vector<double> ExperimentConfig::evaluation_times() const {
  std::vector<double> out;
  for (double t : schedule) {
    if (t >= delta()) out.push_back(t);
  }
  if (out.empty()) out.push_back(solver.t_end);
  return out;
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  KeyValues kv;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const auto line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    kv.insert(std::move(key), value, line_no);
  }

  ExperimentConfig c;
  const auto num = [&](const std::string& key, double fallback) {
    const auto v = kv.take(key);
    return v ? to_double(key, *v) : fallback;
  };

  const std::string kind = kv.take("model.kind").value_or("power_law");
  const double v_max = num("model.v_max", 1.0);
  const double gamma = num("model.gamma", 1.0);
  const double beta = num("model.beta", 0.5);
  try {
    if (kind == "power_law") {
      c.model = VelocityModel::power_law(v_max, gamma);
    } else if (kind == "logarithmic") {
      c.model = VelocityModel::logarithmic(v_max, beta);
    } else {
      throw ConfigError("model.kind must be power_law or logarithmic, got '" + kind + "'");
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }

  const auto datum = kv.take("datum");
  if (!datum || datum->empty()) throw ConfigError("datum is required");
  c.datum_spec = *datum;
  std::string spec = *datum;
  if (spec.starts_with("file:")) {
    std::filesystem::path p = spec.substr(5);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    spec = "file:" + p.string();
  }
  try {
    c.datum = make_datum(spec);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("datum: ") + e.what());
  }

  const auto n_list = kv.take("n");
  if (n_list) {
    for (const auto& item : split_list(*n_list)) c.n_values.push_back(to_count("n", item));
  }
  if (c.n_values.empty()) throw ConfigError("n: at least one particle count is required");
  for (std::size_t k = 0; k < c.n_values.size(); ++k) {
    if (c.n_values[k] < 1) throw ConfigError("n: values must be >= 1");
    if (k > 0 && c.n_values[k] <= c.n_values[k - 1]) throw ConfigError("n: values must be strictly increasing");
  }

  c.solver.t_end = num("solver.t_end", c.solver.t_end);
  c.solver.dt_max = num("solver.dt_max", c.solver.dt_max);
  c.solver.cfl = num("solver.cfl", c.solver.cfl);
  c.solver.tolerance = num("solver.tolerance", c.solver.tolerance);
  if (const auto v = kv.take("solver.sample_stride")) c.solver.sample_stride = to_count("solver.sample_stride", *v);

  const double t_end = c.solver.t_end;
  if (!(t_end >= 0.0)) throw ConfigError("solver.t_end must be >= 0");
  std::vector<double> schedule;
  if (const auto v = kv.take("schedule.uniform")) {
    const auto count = to_count("schedule.uniform", *v);
    for (std::size_t k = 1; k <= count; ++k) schedule.push_back(t_end * static_cast<double>(k) / static_cast<double>(count));
  }
  if (const auto v = kv.take("schedule.dyadic")) {
    const auto levels = to_count("schedule.dyadic", *v);
    if (levels > 60) throw ConfigError("schedule.dyadic: at most 60 levels");
    for (std::size_t k = 0; k <= levels; ++k) c.dyadic_times.push_back(std::ldexp(t_end, -static_cast<int>(k)));
    if (levels == 0) c.dyadic_times.clear();
    schedule.insert(schedule.end(), c.dyadic_times.begin(), c.dyadic_times.end());
  }
  if (const auto v = kv.take("schedule.times")) {
    const auto ts = to_doubles("schedule.times", *v);
    schedule.insert(schedule.end(), ts.begin(), ts.end());
  }
  for (double t : schedule) {
    if (!(t > 0.0 && t <= t_end)) throw ConfigError("schedule: times must lie in (0, t_end]");
  }
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
  std::sort(c.dyadic_times.begin(), c.dyadic_times.end());
  c.schedule = schedule;
  c.solver.sample_times = schedule;
  try {
    c.solver.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }

  auto& d = c.diagnostics;
  if (const auto v = kv.take("diagnostics.tolerance")) d.override_all(to_double("diagnostics.tolerance", *v));
  d.d_tol = num("diagnostics.d_tol", d.d_tol);
  d.gap_tol = num("diagnostics.gap_tol", d.gap_tol);
  d.tv_tol = num("diagnostics.tv_tol", d.tv_tol);
  d.w1_tol = num("diagnostics.w1_tol", d.w1_tol);
  d.support_tol = num("diagnostics.support_tol", d.support_tol);
  d.mass_tol = num("diagnostics.mass_tol", d.mass_tol);
  d.gn_tol = num("diagnostics.gn_tol", d.gn_tol);
  d.c_tol = num("diagnostics.c_tol", d.c_tol);
  if (const auto v = kv.take("diagnostics.c_z")) d.c_z = to_doubles("diagnostics.c_z", *v);
  d.c_t_min = num("diagnostics.c_t_min", d.c_t_min);
  d.c_t_max = num("diagnostics.c_t_max", d.c_t_max);
  if (const auto v = kv.take("diagnostics.c_exhaustive")) d.c_exhaustive_asserted = to_bool("diagnostics.c_exhaustive", *v);
  if (const auto v = kv.take("diagnostics.tol_scale")) d.scale(to_double("diagnostics.tol_scale", *v));
  if (const auto v = kv.take("diagnostics.test_function")) {
    const auto p = to_doubles("diagnostics.test_function", *v);
    if (p.size() != 4 || !(p[1] > 0.0) || !(p[3] > 0.0)) {
      throw ConfigError("diagnostics.test_function: expected x_center, x_half_width > 0, t_center, t_half_width > 0");
    }
    d.test_function = TestFunction{p[0], p[1], p[2], p[3]};
  }
  for (double z : d.c_z) {
    if (!(z > 0.0)) throw ConfigError("diagnostics.c_z: shifts must be > 0");
  }
  for (double tol : {d.d_tol, d.gap_tol, d.tv_tol, d.w1_tol, d.support_tol, d.mass_tol, d.gn_tol, d.c_tol}) {
    if (!(tol >= 0.0)) throw ConfigError("diagnostics: tolerances must be >= 0");
  }

  if (const auto v = kv.take("window.m")) {
    c.window_m = to_double("window.m", *v);
    if (!(*c.window_m > 0.0)) throw ConfigError("window.m must be > 0");
  }
  if (const auto v = kv.take("window.delta")) {
    c.window_delta = to_double("window.delta", *v);
    if (!(*c.window_delta >= 0.0 && *c.window_delta <= t_end)) throw ConfigError("window.delta must lie in [0, t_end]");
  }

  const std::string ref = kv.take("reference.kind").value_or("auto");
  if (ref == "auto") {
    c.reference = ReferenceKind::automatic;
  } else if (ref == "exact") {
    c.reference = ReferenceKind::exact;
  } else if (ref == "fv") {
    c.reference = ReferenceKind::finite_volume;
  } else {
    throw ConfigError("reference.kind must be auto, exact or fv");
  }
  if (const auto v = kv.take("reference.dx")) {
    c.reference_dx = to_double("reference.dx", *v);
    if (!(*c.reference_dx > 0.0)) throw ConfigError("reference.dx must be > 0");
  }
  c.reference_cfl = num("reference.cfl", c.reference_cfl);
  if (!(c.reference_cfl > 0.0 && c.reference_cfl <= 0.9)) throw ConfigError("reference.cfl must lie in (0, 0.9]");

  if (const auto v = kv.take("compare.points")) c.compare_points = to_count("compare.points", *v);
  if (c.compare_points < 1) throw ConfigError("compare.points must be >= 1");

  if (const auto v = kv.take("output.dir")) c.out_dir = *v;
  if (c.out_dir.is_relative() && !base_dir.empty()) c.out_dir = base_dir / c.out_dir;
  if (const auto v = kv.take("output.trajectory")) c.write_trajectory = to_bool("output.trajectory", *v);

  kv.reject_leftovers();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void apply_overrides(ExperimentConfig& config, const CliOverrides& overrides) {
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  if (overrides.tol_scale) {
    if (!(*overrides.tol_scale >= 0.0)) throw ConfigError("--tol-scale must be >= 0");
    config.diagnostics.scale(*overrides.tol_scale);
  }
}

// Output -----------------------------------------------------------------------------

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string trajectory_csv(const Trajectory& trajectory) {
  auto os = csv_stream();
  os << "t,i,x_i\n";
  for (const auto& s : trajectory.states) {
    for (std::size_t i = 0; i < s.positions.size(); ++i) os << s.t << ',' << i << ',' << s.positions[i] << '\n';
  }
  return os.str();
}

std::string field_csv(const DensityField& field) {
  auto os = csv_stream();
  os << "x_left,x_right,rho\n";
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    os << field.edges[k] << ',' << field.edges[k + 1] << ',' << field.values[k] << '\n';
  }
  return os.str();
}

std::string report_json(const DiagnosticReport& report) {
  using nlohmann::ordered_json;
  const auto& o = report.options;
  ordered_json j;
  j["n"] = report.n;
  j["pass"] = report.pass();
  j["tolerances"] = {{"d_tol", o.d_tol},     {"gap_tol", o.gap_tol},         {"tv_tol", o.tv_tol},
                     {"w1_tol", o.w1_tol},   {"support_tol", o.support_tol}, {"mass_tol", o.mass_tol},
                     {"gn_tol", o.gn_tol},   {"c_tol", o.c_tol},             {"c_z", o.c_z},
                     {"c_t_min", o.c_t_min}, {"c_t_max", o.c_t_max}};
  auto& est = j["estimates"] = ordered_json::array();
  for (const auto& e : report.estimates) {
    est.push_back({{"name", e.name},
                   {"bound", e.bound},
                   {"worst_value", e.worst_value},
                   {"worst_time", e.worst_time},
                   {"pass", e.pass},
                   {"asserted", e.asserted}});
  }
  return j.dump(2) + "\n";
}

std::string series_csv(const DiagnosticReport& report) {
  auto os = csv_stream();
  os << "t,estimate,value\n";
  for (const auto& r : report.series) os << r.t << ',' << r.estimate << ',' << r.value << '\n';
  return os.str();
}

std::string grid_csv(const GridSolution& grid) {
  auto os = csv_stream();
  os << "t,x_center,rho\n";
  for (std::size_t s = 0; s < grid.slices.size(); ++s) {
    for (std::size_t j = 0; j < grid.slices[s].size(); ++j) {
      os << grid.times[s] << ',' << 0.5 * (grid.edges[j] + grid.edges[j + 1]) << ',' << grid.slices[s][j] << '\n';
    }
  }
  return os.str();
}

std::string ConvergenceTable::csv() const {
  auto os = csv_stream();
  os << "n,error,order,reference,reference_self_error,diagnostics_pass,first_failure\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.error << ',';
    if (r.order) os << *r.order;
    os << ',' << reference << ',' << reference_self_error << ',' << (r.diagnostics_pass ? "true" : "false") << ','
       << r.first_failure << '\n';
  }
  return os.str();
}

// Runs --------------------------------------------------------------------------------

RunEntry run_one(const ExperimentConfig& config, std::size_t n) {
  RunEntry e;
  e.n = n;
  e.trajectory = integrate(atomise(config.datum, n), config.model, config.solver);
  auto options = config.diagnostics;
  options.near_zero_times = config.dyadic_times;
  e.report = diagnose(e.trajectory, options, total_variation(config.datum.as_field()));
  return e;
}

std::vector<RunEntry> run_sweep(const ExperimentConfig& config) {
  const auto count = static_cast<std::ptrdiff_t>(config.n_values.size());
  std::vector<RunEntry> entries(config.n_values.size());
  std::vector<std::exception_ptr> errors(config.n_values.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      entries[k] = run_one(config, config.n_values[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return entries;
}

ConvergenceTable converge(const ExperimentConfig& config, const std::vector<RunEntry>& entries) {
  const auto times = config.evaluation_times();
  const double m = config.window();
  const auto ref = build_reference(config, false);

  ConvergenceTable table;
  table.reference = ref.exact ? "exact" : "fv";
  table.reference_self_error = ref.self_error;
  for (const auto& e : entries) {
    ConvergenceRow row;
    row.n = e.n;
    for (double t : times) {
      const auto field = reconstruct(state_at(e.trajectory, t));
      const double err = ref.exact ? l1_error(field, *ref.exact, t, -m, m)
                                   : l1_distance(field, ref.fine->field(ref.slice(t)));
      row.error = std::max(row.error, err);
    }
    if (const auto* f = e.report.first_failure()) {
      row.diagnostics_pass = false;
      row.first_failure = f->name;
    }
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      row.order = std::log(prev.error / row.error) / std::log(static_cast<double>(row.n) / static_cast<double>(prev.n));
      if (!(row.error <= 1.05 * prev.error)) table.decreasing = false;
    }
    table.rows.push_back(row);
  }
  if (table.rows.size() >= 2 && !(table.rows.back().error < table.rows.front().error)) table.decreasing = false;
  if (!table.rows.empty() && ref.fine) table.inconclusive = ref.self_error >= 0.1 * table.rows.front().error;
  return table;
}

// Commands ------------------------------------------------------------------------------

int command_run(const ExperimentConfig& config, std::ostream& log) {
  const auto entries = run_sweep(config);
  write_reports(config, entries);
  std::string index = "k,t\n";
  {
    auto os = csv_stream();
    for (std::size_t k = 0; k < config.schedule.size(); ++k) os << k << ',' << config.schedule[k] << '\n';
    index += os.str();
  }
  for (const auto& e : entries) {
    const auto dir = entry_dir(config, e.n);
    if (config.write_trajectory) write_atomic(dir / "trajectory.csv", trajectory_csv(e.trajectory));
    write_atomic(dir / "fields.csv", index);
    for (std::size_t k = 0; k < config.schedule.size(); ++k) {
      const auto field = reconstruct(state_at(e.trajectory, config.schedule[k]));
      write_atomic(dir / ("field_" + std::to_string(k) + ".csv"), field_csv(field));
    }
  }
  return report_failures(entries, log);
}

int command_diagnose(const ExperimentConfig& config, std::ostream& log) {
  const auto entries = run_sweep(config);
  write_reports(config, entries);
  return report_failures(entries, log);
}

int command_converge(const ExperimentConfig& config, std::ostream& log, ConvergenceTable* out) {
  const auto entries = run_sweep(config);
  write_reports(config, entries);
  const auto table = converge(config, entries);
  ensure_dir(config.out_dir);
  write_atomic(config.out_dir / "convergence.csv", table.csv());
  log << std::setprecision(6);
  for (const auto& r : table.rows) {
    log << "n=" << r.n << " error=" << r.error;
    if (r.order) log << " order=" << *r.order;
    log << "\n";
  }
  log << "reference=" << table.reference << " self_error=" << table.reference_self_error << "\n";
  if (out) *out = table;
  int code = report_failures(entries, log);
  if (code != 0) return code;
  if (table.inconclusive) {
    log << "INCONCLUSIVE reference self-error is not below 10% of the coarsest error\n";
    return 3;
  }
  if (!table.decreasing) {
    log << "FAIL convergence: errors are not decreasing across the sweep\n";
    return 1;
  }
  return 0;
}

int command_compare(const ExperimentConfig& config, std::ostream& log) {
  const auto entries = run_sweep(config);
  write_reports(config, entries);
  const auto times = config.evaluation_times();
  const double m = config.window();
  const auto ref = build_reference(config, true);
  ensure_dir(config.out_dir);
  write_atomic(config.out_dir / "grid.csv", grid_csv(*ref.fine));

  const std::size_t p = config.compare_points;
  std::vector<double> xs(p);
  for (std::size_t j = 0; j < p; ++j) xs[j] = -m + (static_cast<double>(j) + 0.5) * 2.0 * m / static_cast<double>(p);

  auto side = csv_stream();
  auto summary = csv_stream();
  side << "n,t,x,ftl,fv,exact\n";
  summary << "n,t,pair,l1,linf\n";
  for (const auto& e : entries) {
    for (double t : times) {
      const auto ftl_field = reconstruct(state_at(e.trajectory, t));
      const auto fv_field = ref.fine->field(ref.slice(t));
      double inf_fv = 0.0, inf_ex = 0.0, inf_fv_ex = 0.0;
      for (double x : xs) {
        const double a = ftl_field(x), b = fv_field(x);
        side << e.n << ',' << t << ',' << x << ',' << a << ',' << b << ',';
        inf_fv = std::max(inf_fv, std::abs(a - b));
        if (ref.exact) {
          const double c = (*ref.exact)(x, t);
          side << c;
          inf_ex = std::max(inf_ex, std::abs(a - c));
          inf_fv_ex = std::max(inf_fv_ex, std::abs(b - c));
        }
        side << '\n';
      }
      summary << e.n << ',' << t << ",ftl-fv," << l1_distance(ftl_field, fv_field) << ',' << inf_fv << '\n';
      if (ref.exact) {
        summary << e.n << ',' << t << ",ftl-exact," << l1_error(ftl_field, *ref.exact, t, -m, m) << ',' << inf_ex
                << '\n';
        summary << e.n << ',' << t << ",fv-exact," << l1_error(fv_field, *ref.exact, t, -m, m) << ',' << inf_fv_ex
                << '\n';
      }
    }
  }
  write_atomic(config.out_dir / "compare.csv", side.str());
  write_atomic(config.out_dir / "summary.csv", summary.str());
  log << summary.str();
  return report_failures(entries, log);
}

}  // namespace ftl
