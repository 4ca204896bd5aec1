#include "ftl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "ftl/errors.hpp"

namespace ftl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double osl(const ParticleState& s, GKind slope) {
  if (s.t == 0.0) return 0.0;
  std::vector<double> density(s.n());
  kernels::parallel::local_densities(s.positions, s.ell, density);
  return kernels::parallel::max_one_sided(s.model, density, s.t, static_cast<double>(s.n()), slope);
}

// Values of `field` at ascending points xs, right-continuous, zero outside.
std::vector<double> sample_sorted(const DensityField& field, const std::vector<double>& xs) {
  std::vector<double> out(xs.size(), 0.0);
  const auto& e = field.edges;
  std::size_t cell = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    if (x < e.front() || x >= e.back()) continue;
    while (e[cell + 1] <= x) ++cell;
    out[k] = field.values[cell];
  }
  return out;
}

}  // namespace

double discrete_osl_general(const ParticleState& state) { return osl(state, GKind::velocity); }

double discrete_osl_fprime(const ParticleState& state) { return osl(state, GKind::flux_prime); }

ImprovedOsl discrete_osl_improved(const ParticleState& state) {
  if (!state.model.is_power_law()) throw UnsupportedModel("improved one-sided bound needs a power-law model");
  const double gamma = std::get<PowerLaw>(state.model.law()).gamma;
  ImprovedOsl r;
  r.max_d = discrete_osl_general(state);
  r.max_d_fprime = (gamma + 1.0) * r.max_d;
  r.bound = 1.0 / (gamma + 1.0);
  return r;
}

double total_variation(const DensityField& field) { return kernels::parallel::total_variation(field.values); }

DensityField difference(const DensityField& a, const DensityField& b) {
  DensityField d;
  d.t = a.t;
  d.edges.reserve(a.edges.size() + b.edges.size());
  std::merge(a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end(), std::back_inserter(d.edges));
  d.edges.erase(std::unique(d.edges.begin(), d.edges.end()), d.edges.end());
  if (d.edges.size() < 2) return d;
  std::vector<double> left(d.edges.begin(), d.edges.end() - 1);
  const auto va = sample_sorted(a, left);
  const auto vb = sample_sorted(b, left);
  d.values.resize(left.size());
  for (std::size_t k = 0; k < left.size(); ++k) d.values[k] = va[k] - vb[k];
  return d;
}

TvCheck tv_monotonicity(const Trajectory& trajectory, double rel_tol) {
  TvCheck r;
  if (trajectory.states.empty()) return r;
  const double tv0 = total_variation(reconstruct(trajectory.states.front()));
  r.bound = tv0 * (1.0 + rel_tol);
  r.worst_value = tv0;
  double prev = tv0;
  for (const auto& s : trajectory.states) {
    const double tv = total_variation(reconstruct(s));
    if (tv > r.worst_value) {
      r.worst_value = tv;
      r.worst_time = s.t;
    }
    r.max_step_increase = std::max(r.max_step_increase, tv - prev);
    prev = tv;
  }
  r.pass = r.worst_value <= r.bound;
  return r;
}

double wasserstein_bound(const VelocityModel& model) {
  return 2.0 * std::max(model.v_max(), std::abs(model.v(model.rho_bar())));
}

BoundCheck wasserstein_lipschitz(const Trajectory& trajectory, double abs_tol) {
  BoundCheck r;
  if (trajectory.states.empty()) return r;
  r.bound = wasserstein_bound(trajectory.states.front().model);
  for (std::size_t k = 0; k + 1 < trajectory.states.size(); ++k) {
    const auto& a = trajectory.states[k];
    const auto& b = trajectory.states[k + 1];
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) continue;
    const double ratio = wasserstein1(a, b) / dt;
    if (ratio > r.worst_value) {
      r.worst_value = ratio;
      r.worst_time = b.t;
    }
  }
  r.pass = r.worst_value <= r.bound + abs_tol;
  return r;
}

namespace {

struct NearZeroSample {
  double l1 = 0.0, w1 = 0.0, tv = 0.0;
};

NearZeroSample near_zero_sample(const DensityField& f0, const ParticleState& s0, const ParticleState& s) {
  const auto f = reconstruct(s);
  NearZeroSample r;
  r.l1 = l1_distance(f, f0);
  r.w1 = wasserstein1(s, s0);
  r.tv = total_variation(difference(f, f0));
  return r;
}

bool wanted(const std::vector<double>& times, double t) {
  return times.empty() || std::find(times.begin(), times.end(), t) != times.end();
}

}  // namespace

NearZeroResult near_zero_continuity(const Trajectory& trajectory, double gn_tol, const std::vector<double>& times) {
  NearZeroResult r;
  r.gn_worst = -kInf;
  if (trajectory.states.empty()) return r;
  const auto& s0 = trajectory.states.front();
  const auto f0 = reconstruct(s0);
  for (const auto& s : trajectory.states) {
    if (!(s.t > 0.0) || !wanted(times, s.t)) continue;
    const auto q = near_zero_sample(f0, s0, s);
    const double ratio = q.l1 / std::sqrt(s.t);
    if (ratio > r.sup_ratio) {
      r.sup_ratio = ratio;
      r.worst_time = s.t;
    }
    r.gn_worst = std::max(r.gn_worst, q.l1 - gn_constant * std::sqrt(q.tv * q.w1));
    ++r.samples;
  }
  if (r.samples == 0) r.gn_worst = 0.0;
  r.gn_pass = r.gn_worst <= gn_tol;
  return r;
}

// Test function ---------------------------------------------------------------

double TestFunction::a(double x) const {
  const double s = (x - x_center) / x_half_width;
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return u * u * u * u;
}

double TestFunction::a_antiderivative(double x) const {
  const double s = std::clamp((x - x_center) / x_half_width, -1.0, 1.0);
  const double s2 = s * s;
  // int (1 - s^2)^4 ds = s - 4s^3/3 + 6s^5/5 - 4s^7/7 + s^9/9, which is 128/315 at s = 1
  const double p = s * (1.0 + s2 * (-4.0 / 3.0 + s2 * (6.0 / 5.0 + s2 * (-4.0 / 7.0 + s2 / 9.0))));
  return x_half_width * (p + 128.0 / 315.0);
}

double TestFunction::b(double t) const {
  const double s = (t - t_center) / t_half_width;
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return u * u * u * u;
}

double TestFunction::b_prime(double t) const {
  const double s = (t - t_center) / t_half_width;
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return -8.0 * s * u * u * u / t_half_width;
}

namespace {

double spatial_residual(const ParticleState& s, const TestFunction& test) {
  const double bt = test.b(s.t), bp = test.b_prime(s.t);
  if (bt == 0.0 && bp == 0.0) return 0.0;
  const auto& x = s.positions;
  double sum = 0.0;
  double a_lo = test.a(x[0]), A_lo = test.a_antiderivative(x[0]);
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double a_hi = test.a(x[i + 1]), A_hi = test.a_antiderivative(x[i + 1]);
    const double r = s.ell / (x[i + 1] - x[i]);
    sum += r * bp * (A_hi - A_lo) + s.model.flux(r) * bt * (a_hi - a_lo);
    a_lo = a_hi;
    A_lo = A_hi;
  }
  return sum;
}

// Composite Simpson on an arbitrary ascending grid; an odd trailing interval is
// closed with the quadratic through the last three nodes.
double simpson(const std::vector<double>& t, const std::vector<double>& f) {
  const std::size_t m = t.size();
  if (m < 2) return 0.0;
  if (m == 2) return 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
  double total = 0.0;
  std::size_t k = 0;
  for (; k + 2 < m; k += 2) {
    const double h0 = t[k + 1] - t[k], h1 = t[k + 2] - t[k + 1];
    total += (h0 + h1) / 6.0 *
             ((2.0 - h1 / h0) * f[k] + (h0 + h1) * (h0 + h1) / (h0 * h1) * f[k + 1] + (2.0 - h0 / h1) * f[k + 2]);
  }
  if (k + 1 < m) {
    const double h0 = t[k] - t[k - 1], h1 = t[k + 1] - t[k];
    total += f[k + 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1)) +
             f[k] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0) - f[k - 1] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
  }
  return total;
}

}  // namespace

double weak_residual(const Trajectory& trajectory, const TestFunction& test) {
  if (!(test.x_half_width > 0.0 && test.t_half_width > 0.0)) throw InvalidInput("test function widths must be > 0");
  if (trajectory.states.size() < 3) throw InvalidInput("weak residual needs at least three stored states");
  const double lo = test.t_center - test.t_half_width, hi = test.t_center + test.t_half_width;
  if (lo < trajectory.states.front().t || hi > trajectory.states.back().t) {
    throw InvalidInput("test function support leaves the stored time window");
  }
  std::vector<double> ts, fs;
  for (const auto& s : trajectory.states) {
    if (!ts.empty() && s.t <= ts.back()) continue;
    ts.push_back(s.t);
    fs.push_back(spatial_residual(s, test));
  }
  return simpson(ts, fs);
}

// Condition C -------------------------------------------------------------------

ConditionC entropy_condition_c(const DensityField& field, const VelocityModel& model, GKind g, double z, double c,
                               Sweep sweep) {
  if (!(field.t > 0.0)) throw InvalidInput("condition C needs t > 0");
  if (!(z > 0.0)) throw InvalidInput("condition C needs z > 0");
  const double rhs = c * z / field.t;
  const auto& e = field.edges;
  const std::size_t cells = field.values.size();

  // g per cell, plus g(0) for vacuum; differences of these values carry an
  // absolute error of a few ulp of v_max, far below c z / t
  std::vector<double> gv(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    const double rho = i < cells ? field.values[i] : 0.0;
    gv[i] = g == GKind::velocity ? model.v(rho) : model.flux_prime(rho);
  }

  // monotone cursors: cell index of x, `cells` meaning vacuum
  struct Cursor {
    const std::vector<double>& e;
    std::size_t cell = 0;
    std::size_t at(double x) {
      if (x < e.front() || x >= e.back()) return e.size() - 1;
      while (e[cell + 1] <= x) ++cell;
      return cell;
    }
  } here{e}, ahead{e};

  ConditionC r;
  r.worst_excess = -kInf;
  auto probe = [&](double x) {
    const double lhs = gv[ahead.at(x + z)] - gv[here.at(x)];
    if (lhs - rhs > r.worst_excess) {
      r.worst_excess = lhs - rhs;
      r.worst_x = x;
      r.worst_lhs = lhs;
    }
  };

  if (sweep == Sweep::particles) {
    for (double x : e) probe(x);
    return r;
  }
  // merge e_j and e_j - z on the fly, probing each candidate and the midpoint to the next
  std::size_t i = 0, j = 0;
  const std::size_t m = e.size();
  auto next_candidate = [&](double& out) {
    if (i >= m && j >= m) return false;
    const double a = i < m ? e[i] : kInf;
    const double b = j < m ? e[j] - z : kInf;
    if (a <= b) {
      out = a;
      ++i;
      if (b == a) ++j;
    } else {
      out = b;
      ++j;
    }
    return true;
  };
  double cur = 0.0, nxt = 0.0;
  next_candidate(cur);
  while (true) {
    probe(cur);
    if (!next_candidate(nxt)) break;
    if (nxt > cur) {
      probe(0.5 * (cur + nxt));
      cur = nxt;
    }
  }
  return r;
}

// Full audit ------------------------------------------------------------------------

void DiagnosticOptions::scale(double factor) {
  for (double* tol : {&d_tol, &gap_tol, &tv_tol, &w1_tol, &support_tol, &mass_tol, &gn_tol, &c_tol}) *tol *= factor;
}

void DiagnosticOptions::override_all(double value) {
  for (double* tol : {&d_tol, &gap_tol, &tv_tol, &w1_tol, &support_tol, &mass_tol, &gn_tol, &c_tol}) *tol = value;
}

bool DiagnosticReport::pass() const { return first_failure() == nullptr; }

const EstimateResult* DiagnosticReport::first_failure() const {
  for (const auto& e : estimates) {
    if (e.asserted && !e.pass) return &e;
  }
  return nullptr;
}

const EstimateResult* DiagnosticReport::find(const std::string& name) const {
  for (const auto& e : estimates) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

namespace {

// Per-state values; one entry per stored state, filled in parallel.
struct StateRecord {
  double t = 0.0;
  double d_general = 0.0, d_fprime = 0.0;
  double tv = 0.0, min_gap = 0.0, max_density = 0.0;
  double support_excess = 0.0, mass_error = 0.0;
  double w1_ratio = -1.0; // to the next stored state; < 0 when undefined
  bool near_zero = false;
  double l1 = 0.0, near_zero_ratio = 0.0, gn_excess = 0.0;
  bool audited_c = false;
  std::vector<double> c_v, c_v_full, c_fp, c_fp_full; // per z
};

void track_max(EstimateResult& e, double value, double t) {
  if (value > e.worst_value) {
    e.worst_value = value;
    e.worst_time = t;
  }
}

void track_min(EstimateResult& e, double value, double t) {
  if (value < e.worst_value) {
    e.worst_value = value;
    e.worst_time = t;
  }
}

}  // namespace

DiagnosticReport diagnose(const Trajectory& trajectory, const DiagnosticOptions& options,
                          std::optional<double> initial_datum_tv) {
  if (trajectory.states.empty()) throw InvalidInput("diagnose needs a non-empty trajectory");
  DiagnosticReport report;
  report.options = options;
  const auto& states = trajectory.states;
  const auto& s0 = states.front();
  const VelocityModel& model = s0.model;
  report.n = s0.n();

  const double rho_bar = model.rho_bar();
  const bool power = model.is_power_law();
  const double gamma = power ? std::get<PowerLaw>(model.law()).gamma : 0.0;
  const double k_const = model.declared_k();
  const double c_fprime = power ? 1.0 : 1.0 + k_const;
  const double x_min0 = s0.positions.front();
  const double left_speed = std::min(0.0, model.v(rho_bar));
  const double vmax = model.v_max();
  const auto f0 = reconstruct(s0);
  const double tv0 = total_variation(f0);

  std::vector<StateRecord> rec(states.size());
  std::vector<std::exception_ptr> errors(states.size());
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(states.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      const auto& s = states[static_cast<std::size_t>(k)];
      StateRecord& r = rec[static_cast<std::size_t>(k)];
      const auto field = reconstruct(s);
      r.t = s.t;
      r.d_general = discrete_osl_general(s);
      r.d_fprime = discrete_osl_fprime(s);
      r.tv = total_variation(field);
      r.min_gap = s.min_gap();
      r.max_density = s.ell / r.min_gap;
      const double scale = 1.0 + std::abs(s.positions.front()) + std::abs(s.positions.back());
      const double left_excess = std::max(0.0, (x_min0 + s.t * left_speed) - s.positions.front());
      const double leader_dev = std::abs(s.positions.back() - (s.leader_origin + s.t * vmax));
      r.support_excess = std::max(left_excess, leader_dev) / scale;
      r.mass_error = std::abs(field.mass() - 1.0);
      if (static_cast<std::size_t>(k + 1) < states.size()) {
        const auto& next = states[static_cast<std::size_t>(k + 1)];
        const double dt = next.t - s.t;
        if (dt > 0.0) r.w1_ratio = wasserstein1(s, next) / dt;
      }
      if (s.t > 0.0 && wanted(options.near_zero_times, s.t)) {
        const auto q = near_zero_sample(f0, s0, s);
        r.near_zero = true;
        r.l1 = q.l1;
        r.near_zero_ratio = q.l1 / std::sqrt(s.t);
        r.gn_excess = q.l1 - gn_constant * std::sqrt(q.tv * q.w1);
      }
      if (s.t > 0.0 && s.t >= options.c_t_min && s.t <= options.c_t_max) {
        r.audited_c = true;
        for (double z : options.c_z) {
          r.c_v.push_back(entropy_condition_c(field, model, GKind::velocity, z, 1.0, Sweep::particles).worst_excess);
          r.c_v_full.push_back(entropy_condition_c(field, model, GKind::velocity, z, 1.0).worst_excess);
          r.c_fp.push_back(
              entropy_condition_c(field, model, GKind::flux_prime, z, c_fprime, Sweep::particles).worst_excess);
          r.c_fp_full.push_back(entropy_condition_c(field, model, GKind::flux_prime, z, c_fprime).worst_excess);
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  auto make = [](std::string name, double bound, double start, bool asserted = true, bool lower = false) {
    EstimateResult e;
    e.name = std::move(name);
    e.bound = bound;
    e.worst_value = start;
    e.asserted = asserted;
    e.lower = lower;
    return e;
  };

  EstimateResult d_gen = make("max_D_general", 1.0, -kInf);
  EstimateResult d_imp = make("max_D_improved", power ? 1.0 / (gamma + 1.0) : 0.0, -kInf, power);
  EstimateResult d_fp = make("max_D_fprime", c_fprime, -kInf);
  EstimateResult gap = make("min_gap", s0.gap_floor * (1.0 - options.gap_tol), kInf, true, true);
  EstimateResult ceil = make("max_density", rho_bar * (1.0 + options.gap_tol), -kInf);
  EstimateResult support = make("support_excess", options.support_tol, 0.0);
  EstimateResult mass = make("mass", options.mass_tol, 0.0);
  EstimateResult tv = make("tv_bound", tv0 * (1.0 + options.tv_tol), -kInf);
  EstimateResult tv_step = make("tv_step_increase", 0.0, 0.0, false);
  EstimateResult w1 = make("w1_lipschitz", wasserstein_bound(model) * (1.0 + options.w1_tol), 0.0);
  EstimateResult nz = make("near_zero_ratio", 0.0, 0.0, false);
  EstimateResult gn = make("gn_inequality", options.gn_tol, -kInf);
  EstimateResult cv = make("condition_c_v", options.c_tol, -kInf);
  EstimateResult cfp = make("condition_c_fprime", options.c_tol, -kInf);
  EstimateResult cv_full = make("condition_c_v_exhaustive", options.c_tol, -kInf, options.c_exhaustive_asserted);
  EstimateResult cfp_full =
      make("condition_c_fprime_exhaustive", options.c_tol, -kInf, options.c_exhaustive_asserted);

  auto& series = report.series;
  double prev_tv = tv0;
  for (const auto& r : rec) {
    track_max(d_gen, r.d_general, r.t);
    if (power) track_max(d_imp, r.d_general, r.t);
    track_max(d_fp, r.d_fprime, r.t);
    track_min(gap, r.min_gap, r.t);
    track_max(ceil, r.max_density, r.t);
    track_max(support, r.support_excess, r.t);
    track_max(mass, r.mass_error, r.t);
    track_max(tv, r.tv, r.t);
    track_max(tv_step, r.tv - prev_tv, r.t);
    prev_tv = r.tv;
    series.push_back({r.t, "max_D_general", r.d_general});
    series.push_back({r.t, "max_D_fprime", r.d_fprime});
    series.push_back({r.t, "tv", r.tv});
    series.push_back({r.t, "min_gap", r.min_gap});
    series.push_back({r.t, "support_excess", r.support_excess});
    if (r.w1_ratio >= 0.0) {
      track_max(w1, r.w1_ratio, r.t);
      series.push_back({r.t, "w1_increment_ratio", r.w1_ratio});
    }
    if (r.near_zero) {
      track_max(nz, r.near_zero_ratio, r.t);
      track_max(gn, r.gn_excess, r.t);
      series.push_back({r.t, "near_zero_ratio", r.near_zero_ratio});
    }
    if (r.audited_c && !r.c_v.empty()) {
      for (std::size_t j = 0; j < r.c_v.size(); ++j) {
        track_max(cv, r.c_v[j], r.t);
        track_max(cv_full, r.c_v_full[j], r.t);
        track_max(cfp, r.c_fp[j], r.t);
        track_max(cfp_full, r.c_fp_full[j], r.t);
      }
      series.push_back({r.t, "condition_c_v", *std::max_element(r.c_v.begin(), r.c_v.end())});
      series.push_back({r.t, "condition_c_v_exhaustive", *std::max_element(r.c_v_full.begin(), r.c_v_full.end())});
    }
  }
  // every accepted step, not only the stored ones
  if (trajectory.min_gap_seen > 0.0) track_min(gap, trajectory.min_gap_seen, gap.worst_time);
  track_max(ceil, trajectory.max_density_seen, ceil.worst_time);

  auto upper = [](EstimateResult& e, double slack) { e.pass = e.worst_value <= e.bound + slack; };
  upper(d_gen, options.d_tol);
  upper(d_imp, options.d_tol);
  upper(d_fp, options.d_tol);
  gap.pass = gap.worst_value >= gap.bound;
  upper(ceil, 0.0);
  upper(support, 0.0);
  upper(mass, 0.0);
  upper(tv, 0.0);
  upper(w1, 0.0);
  if (gn.worst_value == -kInf) gn.worst_value = 0.0;
  upper(gn, 0.0);
  for (EstimateResult* e : {&cv, &cfp, &cv_full, &cfp_full}) {
    if (e->worst_value == -kInf) e->worst_value = 0.0;
    upper(*e, 0.0);
  }
  if (d_gen.worst_value == -kInf) d_gen.worst_value = 0.0;
  if (d_fp.worst_value == -kInf) d_fp.worst_value = 0.0;
  if (d_imp.worst_value == -kInf) d_imp.worst_value = 0.0;

  auto& out = report.estimates;
  out = {d_gen};
  if (power) out.push_back(d_imp);
  out.insert(out.end(), {d_fp, gap, ceil, support, mass, tv, tv_step, w1, nz, gn, cv, cfp, cv_full, cfp_full});

  if (initial_datum_tv) {
    EstimateResult link = make("tv_initial_vs_datum", *initial_datum_tv * (1.0 + options.tv_tol), tv0);
    upper(link, 0.0);
    out.push_back(link);
  }
  if (options.test_function) {
    const double res = weak_residual(trajectory, *options.test_function);
    EstimateResult wr = make("weak_residual", 0.0, std::abs(res), false);
    wr.worst_time = options.test_function->t_center;
    out.push_back(wr);
  }
  return report;
}

}  // namespace ftl
