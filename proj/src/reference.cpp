#include "ftl/reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ftl/errors.hpp"

namespace ftl {

namespace {

const PowerLaw& power_law_of(const VelocityModel& model) {
  if (!model.is_power_law()) throw UnsupportedModel("exact Riemann solutions need a power-law model");
  return std::get<PowerLaw>(model.law());
}

double fan_density(const PowerLaw& p, double xi) {
  return std::pow(std::max(0.0, (p.v_max - xi) / (p.gamma + 1.0)), 1.0 / p.gamma);
}

}  // namespace

double shock_speed(const RiemannProblem& p, const VelocityModel& model) {
  if (p.rho_l == p.rho_r) return model.flux_prime(p.rho_l);
  return (model.flux(p.rho_r) - model.flux(p.rho_l)) / (p.rho_r - p.rho_l);
}

double riemann_exact(const RiemannProblem& p, const VelocityModel& model, double x, double t) {
  const PowerLaw& law = power_law_of(model);
  if (!(t > 0.0)) throw InvalidInput("riemann_exact needs t > 0");
  if (!(p.rho_l >= 0.0 && p.rho_r >= 0.0)) throw InvalidInput("Riemann states must be >= 0");
  const double xi = (x - p.x0) / t;
  if (p.rho_l == p.rho_r) return p.rho_l;
  if (p.rho_l < p.rho_r) return xi < shock_speed(p, model) ? p.rho_l : p.rho_r;
  const double lo = model.flux_prime(p.rho_l), hi = model.flux_prime(p.rho_r);
  if (xi <= lo) return p.rho_l;
  if (xi >= hi) return p.rho_r;
  return fan_density(law, xi);
}

// Juxtaposed solution -----------------------------------------------------------

JuxtaposedRiemann::JuxtaposedRiemann(const InitialDatum& datum, const VelocityModel& model)
    : model_(model.with_rho_bar(std::max(model.rho_bar(), datum.sup_norm()))),
      t_interact_(std::numeric_limits<double>::infinity()) {
  power_law_of(model_);
  const auto& b = datum.breakpoints();
  const auto& v = datum.values();
  const std::size_t k_cells = v.size();
  states_.push_back(0.0);
  for (std::size_t k = 0; k <= k_cells; ++k) {
    const double left = k == 0 ? 0.0 : v[k - 1];
    const double right = k == k_cells ? 0.0 : v[k];
    if (left == right) continue;
    RiemannProblem p{left, right, b[k]};
    Wave w{p, 0.0, 0.0};
    if (left < right) {
      w.left_speed = w.right_speed = shock_speed(p, model_);
    } else {
      w.left_speed = model_.flux_prime(left);
      w.right_speed = model_.flux_prime(right);
    }
    waves_.push_back(w);
    states_.push_back(right);
  }
  for (std::size_t k = 0; k + 1 < waves_.size(); ++k) {
    const double closing = waves_[k].right_speed - waves_[k + 1].left_speed;
    if (closing > 0.0) {
      t_interact_ = std::min(t_interact_, (waves_[k + 1].problem.x0 - waves_[k].problem.x0) / closing);
    }
  }
}

void JuxtaposedRiemann::check_time(double t) const {
  if (t < 0.0) throw InvalidInput("juxtaposed solution needs t >= 0");
  if (t > t_interact_) throw InvalidInput("juxtaposed solution is valid only before the first wave interaction");
}

double JuxtaposedRiemann::operator()(double x, double t) const {
  check_time(t);
  for (const auto& w : waves_) {
    const double left_edge = w.problem.x0 + w.left_speed * t;
    if (x < left_edge) return w.problem.rho_l;
    if (w.problem.rho_l > w.problem.rho_r && x < w.problem.x0 + w.right_speed * t) {
      return t > 0.0 ? riemann_exact(w.problem, model_, x, t) : w.problem.rho_l;
    }
  }
  return 0.0;
}

std::vector<double> JuxtaposedRiemann::singular_points(double t) const {
  check_time(t);
  std::vector<double> pts;
  for (const auto& w : waves_) {
    pts.push_back(w.problem.x0 + w.left_speed * t);
    if (w.right_speed != w.left_speed) pts.push_back(w.problem.x0 + w.right_speed * t);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<double> JuxtaposedRiemann::level_crossings(double value, double t) const {
  check_time(t);
  std::vector<double> pts;
  for (const auto& w : waves_) {
    if (w.problem.rho_l > w.problem.rho_r && value > w.problem.rho_r && value < w.problem.rho_l) {
      pts.push_back(w.problem.x0 + model_.flux_prime(value) * t);
    }
  }
  return pts;
}

double JuxtaposedRiemann::support_left(double t) const {
  check_time(t);
  return waves_.front().problem.x0 + waves_.front().left_speed * t;
}

double JuxtaposedRiemann::support_right(double t) const {
  check_time(t);
  return waves_.back().problem.x0 + waves_.back().right_speed * t;
}

double l1_error(const DensityField& field, const JuxtaposedRiemann& exact, double t, double lo, double hi) {
  static constexpr std::array<double, 8> nodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                               0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> weights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};
  std::vector<double> cuts{lo, hi};
  cuts.insert(cuts.end(), field.edges.begin(), field.edges.end());
  const auto sing = exact.singular_points(t);
  cuts.insert(cuts.end(), sing.begin(), sing.end());
  for (double v : field.values) {
    const auto c = exact.level_crossings(v, t);
    cuts.insert(cuts.end(), c.begin(), c.end());
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (a < lo || b > hi) continue;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double rho = field(mid);
    double s = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) s += weights[q] * std::abs(rho - exact(mid + half * nodes[q], t));
    total += half * s;
  }
  return total;
}

// Finite volumes ----------------------------------------------------------------------

DensityField GridSolution::field(std::size_t slice) const { return DensityField{edges, slices.at(slice), times.at(slice)}; }

double godunov_flux(const VelocityModel& model, double a, double b) {
  if (a <= b) return std::min(model.flux(a), model.flux(b));
  return model.flux(std::clamp(model.flux_argmax(), b, a));
}

GridSolution fv_reference(const InitialDatum& datum, const VelocityModel& model_in, double dx, double t_end,
                          const std::vector<double>& sample_times, double cfl) {
  if (!(dx > 0.0)) throw ConfigError("reference.dx must be > 0");
  if (!(cfl > 0.0 && cfl <= 0.9)) throw ConfigError("finite-volume CFL number must lie in (0, 0.9]");
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  const double rho_bar = datum.sup_norm();
  const VelocityModel model = model_in.with_rho_bar(std::max(model_in.rho_bar(), rho_bar));
  const double fp_lo = model.flux_prime(rho_bar), fp_hi = model.flux_prime(0.0);
  const double speed = std::max(std::abs(fp_lo), std::abs(fp_hi));

  const double left = datum.x_min() + t_end * std::min(0.0, fp_lo) - 4.0 * dx;
  const double right_min = datum.x_max() + t_end * std::max(0.0, fp_hi) + 4.0 * dx;
  const auto cells = static_cast<std::size_t>(std::ceil((right_min - left) / dx));

  GridSolution sol;
  sol.dx = dx;
  sol.dt = cfl * dx / speed;
  sol.edges.resize(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) sol.edges[j] = left + static_cast<double>(j) * dx;

  const auto f0 = datum.as_field();
  std::vector<double> u(cells), cum(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) cum[j] = cdf(f0, sol.edges[j]);
  for (std::size_t j = 0; j < cells; ++j) u[j] = (cum[j + 1] - cum[j]) / dx;

  std::vector<double> targets = sample_times;
  targets.push_back(t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  sol.times.push_back(0.0);
  sol.slices.push_back(u);
  double mass0 = 0.0;
  for (double v : u) mass0 += v;
  mass0 *= dx;

  const double rho_star = model.flux_argmax();
  const double f_star = model.flux(rho_star);
  std::vector<double> fu(cells), flux(cells + 1);
  const double upper = rho_bar * (1.0 + 1e-12), lower = -1e-14 * rho_bar;
  double t = 0.0;
  for (double target : targets) {
    if (target <= 0.0) continue;
    while (t < target) {
      double dt = sol.dt;
      bool landing = false;
      if (target - t <= dt) {
        dt = target - t;
        landing = true;
      }
      for (std::size_t j = 0; j < cells; ++j) fu[j] = model.flux(u[j]);
      flux[0] = 0.0;
      flux[cells] = 0.0;
      for (std::size_t j = 1; j < cells; ++j) {
        const double a = u[j - 1], b = u[j];
        if (a <= b) {
          flux[j] = std::min(fu[j - 1], fu[j]);
        } else if (rho_star <= b) {
          flux[j] = fu[j];
        } else if (rho_star >= a) {
          flux[j] = fu[j - 1];
        } else {
          flux[j] = f_star;
        }
      }
      const double r = dt / dx;
      double mass = 0.0;
      for (std::size_t j = 0; j < cells; ++j) {
        u[j] -= r * (flux[j + 1] - flux[j]);
        mass += u[j];
        if (u[j] > upper || u[j] < lower) sol.monotone = false;
      }
      sol.max_mass_drift = std::max(sol.max_mass_drift, std::abs(mass * dx - mass0));
      t = landing ? target : t + dt;
    }
    sol.times.push_back(target);
    sol.slices.push_back(u);
  }
  return sol;
}

}  // namespace ftl
