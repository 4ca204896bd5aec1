#include "ftl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ftl/errors.hpp"
#include "ftl/kernels.hpp"

namespace ftl {

double ParticleState::min_gap() const { return kernels::parallel::min_gap(positions); }

double ParticleState::max_density() const { return ell / min_gap(); }

ParticleState initial_state(const ParticleConfiguration& config, const VelocityModel& model) {
  if (config.positions.size() != config.n + 1 || config.n == 0) {
    throw InvalidInput("particle configuration must hold n+1 positions, n >= 1");
  }
  const double floor = kernels::serial::min_gap(config.positions);
  if (!(floor > 0.0)) throw InvalidInput("initial positions must be strictly increasing");
  return ParticleState{0.0,
                       config.positions,
                       model.with_rho_bar(config.rho_bar),
                       config.mass_per_interval,
                       config.positions.back(),
                       floor};
}

void SolverConfig::validate() const {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("solver.t_end must be >= 0");
  if (!(dt_max > 0.0)) throw ConfigError("solver.dt_max must be > 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("solver.cfl must lie in (0, 1]");
  if (sample_stride == 0) throw ConfigError("solver.sample_stride must be >= 1");
  if (!(tolerance >= 0.0)) throw ConfigError("solver.tolerance must be >= 0");
  for (double s : sample_times) {
    if (!(s >= 0.0 && s <= t_end)) throw ConfigError("sample times must lie in [0, t_end]");
  }
}

std::vector<double> rhs(const ParticleState& state) {
  const auto& x = state.positions;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i] < x[i + 1])) {
      std::ostringstream msg;
      msg << "particles " << i << " and " << i + 1 << " out of order at t=" << state.t;
      throw StateCorruption(msg.str());
    }
  }
  std::vector<double> out(x.size());
  kernels::parallel::velocities(state.model, x, state.ell, out);
  return out;
}

namespace {

bool ordered(const std::vector<double>& x) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i] < x[i + 1])) return false;
  }
  return true;
}

// RK4 on the followers with the leader placed exactly at each stage time.
// Returns false when a stage leaves the ordered cone.
bool rk4_attempt(const ParticleState& s, double dt, std::vector<double>& out) {
  const std::size_t np = s.positions.size();
  const std::size_t n = np - 1;
  const double vmax = s.model.v_max();
  const auto& x = s.positions;
  std::vector<double> k1(np), k2(np), k3(np), k4(np), y(np);

  auto stage = [&](const std::vector<double>& base, std::vector<double>& k) {
    kernels::parallel::velocities(s.model, base, s.ell, k);
  };
  auto shifted = [&](const std::vector<double>& k, double h, double t_stage) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h * k[i];
    y[n] = s.leader_origin + t_stage * vmax;
    return ordered(y);
  };

  stage(x, k1);
  if (!shifted(k1, 0.5 * dt, s.t + 0.5 * dt)) return false;
  stage(y, k2);
  if (!shifted(k2, 0.5 * dt, s.t + 0.5 * dt)) return false;
  stage(y, k3);
  if (!shifted(k3, dt, s.t + dt)) return false;
  stage(y, k4);

  out.resize(np);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  out[n] = s.leader_origin + (s.t + dt) * vmax;
  return ordered(out);
}

}  // namespace

ParticleState step(const ParticleState& state, double dt, double tolerance, std::size_t* rejections) {
  if (!(dt > 0.0)) throw InvalidInput("step needs dt > 0");
  const double floor = state.gap_floor * (1.0 - tolerance);
  std::vector<double> next;
  for (int halvings = 0; halvings <= 60; ++halvings) {
    if (rk4_attempt(state, dt, next) && kernels::parallel::min_gap(next) >= floor) {
      ParticleState out = state;
      out.t = state.t + dt;
      out.positions = std::move(next);
      return out;
    }
    if (rejections) ++*rejections;
    dt *= 0.5;
  }
  std::ostringstream msg;
  msg << "step size underflow after 60 halvings at t=" << state.t;
  throw StiffnessError(msg.str());
}

Trajectory integrate(const ParticleConfiguration& config0, const VelocityModel& model, const SolverConfig& solver,
                     const StepObserver& observer) {
  solver.validate();
  ParticleState s = initial_state(config0, model);
  const double rho_bar = s.model.rho_bar();
  const double spread = s.model.v_max() - s.model.v(rho_bar);
  const double ceiling = rho_bar * (1.0 + solver.tolerance);
  const double floor = s.gap_floor * (1.0 - solver.tolerance);

  std::vector<double> targets = solver.sample_times;
  targets.push_back(solver.t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  std::size_t next_target = 0;
  while (next_target < targets.size() && targets[next_target] <= 0.0) ++next_target;

  Trajectory traj;
  traj.min_gap_seen = s.min_gap();
  traj.max_density_seen = s.ell / traj.min_gap_seen;
  traj.states.push_back(s);
  if (observer) observer(s);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::size_t accepted = 0;
  while (next_target < targets.size()) {
    const double target = targets[next_target];
    const double gap = s.min_gap();
    double dt = solver.dt_max;
    if (spread > 0.0) dt = std::min(dt, solver.cfl * gap / spread);
    const double remaining = target - s.t;
    const bool landing = remaining <= dt;
    if (landing) dt = remaining;

    std::size_t rejected = 0;
    ParticleState trial = step(s, dt, solver.tolerance, &rejected);
    traj.rejected_steps += rejected;
    const double dt_used = trial.t - s.t;
    // a halved step can still end on the target up to rounding
    const bool landed = (landing && rejected == 0) || trial.t >= target - 4.0 * eps * std::max(1.0, target);
    if (landed) {
      trial.t = target;
      trial.positions.back() = trial.leader_origin + target * trial.model.v_max();
    }
    s = std::move(trial);
    traj.dt_history.push_back(landed ? remaining : dt_used);
    ++accepted;

    const double g = s.min_gap();
    const double rmax = s.ell / g;
    traj.min_gap_seen = std::min(traj.min_gap_seen, g);
    traj.max_density_seen = std::max(traj.max_density_seen, rmax);
    if (g < floor || rmax > ceiling) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "discrete maximum principle violated at t=" << s.t << ": min gap " << g << " (floor " << floor
          << "), max density " << rmax << " (ceiling " << ceiling << ")";
      throw StateCorruption(msg.str());
    }
    if (observer) observer(s);

    if (landed) ++next_target;
    if (landed || accepted % solver.sample_stride == 0) traj.states.push_back(s);
  }
  return traj;
}

}  // namespace ftl
