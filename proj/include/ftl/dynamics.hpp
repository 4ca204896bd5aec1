#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ftl/atomiser.hpp"
#include "ftl/velocity_model.hpp"

namespace ftl {

/// Positions x_0 < ... < x_n at time t. The leader is slaved to
/// x_n(t) = leader_origin + t * v_max.
struct ParticleState {
  double t = 0.0;
  std::vector<double> positions;
  VelocityModel model;
  double ell = 0.0;           // mass per interval, 1/n
  double leader_origin = 0.0; // x_n(0)
  double gap_floor = 0.0;     // minimal initial gap Delta_min

  std::size_t n() const { return positions.size() - 1; }
  double min_gap() const;
  double max_density() const;
};

ParticleState initial_state(const ParticleConfiguration& config, const VelocityModel& model);

struct SolverConfig {
  double t_end = 1.0;
  double dt_max = 1e-2;
  double cfl = 0.2;
  std::size_t sample_stride = 1;
  double tolerance = 1e-10;       // relative slack on the gap floor and density ceiling
  std::vector<double> sample_times; // landed on exactly and always stored

  void validate() const;
};

struct Trajectory {
  std::vector<ParticleState> states;
  std::vector<double> dt_history;
  std::size_t rejected_steps = 0;
  double min_gap_seen = 0.0;      // over every accepted step
  double max_density_seen = 0.0;
};

/// Velocities of all n+1 particles: v(R_i) for followers, v_max for the leader.
/// Throws StateCorruption when positions are not strictly increasing.
std::vector<double> rhs(const ParticleState& state);

/// One RK4 step of size dt, halving dt on rejection (a stage gap <= 0 or a
/// final gap below gap_floor * (1 - tolerance)). The returned state's time
/// tells how far the step got; `rejections`, when given, is incremented per
/// halving. Throws StiffnessError after 60 halvings.
ParticleState step(const ParticleState& state, double dt, double tolerance = 1e-10,
                   std::size_t* rejections = nullptr);

/// Called on every accepted state, stored or not.
using StepObserver = std::function<void(const ParticleState&)>;

/// Integrates the follow-the-leader system from t = 0 to solver.t_end. Every
/// accepted step is checked against the discrete maximum principle; a
/// violation throws StateCorruption.
Trajectory integrate(const ParticleConfiguration& config0, const VelocityModel& model,
                     const SolverConfig& solver, const StepObserver& observer = {});

}  // namespace ftl
