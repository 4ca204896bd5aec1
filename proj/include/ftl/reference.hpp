#pragma once

#include <vector>

#include "ftl/atomiser.hpp"
#include "ftl/density_field.hpp"
#include "ftl/velocity_model.hpp"

namespace ftl {

struct RiemannProblem {
  double rho_l = 0.0;
  double rho_r = 0.0;
  double x0 = 0.0;
};

/// Rankine-Hugoniot speed (f(rho_r) - f(rho_l)) / (rho_r - rho_l); f'(rho) when
/// the states coincide.
double shock_speed(const RiemannProblem& p, const VelocityModel& model);

/// Entropy solution of the Riemann problem for the concave power-law flux:
/// increasing jumps are shocks, decreasing jumps open a rarefaction fan with
/// rho = ((v_max - xi)/(gamma+1))^(1/gamma). Throws UnsupportedModel for other
/// laws and InvalidInput for t <= 0 or negative states.
double riemann_exact(const RiemannProblem& p, const VelocityModel& model, double x, double t);

/// Exact solution for a piecewise-constant datum up to the first time two
/// neighbouring waves meet: each jump evolves as its own Riemann problem.
class JuxtaposedRiemann {
 public:
  JuxtaposedRiemann(const InitialDatum& datum, const VelocityModel& model);

  double interaction_time() const { return t_interact_; }

  /// Throws InvalidInput when t exceeds the interaction time.
  double operator()(double x, double t) const;

  /// Positions at time t where the solution is not smooth (shocks and fan
  /// edges), ascending.
  std::vector<double> singular_points(double t) const;

  /// Points in fans at time t where the solution equals `value`.
  std::vector<double> level_crossings(double value, double t) const;

  double support_left(double t) const;
  double support_right(double t) const;

 private:
  struct Wave {
    RiemannProblem problem;
    double left_speed;  // shock speed, or fan's left edge speed
    double right_speed;
  };
  void check_time(double t) const;

  VelocityModel model_;
  std::vector<Wave> waves_;     // one per jump, ascending in x0
  std::vector<double> states_;  // states_[k] between waves k-1 and k; 0 outside
  double t_interact_;
};

/// Exact L1 distance over [lo, hi] at time t between a piecewise-constant field
/// and the juxtaposed solution: the integration range is split at the field's
/// breakpoints, the solution's singular points and level crossings, and each
/// smooth piece is integrated with 8-point Gauss-Legendre.
double l1_error(const DensityField& field, const JuxtaposedRiemann& exact, double t, double lo, double hi);

struct GridSolution {
  std::vector<double> edges;
  std::vector<double> times;
  std::vector<std::vector<double>> slices; // cell averages at `times`
  double dx = 0.0;
  double dt = 0.0;
  double max_mass_drift = 0.0; // max over steps of |mass - initial mass|
  bool monotone = true;        // no new extrema beyond [min, max] of the datum

  DensityField field(std::size_t slice) const;
};

/// Godunov flux for concave f: min(f(a), f(b)) for a <= b, f(clamp(rho*, b, a))
/// for a > b with rho* the flux maximiser.
double godunov_flux(const VelocityModel& model, double a, double b);

/// First-order Godunov scheme from the cell averages of `datum` (computed
/// exactly), on a grid that contains the support up to t_end. `sample_times`
/// are landed on exactly and stored alongside t = 0 and t = t_end. Throws
/// ConfigError when cfl > 0.9 or dx <= 0.
GridSolution fv_reference(const InitialDatum& datum, const VelocityModel& model, double dx, double t_end,
                          const std::vector<double>& sample_times = {}, double cfl = 0.9);

}  // namespace ftl
