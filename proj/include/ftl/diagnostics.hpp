#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ftl/density_field.hpp"
#include "ftl/dynamics.hpp"
#include "ftl/kernels.hpp"

namespace ftl {

// D_i(t) = t * n * R_i * (v(R_{i+1}) - v(R_i)), R_n = 0.
double discrete_osl_general(const ParticleState& state);

struct ImprovedOsl {
  double max_d = 0.0;
  double max_d_fprime = 0.0; // (gamma+1) * max_i D_i
  double bound = 0.0;        // 1/(gamma+1)
};

/// Throws UnsupportedModel unless the state's model is a PowerLaw.
ImprovedOsl discrete_osl_improved(const ParticleState& state);

/// max_i t * n * R_i * (f'(R_{i+1}) - f'(R_i)); bounded by 1 for PowerLaw and
/// by 1 + K under (V2).
double discrete_osl_fprime(const ParticleState& state);

/// R_0 + R_{n-1} + sum |R_{k+1} - R_k|.
double total_variation(const DensityField& field);

/// Pointwise difference a - b on the merged breakpoints.
DensityField difference(const DensityField& a, const DensityField& b);

struct BoundCheck {
  double bound = 0.0;
  double worst_value = 0.0;
  double worst_time = 0.0;
  bool pass = true;
};

/// TV(t) <= TV(0) * (1 + rel_tol) at every stored state. `max_step_increase`
/// records the largest TV(t_{k+1}) - TV(t_k); it is not asserted.
struct TvCheck : BoundCheck {
  double max_step_increase = 0.0;
};
TvCheck tv_monotonicity(const Trajectory& trajectory, double rel_tol = 1e-8);

/// Largest W1(t_k, t_{k+1}) / (t_{k+1} - t_k) over consecutive stored states
/// against 2 * max{v_max, |v(Rbar)|}; pass iff worst <= bound + abs_tol.
BoundCheck wasserstein_lipschitz(const Trajectory& trajectory, double abs_tol = 1e-8);

double wasserstein_bound(const VelocityModel& model);

/// Constant of ||g||_1 <= C * TV[g]^(1/2) * ||G||_1^(1/2), G' = g, G with
/// compact support: ||g||_1 <= 2||G||_1/h + h TV[g]/2 for every h > 0,
/// minimised at h = 2 sqrt(||G||_1 / TV[g]).
inline constexpr double gn_constant = 2.0;

struct NearZeroResult {
  double sup_ratio = 0.0;  // sup over stored t > 0 of ||rho(t) - rho(0)||_1 / sqrt(t)
  double worst_time = 0.0;
  double gn_worst = 0.0;   // max of ||g||_1 - C sqrt(TV[g] ||G||_1)
  bool gn_pass = true;
  std::size_t samples = 0;
};
/// When `times` is non-empty only stored states stamped with one of those
/// times contribute.
NearZeroResult near_zero_continuity(const Trajectory& trajectory, double gn_tol = 1e-12,
                                    const std::vector<double>& times = {});

/// phi(x,t) = a(x) b(t), a = (1 - ((x-xc)/xw)^2)^4 on |x-xc| < xw and
/// b = (1 - ((t-tc)/tw)^2)^4 on |t-tc| < tw.
struct TestFunction {
  double x_center = 0.0;
  double x_half_width = 1.0;
  double t_center = 1.0;
  double t_half_width = 0.5;

  double a(double x) const;
  double a_antiderivative(double x) const; // int_{-inf}^x a
  double b(double t) const;
  double b_prime(double t) const;
};

/// int int rho phi_t + f(rho) phi_x over the stored states: exact in space,
/// composite Simpson (non-uniform) in time. Throws InvalidInput when the test
/// support in time leaves the stored window.
double weak_residual(const Trajectory& trajectory, const TestFunction& test);

using GKind = kernels::Slope;

enum class Sweep {
  exhaustive, // breakpoints of the field and of its shift, plus midpoints
  particles,  // x restricted to the particle positions x_0..x_n
};

struct ConditionC {
  double worst_excess = 0.0; // max over x of g(rho(x+z)) - g(rho(x)) - C z / t
  double worst_x = 0.0;
  double worst_lhs = 0.0;
};

/// Worst violation of g(rho(x+z,t)) - g(rho(x,t)) <= C z / t. Throws
/// InvalidInput for t <= 0 or z <= 0.
ConditionC entropy_condition_c(const DensityField& field, const VelocityModel& model, GKind g, double z,
                               double c, Sweep sweep = Sweep::exhaustive);

// Full audit -----------------------------------------------------------------

struct DiagnosticOptions {
  double d_tol = 1e-8;           // absolute, on the D_i bounds
  double gap_tol = 1e-10;        // relative, gap floor and density ceiling
  double tv_tol = 1e-8;          // relative
  double w1_tol = 1e-6;          // relative
  double support_tol = 1e-10;    // relative to the support scale
  double mass_tol = 1e-12;
  double gn_tol = 1e-12;
  double c_tol = 1e-12;          // absolute slack on condition C
  std::vector<double> c_z{1e-3, 1e-2, 1e-1};
  double c_t_min = 0.1;          // condition C is audited on stored t in [c_t_min, c_t_max]
  double c_t_max = 2.0;
  bool c_exhaustive_asserted = false;
  std::vector<double> near_zero_times; // empty: every stored t > 0
  std::optional<TestFunction> test_function;

  /// Multiplies every tolerance.
  void scale(double factor);
  /// Replaces every tolerance by `value`.
  void override_all(double value);
};

struct EstimateResult {
  std::string name;
  double bound = 0.0;
  double worst_value = 0.0;
  double worst_time = 0.0;
  bool pass = true;
  bool asserted = true;
  bool lower = false; // worst_value must stay above the bound
};

struct SeriesRow {
  double t;
  std::string estimate;
  double value;
};

struct DiagnosticReport {
  std::size_t n = 0;
  std::vector<EstimateResult> estimates;
  std::vector<SeriesRow> series;
  DiagnosticOptions options;

  bool pass() const;
  /// First asserted estimate that failed, in report order.
  const EstimateResult* first_failure() const;
  const EstimateResult* find(const std::string& name) const;
};

/// Evaluates every estimate on every stored state (in parallel over states).
/// `initial_datum_tv` enables the TV[rho(0)] <= TV[datum] link when given.
DiagnosticReport diagnose(const Trajectory& trajectory, const DiagnosticOptions& options,
                          std::optional<double> initial_datum_tv = std::nullopt);

}  // namespace ftl
