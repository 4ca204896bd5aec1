#pragma once

#include <cmath>
#include <string>
#include <variant>

namespace ftl {

/// v(rho) = v_max - rho^gamma.
struct PowerLaw {
  double v_max = 1.0;
  double gamma = 1.0;
};

/// v(rho) = v_max * log(1/(rho+beta)) / log(1/beta), 0 < beta < 1.
struct Logarithmic {
  double v_max = 1.0;
  double beta = 0.5;
};

/// A velocity law together with the density ceiling it is certified on.
///
/// `rho_bar` is injected from the initial datum (its sup-norm). A value of 0
/// means "not yet bound"; evaluations above a bound ceiling print a one-time
/// warning but still return the closed-form value.
class VelocityModel {
 public:
  using Law = std::variant<PowerLaw, Logarithmic>;

  VelocityModel(Law law, double rho_bar = 0.0);

  static VelocityModel power_law(double v_max, double gamma, double rho_bar = 0.0);
  static VelocityModel logarithmic(double v_max, double beta, double rho_bar = 0.0);

  const Law& law() const { return law_; }
  bool is_power_law() const { return std::holds_alternative<PowerLaw>(law_); }
  std::string name() const;

  double rho_bar() const { return rho_bar_; }
  VelocityModel with_rho_bar(double rho_bar) const { return VelocityModel(law_, rho_bar); }

  double v_max() const;

  // Closed forms. All throw DomainError for rho < 0.
  double v(double rho) const;
  double v_prime(double rho) const;
  double v_second(double rho) const;
  double phi(double rho) const;        // rho * v'(rho)
  double flux(double rho) const;       // f(rho) = rho * v(rho)
  double flux_prime(double rho) const; // f'(rho) = v(rho) + phi(rho)

  // v(b) - v(a) and f'(b) - f'(a) without the cancellation of v_max.
  double velocity_increment(double a, double b) const;
  double flux_prime_increment(double a, double b) const;

  /// (V2) constant K on [0, rho_bar]: gamma for PowerLaw,
  /// max(beta * e^rho_bar, 1) for Logarithmic.
  double declared_k() const;

  /// Unique maximiser of the strictly concave flux on [0, inf).
  double flux_argmax() const;

  /// Dispatches `fn` on the concrete law; lets hot loops avoid a visit per call.
  template <class Fn>
  decltype(auto) visit(Fn&& fn) const {
    return std::visit(std::forward<Fn>(fn), law_);
  }

 private:
  void check(double rho) const;

  Law law_;
  double rho_bar_ = 0.0;
};

// Unchecked per-law kernels used inside particle loops. rho >= 0 is the
// caller's responsibility.
namespace law {

inline double v(const PowerLaw& p, double rho) { return p.v_max - std::pow(rho, p.gamma); }
inline double v_increment(const PowerLaw& p, double a, double b) {
  return std::pow(a, p.gamma) - std::pow(b, p.gamma);
}
inline double fprime_increment(const PowerLaw& p, double a, double b) {
  return (p.gamma + 1.0) * (std::pow(a, p.gamma) - std::pow(b, p.gamma));
}

inline double log_scale(const Logarithmic& l) { return l.v_max / std::log(1.0 / l.beta); }
inline double v(const Logarithmic& l, double rho) { return -log_scale(l) * std::log(rho + l.beta); }
inline double v_increment(const Logarithmic& l, double a, double b) {
  // v(b) - v(a) = c * log((a+beta)/(b+beta))
  return log_scale(l) * std::log1p((a - b) / (b + l.beta));
}
inline double phi(const Logarithmic& l, double rho) { return -log_scale(l) * rho / (rho + l.beta); }
inline double phi_increment(const Logarithmic& l, double a, double b) {
  // phi(b) - phi(a) = c * beta * (a - b) / ((a+beta)(b+beta))
  return log_scale(l) * l.beta * (a - b) / ((a + l.beta) * (b + l.beta));
}
inline double fprime_increment(const Logarithmic& l, double a, double b) {
  return v_increment(l, a, b) + phi_increment(l, a, b);
}

}  // namespace law

/// Sample-based audit of (V1)/(V2) on a uniform grid of [0, rho_bar].
struct AssumptionReport {
  std::size_t grid_size = 0;
  double rho_bar = 0.0;
  double v_prime_min = 0.0;       // over grid points with rho > 0
  double v_prime_max = 0.0;
  bool strictly_decreasing = false;
  double phi_increase_max = 0.0;  // max of phi(r_{k+1}) - phi(r_k); <= 0 when non-increasing
  double ratio_min = 0.0;         // (phi(r)-phi(s))/(v(r)-v(s)) over distinct pairs
  double ratio_max = 0.0;
  double k_tilde = 0.0;           // max |rho v''/v'| with v'' by central differences
  double declared_k = 0.0;
  bool v1_holds = false;
  bool v2_holds = false;
};

AssumptionReport check_assumptions(const VelocityModel& model, std::size_t grid_size = 512,
                                   double tolerance = 1e-10);

}  // namespace ftl
