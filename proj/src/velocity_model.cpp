#include "ftl/velocity_model.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <limits>
#include <sstream>

#include "ftl/errors.hpp"

namespace ftl {

namespace {

std::atomic<bool> g_ceiling_warned{false};

struct Derivatives {
  double v, dv, d2v;
};

Derivatives eval(const PowerLaw& p, double rho) {
  const double g = p.gamma;
  const double rg = std::pow(rho, g);
  // Written as gamma*rho^(gamma-1) so that gamma == 1 gives exactly 1 at rho == 0.
  const double dv = -g * std::pow(rho, g - 1.0);
  const double d2v = (g == 1.0) ? 0.0 : -g * (g - 1.0) * std::pow(rho, g - 2.0);
  return {p.v_max - rg, dv, d2v};
}

Derivatives eval(const Logarithmic& l, double rho) {
  const double c = law::log_scale(l);
  const double u = rho + l.beta;
  return {-c * std::log(u), -c / u, c / (u * u)};
}

}  // namespace

VelocityModel::VelocityModel(Law law, double rho_bar) : law_(law), rho_bar_(rho_bar) {
  if (!(rho_bar >= 0.0) || !std::isfinite(rho_bar)) {
    throw InvalidInput("rho_bar must be finite and >= 0");
  }
  std::visit(
      [](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if (!(l.v_max > 0.0)) throw InvalidInput("v_max must be > 0");
        if constexpr (std::is_same_v<T, PowerLaw>) {
          if (!(l.gamma > 0.0)) throw InvalidInput("power law requires gamma > 0");
        } else {
          if (!(l.beta > 0.0 && l.beta < 1.0)) throw InvalidInput("logarithmic law requires 0 < beta < 1");
        }
      },
      law_);
}

VelocityModel VelocityModel::power_law(double v_max, double gamma, double rho_bar) {
  return VelocityModel(PowerLaw{v_max, gamma}, rho_bar);
}

VelocityModel VelocityModel::logarithmic(double v_max, double beta, double rho_bar) {
  return VelocityModel(Logarithmic{v_max, beta}, rho_bar);
}

std::string VelocityModel::name() const {
  std::ostringstream os;
  visit([&](const auto& l) {
    using T = std::decay_t<decltype(l)>;
    if constexpr (std::is_same_v<T, PowerLaw>) {
      os << "power_law(v_max=" << l.v_max << ",gamma=" << l.gamma << ")";
    } else {
      os << "logarithmic(v_max=" << l.v_max << ",beta=" << l.beta << ")";
    }
  });
  return os.str();
}

double VelocityModel::v_max() const {
  return visit([](const auto& l) { return l.v_max; });
}

void VelocityModel::check(double rho) const {
  if (!(rho >= 0.0)) throw DomainError("density must be >= 0, got " + std::to_string(rho));
  if (rho_bar_ > 0.0 && rho > rho_bar_ * (1.0 + 1e-10) && !g_ceiling_warned.exchange(true)) {
    std::cerr << "warning: " << name() << " evaluated at rho=" << rho << " above its ceiling "
              << rho_bar_ << "\n";
  }
}

double VelocityModel::v(double rho) const {
  check(rho);
  return visit([&](const auto& l) { return law::v(l, rho); });
}

double VelocityModel::v_prime(double rho) const {
  check(rho);
  return visit([&](const auto& l) { return eval(l, rho).dv; });
}

double VelocityModel::v_second(double rho) const {
  check(rho);
  return visit([&](const auto& l) { return eval(l, rho).d2v; });
}

double VelocityModel::phi(double rho) const {
  check(rho);
  return visit([&](const auto& l) {
    using T = std::decay_t<decltype(l)>;
    if constexpr (std::is_same_v<T, PowerLaw>) {
      return -l.gamma * std::pow(rho, l.gamma);
    } else {
      return law::phi(l, rho);
    }
  });
}

double VelocityModel::flux(double rho) const { return rho * v(rho); }

double VelocityModel::flux_prime(double rho) const { return v(rho) + phi(rho); }

double VelocityModel::velocity_increment(double a, double b) const {
  check(a);
  check(b);
  return visit([&](const auto& l) { return law::v_increment(l, a, b); });
}

double VelocityModel::flux_prime_increment(double a, double b) const {
  check(a);
  check(b);
  return visit([&](const auto& l) { return law::fprime_increment(l, a, b); });
}

double VelocityModel::declared_k() const {
  return visit([&](const auto& l) {
    using T = std::decay_t<decltype(l)>;
    if constexpr (std::is_same_v<T, PowerLaw>) {
      return l.gamma;
    } else {
      return std::max(l.beta * std::exp(rho_bar_), 1.0);
    }
  });
}

double VelocityModel::flux_argmax() const {
  return visit([&](const auto& l) {
    using T = std::decay_t<decltype(l)>;
    if constexpr (std::is_same_v<T, PowerLaw>) {
      return std::pow(l.v_max / (l.gamma + 1.0), 1.0 / l.gamma);
    } else {
      auto fp = [&](double r) { return law::v(l, r) + law::phi(l, r); };
      double lo = 0.0, hi = 1.0;
      while (fp(hi) > 0.0) hi *= 2.0;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fp(mid) > 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  });
}

AssumptionReport check_assumptions(const VelocityModel& model, std::size_t grid_size, double tolerance) {
  if (grid_size < 2) throw InvalidInput("check_assumptions needs grid_size >= 2");
  const double rb = model.rho_bar();
  if (!(rb > 0.0)) throw InvalidInput("check_assumptions needs a bound rho_bar > 0");

  AssumptionReport rep;
  rep.grid_size = grid_size;
  rep.rho_bar = rb;
  rep.declared_k = model.declared_k();

  std::vector<double> rho(grid_size), v(grid_size), phi(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) {
    rho[k] = rb * static_cast<double>(k) / static_cast<double>(grid_size - 1);
  }
  rho.back() = rb;

  model.visit([&](const auto& l) {
    using T = std::decay_t<decltype(l)>;
    for (std::size_t k = 0; k < grid_size; ++k) {
      v[k] = law::v(l, rho[k]);
      if constexpr (std::is_same_v<T, PowerLaw>) {
        phi[k] = -l.gamma * std::pow(rho[k], l.gamma);
      } else {
        phi[k] = law::phi(l, rho[k]);
      }
    }
  });

  rep.v_prime_min = std::numeric_limits<double>::infinity();
  rep.v_prime_max = -std::numeric_limits<double>::infinity();
  rep.strictly_decreasing = true;
  rep.phi_increase_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < grid_size; ++k) {
    if (!(v[k] > v[k + 1])) rep.strictly_decreasing = false;
    rep.phi_increase_max = std::max(rep.phi_increase_max, phi[k + 1] - phi[k]);
  }

  rep.ratio_min = std::numeric_limits<double>::infinity();
  rep.ratio_max = -std::numeric_limits<double>::infinity();
  rep.k_tilde = 0.0;
  for (std::size_t i = 1; i < grid_size; ++i) {
    const double r = rho[i];
    const Derivatives d = model.visit([&](const auto& l) { return eval(l, r); });
    rep.v_prime_min = std::min(rep.v_prime_min, d.dv);
    rep.v_prime_max = std::max(rep.v_prime_max, d.dv);

    const double h = std::min(1e-5 * rb, 0.5 * r);
    const double dvp = model.visit([&](const auto& l) { return eval(l, r + h).dv; });
    const double dvm = model.visit([&](const auto& l) { return eval(l, r - h).dv; });
    const double v2 = (dvp - dvm) / (2.0 * h);
    rep.k_tilde = std::max(rep.k_tilde, std::abs(r * v2 / d.dv));

    for (std::size_t j = 0; j < i; ++j) {
      // both increments measured from rho[i] to rho[j]
      const double dvel = model.visit([&](const auto& l) { return law::v_increment(l, rho[i], rho[j]); });
      const double dphi = model.visit([&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return phi[j] - phi[i];
        } else {
          return law::phi_increment(l, rho[i], rho[j]);
        }
      });
      const double ratio = dphi / dvel;
      rep.ratio_min = std::min(rep.ratio_min, ratio);
      rep.ratio_max = std::max(rep.ratio_max, ratio);
    }
  }

  rep.v1_holds = rep.strictly_decreasing && rep.v_prime_max <= 0.0;
  rep.v2_holds = rep.phi_increase_max <= tolerance && rep.ratio_min >= -tolerance &&
                 rep.ratio_max <= rep.declared_k + tolerance;
  return rep;
}

}  // namespace ftl
