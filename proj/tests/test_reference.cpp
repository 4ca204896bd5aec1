#include <cmath>
#include <random>

#include "doctest.h"
#include "ftl/atomiser.hpp"
#include "ftl/errors.hpp"
#include "ftl/reference.hpp"

using namespace ftl;

namespace {

const VelocityModel linear = VelocityModel::power_law(1.0, 1.0);

double l1_grid_vs_exact(const GridSolution& g, std::size_t slice, const JuxtaposedRiemann& exact) {
  const auto f = g.field(slice);
  return l1_error(f, exact, g.times[slice], f.edges.front(), f.edges.back());
}

}  // namespace

TEST_CASE("Rankine-Hugoniot residual") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double gamma : {0.5, 1.0, 2.0, 3.7}) {
    const auto m = VelocityModel::power_law(1.3, gamma);
    for (int k = 0; k < 200; ++k) {
      const double a = u(gen), b = u(gen);
      if (a == b) continue;
      const RiemannProblem p{std::min(a, b), std::max(a, b), 0.0};
      const double s = shock_speed(p, m);
      CHECK(std::abs(s * (p.rho_r - p.rho_l) - (m.flux(p.rho_r) - m.flux(p.rho_l))) <= 1e-14);
    }
  }
}

TEST_CASE("riemann_exact examples") {
  const RiemannProblem shock{0.2, 0.8, 0.0};
  CHECK(std::abs(shock_speed(shock, linear)) < 1e-15);
  CHECK(riemann_exact(shock, linear, -1e-3, 1.0) == 0.2);
  CHECK(riemann_exact(shock, linear, 1e-3, 1.0) == 0.8);

  const RiemannProblem fan{1.0, 0.0, 0.0};
  CHECK(riemann_exact(fan, linear, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(riemann_exact(fan, linear, -1.5, 1.0) == 1.0);
  CHECK(riemann_exact(fan, linear, 1.5, 1.0) == 0.0);
  // xi = 1 - 2 rho inside the fan
  for (double xi : {-0.9, -0.3, 0.25, 0.8}) CHECK(riemann_exact(fan, linear, 2.0 * xi, 2.0) == doctest::Approx((1.0 - xi) / 2.0));

  const RiemannProblem flat{0.4, 0.4, 0.0};
  for (double x : {-10.0, 0.0, 3.0}) CHECK(riemann_exact(flat, linear, x, 0.3) == 0.4);

  CHECK_THROWS_AS(riemann_exact(fan, VelocityModel::logarithmic(1.0, 0.5), 0.0, 1.0), UnsupportedModel);
  CHECK_THROWS_AS(riemann_exact(fan, linear, 0.0, 0.0), InvalidInput);
}

TEST_CASE("fan inverts f'") {
  for (double gamma : {0.5, 2.0}) {
    const auto m = VelocityModel::power_law(1.0, gamma);
    const RiemannProblem p{0.9, 0.1, 0.3};
    const double t = 1.7;
    for (int k = 1; k < 20; ++k) {
      const double xi = m.flux_prime(0.9) + (m.flux_prime(0.1) - m.flux_prime(0.9)) * k / 20.0;
      const double rho = riemann_exact(p, m, p.x0 + xi * t, t);
      CHECK(m.flux_prime(rho) == doctest::Approx(xi).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("f' increments equal z/t inside a fan") {
  const auto m = VelocityModel::power_law(1.0, 2.0);
  const RiemannProblem p{1.0, 0.0, 0.0};
  const double t = 2.0;
  for (double z : {1e-3, 1e-2, 1e-1}) {
    for (double x = -3.5; x + z < 1.9; x += 0.37) {
      const double lhs = m.flux_prime(riemann_exact(p, m, x + z, t)) - m.flux_prime(riemann_exact(p, m, x, t));
      CHECK(lhs <= z / t + 1e-12);
      if (x > m.flux_prime(1.0) * t && x + z < m.flux_prime(0.0) * t) CHECK(lhs == doctest::Approx(z / t).epsilon(1e-9));
    }
  }
}

TEST_CASE("juxtaposed Riemann problems") {
  const auto datum = make_datum("riemann(0.2,0.8)");
  const JuxtaposedRiemann ex(datum, linear);
  // vacuum -> 0.2 shock at speed 0.8, the stationary shock, 0.8 -> vacuum fan on [-0.6, 1]
  const double w = 1.0;
  CHECK(ex(-w - 0.01, 0.0) == 0.0);
  CHECK(ex(-0.5, 0.0) == 0.2);
  CHECK(ex(0.5, 0.0) == 0.8);
  CHECK(ex(-0.01, 1.0) == 0.2);
  CHECK(ex(0.01, 1.0) == 0.8);
  CHECK(ex.support_right(1.0) == doctest::Approx(w + 1.0));
  CHECK(ex.support_left(1.0) == doctest::Approx(-w + 0.8));
  // the left shock reaches the stationary one first
  CHECK(ex.interaction_time() == doctest::Approx(1.0 / 0.8));
  CHECK_THROWS_AS(ex(0.0, 2.0), InvalidInput);
  CHECK(ex.singular_points(1.0).size() == 4);
  CHECK(ex.level_crossings(0.5, 1.0).size() == 1);
  CHECK(ex.level_crossings(0.5, 1.0)[0] == doctest::Approx(w));
  CHECK_THROWS_AS(JuxtaposedRiemann(datum, VelocityModel::logarithmic(1.0, 0.5)), UnsupportedModel);
}

TEST_CASE("l1_error against a hand integral") {
  const JuxtaposedRiemann ex(InitialDatum({0.0, 1.0}, {1.0}), linear);
  const double t = 1.0;
  // fan 1 -> 0 at x = 1 spans [0, 2] at t = 1 with rho = (1 - (x-1))/2; a zero field leaves int rho
  const DensityField zero{{-5.0, 5.0}, {0.0}, t};
  CHECK(l1_error(zero, ex, t, -5.0, 5.0) == doctest::Approx(1.0).epsilon(1e-14));  // mass
  // field 0.5 on [0, 2]: |0.5 - (2-x)/2| integrates to 2 * (1/2 * 1 * 0.5) = 0.5
  const DensityField half{{0.0, 2.0}, {0.5}, t};
  CHECK(l1_error(half, ex, t, -1.0, 3.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("godunov flux") {
  CHECK(godunov_flux(linear, 0.2, 0.8) == doctest::Approx(0.16));
  CHECK(godunov_flux(linear, 0.8, 0.2) == doctest::Approx(0.25));
  CHECK(godunov_flux(linear, 0.8, 0.6) == doctest::Approx(0.6 * 0.4));
  CHECK(godunov_flux(linear, 0.3, 0.1) == doctest::Approx(0.3 * 0.7));
  CHECK(godunov_flux(linear, 0.9, 0.7) == doctest::Approx(0.7 * 0.3));
  CHECK(godunov_flux(linear, 0.0, 0.0) == 0.0);
  // consistency
  const auto lg = VelocityModel::logarithmic(1.0, 0.5, 1.0);
  for (double r : {0.0, 0.1, 0.5, 0.9}) CHECK(godunov_flux(lg, r, r) == doctest::Approx(lg.flux(r)).epsilon(1e-15));
}

TEST_CASE("fv_reference") {
  SUBCASE("invalid config") {
    const auto d = make_datum("bump");
    CHECK_THROWS_AS(fv_reference(d, linear, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(fv_reference(d, linear, 0.01, 1.0, {}, 0.95), ConfigError);
  }
  SUBCASE("constant interior stays constant") {
    // a wide block: away from the edges the state stays exactly 0.5
    const auto d = InitialDatum({-10.0, 10.0}, {0.5});
    const auto g = fv_reference(d, linear, 0.125, 1.0);
    const auto f = g.field(g.slices.size() - 1);
    for (double x = -8.0; x < 8.0; x += 0.25) CHECK(f(x) == 0.5);
    CHECK(g.monotone);
    CHECK(g.max_mass_drift < 1e-10);
  }
  SUBCASE("stationary shock stays put") {
    const auto d = make_datum("riemann(0.2,0.8)");
    const auto g = fv_reference(d, linear, 1.0 / 256.0, 1.0, {0.5});
    REQUIRE(g.times.size() == 3);
    CHECK(g.times[1] == 0.5);
    const auto f = g.field(2);
    // within one cell of x = 0
    CHECK(std::abs(f(-2.0 * g.dx) - 0.2) < 1e-6);
    CHECK(std::abs(f(2.0 * g.dx) - 0.8) < 1e-6);
    CHECK(g.monotone);
    CHECK(g.max_mass_drift < 1e-10);
  }
  SUBCASE("rarefaction error shrinks like a monotone scheme") {
    const auto d = make_datum("riemann(0.8,0.2)");
    const JuxtaposedRiemann ex(d, linear);
    const double t = std::min(1.0, ex.interaction_time());
    double prev = 0.0;
    for (double dx : {1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512}) {
      const auto g = fv_reference(d, linear, dx, t);
      const double e = l1_grid_vs_exact(g, g.slices.size() - 1, ex);
      if (prev > 0.0) {
        CHECK(e < prev);
        CHECK(prev / e > std::sqrt(2.0) * 0.9);
      }
      prev = e;
      CHECK(g.monotone);
      CHECK(g.max_mass_drift < 1e-10);
    }
  }
  SUBCASE("logarithmic model is monotone and conservative") {
    const auto g = fv_reference(make_datum("two_blocks"), VelocityModel::logarithmic(1.0, 0.5), 1.0 / 200, 2.0);
    CHECK(g.monotone);
    CHECK(g.max_mass_drift < 1e-10);
    for (const auto& s : g.slices)
      for (double v : s) CHECK(v >= 0.0);
  }
}
