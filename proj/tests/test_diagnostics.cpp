#include <cmath>
#include <random>

#include "doctest.h"
#include "ftl/atomiser.hpp"
#include "ftl/diagnostics.hpp"
#include "ftl/errors.hpp"

using namespace ftl;

namespace {

const VelocityModel linear = VelocityModel::power_law(1.0, 1.0);

ParticleState at_time(std::vector<double> x, double t, const VelocityModel& m, double rho_bar = 1.0) {
  const double ell = 1.0 / static_cast<double>(x.size() - 1);
  const double origin = x.back() - t * m.v_max();
  return ParticleState{t, std::move(x), m.with_rho_bar(rho_bar), ell, origin, 0.0};
}

// sup over ordered point subsets of sum |f(p_{k+1}) - f(p_k)|, points at cell
// midpoints plus one on each side of the support
double tv_brute_force(const DensityField& f) {
  std::vector<double> pts{f.edges.front() - 1.0};
  for (std::size_t i = 0; i < f.cells(); ++i) pts.push_back(0.5 * (f.edges[i] + f.edges[i + 1]));
  pts.push_back(f.edges.back() + 1.0);
  const std::size_t m = pts.size();
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    double s = 0.0, prev = 0.0;
    bool first = true;
    for (std::size_t k = 0; k < m; ++k) {
      if (!(mask & (1u << k))) continue;
      const double v = f(pts[k]);
      if (!first) s += std::abs(v - prev);
      prev = v;
      first = false;
    }
    best = std::max(best, s);
  }
  return best;
}

Trajectory run(const char* datum, std::size_t n, const VelocityModel& m, double t_end,
               std::vector<double> samples = {}) {
  SolverConfig cfg;
  cfg.t_end = t_end;
  cfg.sample_times = std::move(samples);
  return integrate(atomise(make_datum(datum), n), m, cfg);
}

}  // namespace

TEST_CASE("discrete one-sided bounds") {
  const auto s0 = at_time({0.0, 0.3, 0.5, 1.2}, 0.0, linear);
  CHECK(discrete_osl_general(s0) == 0.0);
  CHECK(discrete_osl_improved(s0).max_d == 0.0);

  // n = 1 closed form: gap = sqrt(1 + 2t), D_0 = t / (1 + 2t)
  for (double t : {0.5, 1.0, 4.0}) {
    const auto s = at_time({0.0, std::sqrt(1.0 + 2.0 * t)}, t, linear);
    CHECK(discrete_osl_general(s) == doctest::Approx(t / (1.0 + 2.0 * t)).epsilon(1e-14));
  }
  const auto s1 = at_time({0.0, std::sqrt(3.0)}, 1.0, linear);
  CHECK(discrete_osl_general(s1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto imp = discrete_osl_improved(s1);
  CHECK(imp.bound == 0.5);
  CHECK(imp.max_d_fprime == doctest::Approx(2.0 / 3.0));
  CHECK(discrete_osl_fprime(s1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  const auto sq = at_time({0.0, 1.0, 2.0}, 1.0, VelocityModel::power_law(1.0, 2.0));
  CHECK(discrete_osl_improved(sq).bound == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(discrete_osl_improved(at_time({0.0, 1.0}, 1.0, VelocityModel::logarithmic(1.0, 0.5))),
                  UnsupportedModel);

  // R increasing in i: every D_i with i < n-1 is <= 0
  const auto inc = at_time({0.0, 1.0, 1.5, 1.75, 1.875}, 1.0, linear, 4.0);
  const auto f = reconstruct(inc);
  for (std::size_t i = 0; i + 2 < f.cells() + 1; ++i) {
    const double d = inc.t * 4.0 * f.values[i] * linear.velocity_increment(f.values[i], f.values[i + 1]);
    CHECK(d <= 0.0);
  }
}

TEST_CASE("total variation") {
  CHECK(total_variation(DensityField{{0.0, 2.0}, {0.7}, 0.0}) == doctest::Approx(1.4));
  CHECK(total_variation(DensityField{{0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 1.0}, 0.0}) == 4.0);
  std::mt19937 gen(8);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int k = 0; k < 30; ++k) {
    DensityField f{{0.0}, {}, 0.0};
    const int cells = 1 + k % 8;
    for (int i = 0; i < cells; ++i) {
      f.edges.push_back(f.edges.back() + 0.1 + u(gen));
      f.values.push_back(u(gen));
    }
    CHECK(std::abs(total_variation(f) - tv_brute_force(f)) <= 1e-12);
  }
}

TEST_CASE("tv_monotonicity") {
  Trajectory single;
  single.states.push_back(at_time({0.0, 1.0}, 0.0, linear));
  CHECK(tv_monotonicity(single).pass);

  const auto tr = run("riemann(0.2,0.8)", 100, linear, 2.0);
  const auto chk = tv_monotonicity(tr);
  CHECK(chk.pass);
  CHECK(chk.worst_value <= chk.bound);

  const auto block = run("riemann(1,1)", 100, VelocityModel::power_law(1.0, 2.0), 2.0);
  const double rbar = block.states.front().model.rho_bar();
  for (const auto& s : block.states) CHECK(total_variation(reconstruct(s)) <= 2.0 * rbar * (1.0 + 1e-10));
}

TEST_CASE("wasserstein_lipschitz") {
  CHECK(wasserstein_bound(VelocityModel::power_law(1.0, 1.0, 1.0)) == 2.0);
  CHECK(wasserstein_bound(VelocityModel::logarithmic(1.0, 0.5, 1.0)) == 2.0);
  // |v(Rbar)| = log(10.1)/log(10) > v_max
  CHECK(wasserstein_bound(VelocityModel::logarithmic(1.0, 0.1, 10.0)) ==
        doctest::Approx(2.0 * std::log(10.1) / std::log(10.0)));

  // a far-apart pair is nearly pure transport at v_max
  SolverConfig cfg;
  cfg.t_end = 1.0;
  const auto tr = integrate(ParticleConfiguration{1, {0.0, 1e6}, 1.0, 1e-6}, linear, cfg);
  const auto w = wasserstein_lipschitz(tr);
  CHECK(w.worst_value == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(w.pass);

  Trajectory dup;
  dup.states = {at_time({0.0, 1.0}, 0.0, linear), at_time({0.0, 1.0}, 0.0, linear)};
  CHECK(wasserstein_lipschitz(dup).worst_value == 0.0);
}

TEST_CASE("near-zero continuity and the GN chain") {
  Trajectory still;
  still.states = {at_time({0.0, 1.0}, 0.0, linear), at_time({0.0, 1.0}, 0.5, linear)};
  const auto nz0 = near_zero_continuity(still);
  CHECK(nz0.sup_ratio == 0.0);
  CHECK(nz0.gn_pass);

  // the inequality itself on random pairs of unit-mass fields
  std::mt19937 gen(12);
  std::uniform_real_distribution<double> gap(0.01, 1.0);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> a{0.0}, b{gap(gen) - 0.5};
    for (int i = 0; i < 6; ++i) {
      a.push_back(a.back() + gap(gen));
      b.push_back(b.back() + gap(gen));
    }
    const auto sa = at_time(a, 0.0, linear), sb = at_time(b, 0.0, linear);
    const auto fa = reconstruct(sa), fb = reconstruct(sb);
    const double l1 = l1_distance(fa, fb);
    const double tv = total_variation(difference(fa, fb));
    CHECK(l1 <= gn_constant * std::sqrt(tv * wasserstein1(sa, sb)) + 1e-12);
  }

  const auto tr = run("bump", 100, linear, 1.0, {0.5, 0.25, 0.125});
  const auto nz = near_zero_continuity(tr, 1e-12, {0.125, 0.25, 0.5});
  CHECK(nz.samples == 3);
  CHECK(nz.gn_pass);
  CHECK(nz.sup_ratio > 0.0);
}

TEST_CASE("weak residual") {
  const TestFunction far{10.0, 0.5, 0.5, 0.4};
  const auto tr = run("bump", 50, linear, 1.0);
  CHECK(weak_residual(tr, far) == 0.0);

  TestFunction late{0.0, 1.0, 0.9, 0.5};
  CHECK_THROWS_AS(weak_residual(tr, late), InvalidInput);

  // antiderivative of the spatial profile against a fine midpoint sum
  const TestFunction tf{0.3, 0.7, 0.5, 0.4};
  double s = 0.0;
  const double h = 1e-5;
  for (double x = -0.4 + 0.5 * h; x < 0.55; x += h) s += tf.a(x) * h;
  CHECK(tf.a_antiderivative(0.55) == doctest::Approx(s).epsilon(1e-8));
  CHECK(tf.a_antiderivative(5.0) == doctest::Approx(0.7 * 256.0 / 315.0).epsilon(1e-14));
  CHECK(tf.b_prime(0.6) == doctest::Approx((tf.b(0.6 + 1e-6) - tf.b(0.6 - 1e-6)) / 2e-6).epsilon(1e-7));

  // nearly empty road: rho ~ 0, f(rho) ~ v_max rho, the pair moves rigidly at v_max
  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.dt_max = 1e-3;
  const auto sparse = integrate(ParticleConfiguration{1, {0.0, 1e4}, 1.0, 1e-4}, linear, cfg);
  const TestFunction moving{5e3 + 0.5, 1e4, 0.5, 0.4};
  CHECK(std::abs(weak_residual(sparse, moving)) < 1e-8);
}

TEST_CASE("condition C") {
  // a block is constant inside; the only positive g-jump is the drop to vacuum at its right end
  const DensityField flat{{0.0, 1.0}, {0.5}, 1.0};
  const auto c = entropy_condition_c(flat, linear, GKind::velocity, 0.01, 1.0);
  CHECK(c.worst_lhs == doctest::Approx(0.5));
  CHECK(c.worst_x >= 1.0 - 0.01);
  CHECK(c.worst_x < 1.0);
  const auto inside = entropy_condition_c(DensityField{{0.0, 0.5, 1.0}, {0.5, 0.5}, 1.0}, linear, GKind::velocity,
                                          0.01, 1.0, Sweep::particles);
  CHECK(inside.worst_lhs == 0.0);

  // increasing jump: g(rho) jumps down, admissible for any C >= 0
  const DensityField shock{{-1.0, 0.0, 1.0}, {0.2, 0.8}, 1.0};
  const auto m = linear.with_rho_bar(1.0);
  for (double z : {1e-3, 1e-2, 1e-1}) {
    const auto r = entropy_condition_c(shock, m, GKind::velocity, z, 0.0, Sweep::particles);
    CHECK(r.worst_lhs <= 0.0 + 1e-15);
  }
  CHECK_THROWS_AS(entropy_condition_c(DensityField{{0.0, 1.0}, {0.5}, 0.0}, linear, GKind::velocity, 0.1, 1.0),
                  InvalidInput);
  CHECK_THROWS_AS(entropy_condition_c(flat, linear, GKind::velocity, 0.0, 1.0), InvalidInput);

  // exhaustive sweep dominates any brute-force sweep
  const auto tr = run("riemann(0.8,0.2)", 100, linear, 1.0);
  const auto field = reconstruct(tr.states.back());
  const auto& model = tr.states.back().model;
  for (double z : {1e-3, 1e-2}) {
    double brute = -1e300;
    const double step = z / 10.0;
    for (double x = field.edges.front() - 2 * z; x < field.edges.back() + z; x += step) {
      brute = std::max(brute, model.velocity_increment(field(x), field(x + z)) - z / field.t);
    }
    const auto ex = entropy_condition_c(field, model, GKind::velocity, z, 1.0);
    CHECK(ex.worst_excess >= brute - 1e-15);
    // at the particles the decreasing profile's v(rho) rises by at most z/t
    const auto at_particles = entropy_condition_c(field, model, GKind::velocity, z, 1.0, Sweep::particles);
    CHECK(at_particles.worst_excess <= 1e-12);
  }
}

TEST_CASE("diagnose") {
  SolverConfig cfg;
  cfg.t_end = 2.0;
  const auto datum = make_datum("riemann(0.2,0.8)");
  const auto tr = integrate(atomise(datum, 100), linear, cfg);
  DiagnosticOptions opt;
  opt.test_function = TestFunction{0.0, 1.0, 1.0, 0.5};
  const auto rep = diagnose(tr, opt, total_variation(datum.as_field()));
  CHECK(rep.n == 100);
  for (const auto& e : rep.estimates) {
    CAPTURE(e.name);
    CHECK(std::isfinite(e.worst_value));
    if (e.asserted) CHECK(e.pass);
  }
  CHECK(rep.pass());
  CHECK(rep.find("max_D_improved") != nullptr);
  CHECK(rep.find("weak_residual") != nullptr);
  CHECK(rep.find("condition_c_v_exhaustive")->asserted == false);
  CHECK(!rep.series.empty());

  DiagnosticOptions broken;
  broken.override_all(1e-300);
  const auto bad = diagnose(tr, broken);
  REQUIRE(bad.first_failure() != nullptr);
  CHECK(!bad.pass());

  const auto log_tr = integrate(atomise(datum, 50), VelocityModel::logarithmic(1.0, 0.5), cfg);
  const auto log_rep = diagnose(log_tr, DiagnosticOptions{});
  CHECK(log_rep.find("max_D_improved") == nullptr);
  CHECK(log_rep.find("max_D_fprime")->bound == doctest::Approx(1.0 + std::max(0.5 * std::exp(0.8), 1.0)));
  CHECK(log_rep.pass());
}
