#include <omp.h>

#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "ftl/kernels.hpp"

using namespace ftl;
namespace ks = ftl::kernels::serial;
namespace kp = ftl::kernels::parallel;

namespace {

std::vector<double> positions(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> gap(1e-4, 1e-3);
  std::vector<double> x{-0.7};
  for (std::size_t i = 0; i < n; ++i) x.push_back(x.back() + gap(gen));
  return x;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_CASE("parallel kernels reproduce the serial reference") {
  const std::size_t n = 3 * kernels::parallel_threshold + 17;
  const auto x = positions(n, 9);
  const double ell = 1.0 / static_cast<double>(n);
  const int saved = omp_get_max_threads();
  for (const auto& model : {VelocityModel::power_law(1.0, 0.5, 2.0), VelocityModel::logarithmic(1.0, 0.5, 2.0)}) {
    std::vector<double> rs(n), vs(n + 1);
    ks::local_densities(x, ell, rs);
    ks::velocities(model, x, ell, vs);
    const double ms_v = ks::max_one_sided(model, rs, 1.5, static_cast<double>(n), kernels::Slope::velocity);
    const double ms_f = ks::max_one_sided(model, rs, 1.5, static_cast<double>(n), kernels::Slope::flux_prime);
    const double tv_s = ks::total_variation(rs);
    const double gap_s = ks::min_gap(x);
    double tv_first = 0.0;

    for (int threads : {1, 2, 3, 4, 7}) {
      omp_set_num_threads(threads);
      std::vector<double> rp(n), vp(n + 1);
      kp::local_densities(x, ell, rp);
      kp::velocities(model, x, ell, vp);
      bool dens_ok = true, vel_ok = true;
      for (std::size_t i = 0; i < n; ++i) dens_ok = dens_ok && same_bits(rs[i], rp[i]);
      for (std::size_t i = 0; i <= n; ++i) vel_ok = vel_ok && same_bits(vs[i], vp[i]);
      CHECK(dens_ok);
      CHECK(vel_ok);
      CHECK(same_bits(ms_v, kp::max_one_sided(model, rp, 1.5, static_cast<double>(n), kernels::Slope::velocity)));
      CHECK(same_bits(ms_f, kp::max_one_sided(model, rp, 1.5, static_cast<double>(n), kernels::Slope::flux_prime)));
      CHECK(same_bits(gap_s, kp::min_gap(x)));
      const double tv_p = kp::total_variation(rp);
      // chunked sum: round-off differs from the serial loop, but not between thread counts
      CHECK(std::abs(tv_p - tv_s) <= 1e-12 * tv_s);
      if (threads == 1) tv_first = tv_p;
      CHECK(same_bits(tv_p, tv_first));
    }
  }
  omp_set_num_threads(saved);
}

TEST_CASE("kernels on small inputs") {
  const std::vector<double> x{0.0, 0.5, 0.75, 1.0};
  std::vector<double> r(3), v(4);
  kp::local_densities(x, 1.0 / 3.0, r);
  CHECK(r[0] == doctest::Approx(2.0 / 3.0));
  const auto m = VelocityModel::power_law(1.0, 1.0, 2.0);
  kp::velocities(m, x, 1.0 / 3.0, v);
  CHECK(v[3] == 1.0);
  CHECK(v[0] == doctest::Approx(1.0 / 3.0));
  CHECK(kp::min_gap(x) == 0.25);
  const std::vector<double> bumps{1.0, 2.0, 1.0};
  CHECK(kp::total_variation(bumps) == 4.0);
  const std::vector<double> block{0.7};
  CHECK(kp::total_variation(block) == doctest::Approx(1.4));
  // R increasing in i except for the last, where R_n = 0 gives the only positive D
  const std::vector<double> inc{0.1, 0.2, 0.4};
  const double d = kp::max_one_sided(m, inc, 2.0, 3.0, kernels::Slope::velocity);
  CHECK(d == doctest::Approx(2.0 * 3.0 * 0.4 * 0.4));
}
