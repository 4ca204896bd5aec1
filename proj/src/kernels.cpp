#include "ftl/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ftl::kernels {

namespace {

constexpr std::size_t kSumChunks = 64;

template <class Law>
double slope_increment(const Law& l, double a, double b, Slope slope) {
  return slope == Slope::velocity ? law::v_increment(l, a, b) : law::fprime_increment(l, a, b);
}

}  // namespace

namespace serial {

void local_densities(std::span<const double> x, double ell, std::span<double> out) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) out[i] = ell / (x[i + 1] - x[i]);
}

void velocities(const VelocityModel& model, std::span<const double> x, double ell, std::span<double> out) {
  const std::size_t n = x.size() - 1;
  model.visit([&](const auto& l) {
    for (std::size_t i = 0; i < n; ++i) out[i] = law::v(l, ell / (x[i + 1] - x[i]));
    out[n] = l.v_max;
  });
}

double max_one_sided(const VelocityModel& model, std::span<const double> density, double t, double n,
                     Slope slope) {
  const std::size_t m = density.size();
  return model.visit([&](const auto& l) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double next = (i + 1 < m) ? density[i + 1] : 0.0;
      best = std::max(best, t * n * density[i] * slope_increment(l, density[i], next, slope));
    }
    return best;
  });
}

double total_variation(std::span<const double> density) {
  if (density.empty()) return 0.0;
  double tv = std::abs(density.front()) + std::abs(density.back());
  for (std::size_t k = 0; k + 1 < density.size(); ++k) tv += std::abs(density[k + 1] - density[k]);
  return tv;
}

double min_gap(std::span<const double> x) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < x.size(); ++i) g = std::min(g, x[i + 1] - x[i]);
  return g;
}

}  // namespace serial

namespace parallel {

void local_densities(std::span<const double> x, double ell, std::span<double> out) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(x.size()) - 1;
#pragma omp parallel for schedule(static) if (x.size() >= parallel_threshold)
  for (std::ptrdiff_t i = 0; i < m; ++i) out[i] = ell / (x[i + 1] - x[i]);
}

void velocities(const VelocityModel& model, std::span<const double> x, double ell, std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size()) - 1;
  model.visit([&](const auto& l) {
#pragma omp parallel for schedule(static) if (x.size() >= parallel_threshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = law::v(l, ell / (x[i + 1] - x[i]));
    out[n] = l.v_max;
  });
}

double max_one_sided(const VelocityModel& model, std::span<const double> density, double t, double n,
                     Slope slope) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(density.size());
  return model.visit([&](const auto& l) {
    double best = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(max : best) if (density.size() >= parallel_threshold)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
      const double next = (i + 1 < m) ? density[i + 1] : 0.0;
      best = std::max(best, t * n * density[i] * slope_increment(l, density[i], next, slope));
    }
    return best;
  });
}

double total_variation(std::span<const double> density) {
  if (density.empty()) return 0.0;
  const std::size_t jumps = density.size() - 1;
  std::array<double, kSumChunks> partial{};
  const std::ptrdiff_t chunks = static_cast<std::ptrdiff_t>(kSumChunks);
#pragma omp parallel for schedule(static) if (density.size() >= parallel_threshold)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const std::size_t lo = jumps * static_cast<std::size_t>(c) / kSumChunks;
    const std::size_t hi = jumps * static_cast<std::size_t>(c + 1) / kSumChunks;
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += std::abs(density[k + 1] - density[k]);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double tv = std::abs(density.front()) + std::abs(density.back());
  for (double s : partial) tv += s;
  return tv;
}

double min_gap(std::span<const double> x) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(x.size()) - 1;
  double g = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : g) if (x.size() >= parallel_threshold)
  for (std::ptrdiff_t i = 0; i < m; ++i) g = std::min(g, x[i + 1] - x[i]);
  return g;
}

}  // namespace parallel

}  // namespace ftl::kernels
