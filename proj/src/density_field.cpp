#include "ftl/density_field.hpp"

#include <algorithm>
#include <cmath>

#include "ftl/dynamics.hpp"
#include "ftl/errors.hpp"
#include "ftl/kernels.hpp"

namespace ftl {

double DensityField::mass() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * (edges[i + 1] - edges[i]);
  return m;
}

double DensityField::sup_norm() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double DensityField::operator()(double x) const {
  if (values.empty() || x < edges.front() || x >= edges.back()) return 0.0;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  return values[static_cast<std::size_t>(it - edges.begin()) - 1];
}

QuantileFunction::QuantileFunction(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw InvalidInput("quantile needs at least two knots");
}

double QuantileFunction::operator()(double z) const {
  const std::size_t cells = n();
  if (z <= 0.0) return knots_.front();
  if (z >= 1.0) return knots_.back();
  const double nd = static_cast<double>(cells);
  const std::size_t i = std::min(static_cast<std::size_t>(z * nd), cells - 1);
  return knots_[i] + (z - static_cast<double>(i) / nd) * nd * (knots_[i + 1] - knots_[i]);
}

DensityField reconstruct(std::span<const double> positions, double ell, double t) {
  DensityField f;
  f.t = t;
  f.edges.assign(positions.begin(), positions.end());
  f.values.resize(positions.size() - 1);
  kernels::parallel::local_densities(positions, ell, f.values);
  return f;
}

DensityField reconstruct(const ParticleState& state) {
  return reconstruct(state.positions, state.ell, state.t);
}

double cdf(const DensityField& field, double x) {
  if (field.values.empty() || x <= field.edges.front()) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double lo = field.edges[i], hi = field.edges[i + 1];
    if (x >= hi) {
      m += field.values[i] * (hi - lo);
    } else {
      m += field.values[i] * (x - lo);
      return m;
    }
  }
  return m;
}

QuantileFunction quantile(const ParticleState& state) { return QuantileFunction(state.positions); }

namespace {

// integral over [0, w] of |linear function through (0,d0) and (w,d1)|
double abs_linear_integral(double d0, double d1, double w) {
  if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) return 0.5 * w * (std::abs(d0) + std::abs(d1));
  return 0.5 * w * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
}

}  // namespace

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidInput("wasserstein1 needs states with the same n");
  const double w = 1.0 / static_cast<double>(a.size() - 1);
  double total = 0.0;
  double d0 = a[0] - b[0];
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double d1 = a[i] - b[i];
    total += abs_linear_integral(d0, d1, w);
    d0 = d1;
  }
  return total;
}

double wasserstein1(const ParticleState& a, const ParticleState& b) {
  return wasserstein1(a.positions, b.positions);
}

double l1_distance(const DensityField& a, const DensityField& b) {
  std::vector<double> xs;
  xs.reserve(a.edges.size() + b.edges.size());
  xs.insert(xs.end(), a.edges.begin(), a.edges.end());
  xs.insert(xs.end(), b.edges.begin(), b.edges.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double mid = 0.5 * (xs[k] + xs[k + 1]);
    total += std::abs(a(mid) - b(mid)) * (xs[k + 1] - xs[k]);
  }
  return total;
}

}  // namespace ftl
