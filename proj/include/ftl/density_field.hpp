#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ftl {

struct ParticleState;

/// Piecewise-constant density: `values[i]` on [edges[i], edges[i+1]), zero
/// outside [edges.front(), edges.back()).
struct DensityField {
  std::vector<double> edges;
  std::vector<double> values;
  double t = 0.0;

  std::size_t cells() const { return values.size(); }
  double mass() const;
  double sup_norm() const;
  double operator()(double x) const;
};

/// Quantile X(z) of a unit-mass particle density: knot X(i/n) = x_i, linear
/// with slope 1/R_i = n*(x_{i+1}-x_i) on [i/n, (i+1)/n).
class QuantileFunction {
 public:
  explicit QuantileFunction(std::vector<double> knots);

  std::size_t n() const { return knots_.size() - 1; }
  const std::vector<double>& knots() const { return knots_; }
  double operator()(double z) const;

 private:
  std::vector<double> knots_;
};

DensityField reconstruct(const ParticleState& state);

/// R_i = ell / (x_{i+1} - x_i) for a sorted position vector.
DensityField reconstruct(std::span<const double> positions, double ell, double t = 0.0);

double cdf(const DensityField& field, double x);

QuantileFunction quantile(const ParticleState& state);

/// Exact W1 between two particle densities with the same n, from the
/// piecewise-linear quantile difference (cells split at sign changes).
double wasserstein1(const ParticleState& a, const ParticleState& b);
double wasserstein1(std::span<const double> a, std::span<const double> b);

/// Exact L1 distance between piecewise-constant fields via merged breakpoints.
double l1_distance(const DensityField& a, const DensityField& b);

}  // namespace ftl
