#pragma once

#include <cstddef>
#include <span>

#include "ftl/velocity_model.hpp"

// Per-particle loops shared by the integrator and the diagnostics. Every
// kernel has a serial reference and an OpenMP version; tests hold them to
// bitwise agreement for elementwise kernels and maxima. Sums are accumulated
// over a fixed number of chunks, so the parallel result does not depend on
// the thread count.
namespace ftl::kernels {

enum class Slope { velocity, flux_prime };

namespace serial {
// R_i = ell / (x_{i+1} - x_i), i = 0..n-1; out.size() == x.size() - 1.
void local_densities(std::span<const double> x, double ell, std::span<double> out);
// v(R_i) for followers and v_max for the leader; out.size() == x.size().
void velocities(const VelocityModel& model, std::span<const double> x, double ell, std::span<double> out);
// max_i t*n*R_i*(g(R_{i+1}) - g(R_i)) with R_n = 0 and g = v or f'.
double max_one_sided(const VelocityModel& model, std::span<const double> density, double t, double n,
                     Slope slope);
// R_0 + R_{n-1} + sum_k |R_{k+1} - R_k|.
double total_variation(std::span<const double> density);
double min_gap(std::span<const double> x);
}  // namespace serial

namespace parallel {
void local_densities(std::span<const double> x, double ell, std::span<double> out);
void velocities(const VelocityModel& model, std::span<const double> x, double ell, std::span<double> out);
double max_one_sided(const VelocityModel& model, std::span<const double> density, double t, double n,
                     Slope slope);
double total_variation(std::span<const double> density);
double min_gap(std::span<const double> x);
}  // namespace parallel

/// Below this many particles the parallel kernels fall back to serial loops.
inline constexpr std::size_t parallel_threshold = 4096;

}  // namespace ftl::kernels
