#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ftl/density_field.hpp"

namespace ftl {

/// Nonnegative piecewise-constant density: `values[k]` on
/// [breakpoints[k], breakpoints[k+1]). Leading and trailing zero cells are
/// trimmed on construction so the first and last breakpoints are the convex
/// hull of the support.
class InitialDatum {
 public:
  InitialDatum(std::vector<double> breakpoints, std::vector<double> values);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double x_min() const { return breakpoints_.front(); }
  double x_max() const { return breakpoints_.back(); }
  double mass() const;
  double sup_norm() const;

  DensityField as_field() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

struct ParticleConfiguration {
  std::size_t n = 0;
  std::vector<double> positions;  // n + 1 entries
  double mass_per_interval = 0.0; // 1/n
  double rho_bar = 0.0;           // sup-norm of the datum it was built from
};

/// Rescales values to unit total mass. Throws InvalidInput for zero mass.
InitialDatum normalize(const InitialDatum& datum);

/// Equal-mass particle positions x_0 = x_min < ... < x_n = x_max with
/// x_i = sup{ x : int_{x_{i-1}}^x rho < 1/n }. On a vacuum plateau the set
/// excludes every point where the integral has reached 1/n, so x_i is the
/// first point at which cumulative mass i/n is attained.
ParticleConfiguration atomise(const InitialDatum& datum, std::size_t n);

/// Piecewise-constant field with value (1/n)/(x_{i+1} - x_i) on each cell.
DensityField discrete_initial_density(const ParticleConfiguration& config);

// Datum sources --------------------------------------------------------------

/// Rows "breakpoint value", value holding on [this, next); last value ignored.
/// Blank lines and '#' comments are skipped.
InitialDatum parse_datum(std::string_view text);
InitialDatum load_datum_file(const std::string& path);

/// Built-in named data:
///   riemann(rho_l,rho_r,x0)  rho_l on [x0-L,x0), rho_r on [x0,x0+L), L = 1/(rho_l+rho_r)
///   bump                     40 cell averages of (3/4)(1-x^2) on [-1,1]
///   two_blocks               1 on [0,0.5) and on [1.5,2)
/// `spec` may also be "file:<path>". All named data have unit mass.
InitialDatum make_datum(std::string_view spec);

}  // namespace ftl
