#include "ftl/atomiser.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ftl/errors.hpp"

namespace ftl {

InitialDatum::InitialDatum(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() != values.size() + 1 || values.empty()) {
    throw InvalidInput("datum needs k+1 breakpoints for k >= 1 cell values");
  }
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k] < breakpoints[k + 1])) throw InvalidInput("datum breakpoints must be strictly increasing");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("datum values must be finite and >= 0");
  }
  std::size_t first = 0, last = values.size();
  while (first < last && values[first] == 0.0) ++first;
  while (last > first && values[last - 1] == 0.0) --last;
  if (first == last) throw InvalidInput("datum has zero mass");
  breakpoints_.assign(breakpoints.begin() + static_cast<std::ptrdiff_t>(first),
                      breakpoints.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  values_.assign(values.begin() + static_cast<std::ptrdiff_t>(first),
                 values.begin() + static_cast<std::ptrdiff_t>(last));
}

double InitialDatum::mass() const {
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) m += values_[k] * (breakpoints_[k + 1] - breakpoints_[k]);
  return m;
}

double InitialDatum::sup_norm() const { return *std::max_element(values_.begin(), values_.end()); }

DensityField InitialDatum::as_field() const { return DensityField{breakpoints_, values_, 0.0}; }

InitialDatum normalize(const InitialDatum& datum) {
  const double m = datum.mass();
  if (!(m > 0.0)) throw InvalidInput("cannot normalise a zero-mass datum");
  if (m == 1.0) return datum;
  std::vector<double> values = datum.values();
  for (double& v : values) v /= m;
  return InitialDatum(datum.breakpoints(), std::move(values));
}

ParticleConfiguration atomise(const InitialDatum& datum, std::size_t n) {
  if (n == 0) throw InvalidInput("atomise needs n >= 1");
  const auto& b = datum.breakpoints();
  const auto& v = datum.values();
  if (std::abs(datum.mass() - 1.0) > 1e-12) throw InvalidInput("atomise needs a unit-mass datum");

  std::vector<double> cum(v.size() + 1, 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) cum[k + 1] = cum[k] + v[k] * (b[k + 1] - b[k]);

  ParticleConfiguration cfg;
  cfg.n = n;
  cfg.mass_per_interval = 1.0 / static_cast<double>(n);
  cfg.rho_bar = datum.sup_norm();
  cfg.positions.resize(n + 1);
  cfg.positions.front() = datum.x_min();
  cfg.positions.back() = datum.x_max();
  for (std::size_t i = 1; i < n; ++i) {
    const double target = static_cast<double>(i) / static_cast<double>(n);
    // first cell whose right cumulative reaches the target; it necessarily has mass
    auto it = std::lower_bound(cum.begin() + 1, cum.end(), target);
    if (it == cum.end()) it = cum.end() - 1;
    const std::size_t k = static_cast<std::size_t>(it - cum.begin()) - 1;
    const double x = b[k] + (target - cum[k]) / v[k];
    cfg.positions[i] = std::clamp(x, b[k], b[k + 1]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cfg.positions[i] < cfg.positions[i + 1])) {
      throw InvalidInput("atomisation produced coincident particles; n too large for the datum");
    }
  }
  return cfg;
}

DensityField discrete_initial_density(const ParticleConfiguration& config) {
  return reconstruct(config.positions, config.mass_per_interval, 0.0);
}

InitialDatum parse_datum(std::string_view text) {
  std::vector<double> xs, vs;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double x = 0.0, val = 0.0;
    if (!(row >> x)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw InvalidInput("datum line " + std::to_string(lineno) + ": expected 'breakpoint value'");
    }
    if (!(row >> val)) throw InvalidInput("datum line " + std::to_string(lineno) + ": missing value");
    xs.push_back(x);
    vs.push_back(val);
  }
  if (xs.size() < 2) throw InvalidInput("datum needs at least two rows");
  vs.pop_back();
  return InitialDatum(std::move(xs), std::move(vs));
}

InitialDatum load_datum_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open datum file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_datum(ss.str());
}

namespace {

std::vector<double> parse_args(std::string_view inner) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= inner.size()) {
    std::size_t comma = inner.find(',', pos);
    if (comma == std::string_view::npos) comma = inner.size();
    std::string tok(inner.substr(pos, comma - pos));
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw InvalidInput("");
    } catch (const std::exception&) {
      throw InvalidInput("bad numeric argument '" + tok + "'");
    }
    pos = comma + 1;
  }
  return out;
}

}  // namespace

InitialDatum make_datum(std::string_view spec) {
  if (spec.starts_with("file:")) return normalize(load_datum_file(std::string(spec.substr(5))));
  if (spec == "bump") {
    constexpr int cells = 40;
    std::vector<double> b(cells + 1), v(cells);
    for (int k = 0; k <= cells; ++k) b[k] = -1.0 + 2.0 * k / cells;
    for (int k = 0; k < cells; ++k) {
      const double lo = b[k], hi = b[k + 1];
      v[k] = 0.75 * (1.0 - (lo * lo + lo * hi + hi * hi) / 3.0);
    }
    return normalize(InitialDatum(std::move(b), std::move(v)));
  }
  if (spec == "two_blocks") {
    return InitialDatum({0.0, 0.5, 1.5, 2.0}, {1.0, 0.0, 1.0});
  }
  if (spec.starts_with("riemann(") && spec.ends_with(")")) {
    const auto args = parse_args(spec.substr(8, spec.size() - 9));
    if (args.size() != 2 && args.size() != 3) throw InvalidInput("riemann takes (rho_l, rho_r[, x0])");
    const double rl = args[0], rr = args[1], x0 = args.size() == 3 ? args[2] : 0.0;
    if (!(rl >= 0.0 && rr >= 0.0 && rl + rr > 0.0)) throw InvalidInput("riemann states must be >= 0, not both 0");
    const double half = 1.0 / (rl + rr);
    return normalize(InitialDatum({x0 - half, x0, x0 + half}, {rl, rr}));
  }
  throw InvalidInput("unknown datum '" + std::string(spec) + "'");
}

}  // namespace ftl
