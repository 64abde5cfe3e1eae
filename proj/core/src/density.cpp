#include "vdwlab/density.hpp"

#include "vdwlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace vdw {

std::vector<double> one_electron_density(const WaveFunction& psi, std::size_t electron) {
  const TensorGrid& g = psi.grid();
  if (electron >= g.particles()) throw PreconditionError("density: electron index out of range");
  const std::size_t m = g.local_size();
  // flat index = (outer * m + k) * inner + rest
  std::size_t inner_block = 1;
  for (std::size_t p = electron + 1; p < g.particles(); ++p) inner_block *= m;
  const std::size_t outer = g.size() / (m * inner_block);
  std::vector<double> rho(m, 0.0);
  const auto c = psi.coefficients();
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t k = 0; k < m; ++k) {
      const double* row = c.data() + (o * m + k) * inner_block;
      double s = 0.0;
      for (std::size_t r = 0; r < inner_block; ++r) s += row[r] * row[r];
      rho[k] += s;
    }
  const double others = g.cell_volume() / std::pow(g.spec().spacing(), g.dim());
  for (double& v : rho) v *= others;
  return rho;
}

std::vector<double> radial_density(const TensorGrid& grid, const std::vector<double>& probability) {
  if (grid.spec().geometry != Geometry::radial) throw PreconditionError("radial_density needs a radial grid");
  std::vector<double> out(probability.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double r = grid.spec().coordinate(k);
    out[k] = probability[k] / (4.0 * std::numbers::pi * r * r);
  }
  return out;
}

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y, std::size_t lo, std::size_t hi) {
  const double n = static_cast<double>(hi - lo);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  Line l;
  l.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  l.intercept = (sy - l.slope * sx) / n;
  double e = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double d = y[i] - (l.intercept + l.slope * x[i]);
    e += d * d;
  }
  l.rms = std::sqrt(e / n);
  return l;
}

} // namespace

DecayFit fit_decay_profile(const std::vector<double>& r, const std::vector<double>& rho,
                           double max_radius, const DecayFitOptions& opt) {
  if (r.size() != rho.size() || r.size() < 8) throw PreconditionError("decay fit: profile too short");
  DecayFit fit;
  fit.theoretical_bound = opt.theoretical_bound.value_or(std::numeric_limits<double>::quiet_NaN());
  const std::size_t peak = static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) - rho.begin());
  const double top = rho[peak];
  if (!(top > 0.0)) throw PreconditionError("decay fit: density vanishes");

  const double wall = opt.wall_fraction * max_radius;
  auto window = [&](double inner_frac, double outer_frac) {
    std::size_t lo = peak;
    while (lo < r.size() && rho[lo] > inner_frac * top) ++lo;
    std::size_t hi = lo;
    while (hi < r.size() && rho[hi] > outer_frac * top && r[hi] <= wall) ++hi;
    return std::pair{lo, hi};
  };
  auto [lo, hi] = window(opt.inner_fraction, opt.outer_fraction);
  double inner_frac = opt.inner_fraction;
  while (hi - std::min(lo, hi) < 6 && inner_frac < 0.5) {
    inner_frac *= 3.0;
    std::tie(lo, hi) = window(inner_frac, opt.outer_fraction);
    fit.warnings.push_back("fit window shrunk: inner threshold raised to " + std::to_string(inner_frac));
  }
  if (hi < lo + 6) throw PreconditionError("decay fit: fewer than six usable points in the tail");

  std::vector<double> logs(rho.size(), 0.0);
  for (std::size_t i = lo; i < hi; ++i) logs[i] = std::log(rho[i]);
  const Line all = fit_line(r, logs, lo, hi);
  fit.fitted_rate = -all.slope;
  fit.amplitude_rate = 0.5 * fit.fitted_rate;
  fit.rms_log_error = all.rms;
  fit.fit_window = {r[lo], r[hi - 1]};

  const std::size_t mid = lo + (hi - lo) / 2;
  if (mid - lo >= 3 && hi - mid >= 3) {
    const double first = -fit_line(r, logs, lo, mid).slope;
    const double second = -fit_line(r, logs, mid, hi).slope;
    fit.superexponential = second > 1.2 * first;
  }
  if (std::isfinite(fit.theoretical_bound))
    fit.exceeds_bound = fit.amplitude_rate > fit.theoretical_bound;
  else
    fit.exceeds_bound = fit.superexponential;
  return fit;
}

DecayFit fit_decay_rate(const WaveFunction& psi, double center, const DecayFitOptions& opt) {
  const TensorGrid& g = psi.grid();
  if (g.particles() == 0) throw PreconditionError("decay fit: no electrons");
  const std::vector<double> prob = one_electron_density(psi, 0);
  const GridSpec& s = g.spec();
  if (s.geometry == Geometry::radial) {
    const std::vector<double> rho = radial_density(g, prob);
    std::vector<double> r(rho.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = s.coordinate(k);
    return fit_decay_profile(r, rho, s.half_width, opt);
  }
  if (g.dim() != 1) throw PreconditionError("decay fit: 3D cartesian states are not supported");
  // fold both sides onto r = |x - center|, averaging points at equal distance
  const double origin = g.origin(0)[0];
  std::map<long long, std::pair<double, int>> bins;
  const double h = s.spacing();
  for (std::size_t k = 0; k < prob.size(); ++k) {
    const double d = std::abs(origin + s.coordinate(k) - center);
    auto& b = bins[std::llround(d / (0.5 * h))];
    b.first += prob[k];
    b.second += 1;
  }
  std::vector<double> r, rho;
  for (const auto& [key, v] : bins) {
    r.push_back(0.5 * h * static_cast<double>(key));
    rho.push_back(v.first / v.second);
  }
  const double reach = std::min(std::abs(origin + s.half_width - center), std::abs(origin - s.half_width - center));
  return fit_decay_profile(r, rho, reach, opt);
}

} // namespace vdw
