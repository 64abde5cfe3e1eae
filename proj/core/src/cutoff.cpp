#include "vdwlab/cutoff.hpp"

#include "vdwlab/error.hpp"

#include <cmath>

namespace vdw {

namespace {

double ramp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

} // namespace

SmoothCutoff::SmoothCutoff(double radius_R) : R_(radius_R) {
  if (!(radius_R > 0.0)) throw PreconditionError("cutoff radius must be positive");
}

double SmoothCutoff::operator()(double r) const {
  const double a = inner();
  const double b = outer();
  r = std::abs(r);
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  const double t = (b - r) / (b - a);
  const double up = ramp(t);
  return up / (up + ramp(1.0 - t));
}

SmoothCutoff smooth_cutoff(double radius_R) { return SmoothCutoff(radius_R); }

} // namespace vdw
