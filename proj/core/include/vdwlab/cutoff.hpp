#pragma once

namespace vdw {

/// Smooth radial cutoff: 1 for r <= R/7, 0 for r >= R/6, monotone and C^∞ in
/// between (built from exp(-1/t) transitions).
class SmoothCutoff {
public:
  explicit SmoothCutoff(double radius_R);

  double operator()(double r) const;
  double radius() const noexcept { return R_; }
  double inner() const noexcept { return R_ / 7.0; }
  double outer() const noexcept { return R_ / 6.0; }

private:
  double R_;
};

SmoothCutoff smooth_cutoff(double radius_R);

} // namespace vdw
