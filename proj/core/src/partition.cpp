#include "vdwlab/partition.hpp"

#include "vdwlab/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace vdw {

namespace {

constexpr double kMollifierRadius = 1.0 / 48.0;
constexpr double kBetaDecomposition = 7.0 / 48.0;
constexpr double kBetaElectron = 5.0 / 48.0;
constexpr double kSupportDecomposition = 1.0 / 6.0;
constexpr double kSupportElectron = 1.0 / 12.0;
constexpr std::size_t kMaxDecompositions = 4096;

double bump(double t) {
  const double u = t / kMollifierRadius;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

double bump_derivative(double t) {
  const double u = t / kMollifierRadius;
  if (std::abs(u) >= 1.0) return 0.0;
  const double d = 1.0 - u * u;
  return bump(t) * (-2.0 * u / (d * d)) / kMollifierRadius;
}

template <class F> double integrate(F f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, 1e-14);
}

} // namespace

ImsPartition::ImsPartition(const SystemConfig& cfg, std::optional<double> R) {
  cfg.validate();
  if (cfg.atoms.empty()) throw PreconditionError("partition: no nuclei");
  dim_ = cfg.atoms.front().spatial_dim();
  for (const auto& a : cfg.atoms)
    if (a.spatial_dim() != dim_) throw ConfigError("partition: atoms of different dimension");
  if (dim_ != 1 && dim_ != 3) throw ConfigError("partition: only 1D and 3D electrons are supported");
  electrons_ = static_cast<std::size_t>(cfg.electron_count);
  if (electrons_ == 0) throw PreconditionError("partition: no electrons");
  R_ = R.value_or(cfg.separation_R());
  if (!std::isfinite(R_)) throw PreconditionError("partition: a single nucleus needs an explicit R");
  if (R_ < 1.0) throw PreconditionError("partition: the construction needs R >= 1");
  scale_ = std::pow(R_, 0.75);
  for (const auto& a : cfg.atoms) nuclei_.push_back(a.position);
  // the smoothed balls around distinct nuclei must not overlap
  const double reach = 2.0 * (kSupportDecomposition + kMollifierRadius) * scale_;
  const double sep = cfg.separation_R();
  if (std::isfinite(sep) && sep <= reach)
    throw PreconditionError("partition: nuclei closer than the smoothed supports (" + std::to_string(reach) + ")");

  const double count = std::pow(double(nuclei_.size()), double(electrons_));
  if (count > double(kMaxDecompositions))
    throw BudgetError("partition: too many decompositions", count, double(kMaxDecompositions));
  decompositions_ = all_decompositions(electrons_, nuclei_.size());
  for (const auto& d : decompositions_) {
    std::string s = "a:";
    for (std::size_t k = 0; k < d.clusters.size(); ++k) {
      s += k ? "|{" : "{";
      for (std::size_t e = 0; e < d.clusters[k].size(); ++e) s += (e ? "," : "") + std::to_string(d.clusters[k][e]);
      s += "}";
    }
    labels_.push_back(s);
  }
  for (std::size_t i = 0; i < electrons_; ++i) labels_.push_back("{" + std::to_string(i) + "}");

  if (dim_ == 1)
    normalization_ = integrate(bump, -kMollifierRadius, kMollifierRadius);
  else
    normalization_ = integrate([](double r) { return 4.0 * std::numbers::pi * r * r * bump(r); }, 0.0,
                               kMollifierRadius);
  inner_ = tabulate(kBetaDecomposition);
  outer_ = tabulate(kBetaElectron);
}

ImsPartition::Profile ImsPartition::tabulate(double beta) const {
  constexpr int nodes = 160;
  Profile p;
  p.beta = beta;
  const double lo = beta - kMollifierRadius, hi = beta + kMollifierRadius;
  for (int j = 0; j < nodes; ++j) {
    const double th = std::numbers::pi * (j + 0.5) / nodes;
    p.x.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(th));
    p.f.push_back(smoothed_ball(p.x.back(), beta));
    p.w.push_back((j % 2 ? -1.0 : 1.0) * std::sin(th));
  }
  return p;
}

double ImsPartition::Profile::operator()(double r) const {
  if (r <= beta - kMollifierRadius) return 1.0;
  if (r >= beta + kMollifierRadius) return 0.0;
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double dx = r - x[j];
    if (dx == 0.0) return f[j];
    num += w[j] * f[j] / dx;
    den += w[j] / dx;
  }
  return std::clamp(num / den, 0.0, 1.0);
}

double ImsPartition::distance_to(std::span<const double> x, std::size_t electron, std::size_t nucleus) const {
  double s = 0.0;
  for (int c = 0; c < dim_; ++c) {
    const double d = x[electron * dim_ + c] - nuclei_[nucleus][c];
    s += d * d;
  }
  return std::sqrt(s);
}

double ImsPartition::smoothed_ball(double r, double beta) const {
  const double a = kMollifierRadius;
  if (r + a <= beta) return 1.0;
  if (r - a >= beta) return 0.0;
  if (dim_ == 1) {
    // integral of g_1 over [r - beta, r + beta]
    const double lo = std::max(r - beta, -a);
    const double hi = std::min(r + beta, a);
    return integrate(bump, lo, hi) / normalization_;
  }
  // fraction of the sphere |t| = rho around x inside the ball of radius beta
  auto fraction = [r, beta](double rho) {
    if (r + rho <= beta) return 1.0;
    if (std::abs(r - rho) >= beta) return 0.0;
    return (beta * beta - (r - rho) * (r - rho)) / (4.0 * r * rho);
  };
  auto f = [&](double rho) { return 4.0 * std::numbers::pi * rho * rho * bump(rho) * fraction(rho); };
  // split at the kinks of the fraction
  double total = 0.0, lo = 0.0;
  for (double k : {std::abs(beta - r), r + beta}) {
    if (k > lo && k < a) {
      total += integrate(f, lo, k);
      lo = k;
    }
  }
  total += integrate(f, lo, a);
  return total / normalization_;
}

std::vector<double> ImsPartition::smoothed_indicators(std::span<const double> x) const {
  if (x.size() != electrons_ * static_cast<std::size_t>(dim_))
    throw PreconditionError("partition: configuration has the wrong number of coordinates");
  // per electron and nucleus: smoothed ball values for both radii
  const std::size_t M = nuclei_.size();
  std::vector<double> inner(electrons_ * M), outer(electrons_ * M);
  for (std::size_t e = 0; e < electrons_; ++e)
    for (std::size_t j = 0; j < M; ++j) {
      const double r = distance_to(x, e, j) / scale_;
      inner[e * M + j] = inner_(r);
      outer[e * M + j] = outer_(r);
    }
  std::vector<double> F;
  F.reserve(members());
  for (const auto& d : decompositions_) {
    double v = 1.0;
    for (std::size_t e = 0; e < electrons_ && v != 0.0; ++e) v *= inner[e * M + d.cluster_of(e)];
    F.push_back(v);
  }
  for (std::size_t e = 0; e < electrons_; ++e) {
    double v = 1.0;
    for (std::size_t j = 0; j < M; ++j) v -= outer[e * M + j];
    F.push_back(std::max(v, 0.0));
  }
  return F;
}

std::vector<double> ImsPartition::evaluate(std::span<const double> x) const {
  std::vector<double> F = smoothed_indicators(x);
  double s = 0.0;
  for (double f : F) s += f * f;
  const double inv = 1.0 / std::sqrt(s);
  for (double& f : F) f *= inv;
  return F;
}

bool ImsPartition::in_support(std::size_t member, std::span<const double> x) const {
  if (member < decompositions_.size()) {
    const Decomposition& d = decompositions_[member];
    for (std::size_t e = 0; e < electrons_; ++e)
      if (distance_to(x, e, d.cluster_of(e)) > kSupportDecomposition * scale_) return false;
    return true;
  }
  const std::size_t e = member - decompositions_.size();
  for (std::size_t j = 0; j < nuclei_.size(); ++j)
    if (distance_to(x, e, j) < kSupportElectron * scale_) return false;
  return true;
}

double ImsPartition::D1() const {
  double l1;
  if (dim_ == 1)
    l1 = integrate([](double t) { return std::abs(bump_derivative(t)); }, -kMollifierRadius, kMollifierRadius);
  else
    l1 = integrate([](double r) { return 4.0 * std::numbers::pi * r * r * std::abs(bump_derivative(r)); }, 0.0,
                   kMollifierRadius);
  return 2.0 * l1 / normalization_;
}

std::size_t ims_minimum_points(double R, double half_width) {
  const double h = std::pow(R, 0.75) / 96.0;
  return static_cast<std::size_t>(std::ceil(2.0 * half_width / h)) + 1;
}

PartitionOfUnity build_ims_partition(const SystemConfig& cfg, const GridSpec& grid, const PartitionOptions& options) {
  const ImsPartition part(cfg, options.R);
  if (grid.geometry != Geometry::cartesian) throw ConfigError("partition: configuration grids are cartesian");
  const std::size_t n = grid.points_per_axis;
  const std::size_t need = ims_minimum_points(part.R(), grid.half_width);
  if (n < need)
    throw PreconditionError("partition: grid too coarse for the mollifier, need at least " + std::to_string(need) +
                            " points per axis");
  PartitionOfUnity p;
  p.labels = part.labels();
  p.axes = part.electrons() * static_cast<std::size_t>(part.dim());
  p.points_per_axis = n;
  p.spacing = grid.spacing();
  p.R = part.R();
  p.scale = part.scale();
  const double total = std::pow(double(n), double(p.axes));
  if (total > double(grid.point_budget)) throw BudgetError("partition: configuration grid", total, double(grid.point_budget));
  const std::size_t size = static_cast<std::size_t>(total);

  p.fields.assign(part.members(), std::vector<double>(size));
  std::vector<double> x(p.axes);
  std::vector<std::size_t> stride(p.axes, 1);
  for (std::size_t a = p.axes - 1; a-- > 0;) stride[a] = stride[a + 1] * n;
  auto check = [&](std::span<const double> J, std::span<const double> at, double& defect) {
    double s = 0.0;
    for (std::size_t b = 0; b < J.size(); ++b) {
      s += J[b] * J[b];
      if (J[b] < 0.0 || J[b] > 1.0) p.bounded = false;
      if (J[b] > 0.0 && !part.in_support(b, at)) ++p.support_violations;
    }
    defect = std::max(defect, std::abs(s - 1.0));
  };
  for (std::size_t idx = 0; idx < size; ++idx) {
    for (std::size_t a = 0; a < p.axes; ++a) x[a] = grid.coordinate((idx / stride[a]) % n);
    const auto J = part.evaluate(x);
    for (std::size_t b = 0; b < J.size(); ++b) p.fields[b][idx] = J[b];
    check(J, x, p.sum_defect);
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> u(-grid.half_width, grid.half_width);
  for (std::size_t k = 0; k < options.random_samples; ++k) {
    for (double& c : x) c = u(rng);
    check(part.evaluate(x), x, p.random_sum_defect);
  }
  p.random_samples = options.random_samples;

  const double h = p.spacing;
  for (std::size_t idx = 0; idx < size; ++idx) {
    bool interior = true;
    for (std::size_t a = 0; a < p.axes && interior; ++a) {
      const std::size_t k = (idx / stride[a]) % n;
      interior = k > 0 && k + 1 < n;
    }
    if (!interior) continue;
    double g = 0.0;
    for (const auto& f : p.fields)
      for (std::size_t a = 0; a < p.axes; ++a) {
        const double d = (f[idx + stride[a]] - f[idx - stride[a]]) / (2.0 * h);
        g += d * d;
      }
    p.gradient_sup = std::max(p.gradient_sup, g);
  }
  const double N = double(part.electrons());
  p.gradient_bound = std::pow(part.D1(), 2) * N * N / std::pow(part.R(), 1.5);
  return p;
}

GradientScaling ims_gradient_scaling(const SystemConfig& cfg, const std::vector<double>& radii,
                                     std::size_t points_per_scale) {
  if (radii.size() < 2) throw PreconditionError("gradient scaling: at least two radii required");
  const double unit = cfg.separation_R();
  GradientScaling out;
  out.radii = radii;
  Eigen::MatrixXd A(radii.size(), 2);
  Eigen::VectorXd b(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double R = radii[k];
    SystemConfig c = cfg;
    double reach = 0.0;
    if (std::isfinite(unit))
      for (auto& a : c.atoms)
        for (double& v : a.position) v *= R / unit;
    for (const auto& a : c.atoms)
      for (double v : a.position) reach = std::max(reach, std::abs(v));
    const double s = std::pow(R, 0.75);
    GridSpec g;
    g.half_width = reach + 0.25 * s;
    g.points_per_axis = static_cast<std::size_t>(std::ceil(2.0 * g.half_width / s * double(points_per_scale))) + 1;
    g.points_per_axis = std::max(g.points_per_axis, ims_minimum_points(R, g.half_width));
    PartitionOptions o;
    o.R = R;
    o.random_samples = 0;
    const PartitionOfUnity p = build_ims_partition(c, g, o);
    out.gradient_sup.push_back(p.gradient_sup);
    out.max_bound_ratio = std::max(out.max_bound_ratio, p.gradient_sup / p.gradient_bound);
    A(k, 0) = 1.0;
    A(k, 1) = std::log(R);
    b(k) = std::log(p.gradient_sup);
  }
  out.slope = A.colPivHouseholderQr().solve(b)(1);
  return out;
}

} // namespace vdw
