#include "slb/kde.hpp"

#include <algorithm>
#include <cmath>

namespace slb {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kInv2Pi = 0.15915494309189533576888376337251;

double clamp_density(double p, double floor, const std::optional<double>& ceiling) {
  if (p < floor) p = floor;
  if (ceiling && p > *ceiling) p = *ceiling;
  return p;
}

std::pair<double, double> range_of(std::span<const double> v) {
  double lo = v[0], hi = v[0];
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi};
}

}  // namespace

double Kde1d::evaluate_raw(double x) const {
  const double inv_h = 1.0 / bandwidth;
  double s = 0.0;
  for (double p : points) {
    const double z = (x - p) * inv_h;
    s += std::exp(-0.5 * z * z);
  }
  return s * kInvSqrt2Pi * inv_h / static_cast<double>(points.size());
}

double Kde1d::evaluate(double x) const {
  return clamp_density(evaluate_raw(x), clamp_floor, clamp_ceiling);
}

double Kde1d::log_eval(double x) const { return std::log(evaluate(x)); }

double Kde2d::evaluate_raw(double x, double y) const {
  const double inv_hu = 1.0 / hu;
  const double inv_hv = 1.0 / hv;
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double zu = (x - u[i]) * inv_hu;
    const double zv = (y - v[i]) * inv_hv;
    s += std::exp(-0.5 * (zu * zu + zv * zv));
  }
  return s * kInv2Pi * inv_hu * inv_hv / static_cast<double>(u.size());
}

double Kde2d::evaluate(double x, double y) const {
  return clamp_density(evaluate_raw(x, y), clamp_floor, clamp_ceiling);
}

double Kde2d::log_eval(double x, double y) const { return std::log(evaluate(x, y)); }

Kde1d fit_kde1d(std::span<const double> values, std::optional<double> bandwidth,
                double clamp_floor, std::optional<double> clamp_ceiling) {
  if (values.size() < 2) throw FitError("KDE needs at least 2 values");
  if (!all_finite(values)) throw FitError("KDE input contains non-finite values");
  if (clamp_floor <= 0.0) throw FitError("clamp floor must be positive");
  double h;
  if (bandwidth) {
    h = *bandwidth;
    if (h <= 0.0) throw FitError("bandwidth must be positive");
  } else {
    const double sd = stddev(values, /*unbiased=*/true);
    if (sd <= 0.0) throw FitError("constant input: bandwidth rule needs sd > 0");
    h = 1.06 * sd * std::pow(static_cast<double>(values.size()), -0.2);
  }
  Kde1d kde;
  kde.points.assign(values.begin(), values.end());
  kde.bandwidth = h;
  kde.clamp_floor = clamp_floor;
  kde.clamp_ceiling = clamp_ceiling;
  return kde;
}

Kde2d fit_kde2d(std::span<const double> u, std::span<const double> v,
                std::optional<std::pair<double, double>> bandwidths, double clamp_floor,
                std::optional<double> clamp_ceiling) {
  if (u.size() != v.size()) throw FitError("2D KDE coordinate lengths differ");
  if (u.size() < 2) throw FitError("KDE needs at least 2 pairs");
  if (!all_finite(u) || !all_finite(v))
    throw FitError("KDE input contains non-finite values");
  if (clamp_floor <= 0.0) throw FitError("clamp floor must be positive");
  double hu, hv;
  if (bandwidths) {
    hu = bandwidths->first;
    hv = bandwidths->second;
    if (hu <= 0.0 || hv <= 0.0) throw FitError("bandwidths must be positive");
  } else {
    const double n16 = std::pow(static_cast<double>(u.size()), -1.0 / 6.0);
    const double su = stddev(u, /*unbiased=*/true);
    const double sv = stddev(v, /*unbiased=*/true);
    if (su <= 0.0 || sv <= 0.0)
      throw FitError("constant coordinate: bandwidth rule needs sd > 0");
    hu = su * n16;
    hv = sv * n16;
  }
  Kde2d kde;
  kde.u.assign(u.begin(), u.end());
  kde.v.assign(v.begin(), v.end());
  kde.hu = hu;
  kde.hv = hv;
  kde.clamp_floor = clamp_floor;
  kde.clamp_ceiling = clamp_ceiling;
  return kde;
}

double GridKde1d::log_eval(double x) const {
  if (x <= lo) return log_table.front();
  if (x >= hi) return log_table.back();
  const double t = (x - lo) / step;
  auto idx = static_cast<std::size_t>(t);
  if (idx >= log_table.size() - 1) idx = log_table.size() - 2;
  const double frac = t - static_cast<double>(idx);
  return log_table[idx] * (1.0 - frac) + log_table[idx + 1] * frac;
}

GridKde1d GridKde1d::build(const Kde1d& src, int nodes) {
  if (nodes < 2) throw FitError("grid needs at least 2 nodes");
  auto [lo, hi] = range_of(src.points);
  lo -= 3.0 * src.bandwidth;
  hi += 3.0 * src.bandwidth;
  GridKde1d g;
  g.lo = lo;
  g.hi = hi;
  g.step = (hi - lo) / static_cast<double>(nodes - 1);
  g.log_table.resize(nodes);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nodes; ++i)
    g.log_table[i] = src.log_eval(lo + g.step * static_cast<double>(i));
  return g;
}

double GridKde2d::log_eval(double x, double y) const {
  const auto n = static_cast<std::size_t>(nodes);
  double tu = (x - lo_u) / step_u;
  double tv = (y - lo_v) / step_v;
  tu = std::clamp(tu, 0.0, static_cast<double>(n - 1));
  tv = std::clamp(tv, 0.0, static_cast<double>(n - 1));
  auto iu = std::min(static_cast<std::size_t>(tu), n - 2);
  auto iv = std::min(static_cast<std::size_t>(tv), n - 2);
  const double fu = tu - static_cast<double>(iu);
  const double fv = tv - static_cast<double>(iv);
  const double* row0 = log_table.data() + iu * n;
  const double* row1 = row0 + n;
  return (row0[iv] * (1.0 - fv) + row0[iv + 1] * fv) * (1.0 - fu) +
         (row1[iv] * (1.0 - fv) + row1[iv + 1] * fv) * fu;
}

GridKde2d GridKde2d::build(const Kde2d& src, int nodes) {
  if (nodes < 2) throw FitError("grid needs at least 2 nodes");
  auto [lu, hu_] = range_of(src.u);
  auto [lv, hv_] = range_of(src.v);
  GridKde2d g;
  g.nodes = nodes;
  g.lo_u = lu - 3.0 * src.hu;
  g.hi_u = hu_ + 3.0 * src.hu;
  g.lo_v = lv - 3.0 * src.hv;
  g.hi_v = hv_ + 3.0 * src.hv;
  g.step_u = (g.hi_u - g.lo_u) / static_cast<double>(nodes - 1);
  g.step_v = (g.hi_v - g.lo_v) / static_cast<double>(nodes - 1);

  // Separable kernel: the node-u factors and node-v factors are computed
  // once, the table is their cross product summed over sample points.
  const std::size_t n = src.u.size();
  const auto gn = static_cast<std::size_t>(nodes);
  std::vector<double> a(gn * n), b(gn * n);
#pragma omp parallel for schedule(static)
  for (int gi = 0; gi < nodes; ++gi) {
    const double xu = g.lo_u + g.step_u * static_cast<double>(gi);
    const double xv = g.lo_v + g.step_v * static_cast<double>(gi);
    double* arow = a.data() + static_cast<std::size_t>(gi) * n;
    double* brow = b.data() + static_cast<std::size_t>(gi) * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double zu = (xu - src.u[i]) / src.hu;
      const double zv = (xv - src.v[i]) / src.hv;
      arow[i] = std::exp(-0.5 * zu * zu);
      brow[i] = std::exp(-0.5 * zv * zv);
    }
  }
  const double coef = kInv2Pi / (src.hu * src.hv * static_cast<double>(n));
  g.log_table.resize(gn * gn);
#pragma omp parallel for schedule(static)
  for (int gi = 0; gi < nodes; ++gi) {
    const double* arow = a.data() + static_cast<std::size_t>(gi) * n;
    for (std::size_t gj = 0; gj < gn; ++gj) {
      const double* brow = b.data() + gj * n;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += arow[i] * brow[i];
      double p = s * coef;
      if (p < src.clamp_floor) p = src.clamp_floor;
      if (src.clamp_ceiling && p > *src.clamp_ceiling) p = *src.clamp_ceiling;
      g.log_table[static_cast<std::size_t>(gi) * gn + gj] = std::log(p);
    }
  }
  return g;
}

double sup_error(const Kde1d& kde, const std::function<double(double)>& truth,
                 std::span<const double> grid) {
  if (grid.empty()) throw DataError("sup_error needs a non-empty grid");
  double worst = 0.0;
  for (double x : grid) worst = std::max(worst, std::abs(kde.evaluate(x) - truth(x)));
  return worst;
}

double sup_error(const Kde2d& kde, const std::function<double(double, double)>& truth,
                 std::span<const std::pair<double, double>> grid) {
  if (grid.empty()) throw DataError("sup_error needs a non-empty grid");
  double worst = 0.0;
  for (const auto& [x, y] : grid)
    worst = std::max(worst, std::abs(kde.evaluate(x, y) - truth(x, y)));
  return worst;
}

void log_eval_many(const Kde1d& kde, std::span<const double> xs, std::span<double> out) {
  const auto n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[i] = kde.log_eval(xs[i]);
}

void log_eval_many(const Kde2d& kde, std::span<const double> xs,
                   std::span<const double> ys, std::span<double> out) {
  const auto n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[i] = kde.log_eval(xs[i], ys[i]);
}

void log_eval_many_serial(const Kde1d& kde, std::span<const double> xs,
                          std::span<double> out) {
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = kde.log_eval(xs[i]);
}

void log_eval_many_serial(const Kde2d& kde, std::span<const double> xs,
                          std::span<const double> ys, std::span<double> out) {
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = kde.log_eval(xs[i], ys[i]);
}

}  // namespace slb
