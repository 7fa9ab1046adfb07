#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "slb/common.hpp"

namespace slb {

/// Univariate Gaussian-kernel density estimate. Stored sample points plus a
/// single bandwidth; evaluation clamps to [clamp_floor, clamp_ceiling] so
/// log_eval is always finite.
struct Kde1d {
  std::vector<double> points;
  double bandwidth = 0.0;
  double clamp_floor = 1e-10;
  std::optional<double> clamp_ceiling;

  /// Unclamped kernel sum (1/nh) sum phi((x-xi)/h).
  double evaluate_raw(double x) const;
  /// Clamped density in [clamp_floor, clamp_ceiling].
  double evaluate(double x) const;
  double log_eval(double x) const;
};

/// Bivariate Gaussian-kernel density estimate with a diagonal bandwidth.
struct Kde2d {
  std::vector<double> u;
  std::vector<double> v;
  double hu = 0.0;
  double hv = 0.0;
  double clamp_floor = 1e-10;
  std::optional<double> clamp_ceiling;

  double evaluate_raw(double x, double y) const;
  double evaluate(double x, double y) const;
  double log_eval(double x, double y) const;
};

/// Fits a 1D KDE. Without an explicit bandwidth, Silverman's rule
/// h = 1.06 * sd * n^(-1/5) is used (sd is the unbiased sample standard
/// deviation); constant input is then an error.
Kde1d fit_kde1d(std::span<const double> values, std::optional<double> bandwidth = {},
                double clamp_floor = 1e-10, std::optional<double> clamp_ceiling = {});

/// Fits a 2D KDE. Without explicit bandwidths, Scott's two-dimensional rule
/// h_k = sd_k * n^(-1/6) is applied per coordinate.
Kde2d fit_kde2d(std::span<const double> u, std::span<const double> v,
                std::optional<std::pair<double, double>> bandwidths = {},
                double clamp_floor = 1e-10, std::optional<double> clamp_ceiling = {});

/// Precomputed log-density table over an even grid covering the data range
/// plus 3 bandwidths on each side. Node values are exact (clamped) log
/// evaluations of the source; queries interpolate the table linearly in log
/// space and clamp to the grid domain.
struct GridKde1d {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  std::vector<double> log_table;

  double log_eval(double x) const;
  static GridKde1d build(const Kde1d& src, int nodes = 256);
};

/// 2D analogue of GridKde1d with bilinear interpolation of the log table.
struct GridKde2d {
  double lo_u = 0.0, hi_u = 0.0, step_u = 0.0;
  double lo_v = 0.0, hi_v = 0.0, step_v = 0.0;
  int nodes = 0;
  std::vector<double> log_table;  // row-major [u][v]

  double log_eval(double x, double y) const;
  static GridKde2d build(const Kde2d& src, int nodes = 256);
};

/// Max absolute deviation of the clamped KDE from an analytic density over
/// a grid of evaluation points. Grid must be non-empty.
double sup_error(const Kde1d& kde, const std::function<double(double)>& truth,
                 std::span<const double> grid);
double sup_error(const Kde2d& kde, const std::function<double(double, double)>& truth,
                 std::span<const std::pair<double, double>> grid);

/// Batch log evaluation, parallel over query points.
void log_eval_many(const Kde1d& kde, std::span<const double> xs, std::span<double> out);
void log_eval_many(const Kde2d& kde, std::span<const double> xs, std::span<const double> ys,
                   std::span<double> out);

/// Serial reference implementations of the batch kernels.
void log_eval_many_serial(const Kde1d& kde, std::span<const double> xs,
                          std::span<double> out);
void log_eval_many_serial(const Kde2d& kde, std::span<const double> xs,
                          std::span<const double> ys, std::span<double> out);

}  // namespace slb
