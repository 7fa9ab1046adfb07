#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slb {

/// Malformed or inconsistent input data (CSV parsing, label problems,
/// dimension mismatches). CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric fitting step cannot proceed (degenerate inputs, non-finite
/// values, solver preconditions). CLI exit code 4.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) {
    return {data.data() + r * cols, cols};
  }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = data[r * cols + c];
    return out;
  }
};

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Standard deviation. unbiased=true divides by n-1, else by n.
inline double stddev(std::span<const double> v, bool unbiased) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double denom = unbiased ? static_cast<double>(n - 1) : static_cast<double>(n);
  return std::sqrt(ss / denom);
}

/// Order-statistic quantile with lower-index convention: for level q in
/// [0,1] returns sorted[floor(q*(n-1))]. Input is copied and sorted.
double quantile_lower(std::vector<double> values, double q);

/// Median of a mutable buffer (even count averages the two middle order
/// statistics). Uses nth_element; the buffer is consumed.
double median_inplace(std::vector<double>& buf);

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double x);

}  // namespace slb
