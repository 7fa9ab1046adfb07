#include "slb/common.hpp"

#include <algorithm>
#include <charconv>

namespace slb {

double quantile_lower(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("quantile of empty set");
  std::sort(values.begin(), values.end());
  if (q <= 0.0) return values.front();
  if (q >= 1.0) return values.back();
  const auto idx = static_cast<std::size_t>(q * static_cast<double>(values.size() - 1));
  return values[idx];
}

double median_inplace(std::vector<double>& buf) {
  if (buf.empty()) throw DataError("median of empty set");
  const std::size_t n = buf.size();
  const std::size_t mid = n / 2;
  std::nth_element(buf.begin(), buf.begin() + mid, buf.end());
  const double hi = buf[mid];
  if (n % 2 == 1) return hi;
  std::nth_element(buf.begin(), buf.begin() + (mid - 1), buf.begin() + mid);
  return 0.5 * (buf[mid - 1] + hi);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace slb
