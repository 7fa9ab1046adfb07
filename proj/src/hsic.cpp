#include "slb/hsic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slb {

double median_heuristic(std::span<const double> values) {
  if (values.size() < 2) throw FitError("median heuristic needs at least 2 values");
  std::vector<double> diffs;
  diffs.reserve(values.size() * (values.size() - 1) / 2);
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const double d = std::abs(values[i] - values[j]);
      if (d > 0.0) diffs.push_back(d);
    }
  if (diffs.empty()) throw FitError("median heuristic: all values identical");
  return median_inplace(diffs);
}

Gram gaussian_gram(std::span<const double> values, double sigma) {
  if (sigma <= 0.0) throw FitError("kernel bandwidth must be positive");
  Gram g;
  g.n = static_cast<int>(values.size());
  const auto n = values.size();
  g.k.resize(n * n);
  g.row_sums.assign(n, 0.0);
  const double scale = -0.5 / (sigma * sigma);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    double* row = g.k.data() + static_cast<std::size_t>(i) * n;
    double rs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = values[i] - values[j];
      const double v = std::exp(scale * d * d);
      row[j] = v;
      rs += v;
    }
    g.row_sums[i] = rs;
  }
  double tot = 0.0;
  for (double r : g.row_sums) tot += r;
  g.total = tot;
  return g;
}

double hsic_from_grams(const Gram& K, const Gram& L) {
  if (K.n != L.n) throw FitError("HSIC sample lengths differ");
  const auto n = static_cast<std::size_t>(K.n);
  const double dn = static_cast<double>(n);
  std::vector<double> row_dots(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    const double* krow = K.k.data() + static_cast<std::size_t>(i) * n;
    const double* lrow = L.k.data() + static_cast<std::size_t>(i) * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += krow[j] * lrow[j];
    row_dots[i] = s;
  }
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s1 += row_dots[i];
    s2 += K.row_sums[i] * L.row_sums[i];
  }
  const double trace = s1 - (2.0 / dn) * s2 + K.total * L.total / (dn * dn);
  return trace / ((dn - 1.0) * (dn - 1.0));
}

double hsic_from_grams_permuted(const Gram& K, const Gram& L,
                                std::span<const std::size_t> perm) {
  const auto n = static_cast<std::size_t>(K.n);
  const double dn = static_cast<double>(n);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* krow = K.k.data() + i * n;
    const double* lrow = L.k.data() + perm[i] * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += krow[j] * lrow[perm[j]];
    s1 += s;
    s2 += K.row_sums[i] * L.row_sums[perm[i]];
  }
  const double trace = s1 - (2.0 / dn) * s2 + K.total * L.total / (dn * dn);
  return trace / ((dn - 1.0) * (dn - 1.0));
}

namespace {

void check_inputs(std::span<const double> z, std::span<const double> w) {
  if (z.size() != w.size()) throw FitError("HSIC sample lengths differ");
  if (z.size() < 4) throw FitError("HSIC needs at least 4 samples");
  if (!all_finite(z) || !all_finite(w)) throw FitError("HSIC input is non-finite");
}

double resolve_bandwidth(const KernelSpec& spec, std::span<const double> values) {
  if (spec.bandwidth) {
    if (*spec.bandwidth <= 0.0) throw FitError("kernel bandwidth must be positive");
    return *spec.bandwidth;
  }
  return median_heuristic(values);
}

}  // namespace

HsicResult hsic_statistic(std::span<const double> z, std::span<const double> w,
                          KernelSpec kz, KernelSpec kw) {
  check_inputs(z, w);
  const Gram K = gaussian_gram(z, resolve_bandwidth(kz, z));
  const Gram L = gaussian_gram(w, resolve_bandwidth(kw, w));
  return {hsic_from_grams(K, L), static_cast<int>(z.size()), std::nullopt};
}

HsicResult hsic_statistic_serial(std::span<const double> z, std::span<const double> w,
                                 KernelSpec kz, KernelSpec kw) {
  check_inputs(z, w);
  const auto n = z.size();
  const double dn = static_cast<double>(n);
  const double sz = resolve_bandwidth(kz, z);
  const double sw = resolve_bandwidth(kw, w);
  Matrix K(n, n), L(n, n), H(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double dz = z[i] - z[j];
      const double dw = w[i] - w[j];
      K(i, j) = std::exp(-0.5 * dz * dz / (sz * sz));
      L(i, j) = std::exp(-0.5 * dw * dw / (sw * sw));
      H(i, j) = (i == j ? 1.0 : 0.0) - 1.0 / dn;
    }
  auto mul = [n](const Matrix& A, const Matrix& B) {
    Matrix C(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t) s += A(i, t) * B(t, j);
        C(i, j) = s;
      }
    return C;
  };
  const Matrix P = mul(mul(K, H), mul(L, H));
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += P(i, i);
  return {trace / ((dn - 1.0) * (dn - 1.0)), static_cast<int>(n), std::nullopt};
}

HsicResult hsic_permutation_pvalue(std::span<const double> z, std::span<const double> w,
                                   KernelSpec kz, KernelSpec kw, int permutations,
                                   Rng rng) {
  check_inputs(z, w);
  if (permutations < 19) throw FitError("permutation test needs B >= 19");
  const Gram K = gaussian_gram(z, resolve_bandwidth(kz, z));
  const Gram L = gaussian_gram(w, resolve_bandwidth(kw, w));
  const double observed = hsic_from_grams(K, L);

  std::vector<int> exceed(permutations, 0);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < permutations; ++b) {
    Rng stream = rng.derive(static_cast<std::uint64_t>(b) + 1);
    std::vector<std::size_t> perm(z.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    stream.shuffle(perm);
    const double stat = hsic_from_grams_permuted(K, L, perm);
    exceed[b] = stat >= observed ? 1 : 0;
  }
  int count = 0;
  for (int e : exceed) count += e;
  HsicResult res;
  res.statistic = observed;
  res.n = static_cast<int>(z.size());
  res.p_value = (1.0 + count) / (static_cast<double>(permutations) + 1.0);
  return res;
}

}  // namespace slb
