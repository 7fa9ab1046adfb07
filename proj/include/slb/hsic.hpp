#pragma once

#include <optional>
#include <span>
#include <vector>

#include "slb/common.hpp"
#include "slb/rng.hpp"

namespace slb {

/// Gaussian kernel spec. An empty bandwidth means: resolve it with the
/// median heuristic on the sample the kernel is applied to.
struct KernelSpec {
  std::optional<double> bandwidth;
};

struct HsicResult {
  double statistic = 0.0;
  int n = 0;
  std::optional<double> p_value;
};

/// Median of the pairwise absolute differences, zeros excluded. Errors when
/// all values are identical.
double median_heuristic(std::span<const double> values);

/// Gaussian Gram matrix of a scalar sample plus its row sums and total,
/// which is everything the centered-trace statistic needs.
struct Gram {
  int n = 0;
  std::vector<double> k;         // n*n, row-major
  std::vector<double> row_sums;  // n
  double total = 0.0;
};

Gram gaussian_gram(std::span<const double> values, double sigma);

/// Biased HSIC estimator (n-1)^-2 Tr(KHLH) with H = I - (1/n) 1 1^T,
/// computed from precomputed Grams via
///   Tr(KHLH) = sum_ij K_ij L_ij - (2/n) sum_i k_i l_i + (K..)(L..)/n^2.
double hsic_from_grams(const Gram& K, const Gram& L);

/// Same statistic with the second sample permuted: L entries are read
/// through perm without rebuilding the Gram.
double hsic_from_grams_permuted(const Gram& K, const Gram& L,
                                std::span<const std::size_t> perm);

/// Empirical HSIC between two scalar samples. Requires n >= 4.
HsicResult hsic_statistic(std::span<const double> z, std::span<const double> w,
                          KernelSpec kz = {}, KernelSpec kw = {});

/// Straight-line reference: materializes H and evaluates Tr(KHLH) naively.
HsicResult hsic_statistic_serial(std::span<const double> z, std::span<const double> w,
                                 KernelSpec kz = {}, KernelSpec kw = {});

/// Permutation p-value with the add-one convention,
/// p = (1 + #{b : stat_b >= stat_obs}) / (B + 1). w is permuted, z stays
/// fixed; permutation b draws its stream from rng.derive(b), so the result
/// does not depend on scheduling. Requires B >= 19.
HsicResult hsic_permutation_pvalue(std::span<const double> z, std::span<const double> w,
                                   KernelSpec kz, KernelSpec kw, int permutations,
                                   Rng rng);

}  // namespace slb
