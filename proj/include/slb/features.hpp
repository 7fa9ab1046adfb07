#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "slb/common.hpp"
#include "slb/dataset.hpp"
#include "slb/kde.hpp"
#include "slb/rng.hpp"

namespace slb {

enum class KdeEval { exact, grid };

struct DensityConfig {
  std::optional<double> fixed_bandwidth;  // empty = Silverman / Scott rules
  double clamp_floor = 1e-10;
  std::optional<double> clamp_ceiling;
  KdeEval eval = KdeEval::exact;
  int grid_nodes_1d = 256;
  int grid_nodes_2d = 128;
};

/// Pair-retention rule.
///   threshold:    keep pairs whose score is >= value (absolute scale)
///   quantile:     threshold at the value-quantile of the pooled per-class
///                 statistics (0 keeps everything)
///   top_fraction: keep the top round(value * P) pairs by score
///   pvalue_bh:    Benjamini-Hochberg on permutation p-values at level value
struct ScreenRule {
  enum class Kind { threshold, quantile, top_fraction, pvalue_bh };
  Kind kind = Kind::quantile;
  double value = 0.0;
};

struct ScreenConfig {
  ScreenRule rule;
  int permutations = 199;  // used by pvalue_bh only
  int max_samples = 1024;  // per-class cap; larger classes are subsampled
  std::optional<double> kernel_bandwidth;  // empty = per-variable median heuristic
};

struct PairStat {
  int i = 0, j = 0;           // feature indices, i < j
  double stat_neg = 0.0, stat_pos = 0.0;
  double p_neg = -1.0, p_pos = -1.0;  // -1 when permutations were not run

  double score() const { return stat_neg > stat_pos ? stat_neg : stat_pos; }
};

struct PairScreen {
  std::vector<PairStat> stats;                  // all d(d-1)/2 pairs, lex order
  std::vector<std::pair<int, int>> retained;    // subset, lex order
  ScreenRule rule;
};

/// Step 1 of the pipeline: per-class Gaussian-kernel HSIC for every
/// unordered pair with median-heuristic bandwidths per variable, then the
/// retention rule applied to the per-pair max over classes. Pairs retained
/// are retained for both classes. Classes larger than cfg.max_samples are
/// screened on a seeded subsample.
PairScreen screen_pairs(const Dataset& ds, const ScreenConfig& cfg, Rng rng);

/// Re-applies a retention rule to already-computed statistics.
std::vector<std::pair<int, int>> apply_screen_rule(const std::vector<PairStat>& stats,
                                                   const ScreenRule& rule);

/// The log-density feature map: per class, d univariate KDEs plus one
/// bivariate KDE per retained pair. Output layout is
///   [class -1 univariates | class -1 pairs (lex) |
///    class +1 univariates | class +1 pairs (lex) | constant 1]
struct FeatureMap {
  int d = 0;
  std::vector<std::pair<int, int>> pairs;
  // Index 0 = class -1, index 1 = class +1.
  std::vector<Kde1d> uni[2];
  std::vector<Kde2d> biv[2];
  std::vector<GridKde1d> uni_grid[2];  // populated when grids materialized
  std::vector<GridKde2d> biv_grid[2];
  bool use_grid = false;

  std::size_t dim() const { return 2 * (static_cast<std::size_t>(d) + pairs.size()) + 1; }
};

struct FeatureTag {
  int cls = 0;      // -1 / +1, 0 for the constant
  int i = -1, j = -1;  // j == i for univariate terms
  bool is_const = false;
};

FeatureMap build_feature_map(const Dataset& ds, const PairScreen& screen,
                             const DensityConfig& cfg);

std::vector<double> map_point(const FeatureMap& fm, std::span<const double> x);

/// Row-parallel batch map.
Matrix map_matrix(const FeatureMap& fm, const Matrix& X);
Matrix map_matrix_serial(const FeatureMap& fm, const Matrix& X);

std::vector<FeatureTag> feature_tags(const FeatureMap& fm);

}  // namespace slb
