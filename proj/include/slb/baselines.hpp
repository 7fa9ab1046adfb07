#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "slb/common.hpp"
#include "slb/dataset.hpp"
#include "slb/features.hpp"
#include "slb/kde.hpp"
#include "slb/slb.hpp"
#include "slb/synth.hpp"

namespace slb {

/// Undirected acyclic edge structure of one class.
struct ForestStructure {
  int d = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, lexicographic order
  std::vector<int> degree;
};

enum class MiEstimator { gaussian_copula, kde_grid };

struct MiConfig {
  MiEstimator estimator = MiEstimator::gaussian_copula;
  /// Edges with estimated MI at or below the floor are dropped, leaving a
  /// forest; the default keeps the full spanning tree.
  double mi_floor = -1.0;
  int kde_grid_nodes = 48;
};

/// Pairwise mutual information estimate. The Gaussian-copula route
/// rank-transforms to normal scores and uses -0.5 log(1 - rho^2).
double mutual_information(std::span<const double> x, std::span<const double> y,
                          const MiConfig& cfg = {});

/// Chow-Liu: maximum spanning tree over pairwise MI with deterministic
/// lexicographic tie-breaks, optionally pruned by the MI floor.
ForestStructure chow_liu_forest(const Matrix& class_samples, const MiConfig& cfg = {});

/// Tree-augmented naive Bayes: per class a Chow-Liu structure, univariate
/// KDEs everywhere and a bivariate KDE per edge; decisions take the
/// log-likelihood-ratio linear combination plus the empirical log prior.
struct TanModel {
  ForestStructure structure[2];      // 0 = class -1, 1 = class +1
  std::vector<Kde1d> uni[2];
  std::vector<Kde2d> edge_kde[2];
  double log_prior_ratio = 0.0;      // log(pi_pos / pi_neg)
};

TanModel fit_tan(const Dataset& ds, const DensityConfig& density = {},
                 const MiConfig& mi = {});
double tan_statistic(const TanModel& model, std::span<const double> x);
int tan_decide(const TanModel& model, std::span<const double> x);

struct NaiveBayesModel {
  std::vector<Kde1d> uni[2];
  double log_prior_ratio = 0.0;
};

NaiveBayesModel fit_naive_bayes(const Dataset& ds, const DensityConfig& density = {});
double nb_statistic(const NaiveBayesModel& model, std::span<const double> x);
int nb_decide(const NaiveBayesModel& model, std::span<const double> x);

/// Brute-force k-nearest-neighbour majority vote. Distance ties resolve by
/// training index, vote ties to +1.
struct KnnModel {
  Matrix train;
  std::vector<int> labels;
  int k = 5;
  std::optional<StandardizeRecord> standardize_record;
};

KnnModel fit_knn(const Dataset& ds, int k, bool standardize_first = false);
int knn_decide(const KnnModel& model, std::span<const double> x);

/// Log-univariate baseline: the SLB pipeline with no pairs retained.
SlbModel fit_lu(const Dataset& ds, const SlbConfig& cfg, Rng rng);

/// Exact likelihood-ratio classifier for synthetic specs.
int oracle_bayes(const BnSpec& pos, const BnSpec& neg, double log_prior_ratio,
                 std::span<const double> x);

/// Inverse standard normal CDF (Wichura's AS241, double precision).
double normal_quantile(double p);

}  // namespace slb
