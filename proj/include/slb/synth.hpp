#pragma once

#include <span>
#include <utility>
#include <vector>

#include "slb/common.hpp"
#include "slb/dataset.hpp"
#include "slb/rng.hpp"

namespace slb {

enum class CpdFamily { gaussian, complex_mixture };
enum class BnStructure { forest, general };

/// Directed acyclic network over d real variables. Root nodes are standard
/// normal; a non-root node is distributed around the sum of its parents:
/// Gaussian N(sum, 1), or the heavier complex mixture (t5 shift / two-normal
/// mixture) of the experimental designs. Parent lists are sorted by variable
/// index; topo_order lists variables parents-first.
struct BnSpec {
  int d = 0;
  CpdFamily family = CpdFamily::gaussian;
  std::vector<std::vector<int>> parents;
  std::vector<int> topo_order;
  std::uint64_t structure_seed = 0;

  /// Exact joint log density as the product of conditional factors. Both
  /// CPD families have closed-form conditionals, so this is exact for both.
  double log_density(std::span<const double> x) const;
};

/// Random forest-structured network: a uniform random spanning tree (Prufer
/// sequence), each edge kept independently with probability edge_keep, each
/// resulting component oriented away from its lowest-index node.
BnSpec random_forest_bn(int d, double edge_keep, CpdFamily family, Rng& rng);

/// Random general network: a random topological order; every node at
/// position >= 3 draws exactly 3 distinct parents uniformly from its
/// predecessors, earlier nodes are roots.
BnSpec random_general_bn(int d, CpdFamily family, Rng& rng);

struct ExperimentDesign {
  BnStructure structure = BnStructure::forest;
  CpdFamily cpd = CpdFamily::gaussian;
  bool balanced = true;       // 50/50 vs 75/25 (positives first)
  bool shared_third = false;  // general structure only
  int n = 1000;               // training size
  int d = 20;
  int test_n = 1000;
  double edge_keep = 0.9;     // forest thinning survival probability
};

/// Class-conditional pair for one design cell. With shared_third, the two
/// general networks use a common topological order and floor(d/3) randomly
/// chosen nodes of the negative class copy their parent sets from the
/// positive class.
std::pair<BnSpec, BnSpec> make_class_pair(const ExperimentDesign& design, Rng& rng);

/// Ancestral sampling in topological order; one row per sample.
Matrix sample_bn(const BnSpec& spec, int n, Rng& rng);

/// Train set at the design's class balance (positive count rounded up) and
/// a test set of test_n rows split half/half.
std::pair<Dataset, Dataset> gen_experiment_from_specs(const BnSpec& pos, const BnSpec& neg,
                                                      const ExperimentDesign& design,
                                                      Rng& rng);
std::pair<Dataset, Dataset> gen_experiment(const ExperimentDesign& design, Rng& rng);

/// Ringnorm: positive class N(a, I) with a = (2/sqrt(20)) 1, negative class
/// N(0, 4I); d must be 20. Labels are balanced, positives rounded up.
Dataset gen_ringnorm(int n, int d, Rng& rng);

/// Covariance implied by a Gaussian spec (unit coefficient on each parent,
/// unit innovation variance). Errors for the complex family.
Matrix implied_covariance(const BnSpec& spec);

/// Multivariate normal log density for a zero-mean covariance.
double mvn_log_pdf(std::span<const double> x, const Matrix& cov);

/// Zero-mean normal marginal/bivariate log densities read off a covariance.
double gaussian_marginal_log_pdf(const Matrix& cov, int i, double x);
double gaussian_pair_log_pdf(const Matrix& cov, int i, int j, double xi, double xj);

/// Log density of the complex conditional factor given the parent sum(s);
/// exposed for oracle tests.
double complex_cpd_log_pdf(double x, double sum_all, double sum_a, double sum_b);

}  // namespace slb
