#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "slb/baselines.hpp"
#include "slb/dataset.hpp"
#include "slb/synth.hpp"

namespace slb {

/// Confusion counts and the derived rates. Fold vectors are populated by
/// cross_validate, in which case the headline rates are per-fold means.
struct EvalReport {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double error_rate = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double ber = 0.0;
  std::vector<double> fold_errors;
  std::vector<double> fold_bers;
  double sd_error = 0.0;
  double sd_ber = 0.0;
};

/// Exact counting scores. Labels must contain both classes (BER is part of
/// every report).
EvalReport score(const std::vector<int>& predictions, const std::vector<int>& labels);

struct Classifier {
  virtual ~Classifier() = default;
  virtual std::vector<int> predict(const Matrix& X) const = 0;
};

using ClassifierFactory =
    std::function<std::unique_ptr<Classifier>(const Dataset& train, Rng rng)>;

/// Trains/evaluates on the provided fold assignment so that every method in
/// a comparison sees identical splits. Headline rates are arithmetic means
/// across folds (not pooled counts); counts are pooled for reference.
EvalReport cross_validate(const Dataset& ds, const ClassifierFactory& factory,
                          const StratifiedFolds& folds, Rng rng);

struct MethodConfig {
  SlbConfig slb;
  int knn_k = 5;
  bool knn_standardize = false;
  MiConfig mi;
};

/// Named factory for {slb, slb-minus, lu, nb, tan, knn}. The oracle method
/// only exists inside run_factorial where the generating specs are known.
ClassifierFactory make_method(const std::string& name, const MethodConfig& cfg);

struct FactorialRow {
  ExperimentDesign design;
  std::string method;
  double mean_error = 0.0;
  double sd_error = 0.0;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::vector<double> raw_errors;
};

/// Everything one factorial replicate is made of, addressable by
/// (seed, cell index, replicate index) so emitted artifacts match the runs.
struct ReplicateData {
  BnSpec pos, neg;
  Dataset train, test;
};

ReplicateData factorial_replicate(const ExperimentDesign& design, std::uint64_t seed,
                                  std::size_t cell, int rep);

/// One row per (design cell, method): mean +- sd of test misclassification
/// over seeded replicates. Test sets are 50/50, so the error equals BER.
std::vector<FactorialRow> run_factorial(const std::vector<ExperimentDesign>& grid,
                                        const std::vector<std::string>& methods,
                                        int replicates, std::uint64_t seed,
                                        const MethodConfig& cfg);

std::string factorial_csv(const std::vector<FactorialRow>& rows);
std::string factorial_raw_csv(const std::vector<FactorialRow>& rows);

std::string design_structure_name(const ExperimentDesign& d);
std::string design_cpd_name(const ExperimentDesign& d);

}  // namespace slb
