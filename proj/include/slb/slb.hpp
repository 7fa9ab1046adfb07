#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slb/dataset.hpp"
#include "slb/features.hpp"
#include "slb/rng.hpp"
#include "slb/svm.hpp"

namespace slb {

struct SlbConfig {
  ScreenConfig screen;
  /// When set, the screening quantile is chosen by k-fold cross-validation
  /// over threshold_grid before the final fit (the rule in `screen` is then
  /// ignored).
  bool cv_rule = false;
  std::vector<double> threshold_grid = {0.0, 0.25, 0.5, 0.75, 0.9, 1.0};
  int cv_folds = 5;
  bool cv_use_ber = false;  // select by BER instead of plain misclassification
  DensityConfig density;
  TrainConfig train;
  /// Fraction of each class fitted as D0 (densities) with the rest D1 (SVM);
  /// 0 trains both stages on all data.
  double split_fraction = 0.0;
  bool standardize = false;
};

struct SlbModel {
  int format_version = 1;
  FeatureMap feature_map;
  LinearModel linear;
  PairScreen screen;
  SlbConfig config;  // snapshot, with any CV-chosen rule substituted in
  std::optional<StandardizeRecord> standardize_record;
};

struct ThresholdCvRow {
  double quantile = 0.0;
  double mean_error = 0.0;
  double sd_error = 0.0;
  std::vector<double> fold_errors;
};

struct ThresholdCvResult {
  double chosen_quantile = 0.0;
  std::vector<ThresholdCvRow> table;
};

/// Mean CV misclassification (or BER) of the pipeline across a grid of
/// screening quantiles; ties prefer the larger (sparser) threshold. Each
/// fold fits the screen statistics and density estimates once and reuses
/// feature columns across the grid.
ThresholdCvResult select_threshold_cv(const Dataset& ds, const std::vector<double>& grid,
                                      int folds, const SlbConfig& cfg, Rng rng);

/// The full pipeline: screen pairs, fit per-class densities, train the
/// linear SVM on the mapped features. Errors are tagged with the step that
/// raised them.
SlbModel fit_slb(const Dataset& ds, const SlbConfig& cfg, Rng rng);

std::vector<int> slb_predict(const SlbModel& model, const Matrix& X);
std::vector<double> slb_decision_values(const SlbModel& model, const Matrix& X);

void save_model(const SlbModel& model, const std::string& path);
SlbModel load_model(const std::string& path);
std::string model_to_json(const SlbModel& model);
SlbModel model_from_json(const std::string& text);

}  // namespace slb
