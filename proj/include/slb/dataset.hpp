#pragma once

#include <string>
#include <utility>
#include <vector>

#include "slb/common.hpp"
#include "slb/rng.hpp"

namespace slb {

/// Labeled sample: n x d finite feature matrix, labels in {-1,+1}.
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;

  std::size_t n() const { return features.rows; }
  std::size_t d() const { return features.cols; }

  std::size_t count_label(int y) const {
    std::size_t c = 0;
    for (int v : labels) c += (v == y);
    return c;
  }

  /// Enforces the type invariants; throws DataError on violation.
  void validate() const;
};

struct StratifiedFolds {
  int k = 0;
  std::vector<int> assignments;  // fold id in [0,k) per sample
};

/// Per-feature affine transform record: x -> (x - mean) / scale.
/// Scale is the population (divide by n) standard deviation; constant
/// features get scale 1 so they map to exactly 0.
struct StandardizeRecord {
  std::vector<double> mean;
  std::vector<double> scale;
};

/// Loads a CSV with one header row. The label column must hold exactly two
/// distinct values; positive_label selects which maps to +1 (empty string =
/// auto: the lexicographically larger of the two). Missing or non-numeric
/// feature cells are rejected.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label = "");

/// Writes a dataset as CSV; numbers use shortest round-trip formatting, the
/// label column holds "1" / "-1".
void write_csv(const Dataset& ds, const std::string& path,
               const std::string& label_column = "label");

/// Same CSV text as write_csv, as a string (determinism checks).
std::string to_csv_string(const Dataset& ds, const std::string& label_column = "label");

/// Per-class balanced fold assignment: each class is shuffled with the
/// given stream and dealt round-robin, so per-class fold counts differ by
/// at most one. Requires k >= 2 and at least k samples of each class.
StratifiedFolds stratified_kfold(const Dataset& ds, int k, Rng rng);

std::pair<Dataset, StandardizeRecord> standardize(const Dataset& ds);

Dataset apply_standardize(const StandardizeRecord& rec, const Dataset& ds);

/// Row subset in the given order.
Dataset subset_rows(const Dataset& ds, const std::vector<std::size_t>& rows);

/// Train/test split for one fold: (rows not in fold, rows in fold).
std::pair<Dataset, Dataset> split_fold(const Dataset& ds, const StratifiedFolds& folds,
                                       int fold);

}  // namespace slb
