#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slb/baselines.hpp"
#include "slb/slb.hpp"

namespace slb {

/// Versioned one-file wrapper around any trained classifier so the predict
/// command can reload whatever the train command produced. The slb family
/// embeds the full SlbModel document; the other methods carry their own
/// sections.
struct TrainedModel {
  std::string method;  // slb | slb-minus | lu | nb | tan | knn
  std::vector<std::string> feature_names;
  std::string label_column;
  std::string positive_label;  // raw label string mapped to +1 at training

  std::optional<SlbModel> slb;
  std::optional<NaiveBayesModel> nb;
  std::optional<TanModel> tan;
  std::optional<KnnModel> knn;

  std::vector<int> predict(const Matrix& X) const;
  std::vector<double> decision_values(const Matrix& X) const;
};

void save_trained_model(const TrainedModel& model, const std::string& path);
TrainedModel load_trained_model(const std::string& path);

}  // namespace slb
