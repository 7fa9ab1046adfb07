#include "slb/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kde_json.hpp"

namespace slb {

namespace {

using nlohmann::json;

json nb_to_json(const NaiveBayesModel& m) {
  json j;
  for (int side : {0, 1}) {
    json arr = json::array();
    for (const auto& k : m.uni[side]) arr.push_back(detail::kde1d_to_json(k));
    j[side == 0 ? "class_neg" : "class_pos"] = arr;
  }
  j["log_prior_ratio"] = m.log_prior_ratio;
  return j;
}

NaiveBayesModel nb_from_json(const json& j) {
  NaiveBayesModel m;
  for (int side : {0, 1})
    for (const auto& k : j.at(side == 0 ? "class_neg" : "class_pos"))
      m.uni[side].push_back(detail::kde1d_from_json(k));
  m.log_prior_ratio = j.at("log_prior_ratio").get<double>();
  return m;
}

json tan_to_json(const TanModel& m) {
  json j;
  for (int side : {0, 1}) {
    json s;
    s["d"] = m.structure[side].d;
    json edges = json::array();
    for (const auto& [a, b] : m.structure[side].edges) edges.push_back({a, b});
    s["edges"] = edges;
    s["degree"] = m.structure[side].degree;
    json uni = json::array();
    for (const auto& k : m.uni[side]) uni.push_back(detail::kde1d_to_json(k));
    s["univariate"] = uni;
    json biv = json::array();
    for (const auto& k : m.edge_kde[side]) biv.push_back(detail::kde2d_to_json(k));
    s["edge_kdes"] = biv;
    j[side == 0 ? "class_neg" : "class_pos"] = s;
  }
  j["log_prior_ratio"] = m.log_prior_ratio;
  return j;
}

TanModel tan_from_json(const json& j) {
  TanModel m;
  for (int side : {0, 1}) {
    const json& s = j.at(side == 0 ? "class_neg" : "class_pos");
    m.structure[side].d = s.at("d").get<int>();
    for (const auto& e : s.at("edges"))
      m.structure[side].edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    m.structure[side].degree = s.at("degree").get<std::vector<int>>();
    for (const auto& k : s.at("univariate")) m.uni[side].push_back(detail::kde1d_from_json(k));
    for (const auto& k : s.at("edge_kdes")) m.edge_kde[side].push_back(detail::kde2d_from_json(k));
  }
  m.log_prior_ratio = j.at("log_prior_ratio").get<double>();
  return m;
}

json knn_to_json(const KnnModel& m) {
  json j;
  j["k"] = m.k;
  j["rows"] = m.train.rows;
  j["cols"] = m.train.cols;
  j["data"] = m.train.data;
  j["labels"] = m.labels;
  if (m.standardize_record) {
    j["standardize_record"] = {{"mean", m.standardize_record->mean},
                               {"scale", m.standardize_record->scale}};
  } else {
    j["standardize_record"] = nullptr;
  }
  return j;
}

KnnModel knn_from_json(const json& j) {
  KnnModel m;
  m.k = j.at("k").get<int>();
  m.train.rows = j.at("rows").get<std::size_t>();
  m.train.cols = j.at("cols").get<std::size_t>();
  m.train.data = j.at("data").get<std::vector<double>>();
  m.labels = j.at("labels").get<std::vector<int>>();
  if (!j.at("standardize_record").is_null()) {
    StandardizeRecord rec;
    rec.mean = j.at("standardize_record").at("mean").get<std::vector<double>>();
    rec.scale = j.at("standardize_record").at("scale").get<std::vector<double>>();
    m.standardize_record = rec;
  }
  return m;
}

}  // namespace

std::vector<int> TrainedModel::predict(const Matrix& X) const {
  const auto values = decision_values(X);
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] >= 0.0 ? 1 : -1;
  return out;
}

std::vector<double> TrainedModel::decision_values(const Matrix& X) const {
  if (slb) return slb_decision_values(*slb, X);
  std::vector<double> out(X.rows);
  if (nb) {
    for (std::size_t r = 0; r < X.rows; ++r) out[r] = nb_statistic(*nb, X.row(r));
    return out;
  }
  if (tan) {
    for (std::size_t r = 0; r < X.rows; ++r) out[r] = tan_statistic(*tan, X.row(r));
    return out;
  }
  if (knn) {
    for (std::size_t r = 0; r < X.rows; ++r)
      out[r] = static_cast<double>(knn_decide(*knn, X.row(r)));
    return out;
  }
  throw DataError("model file holds no classifier payload");
}

void save_trained_model(const TrainedModel& model, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["method"] = model.method;
  j["feature_names"] = model.feature_names;
  j["label_column"] = model.label_column;
  j["positive_label"] = model.positive_label;
  if (model.slb) {
    j["slb"] = json::parse(model_to_json(*model.slb));
  } else if (model.nb) {
    j["nb"] = nb_to_json(*model.nb);
  } else if (model.tan) {
    j["tan"] = tan_to_json(*model.tan);
  } else if (model.knn) {
    j["knn"] = knn_to_json(*model.knn);
  } else {
    throw DataError("refusing to save an empty model");
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << j.dump(1) << '\n';
}

TrainedModel load_trained_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  TrainedModel model;
  try {
    if (j.at("format_version").get<int>() != 1)
      throw DataError("unsupported model format version");
    model.method = j.at("method").get<std::string>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.label_column = j.at("label_column").get<std::string>();
    model.positive_label = j.at("positive_label").get<std::string>();
    if (j.contains("slb")) {
      model.slb = model_from_json(j.at("slb").dump());
    } else if (j.contains("nb")) {
      model.nb = nb_from_json(j.at("nb"));
    } else if (j.contains("tan")) {
      model.tan = tan_from_json(j.at("tan"));
    } else if (j.contains("knn")) {
      model.knn = knn_from_json(j.at("knn"));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
  return model;
}

}  // namespace slb
