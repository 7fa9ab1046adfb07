#include "slb/slb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "kde_json.hpp"

namespace slb {

namespace {

using nlohmann::json;

Matrix standardized_matrix(const StandardizeRecord& rec, const Matrix& X) {
  Matrix out = X;
  for (std::size_t r = 0; r < X.rows; ++r)
    for (std::size_t c = 0; c < X.cols; ++c)
      out(r, c) = (X(r, c) - rec.mean[c]) / rec.scale[c];
  return out;
}

/// Stratified D0/D1 split: the first ceil(frac * class size) of each
/// shuffled class goes to D0.
std::pair<Dataset, Dataset> split_density_svm(const Dataset& ds, double frac, Rng rng) {
  std::vector<std::size_t> d0, d1;
  for (int cls : {-1, +1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.n(); ++i)
      if (ds.labels[i] == cls) idx.push_back(i);
    rng.shuffle(idx);
    const auto take = static_cast<std::size_t>(
        std::ceil(frac * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < take ? d0 : d1).push_back(idx[i]);
  }
  std::sort(d0.begin(), d0.end());
  std::sort(d1.begin(), d1.end());
  return {subset_rows(ds, d0), subset_rows(ds, d1)};
}

double fold_metric(const std::vector<int>& pred, const std::vector<int>& truth,
                   bool use_ber) {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == 1)
      (pred[i] == 1 ? tp : fn)++;
    else
      (pred[i] == -1 ? tn : fp)++;
  }
  if (!use_ber)
    return static_cast<double>(fp + fn) / static_cast<double>(pred.size());
  if (tp + fn == 0 || tn + fp == 0)
    throw DataError("BER undefined: a fold is missing one class");
  const double sens = static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double spec = static_cast<double>(tn) / static_cast<double>(tn + fp);
  return 1.0 - 0.5 * (sens + spec);
}

PairScreen retain_all_screen(const std::vector<PairStat>& stats) {
  PairScreen s;
  s.stats = stats;
  s.rule = {ScreenRule::Kind::quantile, 0.0};
  for (const auto& st : stats) s.retained.emplace_back(st.i, st.j);
  return s;
}

}  // namespace

ThresholdCvResult select_threshold_cv(const Dataset& ds, const std::vector<double>& grid,
                                      int folds, const SlbConfig& cfg, Rng rng) {
  if (grid.empty()) throw DataError("threshold grid is empty");
  const auto folds_asn = stratified_kfold(ds, folds, rng.derive(40));
  const std::size_t d = ds.d();

  std::vector<std::vector<double>> errors(grid.size());  // [grid][fold]
  for (auto& v : errors) v.assign(static_cast<std::size_t>(folds), 0.0);

  for (int f = 0; f < folds; ++f) {
    auto [train, val] = split_fold(ds, folds_asn, f);

    ScreenConfig stats_cfg = cfg.screen;
    stats_cfg.rule = {ScreenRule::Kind::quantile, 0.0};
    PairScreen all_stats;
    try {
      all_stats = screen_pairs(train, stats_cfg, rng.derive(41, static_cast<std::uint64_t>(f)));
    } catch (const FitError& e) {
      throw FitError("screen_pairs (cv fold " + std::to_string(f) + "): " + e.what());
    }
    const std::size_t P = all_stats.stats.size();

    FeatureMap fmap;
    try {
      fmap = build_feature_map(train, retain_all_screen(all_stats.stats), cfg.density);
    } catch (const FitError& e) {
      throw FitError("build_feature_map (cv fold " + std::to_string(f) + "): " + e.what());
    }
    const Matrix Ftr = map_matrix(fmap, train.features);
    const Matrix Fval = map_matrix(fmap, val.features);

    std::vector<double> pooled;
    pooled.reserve(2 * P);
    for (const auto& s : all_stats.stats) {
      pooled.push_back(s.stat_neg);
      pooled.push_back(s.stat_pos);
    }

    for (std::size_t g = 0; g < grid.size(); ++g) {
      // Column subset for this threshold; pair p sits at d+p (class -1)
      // and 2d+P+p (class +1) in the retain-all layout.
      const double tau = pooled.empty() ? 0.0 : quantile_lower(pooled, grid[g]);
      std::vector<std::size_t> cols;
      for (std::size_t c = 0; c < d; ++c) cols.push_back(c);
      for (std::size_t p = 0; p < P; ++p)
        if (all_stats.stats[p].score() >= tau) cols.push_back(d + p);
      const std::size_t mark = cols.size();
      for (std::size_t c = 0; c < mark; ++c) cols.push_back(cols[c] + d + P);
      cols.push_back(2 * (d + P));

      Matrix Xtr(Ftr.rows, cols.size()), Xval(Fval.rows, cols.size());
      for (std::size_t r = 0; r < Ftr.rows; ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) Xtr(r, c) = Ftr(r, cols[c]);
      for (std::size_t r = 0; r < Fval.rows; ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) Xval(r, c) = Fval(r, cols[c]);

      // candidate scoring tolerates a lighter solve than the final fit
      TrainConfig search = cfg.train;
      search.tolerance = std::max(search.tolerance, 1e-6);
      search.max_epochs = std::min(search.max_epochs, 300);
      const LinearModel lm = train_hinge(Xtr, train.labels, search);
      std::vector<int> pred(Xval.rows);
      for (std::size_t r = 0; r < Xval.rows; ++r) pred[r] = decide(lm, Xval.row(r));
      errors[g][static_cast<std::size_t>(f)] = fold_metric(pred, val.labels, cfg.cv_use_ber);
    }
  }

  ThresholdCvResult res;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    ThresholdCvRow row;
    row.quantile = grid[g];
    row.fold_errors = errors[g];
    row.mean_error = mean(errors[g]);
    row.sd_error = stddev(errors[g], /*unbiased=*/true);
    res.table.push_back(row);
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (res.table[g].mean_error < res.table[best].mean_error ||
        (res.table[g].mean_error == res.table[best].mean_error &&
         res.table[g].quantile > res.table[best].quantile))
      best = g;
  }
  res.chosen_quantile = res.table[best].quantile;
  return res;
}

SlbModel fit_slb(const Dataset& ds, const SlbConfig& cfg, Rng rng) {
  for (int cls : {-1, +1})
    if (ds.count_label(cls) < 4)
      throw FitError("class " + std::to_string(cls) + " needs at least 4 samples");

  SlbModel model;
  model.config = cfg;

  Dataset work = ds;
  if (cfg.standardize) {
    auto [std_ds, rec] = standardize(ds);
    work = std::move(std_ds);
    model.standardize_record = rec;
  }

  if (cfg.cv_rule) {
    const auto cv = select_threshold_cv(work, cfg.threshold_grid, cfg.cv_folds, cfg,
                                        rng.derive(7));
    model.config.screen.rule = {ScreenRule::Kind::quantile, cv.chosen_quantile};
    model.config.cv_rule = false;
  }

  Dataset d0 = work, d1 = work;
  if (cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0) {
    auto parts = split_density_svm(work, cfg.split_fraction, rng.derive(8));
    d0 = std::move(parts.first);
    d1 = std::move(parts.second);
  }

  try {
    model.screen = screen_pairs(d0, model.config.screen, rng.derive(1));
  } catch (const FitError& e) {
    throw FitError(std::string("screen_pairs: ") + e.what());
  }
  try {
    model.feature_map = build_feature_map(d0, model.screen, cfg.density);
  } catch (const FitError& e) {
    throw FitError(std::string("build_feature_map: ") + e.what());
  }
  try {
    const Matrix F = map_matrix(model.feature_map, d1.features);
    model.linear = train_hinge(F, d1.labels, cfg.train);
  } catch (const FitError& e) {
    throw FitError(std::string("train_hinge: ") + e.what());
  }
  return model;
}

std::vector<double> slb_decision_values(const SlbModel& model, const Matrix& X) {
  const Matrix* input = &X;
  Matrix transformed;
  if (model.standardize_record) {
    transformed = standardized_matrix(*model.standardize_record, X);
    input = &transformed;
  }
  const Matrix F = map_matrix(model.feature_map, *input);
  std::vector<double> out(F.rows);
  for (std::size_t r = 0; r < F.rows; ++r) out[r] = decision_value(model.linear, F.row(r));
  return out;
}

std::vector<int> slb_predict(const SlbModel& model, const Matrix& X) {
  const auto values = slb_decision_values(model, X);
  std::vector<int> pred(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) pred[i] = values[i] >= 0.0 ? 1 : -1;
  return pred;
}

// --- serialization ---

namespace {

std::string rule_kind_name(ScreenRule::Kind k) {
  switch (k) {
    case ScreenRule::Kind::threshold: return "threshold";
    case ScreenRule::Kind::quantile: return "quantile";
    case ScreenRule::Kind::top_fraction: return "top_fraction";
    case ScreenRule::Kind::pvalue_bh: return "pvalue_bh";
  }
  return "quantile";
}

ScreenRule::Kind rule_kind_from_name(const std::string& s) {
  if (s == "threshold") return ScreenRule::Kind::threshold;
  if (s == "quantile") return ScreenRule::Kind::quantile;
  if (s == "top_fraction") return ScreenRule::Kind::top_fraction;
  if (s == "pvalue_bh") return ScreenRule::Kind::pvalue_bh;
  throw DataError("unknown screen rule: " + s);
}

json rule_to_json(const ScreenRule& r) {
  return json{{"kind", rule_kind_name(r.kind)}, {"value", r.value}};
}

ScreenRule rule_from_json(const json& j) {
  return {rule_kind_from_name(j.at("kind").get<std::string>()), j.at("value").get<double>()};
}

}  // namespace

std::string model_to_json(const SlbModel& model) {
  json j;
  j["format_version"] = model.format_version;

  const SlbConfig& c = model.config;
  j["config"] = {
      {"screen",
       {{"rule", rule_to_json(c.screen.rule)},
        {"permutations", c.screen.permutations},
        {"max_samples", c.screen.max_samples}}},
      {"threshold_grid", c.threshold_grid},
      {"cv_folds", c.cv_folds},
      {"cv_use_ber", c.cv_use_ber},
      {"density",
       {{"fixed_bandwidth",
         c.density.fixed_bandwidth ? json(*c.density.fixed_bandwidth) : json(nullptr)},
        {"clamp_floor", c.density.clamp_floor},
        {"clamp_ceiling",
         c.density.clamp_ceiling ? json(*c.density.clamp_ceiling) : json(nullptr)},
        {"eval", c.density.eval == KdeEval::grid ? "grid" : "exact"},
        {"grid_nodes_1d", c.density.grid_nodes_1d},
        {"grid_nodes_2d", c.density.grid_nodes_2d}}},
      {"train",
       {{"lambda", c.train.lambda},
        {"max_epochs", c.train.max_epochs},
        {"tolerance", c.train.tolerance},
        {"seed", c.train.seed}}},
      {"split_fraction", c.split_fraction},
      {"standardize", c.standardize}};

  if (model.standardize_record) {
    j["standardize_record"] = {{"mean", model.standardize_record->mean},
                               {"scale", model.standardize_record->scale}};
  } else {
    j["standardize_record"] = nullptr;
  }

  json stats = json::array();
  for (const auto& s : model.screen.stats)
    stats.push_back({{"i", s.i},
                     {"j", s.j},
                     {"stat_neg", s.stat_neg},
                     {"stat_pos", s.stat_pos},
                     {"p_neg", s.p_neg},
                     {"p_pos", s.p_pos}});
  json retained = json::array();
  for (const auto& [a, b] : model.screen.retained) retained.push_back({a, b});
  j["screen"] = {{"rule", rule_to_json(model.screen.rule)},
                 {"stats", stats},
                 {"retained", retained}};

  const FeatureMap& fm = model.feature_map;
  json kdes;
  const char* side_names[2] = {"class_neg", "class_pos"};
  for (int side : {0, 1}) {
    json uni = json::array(), biv = json::array();
    for (const auto& k : fm.uni[side]) uni.push_back(detail::kde1d_to_json(k));
    for (std::size_t p = 0; p < fm.biv[side].size(); ++p) {
      json item = detail::kde2d_to_json(fm.biv[side][p]);
      item["i"] = fm.pairs[p].first;
      item["j"] = fm.pairs[p].second;
      biv.push_back(item);
    }
    kdes[side_names[side]] = {{"univariate", uni}, {"bivariate", biv}};
    if (fm.use_grid) {
      json ug = json::array(), bg = json::array();
      for (const auto& g : fm.uni_grid[side]) ug.push_back(detail::grid1d_to_json(g));
      for (const auto& g : fm.biv_grid[side]) bg.push_back(detail::grid2d_to_json(g));
      kdes[side_names[side]]["univariate_grid"] = ug;
      kdes[side_names[side]]["bivariate_grid"] = bg;
    }
  }
  j["kdes"] = kdes;
  j["kdes"]["use_grid"] = fm.use_grid;
  j["kdes"]["d"] = fm.d;

  j["weights"] = model.linear.weights;
  j["linear"] = {{"lambda", model.linear.lambda},
                 {"final_objective", model.linear.final_objective},
                 {"epochs", model.linear.epochs}};

  json tags = json::array();
  for (const auto& t : feature_tags(fm)) {
    if (t.is_const)
      tags.push_back({{"const", true}});
    else
      tags.push_back({{"class", t.cls}, {"i", t.i}, {"j", t.j}});
  }
  j["tags"] = tags;
  return j.dump(1);
}

SlbModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  SlbModel model;
  try {
    model.format_version = j.at("format_version").get<int>();
    if (model.format_version != 1)
      throw DataError("unsupported model format version " +
                      std::to_string(model.format_version));

    const json& c = j.at("config");
    model.config.screen.rule = rule_from_json(c.at("screen").at("rule"));
    model.config.screen.permutations = c.at("screen").at("permutations").get<int>();
    model.config.screen.max_samples = c.at("screen").at("max_samples").get<int>();
    model.config.threshold_grid = c.at("threshold_grid").get<std::vector<double>>();
    model.config.cv_folds = c.at("cv_folds").get<int>();
    model.config.cv_use_ber = c.at("cv_use_ber").get<bool>();
    const json& dj = c.at("density");
    if (!dj.at("fixed_bandwidth").is_null())
      model.config.density.fixed_bandwidth = dj.at("fixed_bandwidth").get<double>();
    model.config.density.clamp_floor = dj.at("clamp_floor").get<double>();
    if (!dj.at("clamp_ceiling").is_null())
      model.config.density.clamp_ceiling = dj.at("clamp_ceiling").get<double>();
    model.config.density.eval =
        dj.at("eval").get<std::string>() == "grid" ? KdeEval::grid : KdeEval::exact;
    model.config.density.grid_nodes_1d = dj.at("grid_nodes_1d").get<int>();
    model.config.density.grid_nodes_2d = dj.at("grid_nodes_2d").get<int>();
    const json& tj = c.at("train");
    model.config.train.lambda = tj.at("lambda").get<double>();
    model.config.train.max_epochs = tj.at("max_epochs").get<int>();
    model.config.train.tolerance = tj.at("tolerance").get<double>();
    model.config.train.seed = tj.at("seed").get<std::uint64_t>();
    model.config.split_fraction = c.at("split_fraction").get<double>();
    model.config.standardize = c.at("standardize").get<bool>();

    if (!j.at("standardize_record").is_null()) {
      StandardizeRecord rec;
      rec.mean = j.at("standardize_record").at("mean").get<std::vector<double>>();
      rec.scale = j.at("standardize_record").at("scale").get<std::vector<double>>();
      model.standardize_record = rec;
    }

    model.screen.rule = rule_from_json(j.at("screen").at("rule"));
    for (const auto& s : j.at("screen").at("stats")) {
      PairStat st;
      st.i = s.at("i").get<int>();
      st.j = s.at("j").get<int>();
      st.stat_neg = s.at("stat_neg").get<double>();
      st.stat_pos = s.at("stat_pos").get<double>();
      st.p_neg = s.at("p_neg").get<double>();
      st.p_pos = s.at("p_pos").get<double>();
      model.screen.stats.push_back(st);
    }
    for (const auto& r : j.at("screen").at("retained"))
      model.screen.retained.emplace_back(r.at(0).get<int>(), r.at(1).get<int>());

    FeatureMap& fm = model.feature_map;
    fm.d = j.at("kdes").at("d").get<int>();
    fm.use_grid = j.at("kdes").at("use_grid").get<bool>();
    fm.pairs = model.screen.retained;
    const char* side_names[2] = {"class_neg", "class_pos"};
    for (int side : {0, 1}) {
      const json& side_j = j.at("kdes").at(side_names[side]);
      for (const auto& k : side_j.at("univariate")) fm.uni[side].push_back(detail::kde1d_from_json(k));
      for (const auto& k : side_j.at("bivariate")) fm.biv[side].push_back(detail::kde2d_from_json(k));
      if (fm.use_grid) {
        for (const auto& g : side_j.at("univariate_grid"))
          fm.uni_grid[side].push_back(detail::grid1d_from_json(g));
        for (const auto& g : side_j.at("bivariate_grid"))
          fm.biv_grid[side].push_back(detail::grid2d_from_json(g));
      }
    }

    model.linear.weights = j.at("weights").get<std::vector<double>>();
    model.linear.lambda = j.at("linear").at("lambda").get<double>();
    model.linear.final_objective = j.at("linear").at("final_objective").get<double>();
    model.linear.epochs = j.at("linear").at("epochs").get<int>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
  if (model.linear.weights.size() != model.feature_map.dim())
    throw DataError("model weight dimension does not match its feature map");
  return model;
}

void save_model(const SlbModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << model_to_json(model) << '\n';
}

SlbModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace slb
