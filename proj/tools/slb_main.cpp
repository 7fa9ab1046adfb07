// slb: train/predict/evaluate the sparse log-bivariate density classifier
// and its companions on CSV data, generate the synthetic benchmark suites,
// and report pairwise dependence screens.
//
// Exit codes: 0 ok, 2 bad usage, 3 data error, 4 numeric fit error.

#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slb/eval.hpp"
#include "slb/model_io.hpp"

using namespace slb;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 20240501;
  int threads = 0;
  bool quiet = false;
};

void apply_threads(const GlobalOpts& g) {
  int n = g.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("SLB_THREADS")) n = std::atoi(env);
  }
  if (n > 0) omp_set_num_threads(n);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_suffix_number(const std::string& text, const std::string& flag) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw CLI::ValidationError(flag, "expected a number, got '" + text + "'");
  return v;
}

/// Shared model-fitting flags for train/eval.
struct FitOpts {
  std::string method = "slb";
  std::string hsic_rule = "cv";
  double lambda = 0.5;
  std::string bandwidth = "silverman";
  double clamp_floor = 1e-10;
  double split = 0.0;
  bool standardize = false;
  std::string kde_eval = "exact";
  int grid_nodes_1d = 256;
  int grid_nodes_2d = 128;
  int knn_k = 5;
  int hsic_max_samples = 1024;

  void add_flags(CLI::App* cmd, bool with_method = true) {
    if (with_method)
      cmd->add_option("--method", method, "classifier: slb, slb-minus, lu, nb, tan, knn")
          ->check(CLI::IsMember({"slb", "slb-minus", "lu", "nb", "tan", "knn"}));
    cmd->add_option("--hsic-rule", hsic_rule,
                    "pair screening rule: cv, quantile:Q, pvalue:A");
    cmd->add_option("--lambda", lambda, "svm regularization strength")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--bandwidth", bandwidth, "kde bandwidth: silverman or fixed:H");
    cmd->add_option("--clamp-floor", clamp_floor, "density clamp floor")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--split", split, "density/svm split fraction (0 = no split)")
        ->check(CLI::Range(0.0, 0.99));
    cmd->add_flag("--standardize", standardize, "standardize features before fitting");
    cmd->add_option("--kde-eval", kde_eval, "density evaluation: exact or grid")
        ->check(CLI::IsMember({"exact", "grid"}));
    cmd->add_option("--grid-nodes-1d", grid_nodes_1d, "grid nodes per axis, univariate");
    cmd->add_option("--grid-nodes-2d", grid_nodes_2d, "grid nodes per axis, bivariate");
    cmd->add_option("--knn-k", knn_k, "neighbour count for knn")->check(CLI::PositiveNumber);
    cmd->add_option("--hsic-max-samples", hsic_max_samples,
                    "per-class sample cap for screening statistics");
  }

  MethodConfig to_method_config() const {
    MethodConfig cfg;
    cfg.slb.train.lambda = lambda;
    cfg.slb.density.clamp_floor = clamp_floor;
    cfg.slb.density.eval = kde_eval == "grid" ? KdeEval::grid : KdeEval::exact;
    cfg.slb.density.grid_nodes_1d = grid_nodes_1d;
    cfg.slb.density.grid_nodes_2d = grid_nodes_2d;
    cfg.slb.split_fraction = split;
    cfg.slb.standardize = standardize;
    cfg.slb.screen.max_samples = hsic_max_samples;
    cfg.knn_k = knn_k;
    cfg.knn_standardize = standardize;

    if (bandwidth != "silverman") {
      if (bandwidth.rfind("fixed:", 0) != 0)
        throw CLI::ValidationError("--bandwidth", "expected silverman or fixed:H");
      cfg.slb.density.fixed_bandwidth =
          parse_suffix_number(bandwidth.substr(6), "--bandwidth");
    }

    if (hsic_rule == "cv") {
      cfg.slb.cv_rule = true;
    } else if (hsic_rule.rfind("quantile:", 0) == 0) {
      cfg.slb.screen.rule = {ScreenRule::Kind::quantile,
                             parse_suffix_number(hsic_rule.substr(9), "--hsic-rule")};
    } else if (hsic_rule.rfind("pvalue:", 0) == 0) {
      cfg.slb.screen.rule = {ScreenRule::Kind::pvalue_bh,
                             parse_suffix_number(hsic_rule.substr(7), "--hsic-rule")};
    } else {
      throw CLI::ValidationError("--hsic-rule", "expected cv, quantile:Q, or pvalue:A");
    }
    return cfg;
  }
};

TrainedModel fit_any(const std::string& method, const Dataset& ds, const MethodConfig& cfg,
                     Rng rng) {
  TrainedModel out;
  out.method = method;
  out.feature_names = ds.feature_names;
  if (method == "slb") {
    out.slb = fit_slb(ds, cfg.slb, rng);
  } else if (method == "slb-minus") {
    SlbConfig minus = cfg.slb;
    minus.cv_rule = false;
    minus.screen.rule = {ScreenRule::Kind::quantile, 0.0};
    out.slb = fit_slb(ds, minus, rng);
  } else if (method == "lu") {
    out.slb = fit_lu(ds, cfg.slb, rng);
  } else if (method == "nb") {
    out.nb = fit_naive_bayes(ds, cfg.slb.density);
  } else if (method == "tan") {
    out.tan = fit_tan(ds, cfg.slb.density, cfg.mi);
  } else if (method == "knn") {
    out.knn = fit_knn(ds, cfg.knn_k, cfg.knn_standardize);
  } else {
    throw DataError("unknown method: " + method);
  }
  return out;
}

// --- train ---

struct TrainOpts {
  std::string data;
  std::string label = "label";
  std::string positive;
  std::string out = "model.json";
  FitOpts fit;
};

int cmd_train(const GlobalOpts& g, const TrainOpts& o) {
  const Dataset ds = load_csv(o.data, o.label, o.positive);
  const MethodConfig cfg = o.fit.to_method_config();
  TrainedModel model = fit_any(o.fit.method, ds, cfg, Rng(g.seed));
  model.label_column = o.label;
  model.positive_label = o.positive;
  if (model.positive_label.empty()) {
    // reconstruct the auto choice: the raw value of any +1 row
    std::ifstream raw(o.data);
    std::string line;
    std::getline(raw, line);  // header
    std::size_t label_idx = 0;
    {
      std::size_t idx = 0;
      std::string cur;
      for (char c : line + ",") {
        if (c == ',') {
          if (cur == o.label) label_idx = idx;
          ++idx;
          cur.clear();
        } else if (c != '\r') {
          cur.push_back(c);
        }
      }
    }
    for (std::size_t r = 0; r < ds.n() && std::getline(raw, line); ++r) {
      if (ds.labels[r] != 1) continue;
      std::size_t idx = 0;
      std::string cur;
      for (char c : line + ",") {
        if (c == ',') {
          if (idx == label_idx) model.positive_label = cur;
          ++idx;
          cur.clear();
        } else if (c != '\r') {
          cur.push_back(c);
        }
      }
      break;
    }
  }
  save_trained_model(model, o.out);
  if (!g.quiet) {
    std::cout << "method: " << o.fit.method << "\n";
    std::cout << "samples: " << ds.n() << "  features: " << ds.d() << "\n";
    if (model.slb) {
      std::cout << "retained pairs: " << model.slb->screen.retained.size() << " of "
                << model.slb->screen.stats.size() << "\n";
      const Matrix* input = &ds.features;
      Matrix transformed;
      if (model.slb->standardize_record) {
        transformed = apply_standardize(*model.slb->standardize_record, ds).features;
        input = &transformed;
      }
      const Matrix F = map_matrix(model.slb->feature_map, *input);
      std::cout << "training hinge risk: " << hinge_risk(model.slb->linear, F, ds.labels)
                << "\n";
      std::cout << "training error: " << zero_one_risk(model.slb->linear, F, ds.labels)
                << "\n";
    } else {
      const auto pred = model.predict(ds.features);
      std::cout << "training error: " << score(pred, ds.labels).error_rate << "\n";
    }
    std::cout << "model written to " << o.out << "\n";
  }
  return 0;
}

// --- predict ---

struct PredictOpts {
  std::string model;
  std::string data;
  std::string out = "predictions.csv";
};

/// Reads a feature CSV for prediction. The model's label column may be
/// present (it is ignored for features but drives an error report); all of
/// the model's feature names must appear, in their training order.
std::pair<Matrix, std::vector<int>> load_prediction_csv(const std::string& path,
                                                        const TrainedModel& model) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  std::vector<std::string> header;
  {
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        header.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    header.push_back(cur);
  }
  std::size_t label_idx = header.size();
  std::vector<std::string> feature_header;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == model.label_column && label_idx == header.size())
      label_idx = i;
    else
      feature_header.push_back(header[i]);
  }
  if (feature_header != model.feature_names)
    throw DataError("feature columns do not match the model (expected " +
                    std::to_string(model.feature_names.size()) + " columns in training order)");

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    cells.push_back(cur);
    if (cells.size() != header.size())
      throw DataError("row " + std::to_string(rows) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == label_idx) {
        raw_labels.push_back(cells[i]);
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v);
      if (res.ec != std::errc() || res.ptr != cells[i].data() + cells[i].size() ||
          !std::isfinite(v))
        throw DataError("non-numeric cell '" + cells[i] + "' at row " + std::to_string(rows));
      values.push_back(v);
    }
  }
  if (rows == 0) throw DataError("no data rows in " + path);
  Matrix X(rows, model.feature_names.size());
  std::copy(values.begin(), values.end(), X.data.begin());

  std::vector<int> labels;
  if (label_idx != header.size()) {
    labels.resize(rows);
    const std::string positive = model.positive_label.empty() ? "1" : model.positive_label;
    for (std::size_t r = 0; r < rows; ++r)
      labels[r] = raw_labels[r] == positive ? 1 : -1;
  }
  return {X, labels};
}

int cmd_predict(const GlobalOpts& g, const PredictOpts& o) {
  const TrainedModel model = load_trained_model(o.model);
  const auto [X, labels] = load_prediction_csv(o.data, model);
  const auto values = model.decision_values(X);

  std::ofstream out(o.out);
  if (!out) throw DataError("cannot write file: " + o.out);
  out << "row_index,prediction,decision_value\n";
  std::vector<int> pred(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    pred[r] = values[r] >= 0.0 ? 1 : -1;
    out << r << ',' << pred[r] << ',' << format_double(values[r]) << '\n';
  }
  if (!g.quiet) {
    std::cout << "predicted " << values.size() << " rows -> " << o.out << "\n";
    if (!labels.empty()) {
      try {
        const EvalReport r = score(pred, labels);
        std::cout << "error against '" << model.label_column << "': " << r.error_rate
                  << "  ber: " << r.ber << "\n";
      } catch (const DataError&) {
        double wrong = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != labels[i];
        std::cout << "error against '" << model.label_column
                  << "': " << wrong / static_cast<double>(pred.size()) << "\n";
      }
    }
  }
  return 0;
}

// --- eval ---

struct EvalOpts {
  std::string data;
  std::string label = "label";
  std::string positive;
  int folds = 5;
  std::string methods = "slb";
  std::string metric = "ber";
  std::string out = "eval.csv";
  FitOpts fit;
};

int cmd_eval(const GlobalOpts& g, const EvalOpts& o) {
  const Dataset ds = load_csv(o.data, o.label, o.positive);
  const MethodConfig cfg = o.fit.to_method_config();
  const auto folds = stratified_kfold(ds, o.folds, Rng(g.seed).derive(1));

  std::ostringstream csv;
  csv << "method,fold,error,ber\n";
  for (const std::string& method : split_list(o.methods)) {
    const auto factory = make_method(method, cfg);
    const EvalReport r = cross_validate(ds, factory, folds, Rng(g.seed).derive(2));
    for (std::size_t f = 0; f < r.fold_errors.size(); ++f)
      csv << method << ',' << f << ',' << format_double(r.fold_errors[f]) << ','
          << format_double(r.fold_bers[f]) << '\n';
    csv << method << ",mean," << format_double(r.error_rate) << ','
        << format_double(r.ber) << '\n';
    csv << method << ",sd," << format_double(r.sd_error) << ','
        << format_double(r.sd_ber) << '\n';
    if (!g.quiet) {
      if (o.metric == "ber")
        std::cout << method << ": ber " << r.ber << " +- " << r.sd_ber << "\n";
      else
        std::cout << method << ": error " << r.error_rate << " +- " << r.sd_error << "\n";
    }
  }
  std::ofstream out(o.out);
  if (!out) throw DataError("cannot write file: " + o.out);
  out << csv.str();
  if (!g.quiet) std::cout << "report written to " << o.out << "\n";
  return 0;
}

// --- simulate ---

struct SimulateOpts {
  std::string structure = "forest";
  std::string cpd = "gaussian";
  std::string balance = "balanced";
  std::string shared = "none";
  std::vector<int> n{1000};
  int d = 20;
  int test_n = 1000;
  double edge_keep = 0.9;
  int replicates = 10;
  std::string methods = "slb";
  std::string out_dir = "sim_out";
  bool no_data = false;
  FitOpts fit;
};

int cmd_simulate(const GlobalOpts& g, const SimulateOpts& o) {
  std::vector<ExperimentDesign> grid;
  for (int n : o.n) {
    ExperimentDesign cell;
    cell.structure = o.structure == "general" ? BnStructure::general : BnStructure::forest;
    cell.cpd = o.cpd == "complex" ? CpdFamily::complex_mixture : CpdFamily::gaussian;
    cell.balanced = o.balance == "balanced";
    cell.shared_third = o.shared == "third";
    cell.n = n;
    cell.d = o.d;
    cell.test_n = o.test_n;
    cell.edge_keep = o.edge_keep;
    grid.push_back(cell);
  }
  const auto methods = split_list(o.methods);
  const MethodConfig cfg = o.fit.to_method_config();

  std::filesystem::create_directories(o.out_dir);
  const auto rows = run_factorial(grid, methods, o.replicates, g.seed, cfg);
  {
    std::ofstream out(o.out_dir + "/results.csv");
    if (!out) throw DataError("cannot write results.csv");
    out << factorial_csv(rows);
    std::ofstream raw(o.out_dir + "/raw.csv");
    raw << factorial_raw_csv(rows);
  }

  if (!o.no_data) {
    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
      for (int rep = 0; rep < o.replicates; ++rep) {
        const ReplicateData data = factorial_replicate(grid[cell], g.seed, cell, rep);
        const std::string dir = o.out_dir + "/cell" + std::to_string(cell) + "_rep" +
                                std::to_string(rep);
        std::filesystem::create_directories(dir);
        write_csv(data.train, dir + "/train.csv");
        write_csv(data.test, dir + "/test.csv");
        nlohmann::json manifest;
        manifest["structure"] = design_structure_name(grid[cell]);
        manifest["cpd"] = design_cpd_name(grid[cell]);
        manifest["balance"] = grid[cell].balanced ? "balanced" : "imbalanced";
        manifest["shared"] = grid[cell].shared_third ? "third" : "none";
        manifest["n"] = grid[cell].n;
        manifest["d"] = grid[cell].d;
        manifest["test_n"] = grid[cell].test_n;
        manifest["edge_keep"] = grid[cell].edge_keep;
        manifest["seed"] = g.seed;
        manifest["cell"] = cell;
        manifest["replicate"] = rep;
        std::ofstream mf(dir + "/manifest.json");
        mf << manifest.dump(1) << '\n';
      }
    }
  }
  if (!g.quiet) {
    std::cout << factorial_csv(rows);
    std::cout << "outputs in " << o.out_dir << "\n";
  }
  return 0;
}

// --- screen ---

struct ScreenOpts {
  std::string data;
  std::string label = "label";
  std::string positive;
  std::string bandwidth = "median";
  int permutations = 0;
  int max_samples = 1024;
  std::string out = "screen.csv";
};

int cmd_screen(const GlobalOpts& g, const ScreenOpts& o) {
  const Dataset ds = load_csv(o.data, o.label, o.positive);
  ScreenConfig cfg;
  cfg.rule = {ScreenRule::Kind::quantile, 0.0};
  cfg.max_samples = o.max_samples;
  if (o.bandwidth != "median") {
    if (o.bandwidth.rfind("fixed:", 0) != 0)
      throw CLI::ValidationError("--bandwidth", "expected median or fixed:S");
    cfg.kernel_bandwidth = parse_suffix_number(o.bandwidth.substr(6), "--bandwidth");
  }
  if (o.permutations > 0) {
    cfg.rule = {ScreenRule::Kind::pvalue_bh, 1.0};
    cfg.permutations = o.permutations;
  }
  const PairScreen screen = screen_pairs(ds, cfg, Rng(g.seed));
  std::ofstream out(o.out);
  if (!out) throw DataError("cannot write file: " + o.out);
  out << "pair_i,pair_j,class,statistic,p_value\n";
  for (const auto& s : screen.stats) {
    out << s.i << ',' << s.j << ",-1," << format_double(s.stat_neg) << ','
        << (s.p_neg >= 0 ? format_double(s.p_neg) : "") << '\n';
    out << s.i << ',' << s.j << ",1," << format_double(s.stat_pos) << ','
        << (s.p_pos >= 0 ? format_double(s.p_pos) : "") << '\n';
  }
  if (!g.quiet)
    std::cout << screen.stats.size() << " pairs screened -> " << o.out << "\n";
  return 0;
}

// --- ringnorm ---

struct RingnormOpts {
  int n = 7400;
  int d = 20;
  std::string out = "ringnorm.csv";
};

int cmd_ringnorm(const GlobalOpts& g, const RingnormOpts& o) {
  Rng rng(g.seed);
  const Dataset ds = gen_ringnorm(o.n, o.d, rng);
  write_csv(ds, o.out);
  if (!g.quiet)
    std::cout << "ringnorm dataset (" << ds.n() << " x " << ds.d() << ") -> " << o.out
              << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse log-bivariate density classification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "random seed (all runs are deterministic given it)");
  app.add_option("--threads", g.threads, "openmp thread cap (0 = library default)");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  TrainOpts train;
  auto* train_cmd = app.add_subcommand("train", "fit a classifier on a CSV file");
  train_cmd->add_option("--data", train.data, "training CSV")->required();
  train_cmd->add_option("--label", train.label, "label column name");
  train_cmd->add_option("--positive", train.positive,
                        "label value mapped to +1 (default: lexicographically larger)");
  train_cmd->add_option("--out", train.out, "model file to write");
  train.fit.add_flags(train_cmd);

  PredictOpts predict;
  auto* predict_cmd = app.add_subcommand("predict", "apply a trained model to a CSV file");
  predict_cmd->add_option("--model", predict.model, "model file")->required();
  predict_cmd->add_option("--data", predict.data, "input CSV")->required();
  predict_cmd->add_option("--out", predict.out, "predictions CSV to write");

  EvalOpts eval;
  auto* eval_cmd = app.add_subcommand("eval", "stratified cross-validation report");
  eval_cmd->add_option("--data", eval.data, "CSV file")->required();
  eval_cmd->add_option("--label", eval.label, "label column name");
  eval_cmd->add_option("--positive", eval.positive, "label value mapped to +1");
  eval_cmd->add_option("--folds", eval.folds, "fold count")->check(CLI::Range(2, 100));
  eval_cmd->add_option("--methods", eval.methods, "comma-separated method list");
  eval_cmd->add_option("--metric", eval.metric, "headline metric: ber or error")
      ->check(CLI::IsMember({"ber", "error"}));
  eval_cmd->add_option("--out", eval.out, "report CSV to write");
  eval.fit.add_flags(eval_cmd, /*with_method=*/false);

  SimulateOpts sim;
  auto* sim_cmd = app.add_subcommand("simulate", "synthetic benchmark experiments");
  sim_cmd->add_option("--structure", sim.structure, "forest or general")
      ->check(CLI::IsMember({"forest", "general"}));
  sim_cmd->add_option("--cpd", sim.cpd, "gaussian or complex")
      ->check(CLI::IsMember({"gaussian", "complex"}));
  sim_cmd->add_option("--balance", sim.balance, "balanced or imbalanced")
      ->check(CLI::IsMember({"balanced", "imbalanced"}));
  sim_cmd->add_option("--shared", sim.shared, "none or third (general only)")
      ->check(CLI::IsMember({"none", "third"}));
  sim_cmd->add_option("--n", sim.n, "training sizes (repeatable)");
  sim_cmd->add_option("--d", sim.d, "variable count");
  sim_cmd->add_option("--test-n", sim.test_n, "test set size");
  sim_cmd->add_option("--edge-keep", sim.edge_keep, "forest edge survival probability");
  sim_cmd->add_option("--replicates", sim.replicates, "replicates per cell");
  sim_cmd->add_option("--methods", sim.methods,
                      "comma-separated methods (slb, slb-minus, lu, nb, tan, knn, oracle)");
  sim_cmd->add_option("--out-dir", sim.out_dir, "output directory");
  sim_cmd->add_flag("--no-data", sim.no_data, "skip per-replicate train/test CSV emission");
  sim.fit.add_flags(sim_cmd, /*with_method=*/false);

  ScreenOpts screen;
  auto* screen_cmd = app.add_subcommand("screen", "pairwise dependence statistics as CSV");
  screen_cmd->add_option("--data", screen.data, "CSV file")->required();
  screen_cmd->add_option("--label", screen.label, "label column name");
  screen_cmd->add_option("--positive", screen.positive, "label value mapped to +1");
  screen_cmd->add_option("--bandwidth", screen.bandwidth, "median or fixed:S");
  screen_cmd->add_option("--permutations", screen.permutations,
                         "permutation count for p-values (0 = statistics only)");
  screen_cmd->add_option("--max-samples", screen.max_samples, "per-class sample cap");
  screen_cmd->add_option("--out", screen.out, "CSV to write");

  RingnormOpts ring;
  auto* ring_cmd = app.add_subcommand("ringnorm", "generate the ringnorm dataset");
  ring_cmd->add_option("--n", ring.n, "sample count");
  ring_cmd->add_option("--d", ring.d, "dimension (must be 20)");
  ring_cmd->add_option("--out", ring.out, "CSV to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  apply_threads(g);
  try {
    if (*train_cmd) return cmd_train(g, train);
    if (*predict_cmd) return cmd_predict(g, predict);
    if (*eval_cmd) return cmd_eval(g, eval);
    if (*sim_cmd) return cmd_simulate(g, sim);
    if (*screen_cmd) return cmd_screen(g, screen);
    if (*ring_cmd) return cmd_ringnorm(g, ring);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
