#include "slb/eval.hpp"

#include <cmath>
#include <sstream>

namespace slb {

EvalReport score(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) throw DataError("prediction/label length mismatch");
  if (predictions.empty()) throw DataError("empty prediction set");
  EvalReport r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1)
      (predictions[i] == 1 ? r.tp : r.fn)++;
    else
      (predictions[i] == -1 ? r.tn : r.fp)++;
  }
  if (r.tp + r.fn == 0 || r.tn + r.fp == 0)
    throw DataError("BER undefined: labels contain a single class");
  const auto n = static_cast<double>(labels.size());
  r.error_rate = static_cast<double>(r.fp + r.fn) / n;
  r.sensitivity = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  r.specificity = static_cast<double>(r.tn) / static_cast<double>(r.tn + r.fp);
  r.ber = 1.0 - 0.5 * (r.sensitivity + r.specificity);
  return r;
}

EvalReport cross_validate(const Dataset& ds, const ClassifierFactory& factory,
                          const StratifiedFolds& folds, Rng rng) {
  EvalReport total;
  for (int f = 0; f < folds.k; ++f) {
    try {
      auto [train, test] = split_fold(ds, folds, f);
      const auto model = factory(train, rng.derive(static_cast<std::uint64_t>(f)));
      const auto pred = model->predict(test.features);
      const EvalReport fold = score(pred, test.labels);
      total.tp += fold.tp;
      total.fp += fold.fp;
      total.tn += fold.tn;
      total.fn += fold.fn;
      total.fold_errors.push_back(fold.error_rate);
      total.fold_bers.push_back(fold.ber);
    } catch (const std::runtime_error& e) {
      throw FitError("fold " + std::to_string(f) + ": " + e.what());
    }
  }
  total.error_rate = mean(total.fold_errors);
  total.ber = mean(total.fold_bers);
  total.sd_error = stddev(total.fold_errors, /*unbiased=*/true);
  total.sd_ber = stddev(total.fold_bers, /*unbiased=*/true);
  const auto pos = static_cast<double>(total.tp + total.fn);
  const auto neg = static_cast<double>(total.tn + total.fp);
  total.sensitivity = pos > 0 ? static_cast<double>(total.tp) / pos : 0.0;
  total.specificity = neg > 0 ? static_cast<double>(total.tn) / neg : 0.0;
  return total;
}

namespace {

struct SlbClassifier : Classifier {
  SlbModel model;
  std::vector<int> predict(const Matrix& X) const override { return slb_predict(model, X); }
};

struct NbClassifier : Classifier {
  NaiveBayesModel model;
  std::vector<int> predict(const Matrix& X) const override {
    std::vector<int> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) out[r] = nb_decide(model, X.row(r));
    return out;
  }
};

struct TanClassifier : Classifier {
  TanModel model;
  std::vector<int> predict(const Matrix& X) const override {
    std::vector<int> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) out[r] = tan_decide(model, X.row(r));
    return out;
  }
};

struct KnnClassifier : Classifier {
  KnnModel model;
  std::vector<int> predict(const Matrix& X) const override {
    if (X.cols != model.train.cols) throw DataError("point dimension mismatch");
    std::vector<int> out(X.rows);
    const auto n = static_cast<long>(X.rows);
#pragma omp parallel for schedule(static)
    for (long r = 0; r < n; ++r)
      out[static_cast<std::size_t>(r)] = knn_decide(model, X.row(static_cast<std::size_t>(r)));
    return out;
  }
};

struct OracleClassifier : Classifier {
  BnSpec pos, neg;
  double log_prior_ratio = 0.0;
  std::vector<int> predict(const Matrix& X) const override {
    std::vector<int> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r)
      out[r] = oracle_bayes(pos, neg, log_prior_ratio, X.row(r));
    return out;
  }
};

}  // namespace

ClassifierFactory make_method(const std::string& name, const MethodConfig& cfg) {
  if (name == "slb") {
    return [cfg](const Dataset& train, Rng rng) -> std::unique_ptr<Classifier> {
      auto c = std::make_unique<SlbClassifier>();
      c->model = fit_slb(train, cfg.slb, rng);
      return c;
    };
  }
  if (name == "slb-minus") {
    return [cfg](const Dataset& train, Rng rng) -> std::unique_ptr<Classifier> {
      SlbConfig minus = cfg.slb;
      minus.cv_rule = false;
      minus.screen.rule = {ScreenRule::Kind::quantile, 0.0};
      auto c = std::make_unique<SlbClassifier>();
      c->model = fit_slb(train, minus, rng);
      return c;
    };
  }
  if (name == "lu") {
    return [cfg](const Dataset& train, Rng rng) -> std::unique_ptr<Classifier> {
      auto c = std::make_unique<SlbClassifier>();
      c->model = fit_lu(train, cfg.slb, rng);
      return c;
    };
  }
  if (name == "nb") {
    return [cfg](const Dataset& train, Rng) -> std::unique_ptr<Classifier> {
      auto c = std::make_unique<NbClassifier>();
      c->model = fit_naive_bayes(train, cfg.slb.density);
      return c;
    };
  }
  if (name == "tan") {
    return [cfg](const Dataset& train, Rng) -> std::unique_ptr<Classifier> {
      auto c = std::make_unique<TanClassifier>();
      c->model = fit_tan(train, cfg.slb.density, cfg.mi);
      return c;
    };
  }
  if (name == "knn") {
    return [cfg](const Dataset& train, Rng) -> std::unique_ptr<Classifier> {
      auto c = std::make_unique<KnnClassifier>();
      c->model = fit_knn(train, cfg.knn_k, cfg.knn_standardize);
      return c;
    };
  }
  throw DataError("unknown method: " + name);
}

std::string design_structure_name(const ExperimentDesign& d) {
  return d.structure == BnStructure::forest ? "forest" : "general";
}

std::string design_cpd_name(const ExperimentDesign& d) {
  return d.cpd == CpdFamily::gaussian ? "gaussian" : "complex";
}

ReplicateData factorial_replicate(const ExperimentDesign& design, std::uint64_t seed,
                                  std::size_t cell, int rep) {
  Rng root(Rng::mix(Rng::mix(seed, cell), static_cast<std::uint64_t>(rep)));
  ReplicateData data;
  auto specs = make_class_pair(design, root);
  data.pos = std::move(specs.first);
  data.neg = std::move(specs.second);
  Rng sample_stream = root.derive(1);
  auto sets = gen_experiment_from_specs(data.pos, data.neg, design, sample_stream);
  data.train = std::move(sets.first);
  data.test = std::move(sets.second);
  return data;
}

std::vector<FactorialRow> run_factorial(const std::vector<ExperimentDesign>& grid,
                                        const std::vector<std::string>& methods,
                                        int replicates, std::uint64_t seed,
                                        const MethodConfig& cfg) {
  if (grid.empty()) throw DataError("empty design grid");
  if (methods.empty()) throw DataError("no methods requested");
  if (replicates < 1) throw DataError("replicates must be >= 1");

  // errors[cell][method][replicate], filled replicate-parallel
  std::vector<std::vector<std::vector<double>>> errors(
      grid.size(), std::vector<std::vector<double>>(methods.size(),
                                                    std::vector<double>(replicates, 0.0)));
  std::string failure;

  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const ExperimentDesign& design = grid[cell];
#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < replicates; ++rep) {
      try {
        Rng root(Rng::mix(Rng::mix(seed, cell), static_cast<std::uint64_t>(rep)));
        const ReplicateData data = factorial_replicate(design, seed, cell, rep);
        for (std::size_t m = 0; m < methods.size(); ++m) {
          std::vector<int> pred;
          if (methods[m] == "oracle") {
            const double prior =
                design.balanced ? 0.0 : std::log(0.75 / 0.25);
            OracleClassifier oc;
            oc.pos = data.pos;
            oc.neg = data.neg;
            oc.log_prior_ratio = prior;
            pred = oc.predict(data.test.features);
          } else {
            const auto factory = make_method(methods[m], cfg);
            const auto model = factory(data.train, root.derive(100 + m));
            pred = model->predict(data.test.features);
          }
          errors[cell][m][rep] = score(pred, data.test.labels).error_rate;
        }
      } catch (const std::runtime_error& e) {
#pragma omp critical
        if (failure.empty())
          failure = "cell " + std::to_string(cell) + ", replicate " + std::to_string(rep) +
                    ": " + e.what();
      }
    }
    if (!failure.empty()) throw FitError(failure);
  }

  std::vector<FactorialRow> rows;
  for (std::size_t cell = 0; cell < grid.size(); ++cell)
    for (std::size_t m = 0; m < methods.size(); ++m) {
      FactorialRow row;
      row.design = grid[cell];
      row.method = methods[m];
      row.raw_errors = errors[cell][m];
      row.mean_error = mean(row.raw_errors);
      row.sd_error = stddev(row.raw_errors, /*unbiased=*/true);
      row.replicates = replicates;
      row.seed = seed;
      rows.push_back(row);
    }
  return rows;
}

std::string factorial_csv(const std::vector<FactorialRow>& rows) {
  std::ostringstream out;
  out << "structure,cpd,balance,shared,n,method,mean_error,sd_error,replicates,seed\n";
  for (const auto& r : rows) {
    out << design_structure_name(r.design) << ',' << design_cpd_name(r.design) << ','
        << (r.design.balanced ? "balanced" : "imbalanced") << ','
        << (r.design.shared_third ? "third" : "none") << ',' << r.design.n << ','
        << r.method << ',' << format_double(r.mean_error) << ','
        << format_double(r.sd_error) << ',' << r.replicates << ',' << r.seed << '\n';
  }
  return out.str();
}

std::string factorial_raw_csv(const std::vector<FactorialRow>& rows) {
  std::ostringstream out;
  out << "structure,cpd,balance,shared,n,method,replicate,error\n";
  for (const auto& r : rows)
    for (std::size_t rep = 0; rep < r.raw_errors.size(); ++rep)
      out << design_structure_name(r.design) << ',' << design_cpd_name(r.design) << ','
          << (r.design.balanced ? "balanced" : "imbalanced") << ','
          << (r.design.shared_third ? "third" : "none") << ',' << r.design.n << ','
          << r.method << ',' << rep << ',' << format_double(r.raw_errors[rep]) << '\n';
  return out.str();
}

}  // namespace slb
