#include "slb/svm.hpp"

#include <algorithm>
#include <cmath>

namespace slb {

namespace {

void check_training_inputs(const Matrix& X, const std::vector<int>& y) {
  if (X.rows < 2) throw FitError("SVM needs at least 2 samples");
  if (X.rows != y.size()) throw FitError("feature/label count mismatch");
  if (!all_finite(X.data)) throw FitError("SVM features contain non-finite values");
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == -1) neg = true;
    else throw FitError("labels must be -1 or +1");
  }
  if (!pos || !neg) throw FitError("single-class input: both labels required");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double tikhonov_objective(std::span<const double> w, double lambda, const Matrix& X,
                          const std::vector<int>& y) {
  double risk = 0.0;
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double m = static_cast<double>(y[i]) * dot(w, X.row(i));
    risk += std::max(0.0, 1.0 - m);
  }
  risk /= static_cast<double>(X.rows);
  double nrm2 = 0.0;
  for (double v : w) nrm2 += v * v;
  return risk + lambda * nrm2;
}

LinearModel train_hinge(const Matrix& X, const std::vector<int>& y,
                        const TrainConfig& cfg) {
  check_training_inputs(X, y);
  if (cfg.lambda <= 0.0) throw FitError("lambda must be positive");
  const std::size_t n = X.rows, m = X.cols;
  const double C = 1.0 / (2.0 * cfg.lambda * static_cast<double>(n));

  std::vector<double> alpha(n, 0.0), w(m, 0.0), qdiag(n);
  for (std::size_t i = 0; i < n; ++i) qdiag[i] = dot(X.row(i), X.row(i));

  LinearModel model;
  model.lambda = cfg.lambda;
  std::vector<double> w_best = w;
  double best_obj = tikhonov_objective(w, cfg.lambda, X, y);
  double prev_obj = best_obj;

  int epoch = 0;
  for (; epoch < cfg.max_epochs; ++epoch) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (qdiag[i] == 0.0) continue;
      const double yi = static_cast<double>(y[i]);
      const double grad = yi * dot(w, X.row(i)) - 1.0;
      if ((alpha[i] <= 0.0 && grad >= 0.0) || (alpha[i] >= C && grad <= 0.0)) continue;
      const double a_new = std::clamp(alpha[i] - grad / qdiag[i], 0.0, C);
      const double delta = a_new - alpha[i];
      if (delta == 0.0) continue;
      const auto row = X.row(i);
      for (std::size_t c = 0; c < m; ++c) w[c] += delta * yi * row[c];
      alpha[i] = a_new;
      moved = true;
    }
    // best iterate is what gets reported and returned; the stopping test
    // watches the current iterate, which keeps moving while the dual climbs
    const double obj = tikhonov_objective(w, cfg.lambda, X, y);
    if (obj < best_obj) {
      best_obj = obj;
      w_best = w;
    }
    model.epoch_objectives.push_back(best_obj);
    const double rel = std::abs(prev_obj - obj) / std::max(1.0, std::abs(prev_obj));
    prev_obj = obj;
    if (!moved || rel < cfg.tolerance) {
      ++epoch;
      break;
    }
  }
  model.weights = std::move(w_best);
  model.epochs = epoch;
  model.final_objective = tikhonov_objective(model.weights, cfg.lambda, X, y);
  return model;
}

LinearModel train_hinge_ivanov(const Matrix& X, const std::vector<int>& y, double radius,
                               const TrainConfig& cfg) {
  check_training_inputs(X, y);
  if (radius < 0.0) throw FitError("radius must be non-negative");

  auto norm2 = [](const std::vector<double>& w) {
    double s = 0.0;
    for (double v : w) s += v * v;
    return std::sqrt(s);
  };
  auto finish = [&](LinearModel m) {
    m.final_objective = hinge_risk(m, X, y);
    return m;
  };

  if (radius == 0.0) {
    LinearModel m;
    m.weights.assign(X.cols, 0.0);
    m.lambda = 0.0;
    m.epochs = 0;
    return finish(m);
  }

  TrainConfig inner = cfg;
  const double lambda_min = 1e-6;
  inner.lambda = lambda_min;
  LinearModel free = train_hinge(X, y, inner);
  if (norm2(free.weights) <= radius) return finish(free);

  // ||w(lambda)|| decreases in lambda; bracket then bisect on the path.
  double lo = lambda_min;  // norm(lo) > radius
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    inner.lambda = hi;
    if (norm2(train_hinge(X, y, inner).weights) <= radius) break;
    lo = hi;
    hi *= 4.0;
  }
  LinearModel best;
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    inner.lambda = mid;
    LinearModel cand = train_hinge(X, y, inner);
    if (norm2(cand.weights) <= radius) {
      hi = mid;
      best = std::move(cand);
    } else {
      lo = mid;
    }
    if (hi / lo < 1.0 + 1e-10) break;
  }
  if (best.weights.empty()) {
    inner.lambda = hi;
    best = train_hinge(X, y, inner);
  }
  return finish(best);
}

double decision_value(const LinearModel& model, std::span<const double> t) {
  if (t.size() != model.weights.size()) throw DataError("feature dimension mismatch");
  return dot(model.weights, t);
}

int decide(const LinearModel& model, std::span<const double> t) {
  return decision_value(model, t) >= 0.0 ? 1 : -1;
}

double hinge_risk(const LinearModel& model, const Matrix& X, const std::vector<int>& y) {
  if (X.cols != model.weights.size()) throw DataError("feature dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double m = static_cast<double>(y[i]) * dot(model.weights, X.row(i));
    s += std::max(0.0, 1.0 - m);
  }
  return s / static_cast<double>(X.rows);
}

double zero_one_risk(const LinearModel& model, const Matrix& X, const std::vector<int>& y) {
  if (X.cols != model.weights.size()) throw DataError("feature dimension mismatch");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < X.rows; ++i) wrong += decide(model, X.row(i)) != y[i];
  return static_cast<double>(wrong) / static_cast<double>(X.rows);
}

}  // namespace slb
