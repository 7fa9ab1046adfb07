#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "slb/rng.hpp"
#include "slb/svm.hpp"

using namespace slb;

namespace {

Matrix with_constant(const std::vector<double>& xs) {
  Matrix m(xs.size(), 2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m(i, 0) = xs[i];
    m(i, 1) = 1.0;
  }
  return m;
}

std::pair<Matrix, std::vector<int>> random_problem(int n, int m, Rng& rng) {
  Matrix X(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
  for (auto& v : X.data) v = rng.normal();
  for (std::size_t r = 0; r < X.rows; ++r) X(r, X.cols - 1) = 1.0;
  std::vector<int> y(static_cast<std::size_t>(n));
  for (auto& v : y) v = rng.uniform() < 0.5 ? -1 : 1;
  y[0] = 1;
  y[1] = -1;
  return {X, y};
}

/// Independent reference: plain batch subgradient descent on the same
/// objective with a 1/(lambda t) schedule, tracking the best iterate.
double subgradient_reference(const Matrix& X, const std::vector<int>& y, double lambda,
                             int epochs) {
  const std::size_t n = X.rows, m = X.cols;
  std::vector<double> w(m, 0.0);
  double best = tikhonov_objective(w, lambda, X, y);
  for (int t = 1; t <= epochs; ++t) {
    std::vector<double> g(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double margin = static_cast<double>(y[i]) *
                            [&] {
                              double s = 0.0;
                              for (std::size_t c = 0; c < m; ++c) s += w[c] * X(i, c);
                              return s;
                            }();
      if (margin < 1.0)
        for (std::size_t c = 0; c < m; ++c)
          g[c] -= static_cast<double>(y[i]) * X(i, c) / static_cast<double>(n);
    }
    for (std::size_t c = 0; c < m; ++c) g[c] += 2.0 * lambda * w[c];
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    for (std::size_t c = 0; c < m; ++c) w[c] -= eta * g[c];
    best = std::min(best, tikhonov_objective(w, lambda, X, y));
  }
  return best;
}

}  // namespace

TEST_CASE("separable toy problem reaches zero training error") {
  const Matrix X = with_constant({-2, -1, 1, 2});
  const std::vector<int> y{-1, -1, 1, 1};
  TrainConfig cfg;
  cfg.lambda = 1e-4;
  const LinearModel model = train_hinge(X, y, cfg);
  CHECK(zero_one_risk(model, X, y) == 0.0);
  CHECK(hinge_risk(model, X, y) < 0.05);

  // fine grid over the two weights cannot beat the solver
  double grid_best = 1e100;
  for (double w0 = -3.0; w0 <= 3.0; w0 += 0.01)
    for (double w1 = -3.0; w1 <= 3.0; w1 += 0.01) {
      const std::vector<double> w{w0, w1};
      grid_best = std::min(grid_best, tikhonov_objective(w, cfg.lambda, X, y));
    }
  CHECK(model.final_objective <= grid_best + 1e-9);
}

TEST_CASE("pure constant feature with balanced labels stays near zero") {
  Matrix X(10, 1);
  for (auto& v : X.data) v = 1.0;
  std::vector<int> y(10);
  for (std::size_t i = 0; i < 10; ++i) y[i] = i % 2 ? 1 : -1;
  const LinearModel model = train_hinge(X, y, {});
  CHECK(model.final_objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(model.weights[0]) < 1e-6);
  CHECK(zero_one_risk(model, X, y) == 0.5);
}

TEST_CASE("objective matches an independent subgradient reference") {
  Rng rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    auto [X, y] = random_problem(20, 5, rng);
    TrainConfig cfg;
    cfg.lambda = 0.5;
    const LinearModel model = train_hinge(X, y, cfg);
    const double ref = subgradient_reference(X, y, cfg.lambda, 20000);
    CHECK(model.final_objective ==
          doctest::Approx(ref).epsilon(1e-3));
  }
}

TEST_CASE("per-epoch objective trace is non-increasing") {
  Rng rng(7);
  auto [X, y] = random_problem(40, 6, rng);
  const LinearModel model = train_hinge(X, y, {});
  for (std::size_t e = 1; e < model.epoch_objectives.size(); ++e)
    CHECK(model.epoch_objectives[e] <= model.epoch_objectives[e - 1] + 1e-10);
  // stored objective equals a recomputation
  CHECK(model.final_objective ==
        doctest::Approx(tikhonov_objective(model.weights, model.lambda, X, y))
            .epsilon(1e-8));
}

TEST_CASE("zero-one risk never exceeds hinge risk") {
  Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    auto [X, y] = random_problem(30, 4, rng);
    const LinearModel model = train_hinge(X, y, {});
    CHECK(zero_one_risk(model, X, y) <= hinge_risk(model, X, y) + 1e-12);
  }
}

TEST_CASE("training is bit-deterministic") {
  Rng rng(17);
  auto [X, y] = random_problem(25, 5, rng);
  const LinearModel a = train_hinge(X, y, {});
  const LinearModel b = train_hinge(X, y, {});
  CHECK(a.weights == b.weights);
  CHECK(a.final_objective == b.final_objective);
}

TEST_CASE("no descent direction at the solution") {
  Rng rng(19);
  auto [X, y] = random_problem(30, 5, rng);
  const LinearModel model = train_hinge(X, y, {});
  Rng dirs(23);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> w = model.weights;
    std::vector<double> u(w.size());
    double norm = 0.0;
    for (auto& v : u) {
      v = dirs.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < w.size(); ++c) w[c] += 1e-4 * u[c] / norm;
    CHECK(tikhonov_objective(w, model.lambda, X, y) >=
          model.final_objective - 1e-6);
  }
}

TEST_CASE("ivanov with a huge radius matches unconstrained decisions") {
  const Matrix X = with_constant({-2, -1, 1, 2});
  const std::vector<int> y{-1, -1, 1, 1};
  const LinearModel constrained = train_hinge_ivanov(X, y, 1e6, {});
  TrainConfig tiny;
  tiny.lambda = 1e-6;
  const LinearModel unconstrained = train_hinge(X, y, tiny);
  for (std::size_t r = 0; r < X.rows; ++r)
    CHECK(decide(constrained, X.row(r)) == decide(unconstrained, X.row(r)));
  CHECK(hinge_risk(constrained, X, y) < 1e-3);
}

TEST_CASE("ivanov with radius zero returns the zero vector") {
  const Matrix X = with_constant({-1, 1});
  const std::vector<int> y{-1, 1};
  const LinearModel model = train_hinge_ivanov(X, y, 0.0, {});
  for (double w : model.weights) CHECK(w == 0.0);
  CHECK(model.final_objective == 1.0);
}

TEST_CASE("tikhonov and norm-matched ivanov agree on the hinge risk") {
  Rng rng(29);
  auto [X, y] = random_problem(30, 5, rng);
  TrainConfig cfg;
  cfg.lambda = 0.5;
  const LinearModel tik = train_hinge(X, y, cfg);
  double norm = 0.0;
  for (double w : tik.weights) norm += w * w;
  norm = std::sqrt(norm);
  const LinearModel iva = train_hinge_ivanov(X, y, norm, cfg);
  CHECK(hinge_risk(iva, X, y) ==
        doctest::Approx(hinge_risk(tik, X, y)).epsilon(1e-3));
}

TEST_CASE("decision rules") {
  LinearModel m;
  m.weights = {-5.0};
  const std::vector<double> t{1.0};
  CHECK(decide(m, t) == -1);

  LinearModel tie;
  tie.weights = {1.0, -1.0};
  const std::vector<double> x{1.0, 1.0};
  CHECK(decision_value(tie, x) == 0.0);
  CHECK(decide(tie, x) == 1);  // exact zero maps to +1

  Rng rng(31);
  LinearModel w1;
  w1.weights = {rng.normal(), rng.normal(), rng.normal()};
  LinearModel w2 = w1;
  for (auto& v : w2.weights) v *= 3.7;
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> p{rng.normal(), rng.normal(), rng.normal()};
    CHECK(decide(w1, p) == decide(w2, p));
  }
}

TEST_CASE("hinge risk values") {
  LinearModel m;
  m.weights = {1.0, 0.0};
  Matrix X(2, 2);
  X(0, 0) = 2.0;
  X(1, 0) = -3.0;
  const std::vector<int> y{1, -1};
  CHECK(hinge_risk(m, X, y) == 0.0);  // margins 2 and 3

  LinearModel zero;
  zero.weights = {0.0, 0.0};
  CHECK(hinge_risk(zero, X, y) == 1.0);

  Rng rng(37);
  Matrix R(15, 3);
  for (auto& v : R.data) v = rng.normal();
  std::vector<int> labels(15);
  for (auto& v : labels) v = rng.uniform() < 0.5 ? -1 : 1;
  LinearModel w;
  w.weights = {rng.normal(), rng.normal(), rng.normal()};
  double direct = 0.0;
  for (std::size_t i = 0; i < R.rows; ++i) {
    double dot = 0.0;
    for (std::size_t c = 0; c < 3; ++c) dot += w.weights[c] * R(i, c);
    direct += std::max(0.0, 1.0 - labels[i] * dot);
  }
  direct /= 15.0;
  CHECK(hinge_risk(w, R, labels) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("training preconditions") {
  Matrix X(3, 1);
  X(0, 0) = 1;
  X(1, 0) = 2;
  X(2, 0) = 3;
  CHECK_THROWS_AS(train_hinge(X, {1, 1, 1}, {}), FitError);  // single class
  Matrix bad = X;
  bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(train_hinge(bad, {1, -1, 1}, {}), FitError);
  LinearModel m;
  m.weights = {1.0, 2.0};
  const std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(decide(m, wrong), DataError);
}
