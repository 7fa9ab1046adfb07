#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slb/common.hpp"

namespace slb {

struct TrainConfig {
  double lambda = 0.5;
  int max_epochs = 1000;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
};

/// Linear model over mapped features. The constant feature's weight plays
/// the role of the negated intercept, and it is regularized like every
/// other coordinate.
struct LinearModel {
  std::vector<double> weights;
  double lambda = 0.5;
  double final_objective = 0.0;
  int epochs = 0;
  std::vector<double> epoch_objectives;  // best objective after each epoch
};

/// Minimizes (1/n) sum max(0, 1 - y w.t) + lambda ||w||^2 by deterministic
/// cyclic dual coordinate descent. The best-objective iterate is tracked
/// and returned, so the per-epoch objective trace is non-increasing.
LinearModel train_hinge(const Matrix& features, const std::vector<int>& labels,
                        const TrainConfig& cfg);

/// Minimizes the empirical hinge risk subject to ||w||_2 <= radius by
/// walking the Tikhonov regularization path: bisection on lambda until the
/// solution norm hits the radius (or the unconstrained-path solution is
/// already feasible). final_objective is the empirical hinge risk.
LinearModel train_hinge_ivanov(const Matrix& features, const std::vector<int>& labels,
                               double radius, const TrainConfig& cfg);

double decision_value(const LinearModel& model, std::span<const double> t);

/// sign(w.t); an exact zero maps to +1.
int decide(const LinearModel& model, std::span<const double> t);

/// (1/n) sum max(0, 1 - y w.t)
double hinge_risk(const LinearModel& model, const Matrix& features,
                  const std::vector<int>& labels);

double zero_one_risk(const LinearModel& model, const Matrix& features,
                     const std::vector<int>& labels);

/// Tikhonov objective of an arbitrary weight vector (test hook).
double tikhonov_objective(std::span<const double> w, double lambda, const Matrix& features,
                          const std::vector<int>& labels);

}  // namespace slb
