#include "slb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slb {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

double normal_log_pdf(double x, double mu) {
  const double z = x - mu;
  return -0.5 * z * z - kLogSqrt2Pi;
}

double t5_log_pdf(double x) {
  // log Gamma(3) - log Gamma(5/2) - 0.5 log(5 pi) - 3 log(1 + x^2/5)
  static const double log_coef =
      std::lgamma(3.0) - std::lgamma(2.5) - 0.5 * std::log(5.0 * M_PI);
  return log_coef - 3.0 * std::log1p(x * x / 5.0);
}

/// Splits parent values into the sums the complex mixture uses: the full
/// parent sum for the t component, and the two sub-sums (z+1 / z-1 in the
/// single-parent case, z1+z2 / z2+z3 with three parents) for the normals.
struct ParentSums {
  double all = 0.0;
  double a = 0.0;
  double b = 0.0;
};

ParentSums parent_sums(std::span<const double> z) {
  ParentSums s;
  for (double v : z) s.all += v;
  if (z.size() == 1) {
    s.a = z[0] + 1.0;
    s.b = z[0] - 1.0;
  } else if (z.size() >= 3) {
    s.a = z[0] + z[1];
    s.b = z[1] + z[2];
  } else {
    s.a = s.b = s.all;
  }
  return s;
}

}  // namespace

double complex_cpd_log_pdf(double x, double sum_all, double sum_a, double sum_b) {
  const double lt = std::log(0.5) + t5_log_pdf(x - sum_all);
  const double lm = std::log(0.25) +
                    std::log(std::exp(normal_log_pdf(x, sum_a) - normal_log_pdf(x, sum_b)) + 1.0) +
                    normal_log_pdf(x, sum_b);
  // log(exp(lt) + exp(lm)) stably
  const double hi = std::max(lt, lm);
  return hi + std::log1p(std::exp(std::min(lt, lm) - hi));
}

double BnSpec::log_density(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d) throw DataError("dimension mismatch");
  double total = 0.0;
  std::vector<double> z;
  for (int node = 0; node < d; ++node) {
    const auto& par = parents[node];
    if (par.empty()) {
      total += normal_log_pdf(x[node], 0.0);
      continue;
    }
    z.clear();
    for (int p : par) z.push_back(x[p]);
    const ParentSums s = parent_sums(z);
    if (family == CpdFamily::gaussian) {
      total += normal_log_pdf(x[node], s.all);
    } else {
      total += complex_cpd_log_pdf(x[node], s.all, s.a, s.b);
    }
  }
  return total;
}

BnSpec random_forest_bn(int d, double edge_keep, CpdFamily family, Rng& rng) {
  if (d < 1) throw DataError("d must be >= 1");
  BnSpec spec;
  spec.d = d;
  spec.family = family;
  spec.structure_seed = rng.seed();
  spec.parents.assign(d, {});

  // Uniform labeled tree from a Prufer sequence, then independent edge
  // deletion with probability 1 - edge_keep.
  std::vector<std::pair<int, int>> edges;
  if (d >= 2) {
    std::vector<int> prufer(std::max(0, d - 2));
    for (int& p : prufer) p = static_cast<int>(rng.index(static_cast<std::size_t>(d)));
    std::vector<int> degree(d, 1);
    for (int p : prufer) ++degree[p];
    std::vector<std::pair<int, int>> tree;
    std::vector<bool> used(d, false);
    for (int p : prufer) {
      for (int leaf = 0; leaf < d; ++leaf) {
        if (degree[leaf] == 1 && !used[leaf]) {
          tree.emplace_back(leaf, p);
          used[leaf] = true;
          --degree[p];
          break;
        }
      }
    }
    int a = -1, b = -1;
    for (int i = 0; i < d; ++i)
      if (degree[i] == 1 && !used[i]) (a < 0 ? a : b) = i;
    tree.emplace_back(a, b);
    for (const auto& e : tree)
      if (rng.uniform() < edge_keep) edges.push_back(e);
  }

  // Orient each component away from its lowest-index node.
  std::vector<std::vector<int>> adj(d);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> state(d, 0);  // 0 unvisited
  spec.topo_order.clear();
  for (int root = 0; root < d; ++root) {
    if (state[root]) continue;
    std::vector<int> queue{root};
    state[root] = 1;
    spec.topo_order.push_back(root);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int v = queue[q];
      std::vector<int> nbrs = adj[v];
      std::sort(nbrs.begin(), nbrs.end());
      for (int nb : nbrs) {
        if (state[nb]) continue;
        state[nb] = 1;
        spec.parents[nb] = {v};
        spec.topo_order.push_back(nb);
        queue.push_back(nb);
      }
    }
  }
  return spec;
}

BnSpec random_general_bn(int d, CpdFamily family, Rng& rng) {
  if (d < 1) throw DataError("d must be >= 1");
  BnSpec spec;
  spec.d = d;
  spec.family = family;
  spec.structure_seed = rng.seed();
  spec.parents.assign(d, {});
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  spec.topo_order = order;
  for (int pos = 3; pos < d; ++pos) {
    // 3 distinct predecessors, sampled without replacement
    std::vector<int> pool(order.begin(), order.begin() + pos);
    std::vector<int> chosen;
    for (int k = 0; k < 3; ++k) {
      const auto idx = rng.index(pool.size());
      chosen.push_back(pool[idx]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    std::sort(chosen.begin(), chosen.end());
    spec.parents[order[pos]] = chosen;
  }
  return spec;
}

std::pair<BnSpec, BnSpec> make_class_pair(const ExperimentDesign& design, Rng& rng) {
  if (design.structure == BnStructure::forest) {
    if (design.shared_third)
      throw DataError("shared structure is part of the general-BN design only");
    Rng rp = rng.derive(101);
    Rng rn = rng.derive(102);
    return {random_forest_bn(design.d, design.edge_keep, design.cpd, rp),
            random_forest_bn(design.d, design.edge_keep, design.cpd, rn)};
  }
  Rng rp = rng.derive(201);
  BnSpec pos = random_general_bn(design.d, design.cpd, rp);
  if (!design.shared_third) {
    Rng rn = rng.derive(202);
    return {pos, random_general_bn(design.d, design.cpd, rn)};
  }
  // Same topological order for both classes; floor(d/3) nodes of the
  // negative class copy the positive class's parent sets, the rest are
  // redrawn from the common order.
  Rng rn = rng.derive(203);
  BnSpec neg;
  neg.d = design.d;
  neg.family = design.cpd;
  neg.structure_seed = rn.seed();
  neg.topo_order = pos.topo_order;
  neg.parents.assign(design.d, {});
  const auto& order = pos.topo_order;
  for (int p = 3; p < design.d; ++p) {
    std::vector<int> pool(order.begin(), order.begin() + p);
    std::vector<int> chosen;
    for (int k = 0; k < 3; ++k) {
      const auto idx = rn.index(pool.size());
      chosen.push_back(pool[idx]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    std::sort(chosen.begin(), chosen.end());
    neg.parents[order[p]] = chosen;
  }
  std::vector<int> nodes(design.d);
  std::iota(nodes.begin(), nodes.end(), 0);
  rn.shuffle(nodes);
  const int n_shared = design.d / 3;
  for (int s = 0; s < n_shared; ++s) neg.parents[nodes[s]] = pos.parents[nodes[s]];
  return {pos, neg};
}

Matrix sample_bn(const BnSpec& spec, int n, Rng& rng) {
  Matrix out(static_cast<std::size_t>(n), static_cast<std::size_t>(spec.d));
  std::vector<double> z;
  for (int r = 0; r < n; ++r) {
    auto row = out.row(static_cast<std::size_t>(r));
    for (int node : spec.topo_order) {
      const auto& par = spec.parents[node];
      if (par.empty()) {
        row[node] = rng.normal();
        continue;
      }
      z.clear();
      for (int p : par) z.push_back(row[p]);
      const ParentSums s = parent_sums(z);
      if (spec.family == CpdFamily::gaussian) {
        row[node] = s.all + rng.normal();
      } else if (rng.uniform() < 0.5) {
        row[node] = rng.student_t(5) + s.all;
      } else {
        const double center = rng.uniform() < 0.5 ? s.a : s.b;
        row[node] = center + rng.normal();
      }
    }
  }
  return out;
}

namespace {

Dataset assemble(const Matrix& pos, const Matrix& neg, int d) {
  Dataset ds;
  ds.features = Matrix(pos.rows + neg.rows, static_cast<std::size_t>(d));
  ds.labels.resize(pos.rows + neg.rows);
  for (std::size_t r = 0; r < pos.rows; ++r) {
    for (std::size_t c = 0; c < pos.cols; ++c) ds.features(r, c) = pos(r, c);
    ds.labels[r] = 1;
  }
  for (std::size_t r = 0; r < neg.rows; ++r) {
    for (std::size_t c = 0; c < neg.cols; ++c) ds.features(pos.rows + r, c) = neg(r, c);
    ds.labels[pos.rows + r] = -1;
  }
  ds.feature_names.resize(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) ds.feature_names[c] = "x" + std::to_string(c + 1);
  return ds;
}

}  // namespace

std::pair<Dataset, Dataset> gen_experiment_from_specs(const BnSpec& pos, const BnSpec& neg,
                                                      const ExperimentDesign& design,
                                                      Rng& rng) {
  const double pos_frac = design.balanced ? 0.5 : 0.75;
  const int train_pos =
      static_cast<int>(std::ceil(pos_frac * static_cast<double>(design.n)));
  const int train_neg = design.n - train_pos;
  const int test_pos = (design.test_n + 1) / 2;
  const int test_neg = design.test_n - test_pos;

  Rng r_train = rng.derive(301);
  Rng r_test = rng.derive(302);
  Dataset train = assemble(sample_bn(pos, train_pos, r_train),
                           sample_bn(neg, train_neg, r_train), design.d);
  Dataset test = assemble(sample_bn(pos, test_pos, r_test),
                          sample_bn(neg, test_neg, r_test), design.d);
  return {train, test};
}

std::pair<Dataset, Dataset> gen_experiment(const ExperimentDesign& design, Rng& rng) {
  auto [pos, neg] = make_class_pair(design, rng);
  return gen_experiment_from_specs(pos, neg, design, rng);
}

Dataset gen_ringnorm(int n, int d, Rng& rng) {
  if (d != 20) throw DataError("Ringnorm is defined for d = 20");
  if (n < 2) throw DataError("Ringnorm needs n >= 2");
  const int n_pos = (n + 1) / 2;
  const int n_neg = n - n_pos;
  const double a = 2.0 / std::sqrt(20.0);
  Matrix pos(static_cast<std::size_t>(n_pos), 20);
  for (std::size_t r = 0; r < pos.rows; ++r)
    for (std::size_t c = 0; c < 20; ++c) pos(r, c) = a + rng.normal();
  Matrix neg(static_cast<std::size_t>(n_neg), 20);
  for (std::size_t r = 0; r < neg.rows; ++r)
    for (std::size_t c = 0; c < 20; ++c) neg(r, c) = 2.0 * rng.normal();
  return assemble(pos, neg, 20);
}

Matrix implied_covariance(const BnSpec& spec) {
  if (spec.family != CpdFamily::gaussian)
    throw FitError("implied covariance requires the Gaussian family");
  const auto d = static_cast<std::size_t>(spec.d);
  // x = A x + e  =>  x = M e with M = (I - A)^-1, built in topological order
  Matrix M(d, d);
  for (int node : spec.topo_order) {
    const auto ni = static_cast<std::size_t>(node);
    M(ni, ni) = 1.0;
    for (int p : spec.parents[node]) {
      const auto pi = static_cast<std::size_t>(p);
      for (std::size_t c = 0; c < d; ++c) M(ni, c) += M(pi, c);
    }
  }
  Matrix cov(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < d; ++t) s += M(i, t) * M(j, t);
      cov(i, j) = s;
    }
  return cov;
}

namespace {

/// Cholesky factor (lower) of a positive-definite matrix.
Matrix cholesky(const Matrix& a) {
  const std::size_t d = a.rows;
  Matrix l(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t t = 0; t < j; ++t) s -= l(i, t) * l(j, t);
      if (i == j) {
        if (s <= 0.0) throw FitError("covariance not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

}  // namespace

double mvn_log_pdf(std::span<const double> x, const Matrix& cov) {
  const std::size_t d = cov.rows;
  if (x.size() != d) throw DataError("dimension mismatch");
  const Matrix l = cholesky(cov);
  // Solve L y = x, accumulate quadratic form and log determinant.
  std::vector<double> ysol(d);
  double quad = 0.0, logdet = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double s = x[i];
    for (std::size_t t = 0; t < i; ++t) s -= l(i, t) * ysol[t];
    ysol[i] = s / l(i, i);
    quad += ysol[i] * ysol[i];
    logdet += std::log(l(i, i));
  }
  return -0.5 * quad - logdet - 0.5 * static_cast<double>(d) * std::log(2.0 * M_PI);
}

double gaussian_marginal_log_pdf(const Matrix& cov, int i, double x) {
  const double var = cov(static_cast<std::size_t>(i), static_cast<std::size_t>(i));
  return -0.5 * x * x / var - 0.5 * std::log(var) - kLogSqrt2Pi;
}

double gaussian_pair_log_pdf(const Matrix& cov, int i, int j, double xi, double xj) {
  const auto a = static_cast<std::size_t>(i);
  const auto b = static_cast<std::size_t>(j);
  const double sii = cov(a, a), sjj = cov(b, b), sij = cov(a, b);
  const double det = sii * sjj - sij * sij;
  if (det <= 0.0) throw FitError("degenerate pair covariance");
  const double quad = (sjj * xi * xi - 2.0 * sij * xi * xj + sii * xj * xj) / det;
  return -0.5 * quad - 0.5 * std::log(det) - std::log(2.0 * M_PI);
}

}  // namespace slb
