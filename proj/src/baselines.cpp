#include "slb/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace slb {

double normal_quantile(double p) {
  // Wichura (1988), algorithm AS241 PPND16.
  if (p <= 0.0 || p >= 1.0) throw DataError("normal quantile needs p in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

namespace {

/// Average ranks (ties share the mean rank), 1-based.
std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) throw FitError("degenerate feature: zero variance");
  return sab / std::sqrt(saa * sbb);
}

double copula_mi(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  std::vector<double> sx(n), sy(n);
  const double denom = static_cast<double>(n) + 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx[i] = normal_quantile(rx[i] / denom);
    sy[i] = normal_quantile(ry[i] / denom);
  }
  double rho = pearson(sx, sy);
  rho = std::clamp(rho, -0.999999999, 0.999999999);
  return -0.5 * std::log1p(-rho * rho);
}

double kde_grid_mi(std::span<const double> x, std::span<const double> y, int nodes) {
  const Kde2d joint = fit_kde2d(x, y);
  const Kde1d fx = fit_kde1d(x);
  const Kde1d fy = fit_kde1d(y);
  const auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
  const auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
  const double ax = *xlo - 3.0 * joint.hu, bx = *xhi + 3.0 * joint.hu;
  const double ay = *ylo - 3.0 * joint.hv, by = *yhi + 3.0 * joint.hv;
  const double du = (bx - ax) / static_cast<double>(nodes - 1);
  const double dv = (by - ay) / static_cast<double>(nodes - 1);
  double mi = 0.0;
  for (int gi = 0; gi < nodes; ++gi)
    for (int gj = 0; gj < nodes; ++gj) {
      const double u = ax + du * gi, v = ay + dv * gj;
      const double p = joint.evaluate_raw(u, v);
      if (p <= 0.0) continue;
      const double pu = std::max(fx.evaluate_raw(u), 1e-300);
      const double pv = std::max(fy.evaluate_raw(v), 1e-300);
      mi += p * std::log(p / (pu * pv)) * du * dv;
    }
  return mi;
}

}  // namespace

double mutual_information(std::span<const double> x, std::span<const double> y,
                          const MiConfig& cfg) {
  if (x.size() != y.size()) throw DataError("MI sample lengths differ");
  if (x.size() < 2) throw FitError("MI needs at least 2 samples");
  if (cfg.estimator == MiEstimator::gaussian_copula) return copula_mi(x, y);
  return kde_grid_mi(x, y, cfg.kde_grid_nodes);
}

ForestStructure chow_liu_forest(const Matrix& X, const MiConfig& cfg) {
  const int d = static_cast<int>(X.cols);
  if (X.rows < 2) throw FitError("Chow-Liu needs at least 2 samples");
  if (d < 2) throw FitError("Chow-Liu needs at least 2 features");

  struct Edge {
    double w;
    int i, j;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(d));
  for (int f = 0; f < d; ++f) cols[static_cast<std::size_t>(f)] = X.column(static_cast<std::size_t>(f));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      edges.push_back({mutual_information(cols[static_cast<std::size_t>(i)],
                                          cols[static_cast<std::size_t>(j)], cfg),
                       i, j});
  // Kruskal, max weight; ties resolve lexicographically.
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.w != b.w) return a.w > b.w;
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });
  std::vector<int> comp(static_cast<std::size_t>(d));
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (comp[static_cast<std::size_t>(v)] != v) v = comp[static_cast<std::size_t>(v)];
    return v;
  };
  ForestStructure out;
  out.d = d;
  out.degree.assign(static_cast<std::size_t>(d), 0);
  for (const auto& e : edges) {
    const int a = find(e.i), b = find(e.j);
    if (a == b) continue;
    if (e.w <= cfg.mi_floor) continue;
    comp[static_cast<std::size_t>(a)] = b;
    out.edges.emplace_back(e.i, e.j);
    ++out.degree[static_cast<std::size_t>(e.i)];
    ++out.degree[static_cast<std::size_t>(e.j)];
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

namespace {

std::vector<std::size_t> rows_of_class(const Dataset& ds, int cls) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ds.n(); ++i)
    if (ds.labels[i] == cls) idx.push_back(i);
  return idx;
}

double empirical_log_prior_ratio(const Dataset& ds) {
  const auto np = static_cast<double>(ds.count_label(1));
  const auto nn = static_cast<double>(ds.count_label(-1));
  if (np == 0.0 || nn == 0.0) throw FitError("both classes required");
  return std::log(np / nn);
}

}  // namespace

TanModel fit_tan(const Dataset& ds, const DensityConfig& density, const MiConfig& mi) {
  TanModel model;
  model.log_prior_ratio = empirical_log_prior_ratio(ds);
  std::optional<std::pair<double, double>> bw2d;
  if (density.fixed_bandwidth) bw2d = std::pair(*density.fixed_bandwidth, *density.fixed_bandwidth);
  for (int cls : {-1, +1}) {
    const int side = cls == 1 ? 1 : 0;
    const auto rows = rows_of_class(ds, cls);
    const Dataset part = subset_rows(ds, std::vector<std::size_t>(rows.begin(), rows.end()));
    model.structure[side] = chow_liu_forest(part.features, mi);
    for (std::size_t f = 0; f < ds.d(); ++f) {
      const auto col = part.features.column(f);
      model.uni[side].push_back(
          fit_kde1d(col, density.fixed_bandwidth, density.clamp_floor, density.clamp_ceiling));
    }
    for (const auto& [i, j] : model.structure[side].edges) {
      const auto u = part.features.column(static_cast<std::size_t>(i));
      const auto v = part.features.column(static_cast<std::size_t>(j));
      model.edge_kde[side].push_back(
          fit_kde2d(u, v, bw2d, density.clamp_floor, density.clamp_ceiling));
    }
  }
  return model;
}

double tan_statistic(const TanModel& model, std::span<const double> x) {
  // Forest log likelihood ratio: edge bivariate terms count +1, univariate
  // terms (1 - degree), positive class minus negative class.
  double stat = model.log_prior_ratio;
  for (int side : {0, 1}) {
    const double sign = side == 1 ? 1.0 : -1.0;
    const auto& st = model.structure[side];
    for (std::size_t e = 0; e < st.edges.size(); ++e)
      stat += sign * model.edge_kde[side][e].log_eval(
                         x[static_cast<std::size_t>(st.edges[e].first)],
                         x[static_cast<std::size_t>(st.edges[e].second)]);
    for (std::size_t f = 0; f < model.uni[side].size(); ++f)
      stat += sign * (1.0 - static_cast<double>(st.degree[f])) *
              model.uni[side][f].log_eval(x[f]);
  }
  return stat;
}

int tan_decide(const TanModel& model, std::span<const double> x) {
  return tan_statistic(model, x) >= 0.0 ? 1 : -1;
}

NaiveBayesModel fit_naive_bayes(const Dataset& ds, const DensityConfig& density) {
  NaiveBayesModel model;
  model.log_prior_ratio = empirical_log_prior_ratio(ds);
  for (int cls : {-1, +1}) {
    const int side = cls == 1 ? 1 : 0;
    const auto rows = rows_of_class(ds, cls);
    for (std::size_t f = 0; f < ds.d(); ++f) {
      std::vector<double> col(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) col[r] = ds.features(rows[r], f);
      model.uni[side].push_back(
          fit_kde1d(col, density.fixed_bandwidth, density.clamp_floor, density.clamp_ceiling));
    }
  }
  return model;
}

double nb_statistic(const NaiveBayesModel& model, std::span<const double> x) {
  double stat = model.log_prior_ratio;
  for (std::size_t f = 0; f < model.uni[0].size(); ++f)
    stat += model.uni[1][f].log_eval(x[f]) - model.uni[0][f].log_eval(x[f]);
  return stat;
}

int nb_decide(const NaiveBayesModel& model, std::span<const double> x) {
  return nb_statistic(model, x) >= 0.0 ? 1 : -1;
}

KnnModel fit_knn(const Dataset& ds, int k, bool standardize_first) {
  if (k < 1) throw FitError("k must be >= 1");
  if (static_cast<std::size_t>(k) > ds.n()) throw FitError("k exceeds sample count");
  KnnModel model;
  model.k = k;
  if (standardize_first) {
    auto [std_ds, rec] = standardize(ds);
    model.train = std_ds.features;
    model.standardize_record = rec;
  } else {
    model.train = ds.features;
  }
  model.labels = ds.labels;
  return model;
}

int knn_decide(const KnnModel& model, std::span<const double> x) {
  if (x.size() != model.train.cols) throw DataError("point dimension mismatch");
  std::vector<double> q(x.begin(), x.end());
  if (model.standardize_record)
    for (std::size_t c = 0; c < q.size(); ++c)
      q[c] = (q[c] - model.standardize_record->mean[c]) / model.standardize_record->scale[c];

  const std::size_t n = model.train.rows;
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = model.train.row(i);
    double s = 0.0;
    for (std::size_t c = 0; c < q.size(); ++c) {
      const double dd = q[c] - row[c];
      s += dd * dd;
    }
    dist[i] = {s, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + model.k, dist.end());
  int vote = 0;
  for (int t = 0; t < model.k; ++t) vote += model.labels[dist[static_cast<std::size_t>(t)].second];
  return vote >= 0 ? 1 : -1;
}

SlbModel fit_lu(const Dataset& ds, const SlbConfig& cfg, Rng rng) {
  SlbConfig lu = cfg;
  lu.cv_rule = false;
  lu.screen.rule = {ScreenRule::Kind::top_fraction, 0.0};
  return fit_slb(ds, lu, rng);
}

int oracle_bayes(const BnSpec& pos, const BnSpec& neg, double log_prior_ratio,
                 std::span<const double> x) {
  const double stat = pos.log_density(x) - neg.log_density(x) + log_prior_ratio;
  return stat >= 0.0 ? 1 : -1;
}

}  // namespace slb
