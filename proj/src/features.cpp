#include "slb/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slb/hsic.hpp"

namespace slb {

namespace {

std::vector<std::size_t> class_rows(const Dataset& ds, int cls) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ds.n(); ++i)
    if (ds.labels[i] == cls) idx.push_back(i);
  return idx;
}

}  // namespace

std::vector<std::pair<int, int>> apply_screen_rule(const std::vector<PairStat>& stats,
                                                   const ScreenRule& rule) {
  std::vector<std::pair<int, int>> retained;
  switch (rule.kind) {
    case ScreenRule::Kind::threshold: {
      for (const auto& s : stats)
        if (s.score() >= rule.value) retained.emplace_back(s.i, s.j);
      break;
    }
    case ScreenRule::Kind::quantile: {
      std::vector<double> pooled;
      pooled.reserve(stats.size() * 2);
      for (const auto& s : stats) {
        pooled.push_back(s.stat_neg);
        pooled.push_back(s.stat_pos);
      }
      if (pooled.empty()) break;
      const double tau = quantile_lower(pooled, rule.value);
      for (const auto& s : stats)
        if (s.score() >= tau) retained.emplace_back(s.i, s.j);
      break;
    }
    case ScreenRule::Kind::top_fraction: {
      const auto keep = static_cast<std::size_t>(
          std::llround(rule.value * static_cast<double>(stats.size())));
      std::vector<std::size_t> order(stats.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (stats[a].score() != stats[b].score()) return stats[a].score() > stats[b].score();
        return std::pair(stats[a].i, stats[a].j) < std::pair(stats[b].i, stats[b].j);
      });
      for (std::size_t r = 0; r < std::min(keep, order.size()); ++r)
        retained.emplace_back(stats[order[r]].i, stats[order[r]].j);
      std::sort(retained.begin(), retained.end());
      break;
    }
    case ScreenRule::Kind::pvalue_bh: {
      // Per pair, the stronger (smaller) of the two class p-values; then
      // Benjamini-Hochberg across the P pairs at level `value`.
      std::vector<std::pair<double, std::size_t>> ps;
      for (std::size_t s = 0; s < stats.size(); ++s) {
        if (stats[s].p_neg < 0.0 || stats[s].p_pos < 0.0)
          throw FitError("pvalue rule requires permutation p-values");
        ps.emplace_back(std::min(stats[s].p_neg, stats[s].p_pos), s);
      }
      std::sort(ps.begin(), ps.end());
      const double P = static_cast<double>(ps.size());
      double cutoff = -1.0;
      for (std::size_t r = 0; r < ps.size(); ++r)
        if (ps[r].first <= rule.value * (static_cast<double>(r) + 1.0) / P)
          cutoff = ps[r].first;
      for (const auto& s : stats) {
        const double p = std::min(s.p_neg, s.p_pos);
        if (cutoff >= 0.0 && p <= cutoff) retained.emplace_back(s.i, s.j);
      }
      break;
    }
  }
  return retained;
}

PairScreen screen_pairs(const Dataset& ds, const ScreenConfig& cfg, Rng rng) {
  const int d = static_cast<int>(ds.d());
  PairScreen screen;
  screen.rule = cfg.rule;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      PairStat s;
      s.i = i;
      s.j = j;
      screen.stats.push_back(s);
    }

  const bool want_pvalues = cfg.rule.kind == ScreenRule::Kind::pvalue_bh;
  for (int cls : {-1, +1}) {
    auto rows = class_rows(ds, cls);
    if (rows.size() < 4)
      throw FitError("class " + std::to_string(cls) + " has fewer than 4 samples");
    if (cfg.max_samples > 0 && rows.size() > static_cast<std::size_t>(cfg.max_samples)) {
      Rng sub = rng.derive(cls == 1 ? 11 : 12);
      sub.shuffle(rows);
      rows.resize(static_cast<std::size_t>(cfg.max_samples));
      std::sort(rows.begin(), rows.end());
    }
    const std::size_t n = rows.size();

    // Per-feature Grams with per-variable median-heuristic bandwidths are
    // shared across every pair containing the feature.
    std::vector<Gram> grams(static_cast<std::size_t>(d));
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(d));
    for (int f = 0; f < d; ++f) {
      auto& col = cols[static_cast<std::size_t>(f)];
      col.resize(n);
      for (std::size_t r = 0; r < n; ++r) col[r] = ds.features(rows[r], static_cast<std::size_t>(f));
      double sigma;
      if (cfg.kernel_bandwidth) {
        sigma = *cfg.kernel_bandwidth;
      } else {
        try {
          sigma = median_heuristic(col);
        } catch (const FitError&) {
          throw FitError("feature '" + ds.feature_names[static_cast<std::size_t>(f)] +
                         "' is constant within class " + std::to_string(cls));
        }
      }
      grams[static_cast<std::size_t>(f)] = gaussian_gram(col, sigma);
    }

    const auto n_pairs = static_cast<long>(screen.stats.size());
#pragma omp parallel for schedule(dynamic)
    for (long p = 0; p < n_pairs; ++p) {
      auto& s = screen.stats[static_cast<std::size_t>(p)];
      const double stat = hsic_from_grams(grams[static_cast<std::size_t>(s.i)],
                                          grams[static_cast<std::size_t>(s.j)]);
      (cls == 1 ? s.stat_pos : s.stat_neg) = stat;
      if (want_pvalues) {
        Rng stream = rng.derive(cls == 1 ? 21 : 22, static_cast<std::uint64_t>(p));
        std::vector<int> exceed(cfg.permutations, 0);
        for (int b = 0; b < cfg.permutations; ++b) {
          Rng perm_stream = stream.derive(static_cast<std::uint64_t>(b) + 1);
          std::vector<std::size_t> perm(n);
          std::iota(perm.begin(), perm.end(), std::size_t{0});
          perm_stream.shuffle(perm);
          const double sb = hsic_from_grams_permuted(
              grams[static_cast<std::size_t>(s.i)], grams[static_cast<std::size_t>(s.j)], perm);
          exceed[b] = sb >= stat ? 1 : 0;
        }
        int count = 0;
        for (int e : exceed) count += e;
        const double pv = (1.0 + count) / (static_cast<double>(cfg.permutations) + 1.0);
        (cls == 1 ? s.p_pos : s.p_neg) = pv;
      }
    }
  }
  screen.retained = apply_screen_rule(screen.stats, cfg.rule);
  return screen;
}

FeatureMap build_feature_map(const Dataset& ds, const PairScreen& screen,
                             const DensityConfig& cfg) {
  FeatureMap fm;
  fm.d = static_cast<int>(ds.d());
  fm.pairs = screen.retained;
  std::sort(fm.pairs.begin(), fm.pairs.end());
  fm.use_grid = cfg.eval == KdeEval::grid;

  std::optional<std::pair<double, double>> bw2d;
  if (cfg.fixed_bandwidth) bw2d = std::pair(*cfg.fixed_bandwidth, *cfg.fixed_bandwidth);

  for (int cls : {-1, +1}) {
    const int side = cls == 1 ? 1 : 0;
    const auto rows = class_rows(ds, cls);
    if (rows.size() < 2)
      throw FitError("class " + std::to_string(cls) + " has fewer than 2 samples");

    fm.uni[side].reserve(ds.d());
    for (std::size_t f = 0; f < ds.d(); ++f) {
      std::vector<double> col(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) col[r] = ds.features(rows[r], f);
      try {
        fm.uni[side].push_back(
            fit_kde1d(col, cfg.fixed_bandwidth, cfg.clamp_floor, cfg.clamp_ceiling));
      } catch (const FitError& e) {
        throw FitError("feature '" + ds.feature_names[f] + "', class " +
                       std::to_string(cls) + ": " + e.what());
      }
    }
    fm.biv[side].reserve(fm.pairs.size());
    for (const auto& [i, j] : fm.pairs) {
      std::vector<double> u(rows.size()), v(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        u[r] = ds.features(rows[r], static_cast<std::size_t>(i));
        v[r] = ds.features(rows[r], static_cast<std::size_t>(j));
      }
      try {
        fm.biv[side].push_back(fit_kde2d(u, v, bw2d, cfg.clamp_floor, cfg.clamp_ceiling));
      } catch (const FitError& e) {
        throw FitError("pair (" + ds.feature_names[static_cast<std::size_t>(i)] + ", " +
                       ds.feature_names[static_cast<std::size_t>(j)] + "), class " +
                       std::to_string(cls) + ": " + e.what());
      }
    }
    if (fm.use_grid) {
      fm.uni_grid[side].reserve(fm.uni[side].size());
      for (const auto& k : fm.uni[side])
        fm.uni_grid[side].push_back(GridKde1d::build(k, cfg.grid_nodes_1d));
      fm.biv_grid[side].reserve(fm.biv[side].size());
      for (const auto& k : fm.biv[side])
        fm.biv_grid[side].push_back(GridKde2d::build(k, cfg.grid_nodes_2d));
    }
  }
  return fm;
}

std::vector<double> map_point(const FeatureMap& fm, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(fm.d))
    throw DataError("point dimension mismatch: expected " + std::to_string(fm.d));
  std::vector<double> out;
  out.reserve(fm.dim());
  for (int side : {0, 1}) {
    if (fm.use_grid) {
      for (std::size_t f = 0; f < fm.uni_grid[side].size(); ++f)
        out.push_back(fm.uni_grid[side][f].log_eval(x[f]));
      for (std::size_t p = 0; p < fm.pairs.size(); ++p)
        out.push_back(fm.biv_grid[side][p].log_eval(
            x[static_cast<std::size_t>(fm.pairs[p].first)],
            x[static_cast<std::size_t>(fm.pairs[p].second)]));
    } else {
      for (std::size_t f = 0; f < fm.uni[side].size(); ++f)
        out.push_back(fm.uni[side][f].log_eval(x[f]));
      for (std::size_t p = 0; p < fm.pairs.size(); ++p)
        out.push_back(fm.biv[side][p].log_eval(
            x[static_cast<std::size_t>(fm.pairs[p].first)],
            x[static_cast<std::size_t>(fm.pairs[p].second)]));
    }
  }
  out.push_back(1.0);
  return out;
}

Matrix map_matrix(const FeatureMap& fm, const Matrix& X) {
  if (X.cols != static_cast<std::size_t>(fm.d))
    throw DataError("point dimension mismatch: expected " + std::to_string(fm.d));
  Matrix out(X.rows, fm.dim());
  const auto n = static_cast<long>(X.rows);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < n; ++r) {
    const auto mapped = map_point(fm, X.row(static_cast<std::size_t>(r)));
    std::copy(mapped.begin(), mapped.end(), out.row(static_cast<std::size_t>(r)).begin());
  }
  return out;
}

Matrix map_matrix_serial(const FeatureMap& fm, const Matrix& X) {
  Matrix out(X.rows, fm.dim());
  for (std::size_t r = 0; r < X.rows; ++r) {
    const auto mapped = map_point(fm, X.row(r));
    std::copy(mapped.begin(), mapped.end(), out.row(r).begin());
  }
  return out;
}

std::vector<FeatureTag> feature_tags(const FeatureMap& fm) {
  std::vector<FeatureTag> tags;
  tags.reserve(fm.dim());
  for (int cls : {-1, +1}) {
    for (int f = 0; f < fm.d; ++f) tags.push_back({cls, f, f, false});
    for (const auto& [i, j] : fm.pairs) tags.push_back({cls, i, j, false});
  }
  tags.push_back({0, -1, -1, true});
  return tags;
}

}  // namespace slb
