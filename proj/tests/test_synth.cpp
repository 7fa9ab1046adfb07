#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "slb/dataset.hpp"
#include "slb/synth.hpp"

using namespace slb;

namespace {

bool is_acyclic_with_single_parents(const BnSpec& spec) {
  for (const auto& p : spec.parents)
    if (p.size() > 1) return false;
  // follow parent pointers; any walk longer than d implies a cycle
  for (int start = 0; start < spec.d; ++start) {
    int v = start, steps = 0;
    while (!spec.parents[static_cast<std::size_t>(v)].empty()) {
      v = spec.parents[static_cast<std::size_t>(v)][0];
      if (++steps > spec.d) return false;
    }
  }
  return true;
}

int edge_count(const BnSpec& spec) {
  int c = 0;
  for (const auto& p : spec.parents) c += static_cast<int>(p.size());
  return c;
}

}  // namespace

TEST_CASE("forest generator degenerate densities") {
  Rng rng(3);
  const BnSpec empty = random_forest_bn(5, 0.0, CpdFamily::gaussian, rng);
  CHECK(edge_count(empty) == 0);
  const BnSpec tree = random_forest_bn(5, 1.0, CpdFamily::gaussian, rng);
  CHECK(edge_count(tree) == 4);
}

TEST_CASE("forest generator always yields acyclic single-parent graphs") {
  Rng rng(7);
  for (int rep = 0; rep < 1000; ++rep) {
    const int d = 1 + static_cast<int>(rng.index(12));
    const double keep = rng.uniform();
    Rng local = rng.derive(static_cast<std::uint64_t>(rep));
    const BnSpec spec = random_forest_bn(d, keep, CpdFamily::gaussian, local);
    CHECK(is_acyclic_with_single_parents(spec));
    CHECK(static_cast<int>(spec.topo_order.size()) == d);
  }
}

TEST_CASE("general generator gives three parents past the roots") {
  Rng rng(11);
  const BnSpec spec = random_general_bn(20, CpdFamily::gaussian, rng);
  int roots = 0, three = 0;
  for (const auto& p : spec.parents) {
    if (p.empty()) ++roots;
    if (p.size() == 3) ++three;
  }
  CHECK(roots == 3);
  CHECK(three == 17);
  // parents precede children in the stored order
  std::vector<int> position(20);
  for (int i = 0; i < 20; ++i) position[static_cast<std::size_t>(spec.topo_order[i])] = i;
  for (int v = 0; v < 20; ++v)
    for (int p : spec.parents[static_cast<std::size_t>(v)])
      CHECK(position[static_cast<std::size_t>(p)] < position[static_cast<std::size_t>(v)]);
}

TEST_CASE("empty graph sampling matches independent standard normals") {
  Rng rng(13);
  BnSpec spec = random_forest_bn(3, 0.0, CpdFamily::gaussian, rng);
  const Matrix X = sample_bn(spec, 10000, rng);
  for (std::size_t c = 0; c < 3; ++c) {
    const auto col = X.column(c);
    CHECK(std::abs(mean(col)) < 0.03);
  }
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) {
      const auto u = X.column(a);
      const auto v = X.column(b);
      double cov = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) cov += (u[i] - mean(u)) * (v[i] - mean(v));
      cov /= static_cast<double>(u.size());
      CHECK(std::abs(cov) < 0.05);
    }
}

TEST_CASE("single-edge correlation matches the closed form") {
  BnSpec spec;
  spec.d = 2;
  spec.family = CpdFamily::gaussian;
  spec.parents = {{}, {0}};
  spec.topo_order = {0, 1};
  Rng rng(17);
  const Matrix X = sample_bn(spec, 100000, rng);
  const auto x = X.column(0);
  const auto y = X.column(1);
  const double mx = mean(x), my = mean(y);
  double cxy = 0.0, cxx = 0.0, cyy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cxy += (x[i] - mx) * (y[i] - my);
    cxx += (x[i] - mx) * (x[i] - mx);
    cyy += (y[i] - my) * (y[i] - my);
  }
  const double corr = cxy / std::sqrt(cxx * cyy);
  CHECK(corr == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01 / 0.7071));
}

TEST_CASE("complex-family roots stay standard normal") {
  BnSpec spec;
  spec.d = 1;
  spec.family = CpdFamily::complex_mixture;
  spec.parents = {{}};
  spec.topo_order = {0};
  Rng rng(19);
  const Matrix X = sample_bn(spec, 20000, rng);
  const auto col = X.column(0);
  CHECK(std::abs(mean(col)) < 0.03);
  CHECK(stddev(col, false) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("class pairs share a third of the nodes when asked") {
  ExperimentDesign design;
  design.structure = BnStructure::general;
  design.shared_third = true;
  design.d = 20;
  Rng rng(23);
  auto [pos, neg] = make_class_pair(design, rng);
  int same = 0;
  for (int v = 0; v < 20; ++v)
    if (pos.parents[static_cast<std::size_t>(v)] == neg.parents[static_cast<std::size_t>(v)])
      ++same;
  CHECK(same >= 20 / 3);  // exactly floor(d/3) copied; coincidences can add
  // shared copying must preserve acyclicity under the common order
  std::vector<int> position(20);
  for (int i = 0; i < 20; ++i) position[static_cast<std::size_t>(neg.topo_order[i])] = i;
  for (int v = 0; v < 20; ++v)
    for (int p : neg.parents[static_cast<std::size_t>(v)])
      CHECK(position[static_cast<std::size_t>(p)] < position[static_cast<std::size_t>(v)]);

  // against per-node random chance, structural equality is rare without sharing
  ExperimentDesign indep = design;
  indep.shared_third = false;
  int coincidences = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Rng local(500 + rep);
    auto [a, b] = make_class_pair(indep, local);
    bool identical = true;
    for (int v = 0; v < 20; ++v)
      if (a.parents[static_cast<std::size_t>(v)] != b.parents[static_cast<std::size_t>(v)])
        identical = false;
    coincidences += identical;
  }
  CHECK(coincidences < 5);

  // roots are standard normal in both specs by construction
  for (const BnSpec* s : {&pos, &neg}) {
    int roots = 0;
    for (const auto& p : s->parents) roots += p.empty();
    CHECK(roots >= 3);
  }
}

TEST_CASE("shared structure is rejected for the forest design") {
  ExperimentDesign design;
  design.structure = BnStructure::forest;
  design.shared_third = true;
  Rng rng(29);
  CHECK_THROWS_AS(make_class_pair(design, rng), DataError);
}

TEST_CASE("experiment generation balance arithmetic") {
  ExperimentDesign design;
  design.structure = BnStructure::forest;
  design.balanced = false;
  design.n = 200;
  design.d = 5;
  Rng rng(31);
  auto [train, test] = gen_experiment(design, rng);
  CHECK(train.count_label(1) == 150);
  CHECK(train.count_label(-1) == 50);
  CHECK(test.n() == 1000);
  CHECK(test.count_label(1) == 500);
  CHECK(test.count_label(-1) == 500);

  Rng rng2(31);
  auto [train2, test2] = gen_experiment(design, rng2);
  CHECK(to_csv_string(train) == to_csv_string(train2));
  CHECK(to_csv_string(test) == to_csv_string(test2));
}

TEST_CASE("ringnorm moments and dimension guard") {
  Rng rng(37);
  const Dataset ds = gen_ringnorm(20000, 20, rng);
  CHECK(ds.count_label(1) == 10000);
  double pos_mean = 0.0, neg_var = 0.0;
  std::size_t pos_count = 0, neg_count = 0;
  for (std::size_t r = 0; r < ds.n(); ++r) {
    if (ds.labels[r] == 1) {
      for (std::size_t c = 0; c < 20; ++c) pos_mean += ds.features(r, c);
      ++pos_count;
    } else {
      for (std::size_t c = 0; c < 20; ++c) neg_var += ds.features(r, c) * ds.features(r, c);
      ++neg_count;
    }
  }
  pos_mean /= static_cast<double>(pos_count * 20);
  neg_var /= static_cast<double>(neg_count * 20);
  CHECK(pos_mean == doctest::Approx(2.0 / std::sqrt(20.0)).epsilon(0.05));
  CHECK(neg_var == doctest::Approx(4.0).epsilon(0.05));
  Rng rng2(38);
  CHECK_THROWS_AS(gen_ringnorm(100, 10, rng2), DataError);
}

TEST_CASE("factor-product log density equals the multivariate normal form") {
  for (int rep = 0; rep < 20; ++rep) {
    Rng rng(600 + rep);
    const int d = 2 + static_cast<int>(rng.index(9));
    const BnSpec spec = rep % 2 == 0
                            ? random_forest_bn(d, 0.8, CpdFamily::gaussian, rng)
                            : random_general_bn(d, CpdFamily::gaussian, rng);
    const Matrix cov = implied_covariance(spec);
    Rng points(700 + rep);
    for (int t = 0; t < 50; ++t) {
      const Matrix X = sample_bn(spec, 1, points);
      const auto x = X.row(0);
      CHECK(spec.log_density(x) == doctest::Approx(mvn_log_pdf(x, cov)).epsilon(1e-8));
    }
  }
}

TEST_CASE("forest density equals the edge-ratio times marginals form") {
  for (int rep = 0; rep < 20; ++rep) {
    Rng rng(800 + rep);
    const int d = 2 + static_cast<int>(rng.index(5));
    const BnSpec spec = random_forest_bn(d, 0.9, CpdFamily::gaussian, rng);
    const Matrix cov = implied_covariance(spec);
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < d; ++v)
      for (int p : spec.parents[static_cast<std::size_t>(v)])
        edges.emplace_back(std::min(v, p), std::max(v, p));
    Rng points(900 + rep);
    const Matrix X = sample_bn(spec, 20, points);
    for (std::size_t r = 0; r < X.rows; ++r) {
      const auto x = X.row(r);
      double log_p = 0.0;
      for (int i = 0; i < d; ++i) log_p += gaussian_marginal_log_pdf(cov, i, x[i]);
      for (const auto& [i, j] : edges)
        log_p += gaussian_pair_log_pdf(cov, i, j, x[i], x[j]) -
                 gaussian_marginal_log_pdf(cov, i, x[i]) -
                 gaussian_marginal_log_pdf(cov, j, x[j]);
      CHECK(spec.log_density(x) == doctest::Approx(log_p).epsilon(1e-8));
    }
  }
}

TEST_CASE("complex conditional factor is a proper density") {
  // time-stepped trapezoid over a wide window, single parent value z = 0.4
  const double z = 0.4;
  double integral = 0.0;
  const double lo = -40.0, hi = 40.0;
  const int steps = 20000;
  const double dx = (hi - lo) / steps;
  for (int i = 0; i <= steps; ++i) {
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    integral += w * std::exp(complex_cpd_log_pdf(lo + dx * i, z, z + 1.0, z - 1.0));
  }
  integral *= dx;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));
}
