#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "prodkg/forest.hpp"
#include "prodkg/logreg.hpp"

using namespace prodkg;
using namespace prodkg::ml;

// independent oracle: walk the serialized tree representation
static double oracle_tree_value(const nlohmann::json& nodes, const FeatureVector& x,
                                bool classify, size_t n_classes) {
  int cur = 0;
  while (nodes[cur].at("f").get<int>() >= 0) {
    const int f = nodes[cur].at("f").get<int>();
    const double t = nodes[cur].at("t").get<double>();
    cur = x[f] <= t ? nodes[cur].at("l").get<int>() : nodes[cur].at("r").get<int>();
  }
  if (!classify) return nodes[cur].at("v").get<double>();
  auto counts = nodes[cur].at("c").get<std::vector<double>>();
  size_t best = 0;
  for (size_t c = 1; c < n_classes; ++c)
    if (counts[c] > counts[best]) best = c;
  return static_cast<double>(best);
}

TEST_CASE("forest classification") {
  // 1 feature, perfectly separable at 0
  std::vector<FeatureVector> X;
  std::vector<double> y;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.1, 1.0);
  for (int i = 0; i < 60; ++i) {
    const double s = (i % 2) ? 1.0 : -1.0;
    X.push_back({s * d(rng)});
    y.push_back(s > 0 ? 1.0 : 0.0);
  }
  ForestConfig cfg;
  cfg.n_trees = 25;
  cfg.seed = 5;
  Forest f = fit_forest(X, y, cfg, ForestTask::Classify);

  SUBCASE("train accuracy 1.0") {
    for (size_t i = 0; i < X.size(); ++i) {
      auto p = forest_predict_proba(f, X[i]);
      CHECK((p[1] > 0.5) == (y[i] == 1.0));
    }
  }
  SUBCASE("probabilities sum to 1") {
    auto p = forest_predict_proba(f, {0.4});
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("duplicate of a training point in separable data gets prob 1") {
    auto p = forest_predict_proba(f, X[0]);
    CHECK(p[static_cast<size_t>(y[0])] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("same seed twice gives identical forests") {
    Forest g = fit_forest(X, y, cfg, ForestTask::Classify);
    CHECK(f.to_json() == g.to_json());
  }
  SUBCASE("constant labels degenerate to single-leaf trees") {
    std::vector<double> ones(y.size(), 1.0);
    Forest g = fit_forest(X, ones, cfg, ForestTask::Classify);
    for (const auto& t : g.trees) CHECK(t.nodes.size() == 1);
    auto p = forest_predict_proba(g, {123.0});
    CHECK(p[1] == doctest::Approx(1.0));
  }
  SUBCASE("prediction matches independent tree-walk oracle") {
    auto j = nlohmann::json::parse(f.to_json());
    std::uniform_real_distribution<double> probe(-1.5, 1.5);
    for (int it = 0; it < 100; ++it) {
      FeatureVector x{probe(rng)};
      std::vector<double> votes(2, 0.0);
      for (const auto& tj : j.at("trees"))
        votes[static_cast<size_t>(oracle_tree_value(tj, x, true, 2))] += 1.0;
      auto p = forest_predict_proba(f, x);
      CHECK(p[0] == doctest::Approx(votes[0] / f.trees.size()).epsilon(1e-12));
    }
  }
  SUBCASE("serialization round-trip predicts identically") {
    Forest g = Forest::from_json(f.to_json());
    auto p1 = forest_predict_proba(f, {0.2});
    auto p2 = forest_predict_proba(g, {0.2});
    CHECK(p1 == p2);
  }
  SUBCASE("dimension mismatch throws") {
    CHECK_THROWS_AS(forest_predict_proba(f, {0.1, 0.2}), Error);
  }
}

TEST_CASE("forest regression") {
  std::vector<FeatureVector> X;
  std::vector<double> y;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double x1 = d(rng), x2 = d(rng);
    X.push_back({x1, x2});
    y.push_back(x1);  // target = first feature
  }
  ForestConfig cfg;
  cfg.n_trees = 40;
  cfg.seed = 9;
  Forest f = fit_forest(X, y, cfg, ForestTask::Regress);

  SUBCASE("train R^2 above 0.95") {
    double ss_res = 0, ss_tot = 0, mean = 0;
    for (double v : y) mean += v;
    mean /= y.size();
    for (size_t i = 0; i < X.size(); ++i) {
      const double pred = forest_predict_value(f, X[i]);
      ss_res += (pred - y[i]) * (pred - y[i]);
      ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    CHECK(1.0 - ss_res / ss_tot > 0.95);
  }
  SUBCASE("output clamped to [0,1]") {
    const double v = forest_predict_value(f, {5.0, 5.0});
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  SUBCASE("prediction invariant to tree order") {
    Forest g = f;
    std::reverse(g.trees.begin(), g.trees.end());
    CHECK(forest_predict_value(g, {0.3, 0.6}) ==
          doctest::Approx(forest_predict_value(f, {0.3, 0.6})).epsilon(1e-12));
  }
}

TEST_CASE("logistic regression") {
  SUBCASE("zero weights predict 0.5") {
    LogReg m;
    m.w = {0.0, 0.0};
    CHECK(logreg_predict(m, {1.0, -2.0}) == doctest::Approx(0.5));
  }

  SUBCASE("separable two-point set orders probabilities") {
    std::vector<std::vector<double>> X{{1.0}, {-1.0}};
    std::vector<int> y{1, 0};
    LogReg m = fit_logreg(X, y, {});
    CHECK(logreg_predict(m, {1.0}) > logreg_predict(m, {-1.0}));
    CHECK(logreg_predict(m, {1.0}) > 0.5);
  }

  SUBCASE("gradient matches finite differences below 1e-6") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
      X.push_back({d(rng), d(rng), d(rng)});
      y.push_back(static_cast<int>(rng() % 2));
    }
    std::vector<double> w{0.3, -0.2, 0.5};
    double b = 0.1;
    std::vector<double> gw;
    double gb;
    const double l2 = 0.01;
    logreg_loss_and_grad(w, b, X, y, l2, gw, gb);

    std::vector<double> tmp;
    double tb;
    const double eps = 1e-6;
    for (size_t j = 0; j < w.size(); ++j) {
      auto wp = w, wn = w;
      wp[j] += eps;
      wn[j] -= eps;
      const double up = logreg_loss_and_grad(wp, b, X, y, l2, tmp, tb);
      const double dn = logreg_loss_and_grad(wn, b, X, y, l2, tmp, tb);
      CHECK(std::fabs((up - dn) / (2 * eps) - gw[j]) < 1e-6);
    }
    const double up = logreg_loss_and_grad(w, b + eps, X, y, l2, tmp, tb);
    const double dn = logreg_loss_and_grad(w, b - eps, X, y, l2, tmp, tb);
    CHECK(std::fabs((up - dn) / (2 * eps) - gb) < 1e-6);
  }

  SUBCASE("loss decreases monotonically with small lr") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
      const double cls = static_cast<double>(i % 2);
      X.push_back({cls + d(rng) * 0.3});
      y.push_back(static_cast<int>(cls));
    }
    std::vector<double> w{0.0};
    double b = 0.0;
    std::vector<double> gw;
    double gb;
    double prev = logreg_loss_and_grad(w, b, X, y, 0.0, gw, gb);
    for (int e = 0; e < 50; ++e) {
      for (size_t j = 0; j < w.size(); ++j) w[j] -= 0.05 * gw[j];
      b -= 0.05 * gb;
      const double cur = logreg_loss_and_grad(w, b, X, y, 0.0, gw, gb);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}
