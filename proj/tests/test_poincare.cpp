#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "prodkg/poincare.hpp"

using namespace prodkg;
using namespace prodkg::learn;

TEST_CASE("poincare distance closed forms") {
  Vec u{0.3, -0.2};
  CHECK(poincare_distance(u, u) == doctest::Approx(0.0).epsilon(1e-12));
  // d(0, (0.5,0)) = arcosh(5/3) = ln 3
  CHECK(poincare_distance({0.0, 0.0}, {0.5, 0.0}) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(poincare_distance({1.0, 0.0}, {0.0, 0.0}), Error);
  CHECK_THROWS_AS(poincare_distance({1.2, 0.0}, {0.0, 0.0}), Error);

  SUBCASE("symmetry on random pairs") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(-0.6, 0.6);
    for (int it = 0; it < 100; ++it) {
      Vec a{dist(rng), dist(rng), dist(rng)};
      Vec b{dist(rng), dist(rng), dist(rng)};
      CHECK(poincare_distance(a, b) == doctest::Approx(poincare_distance(b, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("poincare distance gradient matches finite differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  for (int it = 0; it < 50; ++it) {
    Vec u{dist(rng), dist(rng)}, v{dist(rng), dist(rng)};
    Vec gu(2, 0.0), gv(2, 0.0);
    poincare_distance_grad(u, v, 1.0, gu, gv);
    const double eps = 1e-6;
    for (int j = 0; j < 2; ++j) {
      Vec up = u, dn = u;
      up[j] += eps;
      dn[j] -= eps;
      const double fd = (poincare_distance(up, v) - poincare_distance(dn, v)) / (2 * eps);
      CHECK(gu[j] == doctest::Approx(fd).epsilon(1e-5));
      Vec vp = v, vn = v;
      vp[j] += eps;
      vn[j] -= eps;
      const double fdv = (poincare_distance(u, vp) - poincare_distance(u, vn)) / (2 * eps);
      CHECK(gv[j] == doctest::Approx(fdv).epsilon(1e-5));
    }
  }
}

// 3-level tree: root -> 6 mids -> 33 leaves; 40 nodes total
static std::vector<std::pair<std::string, std::string>> tree_edges() {
  std::vector<std::pair<std::string, std::string>> edges;
  int leaf = 0;
  for (int m = 0; m < 6; ++m) {
    edges.emplace_back("root", "m" + std::to_string(m));
    const int n_leaves = (m < 3) ? 6 : 5;
    for (int l = 0; l < n_leaves; ++l)
      edges.emplace_back("m" + std::to_string(m), "leaf" + std::to_string(leaf++));
  }
  return edges;
}

TEST_CASE("poincare training on a synthetic tree") {
  auto edges = tree_edges();
  PoincareConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 200;
  cfg.seed = 7;
  PoincareEmbedding emb = poincare_train(edges, cfg);

  CHECK(emb.vec.size() == 40);

  SUBCASE("all norms stay strictly inside the margin") {
    for (const auto& [id, v] : emb.vec) CHECK(norm2(v) < 1.0 - 1e-5);
  }

  SUBCASE("edges are closer than random non-edges") {
    double edge_sum = 0;
    std::set<std::pair<std::string, std::string>> eset;
    for (const auto& [p, c] : edges) {
      edge_sum += poincare_distance(emb.at(p), emb.at(c));
      eset.insert({p, c});
      eset.insert({c, p});
    }
    const double edge_mean = edge_sum / edges.size();

    std::vector<std::string> ids;
    for (const auto& [id, v] : emb.vec) ids.push_back(id);
    std::mt19937_64 rng(11);
    double rand_sum = 0;
    int n = 0;
    while (n < 500) {
      const auto& a = ids[rng() % ids.size()];
      const auto& b = ids[rng() % ids.size()];
      if (a == b || eset.count({a, b})) continue;
      rand_sum += poincare_distance(emb.at(a), emb.at(b));
      ++n;
    }
    CHECK(edge_mean < rand_sum / n);
  }

  SUBCASE("same seed twice is bit-identical") {
    PoincareEmbedding emb2 = poincare_train(edges, cfg);
    for (const auto& [id, v] : emb.vec) CHECK(emb2.at(id) == v);
  }

  SUBCASE("empty edge set throws") {
    CHECK_THROWS_AS(poincare_train({}, cfg), Error);
  }
}
