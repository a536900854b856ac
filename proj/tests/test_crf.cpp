#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "prodkg/crf.hpp"
#include "prodkg/train.hpp"

using namespace prodkg;
using namespace prodkg::learn;

// Brute-force oracle: enumerate every tag sequence.
static void enumerate_paths(const Tensor& em, const CrfParams& crf,
                            const std::function<void(const std::vector<int>&, double)>& fn) {
  const size_t L = em.rows(), K = em.cols();
  std::vector<int> path(L, 0);
  while (true) {
    fn(path, crf_path_score(em, crf, path));
    size_t pos = 0;
    while (pos < L && ++path[pos] == static_cast<int>(K)) {
      path[pos] = 0;
      ++pos;
    }
    if (pos == L) break;
  }
}

static Tensor random_emissions(std::mt19937_64& rng, size_t L, size_t K, double scale) {
  Tensor em(L, K);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (auto& v : em.data) v = dist(rng);
  return em;
}

static CrfParams random_crf(std::mt19937_64& rng, size_t K, double scale) {
  CrfParams crf = CrfParams::zeros(K);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (auto& v : crf.transitions.data) v = dist(rng);
  for (auto& v : crf.start.data) v = dist(rng);
  for (auto& v : crf.stop.data) v = dist(rng);
  return crf;
}

TEST_CASE("log partition closed forms") {
  CrfParams crf = CrfParams::zeros(2);
  Tensor em1(1, 2);
  CHECK(crf_log_partition(em1, crf) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  Tensor em2(2, 2);
  CHECK(crf_log_partition(em2, crf) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(crf_log_partition(Tensor(static_cast<size_t>(0), 2ul), crf), Error);
}

TEST_CASE("partition and viterbi match exhaustive enumeration") {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 200; ++it) {
    const size_t L = 1 + rng() % 6, K = 2 + rng() % 3;
    Tensor em = random_emissions(rng, L, K, 3.0);
    CrfParams crf = random_crf(rng, K, 2.0);

    double sum_exp = 0, best = -1e300;
    std::vector<int> best_path;
    enumerate_paths(em, crf, [&](const std::vector<int>& p, double s) {
      sum_exp += std::exp(s);
      if (s > best) {
        best = s;
        best_path = p;
      }
    });

    CHECK(crf_log_partition(em, crf) == doctest::Approx(std::log(sum_exp)).epsilon(1e-8));
    auto [vp, vs] = crf_viterbi(em, crf);
    CHECK(vs == doctest::Approx(best).epsilon(1e-9));
    CHECK(vp == best_path);  // random reals: argmax is unique
    CHECK(vs <= crf_log_partition(em, crf) + 1e-12);
  }
}

TEST_CASE("viterbi tie-breaking picks lowest tags") {
  CrfParams crf = CrfParams::zeros(3);
  Tensor em(4, 3);
  auto [path, score] = crf_viterbi(em, crf);
  CHECK(score == 0.0);
  CHECK(path == std::vector<int>{0, 0, 0, 0});

  SUBCASE("emissions favoring tag 0") {
    CrfParams crf2 = CrfParams::zeros(2);
    Tensor em2(3, 2);
    for (size_t t = 0; t < 3; ++t) em2(t, 0) = 5.0;
    auto [p2, s2] = crf_viterbi(em2, crf2);
    (void)s2;
    CHECK(p2 == std::vector<int>{0, 0, 0});
  }
}

TEST_CASE("nll closed forms and limits") {
  CrfParams crf = CrfParams::zeros(2);
  Tensor em(2, 2);
  CHECK(crf_nll_and_grad(em, crf, {0, 1}, nullptr) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));

  SUBCASE("dominant gold path drives loss to zero") {
    Tensor big(3, 2);
    for (size_t t = 0; t < 3; ++t) big(t, 1) = 40.0;
    const double loss = crf_nll_and_grad(big, crf, {1, 1, 1}, nullptr);
    CHECK(loss < 1e-10);
  }

  SUBCASE("out-of-range tag throws") {
    CHECK_THROWS_AS(crf_nll_and_grad(em, crf, {0, 5}, nullptr), Error);
  }
}

TEST_CASE("nll gradient matches central finite differences") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 10; ++it) {
    const size_t L = 2 + rng() % 4, K = 2 + rng() % 3;
    Tensor em = random_emissions(rng, L, K, 2.0);
    CrfParams crf = random_crf(rng, K, 1.0);
    std::vector<int> gold(L);
    for (auto& g : gold) g = static_cast<int>(rng() % K);

    ParamSet ps;
    ps.add("em", em);
    ps.add("trans", crf.transitions);
    ps.add("start", crf.start);
    ps.add("stop", crf.stop);

    auto loss_fn = [&]() {
      CrfParams c = CrfParams::zeros(K);
      c.transitions = ps.at("trans");
      c.start = ps.at("start");
      c.stop = ps.at("stop");
      return crf_nll_and_grad(ps.at("em"), c, gold, nullptr);
    };

    CrfGrad grad;
    {
      CrfParams c = CrfParams::zeros(K);
      c.transitions = ps.at("trans");
      c.start = ps.at("start");
      c.stop = ps.at("stop");
      crf_nll_and_grad(ps.at("em"), c, gold, &grad);
    }
    ParamSet analytic;
    analytic.add("em", grad.d_emissions);
    analytic.add("trans", grad.d_transitions);
    analytic.add("start", grad.d_start);
    analytic.add("stop", grad.d_stop);

    CHECK(fd_max_rel_err(ps, loss_fn, analytic, 1e-5, 64, rng()) < 1e-4);
  }
}

TEST_CASE("marginals sum to one") {
  std::mt19937_64 rng(9);
  Tensor em = random_emissions(rng, 5, 3, 2.0);
  CrfParams crf = random_crf(rng, 3, 1.0);
  Tensor m = crf_marginals(em, crf);
  for (size_t t = 0; t < 5; ++t) {
    double s = 0;
    for (size_t j = 0; j < 3; ++j) s += m(t, j);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
}
