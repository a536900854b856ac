#ifndef PRODKG_POINCARE_HPP
#define PRODKG_POINCARE_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "prodkg/tensor.hpp"

namespace prodkg::learn {

// d(u,v) = arcosh(1 + 2||u-v||^2 / ((1-||u||^2)(1-||v||^2))).
// Throws if either point is on or outside the unit sphere.
double poincare_distance(const Vec& u, const Vec& v);

// Accumulates d_dist * (Euclidean gradient of the distance) into gu, gv.
void poincare_distance_grad(const Vec& u, const Vec& v, double d_dist, Vec& gu, Vec& gv);

struct PoincareConfig {
  size_t dim = 10;
  size_t epochs = 300;
  double lr = 0.3;
  size_t negatives = 10;
  uint64_t seed = 0;
  size_t burnin_epochs = 20;     // reduced-lr warmup
  double burnin_factor = 0.1;
  double init_range = 1e-3;
};

// Node id -> point in the open unit ball.
struct PoincareEmbedding {
  size_t dim = 0;
  std::map<std::string, Vec> vec;

  const Vec& at(const std::string& id) const;
  bool has(const std::string& id) const { return vec.count(id) > 0; }
};

// Riemannian SGD on a softmax ranking loss over sampled negatives. Euclidean
// gradients are rescaled by (1-||x||^2)^2/4 and points projected back inside
// the ball after every update. Deterministic given the seed.
PoincareEmbedding poincare_train(const std::vector<std::pair<std::string, std::string>>& edges,
                                 const PoincareConfig& cfg);

}  // namespace prodkg::learn

#endif
