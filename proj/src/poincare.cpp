#include "prodkg/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace prodkg::learn {

// Projection keeps every norm strictly below 1 - 1e-5.
static constexpr double kMaxNorm = (1.0 - 1e-5) * (1.0 - 1e-9);

static double arcosh(double x) { return std::log(x + std::sqrt(x * x - 1.0)); }

double poincare_distance(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) throw Error("poincare_distance: dimension mismatch");
  const double uu = dot(u, u), vv = dot(v, v);
  if (uu >= 1.0 || vv >= 1.0) throw Error("poincare_distance: point on or outside unit sphere");
  double duv = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    const double c = u[i] - v[i];
    duv += c * c;
  }
  const double gamma = 1.0 + 2.0 * duv / ((1.0 - uu) * (1.0 - vv));
  return arcosh(std::max(gamma, 1.0));
}

const Vec& PoincareEmbedding::at(const std::string& id) const {
  auto it = vec.find(id);
  if (it == vec.end()) throw Error("poincare: no embedding for '" + id + "'");
  return it->second;
}

static void project(Vec& v) {
  const double nn = dot(v, v);
  if (nn >= kMaxNorm * kMaxNorm) {
    const double s = kMaxNorm / std::sqrt(nn);
    for (auto& x : v) x *= s;
  }
}

// Euclidean gradient of d(u,v):
//   dd/du = 4/(beta*sqrt(g^2-1)) * ((vv - 2uv + 1)/alpha^2 * u - v/alpha)
// and symmetrically for v with alpha/beta swapped.
void poincare_distance_grad(const Vec& u, const Vec& v, double d_dist, Vec& gu, Vec& gv) {
  const double uu = dot(u, u), vv = dot(v, v), uv = dot(u, v);
  const double alpha = 1.0 - uu, beta = 1.0 - vv;
  const double gamma = 1.0 + 2.0 * (uu - 2.0 * uv + vv) / (alpha * beta);
  if (gamma <= 1.0 + 1e-12) return;  // coincident points: zero gradient
  const double c = d_dist * 4.0 / std::sqrt(gamma * gamma - 1.0);
  const double cu = c / beta, cv = c / alpha;
  const double au = (vv - 2.0 * uv + 1.0) / (alpha * alpha);
  const double av = (uu - 2.0 * uv + 1.0) / (beta * beta);
  for (size_t i = 0; i < u.size(); ++i) {
    gu[i] += cu * (au * u[i] - v[i] / alpha);
    gv[i] += cv * (av * v[i] - u[i] / beta);
  }
}

PoincareEmbedding poincare_train(const std::vector<std::pair<std::string, std::string>>& edges,
                                 const PoincareConfig& cfg) {
  if (edges.empty()) throw Error("poincare_train: empty edge set");

  std::set<std::string> node_set;
  for (const auto& [a, b] : edges) {
    node_set.insert(a);
    node_set.insert(b);
  }
  std::vector<std::string> nodes(node_set.begin(), node_set.end());
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
  const size_t N = nodes.size();

  std::vector<std::set<size_t>> related(N);
  std::vector<std::pair<size_t, size_t>> eidx;
  for (const auto& [p, c] : edges) {
    const size_t pi = index[p], ci = index[c];
    if (pi == ci) continue;
    related[pi].insert(ci);
    related[ci].insert(pi);
    eidx.emplace_back(pi, ci);
  }

  Rng rng(derive_seed(cfg.seed, "poincare-train"));
  std::vector<Vec> emb(N, Vec(cfg.dim));
  for (auto& v : emb)
    for (auto& x : v) x = uniform_real(rng, -cfg.init_range, cfg.init_range);

  const size_t K = cfg.negatives;
  std::vector<size_t> order(eidx.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<size_t> negs(K);
  Vec d(K + 1), p(K + 1);
  std::vector<Vec> g(K + 2, Vec(cfg.dim));  // [0]=parent, [1]=child, [2..]=negatives

  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = (epoch < cfg.burnin_epochs) ? cfg.lr * cfg.burnin_factor : cfg.lr;
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t oi : order) {
      const auto [pi, ci] = eidx[oi];
      // negatives replace the child; avoid actual relations of the parent
      for (size_t k = 0; k < K; ++k) {
        size_t cand = uniform_index(rng, N);
        for (int tries = 0; tries < 100 && (cand == pi || related[pi].count(cand)); ++tries)
          cand = uniform_index(rng, N);
        negs[k] = cand;
      }
      d[0] = poincare_distance(emb[pi], emb[ci]);
      for (size_t k = 0; k < K; ++k) d[k + 1] = poincare_distance(emb[pi], emb[negs[k]]);
      // softmax over -d; loss = -log p[0]
      double mx = -d[0];
      for (size_t k = 0; k <= K; ++k) mx = std::max(mx, -d[k]);
      double Z = 0;
      for (size_t k = 0; k <= K; ++k) {
        p[k] = std::exp(-d[k] - mx);
        Z += p[k];
      }
      for (size_t k = 0; k <= K; ++k) p[k] /= Z;

      for (auto& gv : g) std::fill(gv.begin(), gv.end(), 0.0);
      // dL/dd0 = 1 - p0; dL/ddk = -pk
      poincare_distance_grad(emb[pi], emb[ci], 1.0 - p[0], g[0], g[1]);
      for (size_t k = 0; k < K; ++k) poincare_distance_grad(emb[pi], emb[negs[k]], -p[k + 1], g[0], g[k + 2]);

      auto riemannian_step = [&](size_t node, const Vec& grad) {
        Vec& th = emb[node];
        const double scale = lr * std::pow(1.0 - dot(th, th), 2.0) / 4.0;
        for (size_t i = 0; i < cfg.dim; ++i) th[i] -= scale * grad[i];
        project(th);
      };
      riemannian_step(pi, g[0]);
      riemannian_step(ci, g[1]);
      for (size_t k = 0; k < K; ++k) riemannian_step(negs[k], g[k + 2]);
    }
  }

  PoincareEmbedding out;
  out.dim = cfg.dim;
  for (size_t i = 0; i < N; ++i) out.vec[nodes[i]] = emb[i];
  return out;
}

}  // namespace prodkg::learn
