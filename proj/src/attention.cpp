#include "prodkg/attention.hpp"

#include <cmath>

namespace prodkg::learn {

void cond_att_init(ParamSet& ps, const std::string& prefix, size_t k, size_t cond_dim,
                   size_t att_dim, Rng& rng) {
  const double rk = 1.0 / std::sqrt(static_cast<double>(k));
  const double rc = 1.0 / std::sqrt(static_cast<double>(cond_dim));
  const double ra = 1.0 / std::sqrt(static_cast<double>(att_dim));
  ps.add(prefix + "w1", make_uniform(att_dim, k, rng, rk));
  ps.add(prefix + "w2", make_uniform(att_dim, k, rng, rk));
  ps.add(prefix + "w3", make_uniform(att_dim, cond_dim, rng, rc));
  ps.add(prefix + "w", make_uniform(att_dim, 1, rng, ra));
}

Tensor cond_self_attention(const ParamSet& ps, const std::string& prefix, const Tensor& H,
                           const Vec& cond, CondAttCache* cache) {
  const Tensor& W1 = ps.at(prefix + "w1");
  const Tensor& W2 = ps.at(prefix + "w2");
  const Tensor& W3 = ps.at(prefix + "w3");
  const Tensor& w = ps.at(prefix + "w");
  const size_t L = H.rows(), k = H.cols(), a = w.size();
  if (W1.cols() != k || W3.cols() != cond.size())
    throw Error("cond_self_attention: dimension mismatch");

  // p_i = W1 h_i + W3 e_T, q_j = W2 h_j
  Vec ct(a, 0.0);
  matvec(W3, cond, ct);
  std::vector<Vec> p(L, Vec(a)), q(L, Vec(a));
  Vec hrow(k);
  for (size_t i = 0; i < L; ++i) {
    for (size_t j = 0; j < k; ++j) hrow[j] = H(i, j);
    matvec(W1, hrow, p[i]);
    axpy(1.0, ct, p[i]);
    matvec(W2, hrow, q[i]);
  }

  Tensor U(L * L, a);
  Tensor alpha(L, L);
  Vec srow(L);
  for (size_t i = 0; i < L; ++i) {
    for (size_t j = 0; j < L; ++j) {
      double s = 0;
      double* u = U.row(i * L + j);
      for (size_t d = 0; d < a; ++d) {
        u[d] = std::tanh(p[i][d] + q[j][d]);
        s += w(d) * u[d];
      }
      srow[j] = s;
    }
    softmax_inplace(srow);
    for (size_t j = 0; j < L; ++j) alpha(i, j) = srow[j];
  }

  Tensor C(L, k);
  for (size_t i = 0; i < L; ++i)
    for (size_t j = 0; j < L; ++j) {
      const double aij = alpha(i, j);
      for (size_t d = 0; d < k; ++d) C(i, d) += aij * H(j, d);
    }
  if (cache) {
    cache->H = H;
    cache->cond = cond;
    cache->U = std::move(U);
    cache->alpha = std::move(alpha);
  }
  return C;
}

Tensor cond_att_backward(const ParamSet& ps, const std::string& prefix,
                         const CondAttCache& cache, const Tensor& dC, ParamSet& gps) {
  const Tensor& W1 = ps.at(prefix + "w1");
  const Tensor& W2 = ps.at(prefix + "w2");
  const Tensor& w = ps.at(prefix + "w");
  Tensor& gW1 = gps.at(prefix + "w1");
  Tensor& gW2 = gps.at(prefix + "w2");
  Tensor& gW3 = gps.at(prefix + "w3");
  Tensor& gw = gps.at(prefix + "w");

  const Tensor& H = cache.H;
  const size_t L = H.rows(), k = H.cols(), a = w.size();
  Tensor dH(L, k);

  std::vector<Vec> dp(L, Vec(a, 0.0)), dq(L, Vec(a, 0.0));
  Vec dalpha(L), ds(L);
  for (size_t i = 0; i < L; ++i) {
    // dC_i -> dalpha and direct dH via C_i = sum_j alpha_ij h_j
    for (size_t j = 0; j < L; ++j) {
      double s = 0;
      const double aij = cache.alpha(i, j);
      for (size_t d = 0; d < k; ++d) {
        s += dC(i, d) * H(j, d);
        dH(j, d) += aij * dC(i, d);
      }
      dalpha[j] = s;
    }
    double inner = 0;
    for (size_t j = 0; j < L; ++j) inner += cache.alpha(i, j) * dalpha[j];
    for (size_t j = 0; j < L; ++j) ds[j] = cache.alpha(i, j) * (dalpha[j] - inner);

    for (size_t j = 0; j < L; ++j) {
      const double* u = cache.U.row(i * L + j);
      const double dsij = ds[j];
      if (dsij == 0.0) continue;
      for (size_t d = 0; d < a; ++d) {
        gw(d, 0) += dsij * u[d];
        const double dt = dsij * w(d) * (1.0 - u[d] * u[d]);
        dp[i][d] += dt;
        dq[j][d] += dt;
      }
    }
  }

  Vec hrow(k), tmp(k);
  for (size_t i = 0; i < L; ++i) {
    for (size_t j = 0; j < k; ++j) hrow[j] = H(i, j);
    outer_add(gW1, dp[i], hrow);
    outer_add(gW3, dp[i], cache.cond);
    outer_add(gW2, dq[i], hrow);
    matvec_t(W1, dp[i], tmp);
    for (size_t j = 0; j < k; ++j) dH(i, j) += tmp[j];
    matvec_t(W2, dq[i], tmp);
    for (size_t j = 0; j < k; ++j) dH(i, j) += tmp[j];
  }
  return dH;
}

}  // namespace prodkg::learn
