#ifndef PRODKG_ATTENTION_HPP
#define PRODKG_ATTENTION_HPP

#include <string>

#include "prodkg/params.hpp"

namespace prodkg::learn {

// Conditional self-attention. The condition vector e_T shifts every pairwise
// score, so different types produce different attention matrices:
//   score(i,j) = w . tanh(W1 h_i + W2 h_j + W3 e_T)
//   alpha_i    = softmax_j score(i, .)
//   C_i        = sum_j alpha_ij h_j
// Parameters under `prefix` + {w1,w2,w3,w}.

struct CondAttCache {
  Tensor H;      // L x k input
  Vec cond;      // e_T
  Tensor U;      // (L*L) x a, tanh activations
  Tensor alpha;  // L x L attention weights
};

void cond_att_init(ParamSet& ps, const std::string& prefix, size_t k, size_t cond_dim,
                   size_t att_dim, Rng& rng);

Tensor cond_self_attention(const ParamSet& ps, const std::string& prefix, const Tensor& H,
                           const Vec& cond, CondAttCache* cache);

// Returns dH; accumulates parameter grads. The condition vector is treated as
// a frozen input (no gradient).
Tensor cond_att_backward(const ParamSet& ps, const std::string& prefix,
                         const CondAttCache& cache, const Tensor& dC, ParamSet& gps);

}  // namespace prodkg::learn

#endif
