#ifndef PRODKG_TRANSFORMER_HPP
#define PRODKG_TRANSFORMER_HPP

#include <string>
#include <vector>

#include "prodkg/params.hpp"

namespace prodkg::learn {

// Pre-norm transformer encoder stack with a final layer norm:
//   x <- x + MHA(LN(x));  x <- x + FF(LN(x));  out = LN_final(x)
// FF uses GELU. With all attention/FF weights at zero the stack reduces to
// the final layer norm of the input.
struct TransformerConfig {
  size_t layers = 2;
  size_t heads = 4;
  size_t dim = 64;
  size_t ff = 128;
};

struct LayerNormCache {
  Tensor xhat;      // L x d
  Vec inv_std;      // L
};

struct TransformerLayerCache {
  Tensor x_in;                 // L x d
  LayerNormCache ln1;
  Tensor q, k, v;              // L x d
  std::vector<Tensor> att;     // per head, L x L
  Tensor concat;               // L x d (pre-Wo)
  Tensor x_mid;                // after attention residual
  LayerNormCache ln2;
  Tensor ff_pre;               // L x ff
  Tensor ff_act;               // L x ff
};

struct TransformerCache {
  std::vector<TransformerLayerCache> layers;
  Tensor x_final;  // input to final layer norm
  LayerNormCache lnf;
};

void transformer_init(ParamSet& ps, const std::string& prefix, const TransformerConfig& cfg,
                      Rng& rng);

Tensor transformer_encode(const ParamSet& ps, const std::string& prefix, const Tensor& E,
                          const TransformerConfig& cfg, TransformerCache* cache);

// Returns dE; accumulates parameter grads into gps.
Tensor transformer_backward(const ParamSet& ps, const std::string& prefix,
                            const TransformerConfig& cfg, const TransformerCache& cache,
                            const Tensor& dOut, ParamSet& gps);

// Sinusoidal position encodings, frozen (never trained).
Tensor sinusoid_positions(size_t max_len, size_t dim);

}  // namespace prodkg::learn

#endif
