#ifndef PRODKG_RNN_HPP
#define PRODKG_RNN_HPP

#include <string>
#include <vector>

#include "prodkg/params.hpp"

namespace prodkg::learn {

// Gated recurrent cell (GRU):
//   z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br)
//   hbar = tanh(Wh x + Uh (r*h) + bh), h' = (1-z)*h + z*hbar
// Parameters live in a ParamSet under `prefix` + {wz,uz,bz,wr,ur,br,wh,uh,bh}.

struct GruCache {
  std::vector<Vec> x, h_prev, z, r, hbar, rh;
  size_t hidden = 0;
};

void gru_init(ParamSet& ps, const std::string& prefix, size_t in_dim, size_t hidden, Rng& rng);

std::vector<Vec> gru_forward(const ParamSet& ps, const std::string& prefix,
                             const std::vector<Vec>& xs, GruCache* cache);

// d_h holds dLoss/d(output hidden state) per position. Accumulates parameter
// gradients into gps and returns dLoss/d(input) per position.
std::vector<Vec> gru_backward(const ParamSet& ps, const std::string& prefix,
                              const GruCache& cache, const std::vector<Vec>& d_h,
                              ParamSet& gps);

// Bidirectional encoder: H[t] = concat(forward h_t, backward h_t), L x 2h.
struct BiRnnCache {
  GruCache fwd, bwd;
  size_t hidden = 0;
};

void birnn_init(ParamSet& ps, const std::string& prefix, size_t in_dim, size_t hidden, Rng& rng);
Tensor birnn_encode(const ParamSet& ps, const std::string& prefix, const Tensor& E,
                    BiRnnCache* cache);
// Returns dE (L x d); accumulates parameter grads into gps.
Tensor birnn_backward(const ParamSet& ps, const std::string& prefix, const BiRnnCache& cache,
                      const Tensor& dH, ParamSet& gps);

}  // namespace prodkg::learn

#endif
