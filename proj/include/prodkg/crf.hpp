#ifndef PRODKG_CRF_HPP
#define PRODKG_CRF_HPP

#include <utility>
#include <vector>

#include "prodkg/tensor.hpp"

namespace prodkg::learn {

// Linear-chain CRF. Path score for tags y over emissions E (L x K):
//   start[y0] + sum_t E(t, yt) + sum_t trans(y_{t-1}, yt) + stop[y_{L-1}]
struct CrfParams {
  Tensor transitions;  // [K,K], trans(i,j) = score of i -> j
  Tensor start;        // [K]
  Tensor stop;         // [K]

  size_t n_tags() const { return start.size(); }
  static CrfParams zeros(size_t n_tags);
};

double crf_path_score(const Tensor& emissions, const CrfParams& crf,
                      const std::vector<int>& tags);

// log sum over all tag sequences of exp(path score), via the forward
// recursion in log space. Stable for scores in [-50, 50].
double crf_log_partition(const Tensor& emissions, const CrfParams& crf);

// Argmax path. Ties resolve to the lowest tag index at the latest position
// where two optimal paths differ.
std::pair<std::vector<int>, double> crf_viterbi(const Tensor& emissions, const CrfParams& crf);

struct CrfGrad {
  Tensor d_emissions;
  Tensor d_transitions;
  Tensor d_start;
  Tensor d_stop;
};

// Negative log-likelihood logZ - score(gold), plus exact gradients from the
// forward-backward marginals. grad may be null when only the loss is needed.
double crf_nll_and_grad(const Tensor& emissions, const CrfParams& crf,
                        const std::vector<int>& gold, CrfGrad* grad);

// Unary marginals P(y_t = j), used for confidence diagnostics.
Tensor crf_marginals(const Tensor& emissions, const CrfParams& crf);

}  // namespace prodkg::learn

#endif
