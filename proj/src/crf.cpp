#include "prodkg/crf.hpp"

namespace prodkg::learn {

CrfParams CrfParams::zeros(size_t n_tags) {
  CrfParams p;
  p.transitions = Tensor(n_tags, n_tags);
  p.start = Tensor::vec(n_tags);
  p.stop = Tensor::vec(n_tags);
  return p;
}

static void check_input(const Tensor& emissions, const CrfParams& crf) {
  if (emissions.rows() == 0) throw Error("crf: empty sequence");
  if (emissions.cols() != crf.n_tags()) throw Error("crf: emissions/tag count mismatch");
}

double crf_path_score(const Tensor& emissions, const CrfParams& crf,
                      const std::vector<int>& tags) {
  check_input(emissions, crf);
  const size_t L = emissions.rows();
  if (tags.size() != L) throw Error("crf: tag sequence length mismatch");
  const int K = static_cast<int>(crf.n_tags());
  for (int y : tags)
    if (y < 0 || y >= K) throw Error("crf: tag index out of range");
  double s = crf.start(tags[0]) + emissions(0, tags[0]);
  for (size_t t = 1; t < L; ++t)
    s += crf.transitions(tags[t - 1], tags[t]) + emissions(t, tags[t]);
  return s + crf.stop(tags[L - 1]);
}

// alpha(t,j) = log sum over prefixes ending in tag j at position t
static Tensor forward_alpha(const Tensor& emissions, const CrfParams& crf) {
  const size_t L = emissions.rows(), K = emissions.cols();
  Tensor alpha(L, K);
  for (size_t j = 0; j < K; ++j) alpha(0, j) = crf.start(j) + emissions(0, j);
  Vec acc(K);
  for (size_t t = 1; t < L; ++t)
    for (size_t j = 0; j < K; ++j) {
      for (size_t i = 0; i < K; ++i) acc[i] = alpha(t - 1, i) + crf.transitions(i, j);
      alpha(t, j) = log_sum_exp(acc.data(), K) + emissions(t, j);
    }
  return alpha;
}

// beta(t,i) = log sum over suffixes given tag i at position t (incl. stop)
static Tensor backward_beta(const Tensor& emissions, const CrfParams& crf) {
  const size_t L = emissions.rows(), K = emissions.cols();
  Tensor beta(L, K);
  for (size_t i = 0; i < K; ++i) beta(L - 1, i) = crf.stop(i);
  Vec acc(K);
  for (size_t t = L - 1; t-- > 0;)
    for (size_t i = 0; i < K; ++i) {
      for (size_t j = 0; j < K; ++j)
        acc[j] = crf.transitions(i, j) + emissions(t + 1, j) + beta(t + 1, j);
      beta(t, i) = log_sum_exp(acc.data(), K);
    }
  return beta;
}

double crf_log_partition(const Tensor& emissions, const CrfParams& crf) {
  check_input(emissions, crf);
  const size_t L = emissions.rows(), K = emissions.cols();
  Tensor alpha = forward_alpha(emissions, crf);
  Vec fin(K);
  for (size_t j = 0; j < K; ++j) fin[j] = alpha(L - 1, j) + crf.stop(j);
  return log_sum_exp(fin.data(), K);
}

std::pair<std::vector<int>, double> crf_viterbi(const Tensor& emissions, const CrfParams& crf) {
  check_input(emissions, crf);
  const size_t L = emissions.rows(), K = emissions.cols();
  Tensor delta(L, K);
  std::vector<std::vector<int>> back(L, std::vector<int>(K, 0));
  for (size_t j = 0; j < K; ++j) delta(0, j) = crf.start(j) + emissions(0, j);
  for (size_t t = 1; t < L; ++t)
    for (size_t j = 0; j < K; ++j) {
      // strictly-greater update keeps the lowest predecessor index on ties,
      // which yields the lowest tag at the latest differing position
      double best = delta(t - 1, 0) + crf.transitions(0, j);
      int arg = 0;
      for (size_t i = 1; i < K; ++i) {
        double s = delta(t - 1, i) + crf.transitions(i, j);
        if (s > best) {
          best = s;
          arg = static_cast<int>(i);
        }
      }
      delta(t, j) = best + emissions(t, j);
      back[t][j] = arg;
    }
  double best = delta(L - 1, 0) + crf.stop(0);
  int arg = 0;
  for (size_t j = 1; j < K; ++j) {
    double s = delta(L - 1, j) + crf.stop(j);
    if (s > best) {
      best = s;
      arg = static_cast<int>(j);
    }
  }
  std::vector<int> path(L);
  path[L - 1] = arg;
  for (size_t t = L - 1; t > 0; --t) path[t - 1] = back[t][path[t]];
  return {path, best};
}

Tensor crf_marginals(const Tensor& emissions, const CrfParams& crf) {
  check_input(emissions, crf);
  const size_t L = emissions.rows(), K = emissions.cols();
  Tensor alpha = forward_alpha(emissions, crf);
  Tensor beta = backward_beta(emissions, crf);
  Vec fin(K);
  for (size_t j = 0; j < K; ++j) fin[j] = alpha(L - 1, j) + crf.stop(j);
  const double logZ = log_sum_exp(fin.data(), K);
  Tensor m(L, K);
  for (size_t t = 0; t < L; ++t)
    for (size_t j = 0; j < K; ++j) m(t, j) = std::exp(alpha(t, j) + beta(t, j) - logZ);
  return m;
}

double crf_nll_and_grad(const Tensor& emissions, const CrfParams& crf,
                        const std::vector<int>& gold, CrfGrad* grad) {
  check_input(emissions, crf);
  const size_t L = emissions.rows(), K = emissions.cols();
  if (gold.size() != L) throw Error("crf: gold length mismatch");
  for (int y : gold)
    if (y < 0 || y >= static_cast<int>(K)) throw Error("crf: tag index out of range");

  Tensor alpha = forward_alpha(emissions, crf);
  Vec fin(K);
  for (size_t j = 0; j < K; ++j) fin[j] = alpha(L - 1, j) + crf.stop(j);
  const double logZ = log_sum_exp(fin.data(), K);
  const double nll = logZ - crf_path_score(emissions, crf, gold);
  if (!grad) return nll;

  Tensor beta = backward_beta(emissions, crf);
  grad->d_emissions = Tensor(L, K);
  grad->d_transitions = Tensor(K, K);
  grad->d_start = Tensor::vec(K);
  grad->d_stop = Tensor::vec(K);

  for (size_t t = 0; t < L; ++t)
    for (size_t j = 0; j < K; ++j)
      grad->d_emissions(t, j) = std::exp(alpha(t, j) + beta(t, j) - logZ);
  for (size_t t = 0; t + 1 < L; ++t)
    for (size_t i = 0; i < K; ++i)
      for (size_t j = 0; j < K; ++j)
        grad->d_transitions(i, j) += std::exp(alpha(t, i) + crf.transitions(i, j) +
                                              emissions(t + 1, j) + beta(t + 1, j) - logZ);
  for (size_t j = 0; j < K; ++j) {
    grad->d_start(j) = std::exp(crf.start(j) + emissions(0, j) + beta(0, j) - logZ);
    grad->d_stop(j) = std::exp(alpha(L - 1, j) + crf.stop(j) - logZ);
  }

  // subtract the gold path counts
  grad->d_emissions(0, gold[0]) -= 1.0;
  for (size_t t = 1; t < L; ++t) {
    grad->d_emissions(t, gold[t]) -= 1.0;
    grad->d_transitions(gold[t - 1], gold[t]) -= 1.0;
  }
  grad->d_start(gold[0]) -= 1.0;
  grad->d_stop(gold[L - 1]) -= 1.0;
  return nll;
}

}  // namespace prodkg::learn
