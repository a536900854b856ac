#include "prodkg/embedding.hpp"

#include <sstream>

#include "prodkg/text.hpp"

namespace prodkg::learn {

Vocab Vocab::build(const std::vector<std::vector<std::string>>& token_lists, size_t min_count) {
  std::map<std::string, size_t> counts;
  for (const auto& list : token_lists)
    for (const auto& t : list) counts[fold_case(t)]++;
  Vocab v;
  int next = 1;
  for (const auto& [tok, n] : counts)
    if (n >= min_count) v.index[tok] = next++;
  return v;
}

void SubwordEmbedding::init() {
  Rng rng(derive_seed(seed, "subword-embedding"));
  table = make_uniform(buckets, dim, rng, 1.0 / std::sqrt(static_cast<double>(dim)));
}

Vec SubwordEmbedding::token_vec(const std::string& token) const {
  const std::string padded = "<" + fold_case(token) + ">";
  Vec out(dim, 0.0);
  size_t n_grams = 0;
  for (size_t n = 3; n <= 5; ++n) {
    if (padded.size() < n) break;
    for (size_t i = 0; i + n <= padded.size(); ++i) {
      const uint64_t b = fnv1a64(std::string_view(padded).substr(i, n)) % buckets;
      const double* row = table.row(b);
      for (size_t d = 0; d < dim; ++d) out[d] += row[d];
      ++n_grams;
    }
  }
  if (n_grams > 0)
    for (auto& v : out) v /= static_cast<double>(n_grams);
  return out;
}

Vec SubwordEmbedding::text_vec(const std::string& s) const {
  auto seq = text::tokenize(s);
  std::vector<std::string> toks;
  toks.reserve(seq.size());
  for (const auto& t : seq.tokens) toks.push_back(t.folded);
  return mean_vec(toks);
}

Vec SubwordEmbedding::mean_vec(const std::vector<std::string>& tokens) const {
  Vec out(dim, 0.0);
  if (tokens.empty()) return out;
  for (const auto& t : tokens) {
    Vec tv = token_vec(t);
    axpy(1.0, tv, out);
  }
  for (auto& v : out) v /= static_cast<double>(tokens.size());
  return out;
}

double cosine(const Vec& a, const Vec& b) {
  const double na = norm2(a), nb = norm2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace prodkg::learn
