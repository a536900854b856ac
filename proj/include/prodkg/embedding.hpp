#ifndef PRODKG_EMBEDDING_HPP
#define PRODKG_EMBEDDING_HPP

#include <map>
#include <string>
#include <vector>

#include "prodkg/params.hpp"

namespace prodkg::learn {

// Token vocabulary for trainable embedding tables. Index 0 is the unknown
// token; known tokens start at 1. Tokens are stored case-folded.
struct Vocab {
  std::map<std::string, int> index;

  int lookup(const std::string& folded) const {
    auto it = index.find(folded);
    return it == index.end() ? 0 : it->second;
  }
  size_t size() const { return index.size() + 1; }  // +1 for <unk>

  static Vocab build(const std::vector<std::vector<std::string>>& token_lists,
                     size_t min_count = 1);
};

// Frozen hashed character n-gram embeddings, n in {3,4,5} over "<token>".
// Every token, seen or not, maps to a deterministic vector: the mean of its
// n-gram bucket rows. Stands in for pre-trained subword vectors without any
// external downloads.
struct SubwordEmbedding {
  size_t buckets = 2048;
  size_t dim = 32;
  uint64_t seed = 0;
  Tensor table;  // [buckets, dim], frozen after init

  void init();
  Vec token_vec(const std::string& token) const;
  Vec text_vec(const std::string& text) const;  // mean over whitespace tokens
  Vec mean_vec(const std::vector<std::string>& tokens) const;
};

double cosine(const Vec& a, const Vec& b);

}  // namespace prodkg::learn

#endif
