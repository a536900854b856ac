#ifndef PRODKG_TAGGER_HPP
#define PRODKG_TAGGER_HPP

#include <map>
#include <string>
#include <vector>

#include "prodkg/crf.hpp"
#include "prodkg/embedding.hpp"
#include "prodkg/text.hpp"
#include "prodkg/train.hpp"

namespace prodkg::learn {

// BIOE tag inventory over a label set: index 0 is O, then B/I/E per label.
struct TagSet {
  std::vector<std::string> labels;

  size_t n_tags() const { return 1 + 3 * labels.size(); }
  int index_of(const text::Tag& t) const;
  text::Tag tag_at(int ix) const;
  std::vector<int> encode(const text::TagSeq& tags) const;
  text::TagSeq decode(const std::vector<int>& ixs) const;
};

struct TaggerExample {
  std::vector<std::string> tokens;  // case-folded
  std::vector<int> tags;            // TagSet indices
  int type_index = -1;              // conditioning type / categorization target
};

struct TaggerConfig {
  size_t emb_dim = 32;
  size_t hidden = 32;
  size_t att_dim = 32;
  bool cond_attention = false;  // CondSelfAtt conditioning on the type vector
  double lambda_cat = 0.0;      // multi-task categorization weight
  size_t vocab_min_count = 1;
  TrainConfig train{.optimizer = "adam", .lr = 0.01, .epochs = 6, .batch = 8, .seed = 0};
};

// Sequence tagger: trainable token embeddings -> bidirectional GRU ->
// optional conditional self-attention -> dense -> linear-chain CRF, with an
// attention-pooled type classification head sharing the encoder.
struct Tagger {
  TaggerConfig cfg;
  TagSet tagset;
  Vocab vocab;
  std::vector<std::string> types;          // index -> type id
  std::map<std::string, int> type_index;
  std::map<std::string, Vec> type_cond;    // frozen conditioning vectors
  size_t cond_dim = 0;
  ParamSet ps;

  CrfParams crf_view() const;
  int type_of(const std::string& id) const;
};

Tagger tagger_train(const std::vector<TaggerExample>& data, const TaggerConfig& cfg,
                    const TagSet& tagset, const std::vector<std::string>& types,
                    const std::map<std::string, Vec>& type_cond,
                    std::vector<double>* loss_curve = nullptr);

struct TagResult {
  std::vector<int> tags;
  double confidence = 0.0;  // exp(path score - logZ)
};

// Viterbi decode conditioned on `type_id` (ignored unless the model uses
// conditional attention; empty id falls back to the categorization head).
TagResult tagger_decode(const Tagger& m, const std::vector<std::string>& tokens,
                        const std::string& type_id = "");

// Argmax of the categorization head (requires lambda_cat > 0 at training).
int tagger_predict_type(const Tagger& m, const std::vector<std::string>& tokens);

// Attention matrix of the CondSelfAtt layer for a given conditioning type.
Tensor tagger_attention(const Tagger& m, const std::vector<std::string>& tokens,
                        const std::string& type_id);

}  // namespace prodkg::learn

#endif
