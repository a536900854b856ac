#include "prodkg/tagger.hpp"

#include <cmath>

#include "prodkg/attention.hpp"
#include "prodkg/rnn.hpp"

namespace prodkg::learn {

int TagSet::index_of(const text::Tag& t) const {
  if (t.kind == 'O') return 0;
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == t.label) {
      if (t.kind == 'B') return static_cast<int>(1 + 3 * i);
      if (t.kind == 'I') return static_cast<int>(2 + 3 * i);
      return static_cast<int>(3 + 3 * i);
    }
  throw Error("tagset: unknown label '" + t.label + "'");
}

text::Tag TagSet::tag_at(int ix) const {
  if (ix == 0) return {'O', ""};
  const size_t li = (ix - 1) / 3, k = (ix - 1) % 3;
  if (li >= labels.size()) throw Error("tagset: tag index out of range");
  return {k == 0 ? 'B' : (k == 1 ? 'I' : 'E'), labels[li]};
}

std::vector<int> TagSet::encode(const text::TagSeq& tags) const {
  std::vector<int> out;
  out.reserve(tags.size());
  for (const auto& t : tags) out.push_back(index_of(t));
  return out;
}

text::TagSeq TagSet::decode(const std::vector<int>& ixs) const {
  text::TagSeq out;
  out.reserve(ixs.size());
  for (int ix : ixs) out.push_back(tag_at(ix));
  return out;
}

CrfParams Tagger::crf_view() const {
  CrfParams crf;
  crf.transitions = ps.at("crf.trans");
  crf.start = ps.at("crf.start");
  crf.stop = ps.at("crf.stop");
  return crf;
}

int Tagger::type_of(const std::string& id) const {
  auto it = type_index.find(id);
  return it == type_index.end() ? -1 : it->second;
}

namespace {

struct Forward {
  Tensor E, H, C, emissions;
  BiRnnCache rnn;
  CondAttCache att;
  std::vector<int> vocab_ix;
  Vec cond;
};

void run_forward(const Tagger& m, const std::vector<std::string>& tokens, int type_ix,
                 Forward& f, bool want_cache) {
  const size_t L = tokens.size();
  const size_t d = m.cfg.emb_dim;
  const Tensor& embed = m.ps.at("embed");
  f.vocab_ix.resize(L);
  f.E = Tensor(L, d);
  for (size_t t = 0; t < L; ++t) {
    f.vocab_ix[t] = m.vocab.lookup(tokens[t]);
    const double* row = embed.row(f.vocab_ix[t]);
    for (size_t j = 0; j < d; ++j) f.E(t, j) = row[j];
  }
  f.H = birnn_encode(m.ps, "rnn.", f.E, want_cache ? &f.rnn : nullptr);
  if (m.cfg.cond_attention) {
    f.cond.assign(m.cond_dim, 0.0);
    if (type_ix >= 0) {
      auto it = m.type_cond.find(m.types[type_ix]);
      if (it != m.type_cond.end()) f.cond = it->second;
    }
    f.C = cond_self_attention(m.ps, "att.", f.H, f.cond, want_cache ? &f.att : nullptr);
  } else {
    f.C = f.H;
  }
  const Tensor& W = m.ps.at("out.w");
  const Tensor& b = m.ps.at("out.b");
  const size_t K = W.rows();
  f.emissions = Tensor(L, K);
  for (size_t t = 0; t < L; ++t)
    for (size_t k = 0; k < K; ++k)
      f.emissions(t, k) = dot(W.row(k), f.C.row(t), W.cols()) + b(k);
}

// attention-pooled categorization over the shared encoder states
struct CatForward {
  Vec alpha, pooled, probs;
};

double cat_forward(const Tagger& m, const Tensor& H, int gold_type, CatForward& cf) {
  const Tensor& pool = m.ps.at("cat.pool");
  const Tensor& W = m.ps.at("cat.w");
  const Tensor& b = m.ps.at("cat.b");
  const size_t L = H.rows(), k2 = H.cols(), T = W.rows();
  cf.alpha.assign(L, 0.0);
  for (size_t t = 0; t < L; ++t) cf.alpha[t] = dot(pool.data.data(), H.row(t), k2);
  softmax_inplace(cf.alpha);
  cf.pooled.assign(k2, 0.0);
  for (size_t t = 0; t < L; ++t)
    for (size_t j = 0; j < k2; ++j) cf.pooled[j] += cf.alpha[t] * H(t, j);
  cf.probs.assign(T, 0.0);
  for (size_t c = 0; c < T; ++c) cf.probs[c] = dot(W.row(c), cf.pooled.data(), k2) + b(c);
  softmax_inplace(cf.probs);
  const double p = std::max(cf.probs[gold_type], 1e-12);
  return -std::log(p);
}

void cat_backward(const Tagger& m, const Tensor& H, int gold_type, const CatForward& cf,
                  double scale, Tensor& dH, ParamSet& gps) {
  const Tensor& pool = m.ps.at("cat.pool");
  const Tensor& W = m.ps.at("cat.w");
  Tensor& gpool = gps.at("cat.pool");
  Tensor& gW = gps.at("cat.w");
  Tensor& gb = gps.at("cat.b");
  const size_t L = H.rows(), k2 = H.cols(), T = W.rows();

  Vec dlogits(cf.probs);
  dlogits[gold_type] -= 1.0;
  for (auto& v : dlogits) v *= scale;
  Vec dg(k2, 0.0);
  for (size_t c = 0; c < T; ++c) {
    gb(c) += dlogits[c];
    for (size_t j = 0; j < k2; ++j) {
      gW(c, j) += dlogits[c] * cf.pooled[j];
      dg[j] += W(c, j) * dlogits[c];
    }
  }
  Vec dalpha(L, 0.0);
  for (size_t t = 0; t < L; ++t) {
    dalpha[t] = dot(dg.data(), H.row(t), k2);
    for (size_t j = 0; j < k2; ++j) dH(t, j) += cf.alpha[t] * dg[j];
  }
  double inner = 0;
  for (size_t t = 0; t < L; ++t) inner += cf.alpha[t] * dalpha[t];
  for (size_t t = 0; t < L; ++t) {
    const double ds = cf.alpha[t] * (dalpha[t] - inner);
    for (size_t j = 0; j < k2; ++j) {
      gpool(j) += ds * H(t, j);
      dH(t, j) += ds * pool(j);
    }
  }
}

struct TaggerTrainable : Trainable {
  Tagger& m;
  const std::vector<TaggerExample>& data;

  TaggerTrainable(Tagger& model, const std::vector<TaggerExample>& d) : m(model), data(d) {}
  ParamSet& params() override { return m.ps; }
  size_t dataset_size() const override { return data.size(); }

  double loss_and_grad(const std::vector<size_t>& batch, ParamSet& gps) override {
    double total = 0;
    for (size_t ix : batch) {
      const TaggerExample& ex = data[ix];
      if (ex.tokens.empty()) continue;
      Forward f;
      run_forward(m, ex.tokens, ex.type_index, f, true);

      CrfParams crf = m.crf_view();
      CrfGrad cg;
      double loss = crf_nll_and_grad(f.emissions, crf, ex.tags, &cg);

      const size_t L = ex.tokens.size();
      const Tensor& W = m.ps.at("out.w");
      const size_t K = W.rows(), k2 = W.cols();
      const double inv = 1.0 / batch.size();

      for (size_t i = 0; i < cg.d_transitions.size(); ++i)
        gps.at("crf.trans").data[i] += inv * cg.d_transitions.data[i];
      for (size_t i = 0; i < cg.d_start.size(); ++i) {
        gps.at("crf.start").data[i] += inv * cg.d_start.data[i];
        gps.at("crf.stop").data[i] += inv * cg.d_stop.data[i];
      }

      Tensor dC(L, k2);
      Tensor& gW = gps.at("out.w");
      Tensor& gb = gps.at("out.b");
      for (size_t t = 0; t < L; ++t)
        for (size_t k = 0; k < K; ++k) {
          const double de = inv * cg.d_emissions(t, k);
          if (de == 0.0) continue;
          gb(k) += de;
          for (size_t j = 0; j < k2; ++j) {
            gW(k, j) += de * f.C(t, j);
            dC(t, j) += de * W(k, j);
          }
        }

      Tensor dH = m.cfg.cond_attention ? cond_att_backward(m.ps, "att.", f.att, dC, gps)
                                       : std::move(dC);

      if (m.cfg.lambda_cat > 0 && ex.type_index >= 0) {
        CatForward cf;
        loss += m.cfg.lambda_cat * cat_forward(m, f.H, ex.type_index, cf);
        cat_backward(m, f.H, ex.type_index, cf, m.cfg.lambda_cat * inv, dH, gps);
      }

      Tensor dE = birnn_backward(m.ps, "rnn.", f.rnn, dH, gps);
      Tensor& gE = gps.at("embed");
      for (size_t t = 0; t < L; ++t) {
        double* row = gE.row(f.vocab_ix[t]);
        for (size_t j = 0; j < dE.cols(); ++j) row[j] += dE(t, j);
      }
      total += loss;
    }
    return total / batch.size();
  }
};

}  // namespace

Tagger tagger_train(const std::vector<TaggerExample>& data, const TaggerConfig& cfg,
                    const TagSet& tagset, const std::vector<std::string>& types,
                    const std::map<std::string, Vec>& type_cond,
                    std::vector<double>* loss_curve) {
  if (data.empty()) throw Error("tagger_train: empty dataset");
  Tagger m;
  m.cfg = cfg;
  m.tagset = tagset;
  m.types = types;
  for (size_t i = 0; i < types.size(); ++i) m.type_index[types[i]] = static_cast<int>(i);
  m.type_cond = type_cond;
  if (cfg.cond_attention) {
    if (type_cond.empty()) throw Error("tagger_train: conditioning requires type vectors");
    m.cond_dim = type_cond.begin()->second.size();
    for (const auto& ex : data)
      if (ex.type_index >= 0 && !type_cond.count(types[ex.type_index]))
        throw Error("tagger_train: missing type embedding for '" + types[ex.type_index] + "'");
  }

  std::vector<std::vector<std::string>> token_lists;
  for (const auto& ex : data) token_lists.push_back(ex.tokens);
  m.vocab = Vocab::build(token_lists, cfg.vocab_min_count);

  Rng rng(derive_seed(cfg.train.seed, "tagger-init"));
  const size_t K = tagset.n_tags(), d = cfg.emb_dim, h = cfg.hidden;
  m.ps.init_seed = cfg.train.seed;
  m.ps.add("embed", make_uniform(m.vocab.size(), d, rng, 1.0 / std::sqrt((double)d)));
  birnn_init(m.ps, "rnn.", d, h, rng);
  if (cfg.cond_attention) cond_att_init(m.ps, "att.", 2 * h, m.cond_dim, cfg.att_dim, rng);
  m.ps.add("out.w", make_uniform(K, 2 * h, rng, 1.0 / std::sqrt(2.0 * h)));
  m.ps.add("out.b", Tensor::vec(K, 0.0));
  m.ps.add("crf.trans", make_uniform(K, K, rng, 0.01));
  m.ps.add("crf.start", Tensor::vec(K, 0.0));
  m.ps.add("crf.stop", Tensor::vec(K, 0.0));
  if (!types.empty()) {
    m.ps.add("cat.pool", make_uniform(2 * h, 1, rng, 1.0 / std::sqrt(2.0 * h)));
    m.ps.add("cat.w", make_uniform(types.size(), 2 * h, rng, 1.0 / std::sqrt(2.0 * h)));
    m.ps.add("cat.b", Tensor::vec(types.size(), 0.0));
  }

  TaggerTrainable trainable(m, data);
  TrainResult r = train(trainable, cfg.train);
  if (loss_curve) *loss_curve = r.loss_curve;
  return m;
}

TagResult tagger_decode(const Tagger& m, const std::vector<std::string>& tokens,
                        const std::string& type_id) {
  if (tokens.empty()) return {};
  int type_ix = m.type_of(type_id);
  if (m.cfg.cond_attention && (type_ix < 0 || !m.type_cond.count(type_id)) &&
      m.cfg.lambda_cat > 0)
    type_ix = tagger_predict_type(m, tokens);
  Forward f;
  run_forward(m, tokens, type_ix, f, false);
  CrfParams crf = m.crf_view();
  auto [path, score] = crf_viterbi(f.emissions, crf);
  const double logz = crf_log_partition(f.emissions, crf);
  return {path, std::exp(std::min(0.0, score - logz))};
}

int tagger_predict_type(const Tagger& m, const std::vector<std::string>& tokens) {
  if (!m.ps.has("cat.w")) throw Error("tagger: no categorization head");
  Forward f;
  run_forward(m, tokens, -1, f, false);
  CatForward cf;
  cat_forward(m, f.H, 0, cf);
  size_t best = 0;
  for (size_t c = 1; c < cf.probs.size(); ++c)
    if (cf.probs[c] > cf.probs[best]) best = c;
  return static_cast<int>(best);
}

Tensor tagger_attention(const Tagger& m, const std::vector<std::string>& tokens,
                        const std::string& type_id) {
  if (!m.cfg.cond_attention) throw Error("tagger: model has no attention layer");
  Forward f;
  run_forward(m, tokens, m.type_of(type_id), f, true);
  return f.att.alpha;
}

}  // namespace prodkg::learn
