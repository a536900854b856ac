#include "prodkg/transformer.hpp"

#include <cmath>

namespace prodkg::learn {

static constexpr double kLnEps = 1e-5;

// C = A * B, A [m,p], B [p,n]
static Tensor matmul(const Tensor& A, const Tensor& B) {
  const size_t m = A.rows(), p = A.cols(), n = B.cols();
  Tensor C(m, n);
  for (size_t i = 0; i < m; ++i)
    for (size_t kk = 0; kk < p; ++kk) {
      const double a = A(i, kk);
      if (a == 0.0) continue;
      for (size_t j = 0; j < n; ++j) C(i, j) += a * B(kk, j);
    }
  return C;
}

// C = A^T * B, A [p,m], B [p,n]
static Tensor matmul_tn(const Tensor& A, const Tensor& B) {
  const size_t p = A.rows(), m = A.cols(), n = B.cols();
  Tensor C(m, n);
  for (size_t kk = 0; kk < p; ++kk)
    for (size_t i = 0; i < m; ++i) {
      const double a = A(kk, i);
      if (a == 0.0) continue;
      for (size_t j = 0; j < n; ++j) C(i, j) += a * B(kk, j);
    }
  return C;
}

// C = A * B^T, A [m,p], B [n,p]
static Tensor matmul_nt(const Tensor& A, const Tensor& B) {
  const size_t m = A.rows(), p = A.cols(), n = B.rows();
  Tensor C(m, n);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) C(i, j) = dot(A.row(i), B.row(j), p);
  return C;
}

static Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                         LayerNormCache* cache) {
  const size_t L = x.rows(), d = x.cols();
  Tensor out(L, d), xhat(L, d);
  Vec inv_std(L);
  for (size_t i = 0; i < L; ++i) {
    double mu = 0;
    for (size_t j = 0; j < d; ++j) mu += x(i, j);
    mu /= d;
    double var = 0;
    for (size_t j = 0; j < d; ++j) {
      const double c = x(i, j) - mu;
      var += c * c;
    }
    var /= d;
    const double is = 1.0 / std::sqrt(var + kLnEps);
    inv_std[i] = is;
    for (size_t j = 0; j < d; ++j) {
      xhat(i, j) = (x(i, j) - mu) * is;
      out(i, j) = gain(j) * xhat(i, j) + bias(j);
    }
  }
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

static Tensor layer_norm_backward(const LayerNormCache& cache, const Tensor& gain,
                                  const Tensor& dOut, Tensor& dGain, Tensor& dBias) {
  const size_t L = dOut.rows(), d = dOut.cols();
  Tensor dx(L, d);
  for (size_t i = 0; i < L; ++i) {
    double m1 = 0, m2 = 0;
    for (size_t j = 0; j < d; ++j) {
      const double dxh = dOut(i, j) * gain(j);
      m1 += dxh;
      m2 += dxh * cache.xhat(i, j);
      dGain(j) += dOut(i, j) * cache.xhat(i, j);
      dBias(j) += dOut(i, j);
    }
    m1 /= d;
    m2 /= d;
    for (size_t j = 0; j < d; ++j) {
      const double dxh = dOut(i, j) * gain(j);
      dx(i, j) = cache.inv_std[i] * (dxh - m1 - cache.xhat(i, j) * m2);
    }
  }
  return dx;
}

static double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }
static double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::sqrt(2.0)));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return cdf + x * pdf;
}

static std::string lkey(const std::string& prefix, size_t l, const char* name) {
  return prefix + "l" + std::to_string(l) + "." + name;
}

void transformer_init(ParamSet& ps, const std::string& prefix, const TransformerConfig& cfg,
                      Rng& rng) {
  if (cfg.dim % cfg.heads != 0) throw Error("transformer: dim must be divisible by heads");
  const double rd = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
  const double rf = 1.0 / std::sqrt(static_cast<double>(cfg.ff));
  for (size_t l = 0; l < cfg.layers; ++l) {
    ps.add(lkey(prefix, l, "ln1.g"), Tensor::vec(cfg.dim, 1.0));
    ps.add(lkey(prefix, l, "ln1.b"), Tensor::vec(cfg.dim, 0.0));
    for (const char* n : {"wq", "wk", "wv", "wo"})
      ps.add(lkey(prefix, l, n), make_uniform(cfg.dim, cfg.dim, rng, rd));
    ps.add(lkey(prefix, l, "ln2.g"), Tensor::vec(cfg.dim, 1.0));
    ps.add(lkey(prefix, l, "ln2.b"), Tensor::vec(cfg.dim, 0.0));
    ps.add(lkey(prefix, l, "ff1"), make_uniform(cfg.dim, cfg.ff, rng, rd));
    ps.add(lkey(prefix, l, "ff1.b"), Tensor::vec(cfg.ff, 0.0));
    ps.add(lkey(prefix, l, "ff2"), make_uniform(cfg.ff, cfg.dim, rng, rf));
    ps.add(lkey(prefix, l, "ff2.b"), Tensor::vec(cfg.dim, 0.0));
  }
  ps.add(prefix + "lnf.g", Tensor::vec(cfg.dim, 1.0));
  ps.add(prefix + "lnf.b", Tensor::vec(cfg.dim, 0.0));
}

Tensor transformer_encode(const ParamSet& ps, const std::string& prefix, const Tensor& E,
                          const TransformerConfig& cfg, TransformerCache* cache) {
  if (E.cols() != cfg.dim) throw Error("transformer: input dim mismatch");
  const size_t L = E.rows(), d = cfg.dim, H = cfg.heads, dk = d / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Tensor x = E;
  if (cache) cache->layers.assign(cfg.layers, {});

  for (size_t l = 0; l < cfg.layers; ++l) {
    TransformerLayerCache* lc = cache ? &cache->layers[l] : nullptr;
    if (lc) lc->x_in = x;
    LayerNormCache ln1;
    Tensor xn = layer_norm(x, ps.at(lkey(prefix, l, "ln1.g")), ps.at(lkey(prefix, l, "ln1.b")),
                           &ln1);
    Tensor q = matmul(xn, ps.at(lkey(prefix, l, "wq")));
    Tensor k = matmul(xn, ps.at(lkey(prefix, l, "wk")));
    Tensor v = matmul(xn, ps.at(lkey(prefix, l, "wv")));

    Tensor concat(L, d);
    std::vector<Tensor> att(H);
    for (size_t h = 0; h < H; ++h) {
      Tensor& A = att[h];
      A = Tensor(L, L);
      const size_t off = h * dk;
      for (size_t i = 0; i < L; ++i) {
        Vec srow(L);
        for (size_t j = 0; j < L; ++j)
          srow[j] = scale * dot(q.row(i) + off, k.row(j) + off, dk);
        softmax_inplace(srow);
        for (size_t j = 0; j < L; ++j) A(i, j) = srow[j];
      }
      for (size_t i = 0; i < L; ++i)
        for (size_t j = 0; j < L; ++j) {
          const double aij = A(i, j);
          for (size_t c = 0; c < dk; ++c) concat(i, off + c) += aij * v(j, off + c);
        }
    }
    Tensor attn_out = matmul(concat, ps.at(lkey(prefix, l, "wo")));
    for (size_t i = 0; i < L * d; ++i) x.data[i] += attn_out.data[i];
    if (lc) {
      lc->ln1 = std::move(ln1);
      lc->q = std::move(q);
      lc->k = std::move(k);
      lc->v = std::move(v);
      lc->att = std::move(att);
      lc->concat = concat;
      lc->x_mid = x;
    }

    LayerNormCache ln2;
    Tensor xn2 = layer_norm(x, ps.at(lkey(prefix, l, "ln2.g")), ps.at(lkey(prefix, l, "ln2.b")),
                            &ln2);
    Tensor pre = matmul(xn2, ps.at(lkey(prefix, l, "ff1")));
    const Tensor& b1 = ps.at(lkey(prefix, l, "ff1.b"));
    Tensor act(L, cfg.ff);
    for (size_t i = 0; i < L; ++i)
      for (size_t j = 0; j < cfg.ff; ++j) {
        pre(i, j) += b1(j);
        act(i, j) = gelu(pre(i, j));
      }
    Tensor ff_out = matmul(act, ps.at(lkey(prefix, l, "ff2")));
    const Tensor& b2 = ps.at(lkey(prefix, l, "ff2.b"));
    for (size_t i = 0; i < L; ++i)
      for (size_t j = 0; j < d; ++j) x(i, j) += ff_out(i, j) + b2(j);
    if (lc) {
      lc->ln2 = std::move(ln2);
      lc->ff_pre = std::move(pre);
      lc->ff_act = std::move(act);
    }
  }
  if (cache) cache->x_final = x;
  LayerNormCache lnf;
  Tensor out = layer_norm(x, ps.at(prefix + "lnf.g"), ps.at(prefix + "lnf.b"), &lnf);
  if (cache) cache->lnf = std::move(lnf);
  return out;
}

Tensor transformer_backward(const ParamSet& ps, const std::string& prefix,
                            const TransformerConfig& cfg, const TransformerCache& cache,
                            const Tensor& dOut, ParamSet& gps) {
  const size_t L = dOut.rows(), d = cfg.dim, H = cfg.heads, dk = d / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  Tensor dx = layer_norm_backward(cache.lnf, ps.at(prefix + "lnf.g"), dOut,
                                  gps.at(prefix + "lnf.g"), gps.at(prefix + "lnf.b"));

  for (size_t l = cfg.layers; l-- > 0;) {
    const TransformerLayerCache& lc = cache.layers[l];

    // ---- feed-forward block ----
    // recompute xn2 from cached stats
    const Tensor& g2 = ps.at(lkey(prefix, l, "ln2.g"));
    const Tensor& b2g = ps.at(lkey(prefix, l, "ln2.b"));
    Tensor xn2(L, d);
    for (size_t i = 0; i < L; ++i)
      for (size_t j = 0; j < d; ++j) xn2(i, j) = g2(j) * lc.ln2.xhat(i, j) + b2g(j);

    Tensor dff_out = dx;  // residual: dx flows both into FF and straight through
    Tensor& gff2b = gps.at(lkey(prefix, l, "ff2.b"));
    for (size_t i = 0; i < L; ++i)
      for (size_t j = 0; j < d; ++j) gff2b(j) += dff_out(i, j);
    Tensor dact = matmul_nt(dff_out, ps.at(lkey(prefix, l, "ff2")));
    {
      Tensor gff2 = matmul_tn(lc.ff_act, dff_out);
      Tensor& acc = gps.at(lkey(prefix, l, "ff2"));
      for (size_t i = 0; i < acc.size(); ++i) acc.data[i] += gff2.data[i];
    }
    Tensor dpre(L, cfg.ff);
    Tensor& gff1b = gps.at(lkey(prefix, l, "ff1.b"));
    for (size_t i = 0; i < L; ++i)
      for (size_t j = 0; j < cfg.ff; ++j) {
        dpre(i, j) = dact(i, j) * gelu_grad(lc.ff_pre(i, j));
        gff1b(j) += dpre(i, j);
      }
    Tensor dxn2 = matmul_nt(dpre, ps.at(lkey(prefix, l, "ff1")));
    {
      Tensor gff1 = matmul_tn(xn2, dpre);
      Tensor& acc = gps.at(lkey(prefix, l, "ff1"));
      for (size_t i = 0; i < acc.size(); ++i) acc.data[i] += gff1.data[i];
    }
    Tensor dx_mid = layer_norm_backward(lc.ln2, g2, dxn2, gps.at(lkey(prefix, l, "ln2.g")),
                                        gps.at(lkey(prefix, l, "ln2.b")));
    for (size_t i = 0; i < L * d; ++i) dx_mid.data[i] += dx.data[i];

    // ---- attention block ----
    const Tensor& g1 = ps.at(lkey(prefix, l, "ln1.g"));
    const Tensor& b1g = ps.at(lkey(prefix, l, "ln1.b"));
    Tensor xn(L, d);
    for (size_t i = 0; i < L; ++i)
      for (size_t j = 0; j < d; ++j) xn(i, j) = g1(j) * lc.ln1.xhat(i, j) + b1g(j);

    Tensor dconcat = matmul_nt(dx_mid, ps.at(lkey(prefix, l, "wo")));
    {
      Tensor gwo = matmul_tn(lc.concat, dx_mid);
      Tensor& acc = gps.at(lkey(prefix, l, "wo"));
      for (size_t i = 0; i < acc.size(); ++i) acc.data[i] += gwo.data[i];
    }

    Tensor dq(L, d), dkk(L, d), dv(L, d);
    for (size_t h = 0; h < H; ++h) {
      const size_t off = h * dk;
      const Tensor& A = lc.att[h];
      Tensor dA(L, L);
      for (size_t i = 0; i < L; ++i)
        for (size_t j = 0; j < L; ++j) {
          double s = 0;
          const double aij = A(i, j);
          for (size_t c = 0; c < dk; ++c) {
            s += dconcat(i, off + c) * lc.v(j, off + c);
            dv(j, off + c) += aij * dconcat(i, off + c);
          }
          dA(i, j) = s;
        }
      for (size_t i = 0; i < L; ++i) {
        double inner = 0;
        for (size_t j = 0; j < L; ++j) inner += A(i, j) * dA(i, j);
        for (size_t j = 0; j < L; ++j) {
          const double dS = A(i, j) * (dA(i, j) - inner) * scale;
          for (size_t c = 0; c < dk; ++c) {
            dq(i, off + c) += dS * lc.k(j, off + c);
            dkk(j, off + c) += dS * lc.q(i, off + c);
          }
        }
      }
    }

    Tensor dxn = matmul_nt(dq, ps.at(lkey(prefix, l, "wq")));
    {
      Tensor t = matmul_nt(dkk, ps.at(lkey(prefix, l, "wk")));
      for (size_t i = 0; i < L * d; ++i) dxn.data[i] += t.data[i];
      t = matmul_nt(dv, ps.at(lkey(prefix, l, "wv")));
      for (size_t i = 0; i < L * d; ++i) dxn.data[i] += t.data[i];
    }
    {
      Tensor t = matmul_tn(xn, dq);
      Tensor& acc = gps.at(lkey(prefix, l, "wq"));
      for (size_t i = 0; i < acc.size(); ++i) acc.data[i] += t.data[i];
      t = matmul_tn(xn, dkk);
      Tensor& acck = gps.at(lkey(prefix, l, "wk"));
      for (size_t i = 0; i < acck.size(); ++i) acck.data[i] += t.data[i];
      t = matmul_tn(xn, dv);
      Tensor& accv = gps.at(lkey(prefix, l, "wv"));
      for (size_t i = 0; i < accv.size(); ++i) accv.data[i] += t.data[i];
    }
    Tensor dx_in = layer_norm_backward(lc.ln1, g1, dxn, gps.at(lkey(prefix, l, "ln1.g")),
                                       gps.at(lkey(prefix, l, "ln1.b")));
    for (size_t i = 0; i < L * d; ++i) dx_in.data[i] += dx_mid.data[i];
    dx = std::move(dx_in);
  }
  return dx;
}

Tensor sinusoid_positions(size_t max_len, size_t dim) {
  Tensor P(max_len, dim);
  for (size_t pos = 0; pos < max_len; ++pos)
    for (size_t i = 0; i < dim; ++i) {
      const double angle = pos / std::pow(10000.0, 2.0 * (i / 2) / static_cast<double>(dim));
      P(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  return P;
}

}  // namespace prodkg::learn
