#include "prodkg/rnn.hpp"

#include <cmath>

namespace prodkg::learn {

void gru_init(ParamSet& ps, const std::string& prefix, size_t in_dim, size_t hidden, Rng& rng) {
  const double rx = 1.0 / std::sqrt(static_cast<double>(in_dim));
  const double rh = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (const char* g : {"wz", "wr", "wh"})
    ps.add(prefix + g, make_uniform(hidden, in_dim, rng, rx));
  for (const char* g : {"uz", "ur", "uh"})
    ps.add(prefix + g, make_uniform(hidden, hidden, rng, rh));
  for (const char* g : {"bz", "br", "bh"}) ps.add(prefix + g, Tensor::vec(hidden, 0.0));
}

std::vector<Vec> gru_forward(const ParamSet& ps, const std::string& prefix,
                             const std::vector<Vec>& xs, GruCache* cache) {
  const Tensor& Wz = ps.at(prefix + "wz");
  const Tensor& Uz = ps.at(prefix + "uz");
  const Tensor& bz = ps.at(prefix + "bz");
  const Tensor& Wr = ps.at(prefix + "wr");
  const Tensor& Ur = ps.at(prefix + "ur");
  const Tensor& br = ps.at(prefix + "br");
  const Tensor& Wh = ps.at(prefix + "wh");
  const Tensor& Uh = ps.at(prefix + "uh");
  const Tensor& bh = ps.at(prefix + "bh");
  const size_t H = bz.size();
  const size_t L = xs.size();

  std::vector<Vec> out(L);
  Vec h(H, 0.0), tmp(H), z(H), r(H), rh_(H), hbar(H);
  if (cache) {
    cache->hidden = H;
    cache->x = xs;
    cache->h_prev.resize(L);
    cache->z.resize(L);
    cache->r.resize(L);
    cache->hbar.resize(L);
    cache->rh.resize(L);
  }
  for (size_t t = 0; t < L; ++t) {
    if (cache) cache->h_prev[t] = h;
    matvec(Wz, xs[t], z);
    matvec(Uz, h, tmp);
    for (size_t i = 0; i < H; ++i) z[i] = sigmoid(z[i] + tmp[i] + bz(i));
    matvec(Wr, xs[t], r);
    matvec(Ur, h, tmp);
    for (size_t i = 0; i < H; ++i) r[i] = sigmoid(r[i] + tmp[i] + br(i));
    for (size_t i = 0; i < H; ++i) rh_[i] = r[i] * h[i];
    matvec(Wh, xs[t], hbar);
    matvec(Uh, rh_, tmp);
    for (size_t i = 0; i < H; ++i) hbar[i] = std::tanh(hbar[i] + tmp[i] + bh(i));
    for (size_t i = 0; i < H; ++i) h[i] = (1.0 - z[i]) * h[i] + z[i] * hbar[i];
    if (cache) {
      cache->z[t] = z;
      cache->r[t] = r;
      cache->hbar[t] = hbar;
      cache->rh[t] = rh_;
    }
    out[t] = h;
  }
  return out;
}

std::vector<Vec> gru_backward(const ParamSet& ps, const std::string& prefix,
                              const GruCache& cache, const std::vector<Vec>& d_h,
                              ParamSet& gps) {
  const Tensor& Uz = ps.at(prefix + "uz");
  const Tensor& Ur = ps.at(prefix + "ur");
  const Tensor& Wz = ps.at(prefix + "wz");
  const Tensor& Wr = ps.at(prefix + "wr");
  const Tensor& Wh = ps.at(prefix + "wh");
  const Tensor& Uh = ps.at(prefix + "uh");
  Tensor& gWz = gps.at(prefix + "wz");
  Tensor& gUz = gps.at(prefix + "uz");
  Tensor& gbz = gps.at(prefix + "bz");
  Tensor& gWr = gps.at(prefix + "wr");
  Tensor& gUr = gps.at(prefix + "ur");
  Tensor& gbr = gps.at(prefix + "br");
  Tensor& gWh = gps.at(prefix + "wh");
  Tensor& gUh = gps.at(prefix + "uh");
  Tensor& gbh = gps.at(prefix + "bh");

  const size_t L = cache.x.size();
  const size_t H = cache.hidden;
  const size_t D = cache.x.empty() ? 0 : cache.x[0].size();

  std::vector<Vec> dx(L, Vec(D, 0.0));
  Vec dh(H, 0.0), da_z(H), da_r(H), da_h(H), drh(H), tmp(H);
  for (size_t t = L; t-- > 0;) {
    for (size_t i = 0; i < H; ++i) dh[i] += d_h[t][i];
    const Vec& z = cache.z[t];
    const Vec& r = cache.r[t];
    const Vec& hbar = cache.hbar[t];
    const Vec& hp = cache.h_prev[t];
    for (size_t i = 0; i < H; ++i) {
      double dz = dh[i] * (hbar[i] - hp[i]);
      da_z[i] = dz * z[i] * (1.0 - z[i]);
      double dhb = dh[i] * z[i];
      da_h[i] = dhb * (1.0 - hbar[i] * hbar[i]);
    }
    // through hbar = tanh(Wh x + Uh (r*h) + bh)
    matvec_t(Uh, da_h, drh);
    for (size_t i = 0; i < H; ++i) {
      double dr = drh[i] * hp[i];
      da_r[i] = dr * r[i] * (1.0 - r[i]);
    }
    outer_add(gWh, da_h, cache.x[t]);
    outer_add(gUh, da_h, cache.rh[t]);
    for (size_t i = 0; i < H; ++i) gbh(i) += da_h[i];
    outer_add(gWz, da_z, cache.x[t]);
    outer_add(gUz, da_z, hp);
    for (size_t i = 0; i < H; ++i) gbz(i) += da_z[i];
    outer_add(gWr, da_r, cache.x[t]);
    outer_add(gUr, da_r, hp);
    for (size_t i = 0; i < H; ++i) gbr(i) += da_r[i];

    // dh_{t-1}
    Vec dh_prev(H, 0.0);
    for (size_t i = 0; i < H; ++i) dh_prev[i] = dh[i] * (1.0 - z[i]) + drh[i] * r[i];
    matvec_t(Uz, da_z, tmp);
    axpy(1.0, tmp, dh_prev);
    matvec_t(Ur, da_r, tmp);
    axpy(1.0, tmp, dh_prev);

    Vec dxi(D, 0.0), tmpd(D);
    matvec_t(Wh, da_h, tmpd);
    axpy(1.0, tmpd, dxi);
    matvec_t(Wz, da_z, tmpd);
    axpy(1.0, tmpd, dxi);
    matvec_t(Wr, da_r, tmpd);
    axpy(1.0, tmpd, dxi);
    dx[t] = std::move(dxi);
    dh = std::move(dh_prev);
  }
  return dx;
}

void birnn_init(ParamSet& ps, const std::string& prefix, size_t in_dim, size_t hidden, Rng& rng) {
  gru_init(ps, prefix + "fwd.", in_dim, hidden, rng);
  gru_init(ps, prefix + "bwd.", in_dim, hidden, rng);
}

Tensor birnn_encode(const ParamSet& ps, const std::string& prefix, const Tensor& E,
                    BiRnnCache* cache) {
  const size_t L = E.rows(), D = E.cols();
  if (L == 0) throw Error("birnn: empty sequence");
  std::vector<Vec> xs(L, Vec(D));
  for (size_t t = 0; t < L; ++t)
    for (size_t j = 0; j < D; ++j) xs[t][j] = E(t, j);
  std::vector<Vec> rev(L);
  for (size_t t = 0; t < L; ++t) rev[t] = xs[L - 1 - t];

  auto hf = gru_forward(ps, prefix + "fwd.", xs, cache ? &cache->fwd : nullptr);
  auto hb = gru_forward(ps, prefix + "bwd.", rev, cache ? &cache->bwd : nullptr);
  const size_t H = hf[0].size();
  if (cache) cache->hidden = H;
  Tensor out(L, 2 * H);
  for (size_t t = 0; t < L; ++t)
    for (size_t i = 0; i < H; ++i) {
      out(t, i) = hf[t][i];
      out(t, H + i) = hb[L - 1 - t][i];  // align reverse pass to positions
    }
  return out;
}

Tensor birnn_backward(const ParamSet& ps, const std::string& prefix, const BiRnnCache& cache,
                      const Tensor& dH, ParamSet& gps) {
  const size_t L = dH.rows();
  const size_t H = cache.hidden;
  std::vector<Vec> df(L, Vec(H)), db(L, Vec(H));
  for (size_t t = 0; t < L; ++t)
    for (size_t i = 0; i < H; ++i) {
      df[t][i] = dH(t, i);
      db[L - 1 - t][i] = dH(t, H + i);
    }
  auto dxf = gru_backward(ps, prefix + "fwd.", cache.fwd, df, gps);
  auto dxb = gru_backward(ps, prefix + "bwd.", cache.bwd, db, gps);
  const size_t D = dxf[0].size();
  Tensor dE(L, D);
  for (size_t t = 0; t < L; ++t)
    for (size_t j = 0; j < D; ++j) dE(t, j) = dxf[t][j] + dxb[L - 1 - t][j];
  return dE;
}

}  // namespace prodkg::learn
