#ifndef PRODKG_TENSOR_HPP
#define PRODKG_TENSOR_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "prodkg/common.hpp"

namespace prodkg::learn {

using Vec = std::vector<double>;

// Dense row-major tensor of doubles, rank 1 or 2. The whole kernel runs in
// double precision so finite-difference checks stay meaningful.
struct Tensor {
  std::vector<size_t> shape;
  Vec data;

  Tensor() = default;
  Tensor(size_t r, size_t c, double fill = 0.0) : shape{r, c}, data(r * c, fill) {}

  static Tensor vec(size_t n, double fill = 0.0) {
    Tensor t;
    t.shape = {n};
    t.data.assign(n, fill);
    return t;
  }

  size_t size() const { return data.size(); }
  size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& operator()(size_t i) { return data[i]; }
  double operator()(size_t i) const { return data[i]; }
  double& operator()(size_t i, size_t j) { return data[i * cols() + j]; }
  double operator()(size_t i, size_t j) const { return data[i * cols() + j]; }

  double* row(size_t i) { return data.data() + i * cols(); }
  const double* row(size_t i) const { return data.data() + i * cols(); }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline double dot(const double* a, const double* b, size_t n) {
  double s = 0;
  for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  return dot(a.data(), b.data(), a.size());
}

inline void axpy(double a, const Vec& x, Vec& y) {
  assert(x.size() == y.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

// out = W x, W is [m,n]
inline void matvec(const Tensor& W, const Vec& x, Vec& out) {
  const size_t m = W.rows(), n = W.cols();
  assert(x.size() == n);
  out.assign(m, 0.0);
  for (size_t i = 0; i < m; ++i) out[i] = dot(W.row(i), x.data(), n);
}

// out = W^T x, W is [m,n], x is m
inline void matvec_t(const Tensor& W, const Vec& x, Vec& out) {
  const size_t m = W.rows(), n = W.cols();
  assert(x.size() == m);
  out.assign(n, 0.0);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) out[j] += W(i, j) * x[i];
}

// G += a b^T, G is [|a|,|b|]
inline void outer_add(Tensor& G, const Vec& a, const Vec& b) {
  assert(G.rows() == a.size() && G.cols() == b.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) G(i, j) += a[i] * b[j];
}

inline double log_sum_exp(const double* v, size_t n) {
  double mx = v[0];
  for (size_t i = 1; i < n; ++i) mx = std::max(mx, v[i]);
  double s = 0;
  for (size_t i = 0; i < n; ++i) s += std::exp(v[i] - mx);
  return mx + std::log(s);
}

inline void softmax_inplace(Vec& v) {
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  double s = 0;
  for (auto& x : v) {
    x = std::exp(x - mx);
    s += x;
  }
  for (auto& x : v) x /= s;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace prodkg::learn

#endif
