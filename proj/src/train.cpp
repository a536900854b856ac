#include "prodkg/train.hpp"

#include <algorithm>
#include <cmath>

namespace prodkg::learn {

TrainResult train(Trainable& model, const TrainConfig& cfg) {
  if (model.dataset_size() == 0) throw Error("train: empty dataset");
  if (cfg.optimizer != "sgd" && cfg.optimizer != "adam")
    throw Error("train: unknown optimizer '" + cfg.optimizer + "'");
  const bool adam = cfg.optimizer == "adam";
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;

  ParamSet& params = model.params();
  ParamSet grad = params.zeros_like();
  ParamSet m = params.zeros_like();
  ParamSet v = params.zeros_like();
  size_t step = 0;

  Rng rng(derive_seed(cfg.seed, "train-loop"));
  std::vector<size_t> order(model.dataset_size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  const size_t batch_size = std::max<size_t>(1, cfg.batch);
  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    size_t n_batches = 0;
    for (size_t off = 0; off < order.size(); off += batch_size) {
      std::vector<size_t> batch(order.begin() + off,
                                order.begin() + std::min(order.size(), off + batch_size));
      grad.zero();
      const double loss = model.loss_and_grad(batch, grad);
      if (!std::isfinite(loss))
        throw Error("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                    std::to_string(n_batches) + " (lr=" + std::to_string(cfg.lr) + ")");
      epoch_loss += loss;
      ++n_batches;

      if (cfg.grad_clip > 0) {
        double nn = 0;
        for (const auto& [name, g] : grad.tensors)
          for (double x : g.data) nn += x * x;
        nn = std::sqrt(nn);
        if (nn > cfg.grad_clip) {
          const double s = cfg.grad_clip / nn;
          for (auto& [name, g] : grad.tensors)
            for (auto& x : g.data) x *= s;
        }
      }

      ++step;
      for (auto& [name, p] : params.tensors) {
        const Tensor& g = grad.at(name);
        if (adam) {
          Tensor& mt = m.at(name);
          Tensor& vt = v.at(name);
          const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step));
          const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step));
          for (size_t i = 0; i < p.size(); ++i) {
            mt.data[i] = b1 * mt.data[i] + (1 - b1) * g.data[i];
            vt.data[i] = b2 * vt.data[i] + (1 - b2) * g.data[i] * g.data[i];
            p.data[i] -= cfg.lr * (mt.data[i] / bc1) / (std::sqrt(vt.data[i] / bc2) + eps);
          }
        } else {
          for (size_t i = 0; i < p.size(); ++i) p.data[i] -= cfg.lr * g.data[i];
        }
      }
    }
    result.loss_curve.push_back(epoch_loss / std::max<size_t>(1, n_batches));
  }
  return result;
}

double fd_max_rel_err(ParamSet& params, const std::function<double()>& loss,
                      const ParamSet& analytic, double eps, size_t max_probes, uint64_t seed) {
  Rng rng(seed);
  double worst = 0;
  for (auto& [name, t] : params.tensors) {
    const Tensor& g = analytic.at(name);
    std::vector<size_t> idx(t.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (idx.size() > max_probes) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(max_probes);
    }
    for (size_t i : idx) {
      const double keep = t.data[i];
      t.data[i] = keep + eps;
      const double up = loss();
      t.data[i] = keep - eps;
      const double dn = loss();
      t.data[i] = keep;
      const double fd = (up - dn) / (2 * eps);
      const double an = g.data[i];
      const double rel = std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-3});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace prodkg::learn
