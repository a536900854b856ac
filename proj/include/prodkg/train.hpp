#ifndef PRODKG_TRAIN_HPP
#define PRODKG_TRAIN_HPP

#include <functional>
#include <string>
#include <vector>

#include "prodkg/params.hpp"

namespace prodkg::learn {

struct TrainConfig {
  std::string optimizer = "adam";  // "sgd" | "adam"
  double lr = 1e-2;
  size_t epochs = 10;
  size_t batch = 16;
  uint64_t seed = 0;
  double grad_clip = 5.0;  // global-norm clip per batch, 0 disables
};

// A model exposes its parameters and a batch loss with gradients. The train
// loop owns shuffling, optimizer state and the loss curve.
struct Trainable {
  virtual ~Trainable() = default;
  virtual ParamSet& params() = 0;
  virtual size_t dataset_size() const = 0;
  // Mean loss over the batch; accumulates mean gradients into grad (already
  // zeroed by the caller).
  virtual double loss_and_grad(const std::vector<size_t>& batch, ParamSet& grad) = 0;
};

struct TrainResult {
  std::vector<double> loss_curve;  // mean loss per epoch
};

// Deterministic given (model params, data, cfg.seed). Throws on NaN loss.
TrainResult train(Trainable& model, const TrainConfig& cfg);

// Central finite differences against analytic gradients over up to
// `max_probes` seeded entries per tensor. Returns the max relative error
// |fd - g| / max(|fd|, |g|, 1e-3).
double fd_max_rel_err(ParamSet& params, const std::function<double()>& loss,
                      const ParamSet& analytic, double eps = 1e-5,
                      size_t max_probes = 24, uint64_t seed = 17);

}  // namespace prodkg::learn

#endif
