#ifndef PRODKG_PARAMS_HPP
#define PRODKG_PARAMS_HPP

#include <map>
#include <string>

#include "prodkg/tensor.hpp"

namespace prodkg::learn {

// Named parameter collection. Shapes are fixed after creation; map keys give
// a stable iteration order for optimizers and serialization.
struct ParamSet {
  std::map<std::string, Tensor> tensors;
  uint64_t init_seed = 0;

  Tensor& add(const std::string& name, Tensor t);
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool has(const std::string& name) const { return tensors.count(name) > 0; }

  // Same names and shapes, all zeros. Used for gradient accumulators.
  ParamSet zeros_like() const;
  void zero();
  bool finite() const;
  size_t n_values() const;

  // Versioned JSON with base64 little-endian float64 payloads.
  std::string to_json() const;
  static ParamSet from_json(const std::string& text);
  void save(const std::string& path) const;
  static ParamSet load(const std::string& path);
};

// Uniform init in ±1/sqrt(fan_in) (or an explicit range), seeded.
void init_uniform(Tensor& t, Rng& rng, double range);
Tensor make_uniform(size_t r, size_t c, Rng& rng, double range);

}  // namespace prodkg::learn

#endif
