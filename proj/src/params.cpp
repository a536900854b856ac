#include "prodkg/params.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace prodkg::learn {

using nlohmann::json;

Tensor& ParamSet::add(const std::string& name, Tensor t) {
  auto [it, fresh] = tensors.emplace(name, std::move(t));
  if (!fresh) throw Error("ParamSet: duplicate tensor '" + name + "'");
  return it->second;
}

Tensor& ParamSet::at(const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw Error("ParamSet: missing tensor '" + name + "'");
  return it->second;
}

const Tensor& ParamSet::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw Error("ParamSet: missing tensor '" + name + "'");
  return it->second;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  out.init_seed = init_seed;
  for (const auto& [name, t] : tensors) {
    Tensor z;
    z.shape = t.shape;
    z.data.assign(t.data.size(), 0.0);
    out.tensors.emplace(name, std::move(z));
  }
  return out;
}

void ParamSet::zero() {
  for (auto& [name, t] : tensors) t.fill(0.0);
}

bool ParamSet::finite() const {
  for (const auto& [name, t] : tensors)
    if (!t.finite()) return false;
  return true;
}

size_t ParamSet::n_values() const {
  size_t n = 0;
  for (const auto& [name, t] : tensors) n += t.size();
  return n;
}

static std::string encode_doubles(const Vec& v) {
  // little-endian float64; asserted at build time for the targets we support
  static_assert(sizeof(double) == 8);
  std::vector<unsigned char> bytes(v.size() * 8);
  std::memcpy(bytes.data(), v.data(), bytes.size());
  return base64_encode(bytes.data(), bytes.size());
}

static Vec decode_doubles(const std::string& text) {
  auto bytes = base64_decode(text);
  if (bytes.size() % 8 != 0) throw Error("tensor payload is not a multiple of 8 bytes");
  Vec v(bytes.size() / 8);
  std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}

std::string ParamSet::to_json() const {
  json j;
  j["format"] = "prodkg-params";
  j["version"] = 1;
  j["seed"] = init_seed;
  json ts = json::object();
  for (const auto& [name, t] : tensors)
    ts[name] = json{{"shape", t.shape}, {"data", encode_doubles(t.data)}};
  j["tensors"] = std::move(ts);
  return j.dump();
}

ParamSet ParamSet::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "prodkg-params")
    throw Error("params: unrecognized format");
  if (j.value("version", 0) != 1) throw Error("params: unsupported version");
  ParamSet out;
  out.init_seed = j.value("seed", 0ull);
  for (const auto& [name, tj] : j.at("tensors").items()) {
    Tensor t;
    t.shape = tj.at("shape").get<std::vector<size_t>>();
    t.data = decode_doubles(tj.at("data").get<std::string>());
    size_t expect = 1;
    for (size_t s : t.shape) expect *= s;
    if (expect != t.data.size()) throw Error("params: shape/data mismatch for '" + name + "'");
    out.tensors.emplace(name, std::move(t));
  }
  return out;
}

void ParamSet::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << to_json() << "\n";
}

ParamSet ParamSet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

void init_uniform(Tensor& t, Rng& rng, double range) {
  std::uniform_real_distribution<double> dist(-range, range);
  for (auto& v : t.data) v = dist(rng);
}

Tensor make_uniform(size_t r, size_t c, Rng& rng, double range) {
  Tensor t(r, c);
  init_uniform(t, rng, range);
  return t;
}

}  // namespace prodkg::learn
