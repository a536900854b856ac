#include "prodkg/logreg.hpp"

#include <cmath>

#include <json.hpp>

namespace prodkg::ml {

using nlohmann::json;

static double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logreg_loss_and_grad(const std::vector<double>& w, double b,
                            const std::vector<std::vector<double>>& X,
                            const std::vector<int>& y, double l2,
                            std::vector<double>& gw, double& gb) {
  const size_t n = X.size(), p = w.size();
  gw.assign(p, 0.0);
  gb = 0.0;
  double loss = 0;
  for (size_t i = 0; i < n; ++i) {
    double z = b;
    for (size_t j = 0; j < p; ++j) z += w[j] * X[i][j];
    const double pr = sig(z);
    // clamp avoids log(0) for extreme logits
    const double pc = std::min(1.0 - 1e-12, std::max(1e-12, pr));
    loss += y[i] ? -std::log(pc) : -std::log(1.0 - pc);
    const double d = (pr - y[i]) / n;
    for (size_t j = 0; j < p; ++j) gw[j] += d * X[i][j];
    gb += d;
  }
  loss /= n;
  for (size_t j = 0; j < p; ++j) {
    loss += 0.5 * l2 * w[j] * w[j];
    gw[j] += l2 * w[j];
  }
  return loss;
}

LogReg fit_logreg(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                  const LogRegConfig& cfg) {
  if (X.size() != y.size() || X.size() < 2) throw Error("fit_logreg: need |X| = |y| >= 2");
  LogReg m;
  m.w.assign(X[0].size(), 0.0);
  std::vector<double> gw;
  double gb;
  for (size_t e = 0; e < cfg.epochs; ++e) {
    logreg_loss_and_grad(m.w, m.b, X, y, cfg.l2, gw, gb);
    for (size_t j = 0; j < m.w.size(); ++j) m.w[j] -= cfg.lr * gw[j];
    m.b -= cfg.lr * gb;
  }
  return m;
}

double logreg_predict(const LogReg& m, const std::vector<double>& x) {
  if (x.size() != m.w.size()) throw Error("logreg: feature dimension mismatch");
  double z = m.b;
  for (size_t j = 0; j < x.size(); ++j) z += m.w[j] * x[j];
  return sig(z);
}

std::string LogReg::to_json() const {
  json j{{"format", "prodkg-logreg"}, {"version", 1}, {"w", w}, {"b", b}};
  return j.dump();
}

LogReg LogReg::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "prodkg-logreg" || j.value("version", 0) != 1)
    throw Error("logreg: unrecognized serialization");
  LogReg m;
  m.w = j.at("w").get<std::vector<double>>();
  m.b = j.at("b").get<double>();
  return m;
}

}  // namespace prodkg::ml
