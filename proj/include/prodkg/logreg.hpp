#ifndef PRODKG_LOGREG_HPP
#define PRODKG_LOGREG_HPP

#include <string>
#include <vector>

#include "prodkg/common.hpp"

namespace prodkg::ml {

struct LogRegConfig {
  double l2 = 1e-4;
  double lr = 0.5;
  size_t epochs = 300;
};

struct LogReg {
  std::vector<double> w;
  double b = 0.0;

  std::string to_json() const;
  static LogReg from_json(const std::string& text);
};

// Mean regularized log loss and its gradient; exposed for gradient checks.
double logreg_loss_and_grad(const std::vector<double>& w, double b,
                            const std::vector<std::vector<double>>& X,
                            const std::vector<int>& y, double l2,
                            std::vector<double>& gw, double& gb);

// Full-batch gradient descent on the regularized log loss. Deterministic.
LogReg fit_logreg(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                  const LogRegConfig& cfg);

double logreg_predict(const LogReg& m, const std::vector<double>& x);

}  // namespace prodkg::ml

#endif
