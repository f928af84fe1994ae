// Copyright 2026 The linfcurves Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LINFCURVES_SRC_LEAST_SQUARES_HPP_
#define LINFCURVES_SRC_LEAST_SQUARES_HPP_

#include <functional>

#include <Eigen/Dense>

namespace linf::detail {

// Damped Gauss-Newton (Levenberg-Marquardt) with forward-difference
// Jacobians. Deterministic: no internal randomness.

struct LmOptions {
  int max_iterations = 200;
  double fd_step = 1e-7;
  double residual_tol = 1e-12;
  double step_tol = 1e-14;
  double lambda0 = 1e-4;
};

struct LmResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline LmResult levenberg_marquardt(const ResidualFn& f,
                                    const Eigen::VectorXd& x0,
                                    const LmOptions& opts = {}) {
  LmResult res;
  res.x = x0;
  Eigen::VectorXd r = f(res.x);
  double rnorm = r.norm();
  double lambda = opts.lambda0;
  const int n = static_cast<int>(x0.size());

  for (res.iterations = 0; res.iterations < opts.max_iterations;
       ++res.iterations) {
    if (rnorm <= opts.residual_tol) break;

    Eigen::MatrixXd J(r.size(), n);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd xp = res.x;
      const double h = opts.fd_step * std::max(1.0, std::abs(xp[j]));
      xp[j] += h;
      J.col(j) = (f(xp) - r) / h;
    }

    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;

    bool accepted = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lambda * (JtJ.diagonal().array() + 1e-12);
      const Eigen::VectorXd step = A.ldlt().solve(-g);
      const Eigen::VectorXd xt = res.x + step;
      const Eigen::VectorXd rt = f(xt);
      if (rt.norm() < rnorm) {
        res.x = xt;
        r = rt;
        rnorm = rt.norm();
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (step.norm() <= opts.step_tol * (1.0 + res.x.norm())) {
          res.iterations++;
          res.residual_norm = rnorm;
          res.converged = rnorm <= opts.residual_tol;
          return res;
        }
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) break;  // stuck in a local basin
  }
  res.residual_norm = rnorm;
  res.converged = rnorm <= opts.residual_tol;
  return res;
}

}  // namespace linf::detail

#endif  // LINFCURVES_SRC_LEAST_SQUARES_HPP_
