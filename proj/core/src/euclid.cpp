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

#include "linfcurves/euclid.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "least_squares.hpp"

namespace linf {

namespace {

double sign_right(double t) { return t >= 0.0 ? 1.0 : -1.0; }

// Generic-branch evaluation without invariant checks; tolerates nearly
// parallel (A, B) by degenerating to the constant/kinked acceleration forms.
BranchSample eval_generic_raw(const Vec& A, const Vec& B, const Vec& C,
                              const Vec& D, double z, double t) {
  const int m = static_cast<int>(A.size());
  BranchSample out{Vec::Zero(m), Vec::Zero(m), Vec::Zero(m)};
  const double beta = B.norm();

  if (beta < 1e-13 * (1.0 + A.norm())) {
    // B ~ 0: constant acceleration along A.
    const double an = A.norm();
    const Vec dir = an > 0 ? Vec(A / an) : Vec::Zero(m);
    out.acceleration = z * dir;
    out.velocity = z * t * dir + C;
    out.position = 0.5 * z * t * t * dir + C * t + D;
    return out;
  }

  const double tshift = -A.dot(B) / (beta * beta);
  const Vec Ap = A + B * tshift;  // <Ap, B> = 0
  const double alpha = Ap.norm();
  const double tau = t - tshift;
  const Vec Bh = B / beta;

  if (alpha < 1e-13 * (A.norm() + beta)) {
    // A and B parallel: quadratic spline with kink at tshift.
    const double sg = sign_right(tau);
    out.acceleration = z * sg * Bh;
    out.velocity = z * std::abs(tau) * Bh + C;
    out.position = 0.5 * z * sg * tau * tau * Bh + C * t + D;
    return out;
  }

  // s = |A + B tau|, log(beta tau + s) written via asinh for stability.
  const double s = std::hypot(alpha, beta * tau);
  const double u = std::log(alpha) + std::asinh(beta * tau / alpha);

  const double fA = z * (beta * tau * u - s) / (beta * beta);
  const double fAp = z * u / beta;
  const double fB = z * (alpha * alpha * u + beta * tau * s) /
                    (2.0 * beta * beta * beta);
  const double fBp = z * s / (beta * beta);

  out.position = fA * Ap + fB * B + C * t + D;
  out.velocity = fAp * Ap + fBp * B + C;
  out.acceleration = z * (Ap + B * tau) / s;
  return out;
}

}  // namespace

BranchSample eval_branch(const EuclidBranch& branch, double t) {
  switch (branch.tag) {
    case BranchTag::Geodesic: {
      require(branch.z == 0.0, "eval_branch: geodesic requires z = 0");
      const int m = static_cast<int>(branch.C.size());
      return {branch.C * t + branch.D, branch.C, Vec::Zero(m)};
    }
    case BranchTag::QuadraticSpline: {
      const double bn = branch.B.norm();
      require(bn > 0.0, "eval_branch: quadratic spline requires B != 0");
      const Vec Bh = branch.B / bn;
      const double tau = t - branch.t2;
      const double sg = sign_right(tau);
      const int m = static_cast<int>(branch.B.size());
      BranchSample out{Vec::Zero(m), Vec::Zero(m), Vec::Zero(m)};
      out.acceleration = branch.z * sg * Bh;
      out.velocity = branch.z * std::abs(tau) * Bh + branch.C;
      out.position =
          0.5 * branch.z * sg * tau * tau * Bh + branch.C * t + branch.D;
      return out;
    }
    case BranchTag::Generic: {
      const double gram = branch.A.squaredNorm() * branch.B.squaredNorm() -
                          std::pow(branch.A.dot(branch.B), 2);
      require(gram > 1e-24 * std::pow(branch.A.norm() * branch.B.norm() + 1.0, 2),
              "eval_branch: generic requires A, B linearly independent");
      return eval_generic_raw(branch.A, branch.B, branch.C, branch.D,
                              branch.z, t);
    }
  }
  throw std::logic_error("eval_branch: bad tag");
}

double branch_phi(const EuclidBranch& branch, double t) {
  if (branch.tag == BranchTag::Geodesic || branch.z == 0.0) return 0.0;
  if (branch.tag == BranchTag::QuadraticSpline)
    return std::abs(t - branch.t2) * branch.B.norm() / branch.z;
  return (branch.A + branch.B * t).norm() / branch.z;
}

double j_infinity(const EuclidBranch& branch) {
  return branch.tag == BranchTag::Geodesic ? 0.0 : branch.z;
}

// ---------------------------------------------------------------------------
// BVP fit

namespace {

Vec boundary_residual(const BranchSample& s0, const BranchSample& s1,
                      const BoundaryData& d) {
  const int m = static_cast<int>(d.x0.size());
  Vec r(4 * m);
  r.segment(0, m) = s0.position - d.x0;
  r.segment(m, m) = s0.velocity - d.v0;
  r.segment(2 * m, m) = s1.position - d.x1;
  r.segment(3 * m, m) = s1.velocity - *d.v1;
  return r;
}

EuclidBranch generic_from_params(const Eigen::VectorXd& th, int m) {
  EuclidBranch b;
  b.tag = BranchTag::Generic;
  b.A = th.segment(0, m);
  b.B = th.segment(m, m);
  b.C = th.segment(2 * m, m);
  b.D = th.segment(3 * m, m);
  b.z = std::abs(th[4 * m]);
  // phi scale gauge: |(A,B)| = 1
  const double n = std::sqrt(b.A.squaredNorm() + b.B.squaredNorm());
  if (n > 0) {
    b.A /= n;
    b.B /= n;
  }
  return b;
}

EuclidBranch quadspline_from_params(const Eigen::VectorXd& th, int m) {
  EuclidBranch b;
  b.tag = BranchTag::QuadraticSpline;
  b.B = th.segment(0, m);
  const double n = b.B.norm();
  if (n > 0) b.B /= n;
  b.t2 = th[m];
  b.z = std::abs(th[m + 1]);
  b.C = th.segment(m + 2, m);
  b.D = th.segment(2 * m + 2, m);
  b.A = -b.B * b.t2;
  return b;
}

}  // namespace

EuclidBvpResult solve_euclid_bvp(const BoundaryData& data,
                                 const EuclidBvpOptions& opts) {
  require(data.v1.has_value(), "solve_euclid_bvp: both velocities required");
  require(data.t0 < data.t1, "solve_euclid_bvp: span not increasing");
  const int m = static_cast<int>(data.x0.size());
  const double dt = data.t1 - data.t0;

  EuclidBvpResult result;

  // Geodesic branch: boundary data on an affine line.
  {
    const Vec vline = (data.x1 - data.x0) / dt;
    if ((data.v0 - vline).norm() <= opts.boundary_tol &&
        (*data.v1 - vline).norm() <= opts.boundary_tol) {
      EuclidBranch g;
      g.tag = BranchTag::Geodesic;
      g.A = Vec::Zero(m);
      g.B = Vec::Zero(m);
      g.C = vline;
      g.D = data.x0 - vline * data.t0;
      result.branch = g;
      result.converged = true;
      result.residual = std::max((data.v0 - vline).norm(),
                                 (*data.v1 - vline).norm());
      result.candidates.push_back(g);
      return result;
    }
  }

  // Hermite cubic seed: acceleration endpoints give A + Bt, z.
  const PiecewisePoly herm = hermite_cubic(data);
  const Vec a0 = herm.eval(data.t0, 2);
  const Vec a1 = herm.eval(data.t1, 2);
  const double z_seed = std::max({a0.norm(), a1.norm(), 1e-3});
  const Vec B_seed = (a1 - a0) / dt;
  const Vec A_seed = a0 - B_seed * data.t0;
  const Vec C_seed = herm.eval(0.5 * (data.t0 + data.t1), 1);

  detail::LmOptions lm;
  lm.max_iterations = opts.max_iterations;
  lm.residual_tol = opts.boundary_tol;

  std::vector<EuclidBranch> converged;

  auto try_generic = [&](const Eigen::VectorXd& seed) {
    auto fn = [&](const Eigen::VectorXd& th) {
      const EuclidBranch b = generic_from_params(th, m);
      return boundary_residual(
          eval_generic_raw(b.A, b.B, b.C, b.D, b.z, data.t0),
          eval_generic_raw(b.A, b.B, b.C, b.D, b.z, data.t1), data);
    };
    const auto r = detail::levenberg_marquardt(fn, seed, lm);
    if (r.converged) {
      EuclidBranch b = generic_from_params(r.x, m);
      const double gram = b.A.squaredNorm() * b.B.squaredNorm() -
                          std::pow(b.A.dot(b.B), 2);
      if (gram <= 1e-20) {
        // degenerated onto the parallel case; reclassify as a spline
        b.tag = BranchTag::QuadraticSpline;
        const Vec dir = b.B.norm() > 1e-10 ? b.B : b.A;
        b.B = dir / dir.norm();
        b.t2 = b.B.dot(-b.A) / 1.0;  // A = -B t2 up to scale
        b.A = -b.B * b.t2;
      }
      converged.push_back(b);
    }
  };

  auto try_quadspline = [&](const Eigen::VectorXd& seed) {
    auto fn = [&](const Eigen::VectorXd& th) {
      const EuclidBranch b = quadspline_from_params(th, m);
      return boundary_residual(eval_branch(b, data.t0),
                               eval_branch(b, data.t1), data);
    };
    const auto r = detail::levenberg_marquardt(fn, seed, lm);
    if (r.converged) converged.push_back(quadspline_from_params(r.x, m));
  };

  // Deterministic seeds: one Hermite-informed, the rest pseudo-random.
  {
    Eigen::VectorXd seed(4 * m + 1);
    seed.segment(0, m) = A_seed;
    seed.segment(m, m) = B_seed;
    seed.segment(2 * m, m) = C_seed;
    seed.segment(3 * m, m) = data.x0;
    seed[4 * m] = z_seed;
    try_generic(seed);
  }
  {
    Eigen::VectorXd seed(3 * m + 2);
    Vec bs = a1 - a0;
    if (bs.norm() < 1e-12) bs = a0.norm() > 1e-12 ? a0 : Vec::Ones(m);
    seed.segment(0, m) = bs;
    seed[m] = 0.5 * (data.t0 + data.t1);
    seed[m + 1] = z_seed;
    seed.segment(m + 2, m) = C_seed;
    seed.segment(2 * m + 2, m) = data.x0;
    try_quadspline(seed);
  }
  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < opts.restarts; ++k) {
    Eigen::VectorXd sg(4 * m + 1), sq(3 * m + 2);
    for (int i = 0; i < sg.size(); ++i) sg[i] = gauss(rng);
    for (int i = 0; i < sq.size(); ++i) sq[i] = gauss(rng);
    sg[4 * m] = z_seed * std::abs(sg[4 * m]);
    sg.segment(2 * m, m) = C_seed;
    sg.segment(3 * m, m) = data.x0;
    sq[m] = 0.5 * (data.t0 + data.t1) + 0.3 * dt * sq[m];
    sq[m + 1] = z_seed * std::abs(sq[m + 1]);
    sq.segment(m + 2, m) = C_seed;
    sq.segment(2 * m + 2, m) = data.x0;
    try_generic(sg);
    try_quadspline(sq);
  }

  if (converged.empty()) {
    result.converged = false;
    result.residual = std::numeric_limits<double>::infinity();
    return result;
  }

  std::sort(converged.begin(), converged.end(),
            [](const EuclidBranch& a, const EuclidBranch& b) {
              return a.z < b.z;
            });
  result.branch = converged.front();
  result.candidates = std::move(converged);
  result.converged = true;
  {
    const auto s0 = eval_branch(result.branch, data.t0);
    const auto s1 = eval_branch(result.branch, data.t1);
    result.residual = boundary_residual(s0, s1, data).norm();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Piecewise polynomials

Vec PiecewisePoly::eval(double t, int derivative) const {
  require(!breaks.empty() && coefs.size() + 1 == breaks.size(),
          "PiecewisePoly: malformed");
  auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
  std::ptrdiff_t piece = std::distance(breaks.begin(), it) - 1;
  piece = std::clamp<std::ptrdiff_t>(piece, 0,
                                     static_cast<std::ptrdiff_t>(coefs.size()) - 1);
  const Eigen::MatrixXd& c = coefs[piece];
  const double s = t - breaks[piece];
  const int deg = static_cast<int>(c.cols()) - 1;
  Vec out = Vec::Zero(c.rows());
  double spow = 1.0;
  for (int k = derivative; k <= deg; ++k) {
    double fac = 1.0;
    for (int j = 0; j < derivative; ++j) fac *= (k - j);
    out += fac * spow * c.col(k);
    spow *= s;
  }
  return out;
}

int PiecewisePoly::dimension() const {
  return coefs.empty() ? 0 : static_cast<int>(coefs.front().rows());
}

PiecewisePoly natural_cubic_spline(const std::vector<double>& times,
                                   const std::vector<Vec>& points) {
  const std::size_t n = times.size();
  require(n >= 2 && points.size() == n, "natural_cubic_spline: need >= 2 knots");
  for (std::size_t i = 0; i + 1 < n; ++i)
    require(times[i + 1] > times[i],
            "natural_cubic_spline: duplicate or decreasing knot times");

  const int m = static_cast<int>(points[0].size());
  std::vector<Vec> M(n, Vec::Zero(m));  // second derivatives at knots

  if (n > 2) {
    const std::size_t k = n - 2;  // interior unknowns
    std::vector<double> diag(k), sub(k), sup(k);
    std::vector<Vec> rhs(k, Vec::Zero(m));
    for (std::size_t i = 1; i + 1 <= n - 1; ++i) {
      const double hl = times[i] - times[i - 1];
      const double hr = times[i + 1] - times[i];
      diag[i - 1] = 2.0 * (hl + hr);
      sub[i - 1] = hl;
      sup[i - 1] = hr;
      rhs[i - 1] = 6.0 * ((points[i + 1] - points[i]) / hr -
                          (points[i] - points[i - 1]) / hl);
    }
    // Thomas algorithm
    for (std::size_t i = 1; i < k; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    M[n - 2] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;)
      M[i + 1] = (rhs[i] - sup[i] * M[i + 2]) / diag[i];
  }

  PiecewisePoly pp;
  pp.breaks = times;
  pp.coefs.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = times[i + 1] - times[i];
    Eigen::MatrixXd c(m, 4);
    c.col(0) = points[i];
    c.col(1) = (points[i + 1] - points[i]) / h - h * (2.0 * M[i] + M[i + 1]) / 6.0;
    c.col(2) = 0.5 * M[i];
    c.col(3) = (M[i + 1] - M[i]) / (6.0 * h);
    pp.coefs[i] = c;
  }
  return pp;
}

PiecewisePoly hermite_cubic(const BoundaryData& data) {
  require(data.v1.has_value(), "hermite_cubic: both velocities required");
  const double h = data.t1 - data.t0;
  const int m = static_cast<int>(data.x0.size());
  const Vec d = (data.x1 - data.x0) / h;
  Eigen::MatrixXd c(m, 4);
  c.col(0) = data.x0;
  c.col(1) = data.v0;
  c.col(2) = (3.0 * d - 2.0 * data.v0 - *data.v1) / h;
  c.col(3) = (data.v0 + *data.v1 - 2.0 * d) / (h * h);
  PiecewisePoly pp;
  pp.breaks = {data.t0, data.t1};
  pp.coefs = {c};
  return pp;
}

double j_infinity(const PiecewisePoly& curve, int samples_per_piece) {
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < curve.breaks.size(); ++i) {
    const double ta = curve.breaks[i], tb = curve.breaks[i + 1];
    if (curve.coefs[i].cols() <= 4) {
      // acceleration is affine in t: |acc|^2 convex, max at piece ends
      best = std::max({best, curve.eval(ta, 2).norm(),
                       curve.eval(tb - 1e-15 * (tb - ta), 2).norm()});
    } else {
      for (int k = 0; k <= samples_per_piece; ++k) {
        const double t = ta + (tb - ta) * k / samples_per_piece;
        best = std::max(best, curve.eval(t, 2).norm());
      }
    }
  }
  return best;
}

double j2(const PiecewisePoly& curve) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < curve.breaks.size(); ++i) {
    const double h = curve.breaks[i + 1] - curve.breaks[i];
    const Eigen::MatrixXd& c = curve.coefs[i];
    require(c.cols() <= 4, "j2: exact form implemented for degree <= 3");
    const Vec u = 2.0 * c.col(2);
    const Vec w = c.cols() > 3 ? Vec(6.0 * c.col(3)) : Vec::Zero(c.rows());
    total += u.squaredNorm() * h + u.dot(w) * h * h +
             w.squaredNorm() * h * h * h / 3.0;
  }
  return total / (curve.t_end() - curve.t_begin());
}

}  // namespace linf
