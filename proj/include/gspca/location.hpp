#pragma once

// Robust orthogonally-equivariant centers: the spatial median (Weiszfeld
// fixed-point iteration with the Vardi-Zhang anchor rule, optionally
// Newton-accelerated once inside the smooth basin) and the k-step LTS
// location built on top of it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gspca/stats.hpp"

namespace gspca {

struct LocationEstimate {
  Eigen::VectorXd center;
  int iterations_used = 0;
  bool converged = true;
};

namespace detail {

inline double l1_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& m) {
  return (X.rowwise() - m.transpose()).rowwise().norm().sum();
}

}  // namespace detail

// Minimizer of sum_i ||x_i - m||. Starts at the coordinatewise median. When
// an iterate coincides with a data point, the Vardi-Zhang rule tests the
// subgradient optimality condition and otherwise steps off the anchor. With
// `accelerate` (default), Newton steps replace the fixed-point map once the
// iterate is in the smooth region; every accelerated step is guarded by an
// objective decrease check and falls back to the plain update, so both modes
// converge to the same point within `tol`.
inline LocationEstimate spatial_median(const Eigen::MatrixXd& X,
                                       double tol = 1e-10, int max_iter = 1000,
                                       bool accelerate = true) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n < 1) throw std::invalid_argument("spatial_median: empty data");
  LocationEstimate est;
  Eigen::VectorXd m(p);
  {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) col[std::size_t(i)] = X(i, j);
      m(j) = median_inplace(col);
    }
  }
  if (n == 1) {
    est.center = X.row(0).transpose();
    return est;
  }

  const double data_scale = X.rowwise().norm().maxCoeff() + 1.0;
  const double anchor_eps = 1e-13 * data_scale;
  const bool try_newton = accelerate && p >= 2 && p <= 32;

  Eigen::VectorXd d(n), w(n), m_new(p), grad(p);
  Eigen::MatrixXd H(p, p);
  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_m = m;

  for (int it = 1; it <= max_iter; ++it) {
    est.iterations_used = it;
    d = (X.rowwise() - m.transpose()).rowwise().norm();

    // Split into anchored (coincident) and regular points.
    int eta = 0;
    double wsum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (d(i) <= anchor_eps) {
        w(i) = 0.0;
        ++eta;
      } else {
        w(i) = 1.0 / d(i);
        wsum += w(i);
      }
    }
    if (eta == n) {
      // All points coincide with the iterate.
      est.center = m;
      return est;
    }

    Eigen::VectorXd t_map =
        (X.array().colwise() * w.array()).colwise().sum().transpose() / wsum;
    Eigen::VectorXd r = wsum * (t_map - m);  // sum of unit residuals
    if (eta > 0 && r.norm() <= double(eta) + 1e-12) {
      // Subgradient condition holds: the anchor is the minimizer.
      est.center = m;
      return est;
    }

    bool stepped = false;
    if (try_newton && eta == 0 && it > 2) {
      // Fused gradient/Hessian pass: H = sum_i (I - u_i u_i^T)/d_i.
      H.setZero();
      grad.setZero();
      double trace_w = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd t = X.row(i).transpose() - m;
        const double id = w(i);
        grad.noalias() -= t * id;
        H.selfadjointView<Eigen::Lower>().rankUpdate(t, -id * id * id);
        trace_w += id;
      }
      H.diagonal().array() += trace_w;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H.selfadjointView<Eigen::Lower>());
      if (ldlt.info() == Eigen::Success) {
        const Eigen::VectorXd step = ldlt.solve(-grad);
        const Eigen::VectorXd cand = m + step;
        const double obj_now = d.sum();
        if (std::isfinite(cand.sum()) &&
            detail::l1_objective(X, cand) < obj_now) {
          m_new = cand;
          stepped = true;
        }
      }
    }
    if (!stepped) {
      if (eta == 0) {
        m_new = t_map;
      } else {
        // Vardi-Zhang off-anchor step.
        const double frac = std::min(1.0, double(eta) / r.norm());
        m_new = (1.0 - frac) * t_map + frac * m;
      }
    }

    const double step_norm = (m_new - m).norm();
    m = m_new;
    const double obj = detail::l1_objective(X, m);
    if (obj < best_obj) {
      best_obj = obj;
      best_m = m;
    }
    if (step_norm <= tol * (1.0 + m.norm())) {
      est.center = m;
      return est;
    }
  }
  est.converged = false;
  est.center = best_m;
  return est;
}

// k-step LTS location: start at the spatial median, then k times replace the
// center by the mean of the h = floor((n+1)/2) observations closest to it.
// Ties in the distance ranking break by original row index.
inline LocationEstimate kstep_lts(const Eigen::MatrixXd& X, int k = 2) {
  const Eigen::Index n = X.rows();
  if (n < 2) throw std::invalid_argument("kstep_lts: need at least 2 rows");
  if (k < 0) throw std::invalid_argument("kstep_lts: k must be >= 0");
  LocationEstimate est = spatial_median(X);
  const Eigen::Index h = (n + 1) / 2;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  Eigen::VectorXd d(n);
  for (int step = 0; step < k; ++step) {
    d = (X.rowwise() - est.center.transpose()).rowwise().norm();
    std::iota(idx.begin(), idx.end(), Eigen::Index(0));
    std::nth_element(idx.begin(), idx.begin() + (h - 1), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       return d(a) != d(b) ? d(a) < d(b) : a < b;
                     });
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(X.cols());
    for (Eigen::Index i = 0; i < h; ++i) sum += X.row(idx[std::size_t(i)]).transpose();
    est.center = sum / double(h);
    ++est.iterations_used;
  }
  return est;
}

}  // namespace gspca
