#pragma once

// Influence-function analysis at bivariate centered Gaussian models
// N(0, diag(1, gamma)), 0 < gamma < 1: influence functions of GSSCM loadings,
// gross-error sensitivities, asymptotic variances and relative efficiencies,
// influence functions of the MAD-corrected eigenvalues and of the combined
// covariance matrix, plus the numerical check that the cutoff-perturbation
// term of the loading influence function vanishes off-diagonally.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gspca/gsscm.hpp"
#include "gspca/quadrature.hpp"
#include "gspca/radial.hpp"
#include "gspca/stats.hpp"

namespace gspca {

struct AnalysisModel {
  EllipticalSpec spec;         // Gaussian, p = 2, scatter diag(1, gamma)
  RadialKind kind = RadialKind::Identity;
  Cutoffs population_cutoffs;  // of the distance distribution under spec
  Eigen::Vector2d lambda_g;    // population GSSCM eigenvalues, descending
};

inline double analysis_gamma(const AnalysisModel& m) {
  return m.spec.scatter_diag(1);
}

inline AnalysisModel make_analysis_model(double gamma, RadialKind kind) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("make_analysis_model: gamma must be in (0,1)");
  AnalysisModel m;
  m.spec.family = Family::Gaussian;
  m.spec.scatter_diag = Eigen::Vector2d(1.0, gamma);
  m.spec.center = Eigen::Vector2d::Zero();
  m.kind = kind;
  const ScatterMatrix S = population_gsscm(m.spec, kind);
  m.population_cutoffs = S.cutoffs;
  m.lambda_g = Eigen::Vector2d(S.values(0, 0), S.values(1, 1));
  if (!(m.lambda_g(0) > m.lambda_g(1)))
    throw std::runtime_error("make_analysis_model: eigenvalues not distinct");
  return m;
}

// g(x) = x * xi(||x||) with the model's population cutoffs.
inline Eigen::Vector2d g_population(const AnalysisModel& m,
                                    const Eigen::Vector2d& x) {
  return x * weight(m.kind, x.norm(), m.population_cutoffs);
}

// IF(x, v_{g,j}) = sum_{k != j} g_k g_j / (lambda_j - lambda_k) e_k. In two
// dimensions only the other component is nonzero.
inline Eigen::Vector2d if_loading(const AnalysisModel& m,
                                  const Eigen::Vector2d& x, int j) {
  if (j < 1 || j > 2)
    throw std::invalid_argument("if_loading: component index must be 1 or 2");
  const Eigen::Vector2d g = g_population(m, x);
  const int other = (j == 1) ? 1 : 0;
  const double denom = m.lambda_g(j - 1) - m.lambda_g(other);
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  out(other) = g(0) * g(1) / denom;
  return out;
}

struct GesGrid {
  int n_radii = 2000;
  int n_angles = 720;
  double rmax = 0.0;  // <= 0: use 20 * sqrt(lambda_g1)
};

// Supremum of ||if_loading|| over the polar grid, followed by golden-section
// refinement in radius and angle near the best grid point. The refinement
// tracks the best value ever evaluated, so hard-thresholding kinds whose
// supremum sits against a weight discontinuity (Ball, Shell) are resolved.
inline double ges_grid_sup(const AnalysisModel& m, int j,
                           const GesGrid& grid = {}) {
  if (j < 1 || j > 2)
    throw std::invalid_argument("ges_grid_sup: component index must be 1 or 2");
  const double rmax =
      grid.rmax > 0.0 ? grid.rmax : 20.0 * std::sqrt(m.lambda_g(0));
  const double dl = std::abs(m.lambda_g(0) - m.lambda_g(1));
  double best = 0.0, best_r = rmax, best_th = M_PI / 4.0;
  auto value = [&](double r, double th) {
    const double xi = weight(m.kind, r, m.population_cutoffs);
    const double v = r * r * xi * xi * std::abs(std::cos(th) * std::sin(th)) / dl;
    if (v > best) {
      best = v;
      best_r = r;
      best_th = th;
    }
    return v;
  };
  for (int i = 1; i <= grid.n_radii; ++i) {
    const double r = rmax * double(i) / double(grid.n_radii);
    for (int t = 0; t < grid.n_angles; ++t)
      value(r, 2.0 * M_PI * double(t) / double(grid.n_angles));
  }
  const double dr = rmax / double(grid.n_radii);
  const double dth = 2.0 * M_PI / double(grid.n_angles);
  const double r0 = best_r, th0 = best_th;
  golden_max([&](double r) { return value(r, th0); },
             std::max(1e-12, r0 - dr), std::min(rmax, r0 + dr));
  const double r1 = best_r;
  golden_max([&](double th) { return value(r1, th); }, th0 - dth, th0 + dth);
  return best;
}

// Gross-error sensitivity. Identity has an unbounded influence function and
// returns +infinity; bounded kinds are evaluated on the polar grid.
inline double ges(const AnalysisModel& m, int j = 1, const GesGrid& grid = {}) {
  if (m.kind == RadialKind::Identity)
    return std::numeric_limits<double>::infinity();
  return ges_grid_sup(m, j, grid);
}

namespace detail {

// E[x1 x2 w(||x||)] at N(0, diag(s1, s2)) by the piecewise radial x angular
// quadrature. Zero by symmetry for every radial w; evaluated honestly so the
// symmetry check below measures true numerical content.
template <class RadialFn>
inline double cross_moment(double s1, double s2, RadialFn&& w,
                           const std::vector<double>& segs) {
  constexpr int kAngles = 512;
  static thread_local std::vector<double> ct, st;
  if (ct.empty()) {
    ct.resize(kAngles);
    st.resize(kAngles);
    for (int a = 0; a < kAngles; ++a) {
      ct[a] = std::cos(2.0 * M_PI * a / kAngles);
      st[a] = std::sin(2.0 * M_PI * a / kAngles);
    }
  }
  const double norm = 1.0 / (2.0 * M_PI * std::sqrt(s1 * s2));
  const GaussLegendre& gl = gl_rule_200();
  double acc = 0.0;
  for (std::size_t seg = 0; seg + 1 < segs.size(); ++seg) {
    const double a = segs[seg], b = segs[seg + 1];
    if (b <= a) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < gl.nodes.size(); ++i) {
      const double r = mid + half * gl.nodes[i];
      const double wr = w(r);
      if (wr == 0.0) continue;
      const double r2 = r * r;
      double ang = 0.0;
      for (int t = 0; t < kAngles; ++t)
        ang += ct[t] * st[t] *
               std::exp(-0.5 * r2 * (ct[t] * ct[t] / s1 + st[t] * st[t] / s2));
      acc += half * gl.weights[i] * wr * r2 * r * norm * (2.0 * M_PI / kAngles) * ang;
    }
  }
  return acc;
}

inline std::vector<double> cutoff_points(const Cutoffs& c) {
  return {c.q1, c.q2, c.q3, c.q3star};
}

}  // namespace detail

// ASV of the off-diagonal influence entry:
// (lambda_g1 - lambda_g2)^{-2} * E[(g1 g2)^2]. The integrand has kinks and
// jumps at the cutoffs, so the integral uses the piecewise radial x angular
// quadrature rather than a tensor rule on the plane.
inline double asv_offdiag(const AnalysisModel& m) {
  const double s1 = m.spec.scatter_diag(0), s2 = m.spec.scatter_diag(1);
  const double rmax = 12.0 * std::sqrt(std::max(s1, s2));
  double m1, m2, m12;
  detail::radial_moments(
      s1, s2,
      [&](double r) {
        const double xi = weight(m.kind, r, m.population_cutoffs);
        const double xi2 = xi * xi;
        return xi2 * xi2;
      },
      detail::radial_segments(m.population_cutoffs, rmax), m1, m2, m12);
  const double dl = m.lambda_g(0) - m.lambda_g(1);
  return m12 / (dl * dl);
}

// ASV of classical PCA at N(0, diag(1, gamma)): gamma / (1 - gamma)^2.
inline double asv_classical(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("asv_classical: gamma must be in (0,1)");
  return gamma / ((1.0 - gamma) * (1.0 - gamma));
}

// Asymptotic relative efficiency versus classical PCA. Identity is classical
// PCA itself, so the ratio is 1 by definition.
inline double efficiency(const AnalysisModel& m) {
  if (m.kind == RadialKind::Identity) return 1.0;
  return asv_classical(analysis_gamma(m)) / asv_offdiag(m);
}

// IF(u, MAD, Phi) = sign(|u| - Phi^{-1}(3/4)) / (4 Phi^{-1}(3/4) phi(Phi^{-1}(3/4))),
// with sign(0) = 0.
inline double if_mad_standard_normal(double u) {
  static const double c = normal_quantile(0.75);
  static const double denom = 4.0 * c * normal_pdf(c);
  const double t = std::abs(u) - c;
  const double s = (t > 0.0) ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
  return s / denom;
}

// IF of the MAD^2-corrected eigenvalue: 2 lambda_j IF(x^T v_j / sqrt(lambda_j), MAD, Phi).
// At the diagonal model the true eigenvalues are the scatter entries and the
// eigenvectors are the coordinate axes.
inline double if_corrected_eigenvalue(const AnalysisModel& m,
                                      const Eigen::Vector2d& x, int j) {
  if (j < 1 || j > 2)
    throw std::invalid_argument("if_corrected_eigenvalue: component index must be 1 or 2");
  const double lam = m.spec.scatter_diag(j - 1);
  return 2.0 * lam * if_mad_standard_normal(x(j - 1) / std::sqrt(lam));
}

// IF of the combined covariance matrix: diagonal entries from the corrected
// eigenvalues, off-diagonal (1 - gamma)/(lambda_g1 - lambda_g2) * g1 g2.
inline Eigen::Matrix2d if_combined_covariance(const AnalysisModel& m,
                                              const Eigen::Vector2d& x) {
  const Eigen::Vector2d g = g_population(m, x);
  const double off = (m.spec.scatter_diag(0) - m.spec.scatter_diag(1)) /
                     (m.lambda_g(0) - m.lambda_g(1)) * g(0) * g(1);
  Eigen::Matrix2d out;
  out(0, 0) = if_corrected_eigenvalue(m, x, 1);
  out(1, 1) = if_corrected_eigenvalue(m, x, 2);
  out(0, 1) = out(1, 0) = off;
  return out;
}

// Cutoffs of the distance distribution under point contamination
// F_eps = (1 - eps) F + eps * delta_{x0}, where only ||x0|| = r0 matters. The
// mixture CDF of D is (1 - eps) F_D(r) + eps * 1{r >= r0}.
inline Cutoffs contaminated_cutoffs(double s1, double s2, double r0,
                                    double eps) {
  auto cdf = [&](double r) {
    return (1.0 - eps) * dist_cdf(r, s1, s2) + (r >= r0 ? eps : 0.0);
  };
  const double hi = 12.0 * std::sqrt(std::max(s1, s2)) + 1.0;
  const double q2 = brent_root([&](double r) { return cdf(r) - 0.5; }, 1e-9, hi,
                               1e-13);
  const double mu = std::cbrt(q2 * q2);
  auto half_mass = [&](double s) {
    const double a = std::pow(mu + s, 1.5);
    const double b = std::pow(std::max(mu - s, 0.0), 1.5);
    return cdf(a) - cdf(b) - 0.5;
  };
  const double s = brent_root(half_mass, 1e-12, mu + 10.0, 1e-13);
  Cutoffs c;
  c.u1 = std::max(mu - s, 0.0);
  c.u3 = mu + s;
  c.q1 = std::pow(c.u1, 1.5);
  c.q2 = q2;
  c.q3 = std::pow(c.u3, 1.5);
  c.q3star = std::pow(mu + kMadConsistency * s, 1.5);
  return c;
}

// The GSSCM functional at the contaminated distribution:
// Sigma_g(F_eps) = (1 - eps) * E_F[g_eps g_eps^T] + eps * g_eps(x0) g_eps(x0)^T
// with g_eps built from the contaminated cutoffs. Used as the
// finite-difference oracle for if_loading.
inline Eigen::Matrix2d contaminated_gsscm(const AnalysisModel& m,
                                          const Eigen::Vector2d& x0,
                                          double eps) {
  const double s1 = m.spec.scatter_diag(0), s2 = m.spec.scatter_diag(1);
  const Cutoffs ce = needs_cutoffs(m.kind)
                         ? contaminated_cutoffs(s1, s2, x0.norm(), eps)
                         : m.population_cutoffs;
  const double rmax = 12.0 * std::sqrt(std::max(s1, s2));
  auto w2 = [&](double r) {
    const double xi = weight(m.kind, r, ce);
    return xi * xi;
  };
  const std::vector<double> segs = detail::radial_segments(
      ce, rmax, detail::cutoff_points(m.population_cutoffs));
  double m1, m2, m12;
  detail::radial_moments(s1, s2, w2, segs, m1, m2, m12);
  const double cross = detail::cross_moment(s1, s2, w2, segs);
  const Eigen::Vector2d gx = x0 * weight(m.kind, x0.norm(), ce);
  Eigen::Matrix2d out;
  out(0, 0) = (1.0 - eps) * m1 + eps * gx(0) * gx(0);
  out(1, 1) = (1.0 - eps) * m2 + eps * gx(1) * gx(1);
  out(0, 1) = out(1, 0) = (1.0 - eps) * cross + eps * gx(0) * gx(1);
  return out;
}

// Off-diagonal magnitude of the cutoff-perturbation term in the loading
// influence function: E_F[dge(x) g(x)^T + g(x) dge(x)^T] with dge the
// finite-difference derivative of g in the contamination fraction (cutoff
// effect only). Vanishes by symmetry; the returned value is numerical noise.
// The contamination point is a fixed generic off-axis location by default.
inline double symmetry_integral_check(const AnalysisModel& m,
                                      const Eigen::Vector2d& x0 =
                                          Eigen::Vector2d(1.5, 0.9),
                                      double eps = 1e-5) {
  if (!needs_cutoffs(m.kind)) return 0.0;  // dge is identically zero
  const double s1 = m.spec.scatter_diag(0), s2 = m.spec.scatter_diag(1);
  const Cutoffs c0 = m.population_cutoffs;
  const Cutoffs ce = contaminated_cutoffs(s1, s2, x0.norm(), eps);
  const double rmax = 12.0 * std::sqrt(std::max(s1, s2));
  const std::vector<double> segs =
      detail::radial_segments(c0, rmax, detail::cutoff_points(ce));
  auto w = [&](double r) {
    const double xi0 = weight(m.kind, r, c0);
    const double dxi = (weight(m.kind, r, ce) - xi0) / eps;
    return 2.0 * xi0 * dxi;
  };
  return std::abs(detail::cross_moment(s1, s2, w, segs));
}

}  // namespace gspca
