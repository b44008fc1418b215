#pragma once

// The generalized spatial sign covariance matrix: sample version built from
// the k-step LTS center and estimated cutoffs, and the population version at
// bivariate Gaussian models evaluated by deterministic quadrature (radial
// integration split at the cutoffs, spectrally accurate angular rule).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gspca/location.hpp"
#include "gspca/quadrature.hpp"
#include "gspca/radial.hpp"
#include "gspca/stats.hpp"

namespace gspca {

struct ScatterMatrix {
  Eigen::MatrixXd values;  // p x p, symmetric PSD
  RadialKind kind = RadialKind::Identity;
  Cutoffs cutoffs;
};

enum class Family { Gaussian, StudentT };

struct EllipticalSpec {
  Family family = Family::Gaussian;
  double nu = 0.0;               // degrees of freedom when family == StudentT
  Eigen::VectorXd scatter_diag;  // diagonal of the scatter matrix, descending
  Eigen::VectorXd center;        // defaults to the origin when empty
};

// Rows mapped through g(t) = t * xi(||t||) about `center`.
inline Eigen::MatrixXd g_transform(const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& center,
                                   RadialKind kind, const Cutoffs& c) {
  if (center.size() != X.cols())
    throw std::invalid_argument("g_transform: center dimension mismatch");
  Eigen::MatrixXd G = X.rowwise() - center.transpose();
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    G.row(i) *= weight(kind, G.row(i).norm(), c);
  return G;
}

namespace detail {

// Shared preparation for the sample GSSCM and the model fit: center, centered
// data, centered distances, and cutoffs estimated from those distances.
struct CenteredData {
  Eigen::VectorXd center;
  Eigen::MatrixXd centered;  // X - 1 center^T
  Eigen::VectorXd dist;      // row norms of `centered`
  Cutoffs cutoffs;
};

inline CenteredData center_and_cutoffs(const Eigen::MatrixXd& X, int location_k) {
  CenteredData out;
  out.center = kstep_lts(X, location_k).center;
  out.centered = X.rowwise() - out.center.transpose();
  out.dist = out.centered.rowwise().norm();
  out.cutoffs = estimate_cutoffs(out.dist);
  return out;
}

// Scale centered rows by their radial weights in place.
inline void apply_weights(Eigen::MatrixXd& centered, const Eigen::VectorXd& dist,
                          RadialKind kind, const Cutoffs& c) {
  for (Eigen::Index i = 0; i < centered.rows(); ++i)
    centered.row(i) *= weight(kind, dist(i), c);
}

}  // namespace detail

// Sample GSSCM: S_g = (1/n) g(X)^T g(X) with T the k-step LTS location and
// cutoffs estimated from the centered distances. Denominator is 1/n exactly.
inline ScatterMatrix sample_gsscm(const Eigen::MatrixXd& X, RadialKind kind,
                                  int location_k = 2) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n < 2) throw std::invalid_argument("sample_gsscm: need at least 2 rows");
  detail::CenteredData cd = detail::center_and_cutoffs(X, location_k);
  detail::apply_weights(cd.centered, cd.dist, kind, cd.cutoffs);
  ScatterMatrix S;
  S.values = Eigen::MatrixXd::Zero(p, p);
  S.values.selfadjointView<Eigen::Lower>().rankUpdate(cd.centered.adjoint(),
                                                      1.0 / double(n));
  S.values.triangularView<Eigen::StrictlyUpper>() =
      S.values.transpose().triangularView<Eigen::StrictlyUpper>();
  S.kind = kind;
  S.cutoffs = cd.cutoffs;
  return S;
}

// ---------------------------------------------------------------------------
// Population quantities at X ~ N(0, diag(s1, s2)), s1 >= s2 > 0.
// ---------------------------------------------------------------------------

namespace detail {

inline const GaussLegendre& gl_rule_96() {
  static const GaussLegendre gl = gauss_legendre(96);
  return gl;
}

inline const GaussLegendre& gl_rule_200() {
  static const GaussLegendre gl = gauss_legendre(200);
  return gl;
}

}  // namespace detail

// P(||X|| <= r). The substitution y = r sin(phi) removes the square-root
// endpoint singularity, so a fixed Gauss-Legendre rule is fully accurate.
inline double dist_cdf(double r, double s1, double s2) {
  if (r <= 0.0) return 0.0;
  const double is1 = 1.0 / std::sqrt(s1), is2 = 1.0 / std::sqrt(s2);
  auto f = [&](double phi) {
    const double sn = std::sin(phi), cs = std::cos(phi);
    return normal_pdf(r * sn * is2) * is2 *
           (2.0 * normal_cdf(r * cs * is1) - 1.0) * r * cs;
  };
  return 2.0 * integrate(f, 0.0, M_PI / 2.0, detail::gl_rule_96());
}

inline double dist_quantile(double q, double s1, double s2) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("dist_quantile: q must be in (0,1)");
  const double hi = 12.0 * std::sqrt(std::max(s1, s2)) + 1.0;
  return brent_root([&](double r) { return dist_cdf(r, s1, s2) - q; }, 1e-9, hi,
                    1e-13);
}

// Population cutoffs: med(D), and the median/raw-MAD of U = D^(2/3) obtained
// by root-finding on the distance CDF.
inline Cutoffs population_cutoffs(double s1, double s2) {
  const double q2 = dist_quantile(0.5, s1, s2);
  const double mu = std::cbrt(q2 * q2);
  auto half_mass = [&](double s) {
    const double hi = std::pow(mu + s, 1.5);
    const double lo = std::pow(std::max(mu - s, 0.0), 1.5);
    return dist_cdf(hi, s1, s2) - dist_cdf(lo, s1, s2) - 0.5;
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

namespace detail {

// Radial segments for piecewise integration: split at every cutoff so each
// piece has a smooth integrand even for hard-thresholding kinds.
inline std::vector<double> radial_segments(const Cutoffs& c, double rmax,
                                           const std::vector<double>& extra = {}) {
  std::vector<double> pts = {0.0, c.q1, c.q2, c.q3, c.q3star};
  pts.insert(pts.end(), extra.begin(), extra.end());
  std::vector<double> segs;
  for (double v : pts)
    if (v > 0.0 && v < rmax) segs.push_back(v);
  segs.push_back(0.0);
  segs.push_back(rmax);
  std::sort(segs.begin(), segs.end());
  segs.erase(std::unique(segs.begin(), segs.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-15; }),
             segs.end());
  return segs;
}

// Integrals m1 = E[x1^2 w(||x||)], m2 = E[x2^2 w(||x||)], and
// m12 = E[x1^2 x2^2 w(||x||)] for a radial factor w, at N(0, diag(s1,s2)).
// 512-point trapezoid in the angle (spectrally accurate for periodic smooth
// integrands), Gauss-Legendre per radial segment.
template <class RadialFn>
inline void radial_moments(double s1, double s2, RadialFn&& w,
                           const std::vector<double>& segs, double& m1,
                           double& m2, double& m12) {
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
  m1 = m2 = m12 = 0.0;
  for (std::size_t seg = 0; seg + 1 < segs.size(); ++seg) {
    const double a = segs[seg], b = segs[seg + 1];
    if (b <= a) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < gl.nodes.size(); ++i) {
      const double r = mid + half * gl.nodes[i];
      const double wr = w(r);
      if (wr == 0.0) continue;
      const double r2 = r * r;
      double a1 = 0.0, a2 = 0.0, a12 = 0.0;
      for (int t = 0; t < kAngles; ++t) {
        const double c2 = ct[t] * ct[t], sn2 = st[t] * st[t];
        const double dens = std::exp(-0.5 * r2 * (c2 / s1 + sn2 / s2));
        a1 += c2 * dens;
        a2 += sn2 * dens;
        a12 += c2 * sn2 * dens;
      }
      const double scale = half * gl.weights[i] * wr * r2 * r * norm *
                           (2.0 * M_PI / kAngles);
      m1 += scale * a1;
      m2 += scale * a2;
      m12 += scale * r2 * a12;
    }
  }
}

}  // namespace detail

// Population GSSCM at a bivariate centered Gaussian with diagonal scatter.
// The result is diagonal by symmetry; both diagonal entries are computed by
// the piecewise radial x angular quadrature.
inline ScatterMatrix population_gsscm(const EllipticalSpec& spec, RadialKind kind) {
  if (spec.family != Family::Gaussian)
    throw std::invalid_argument("population_gsscm: Gaussian family required");
  if (spec.scatter_diag.size() != 2)
    throw std::invalid_argument("population_gsscm: bivariate models only");
  if (spec.center.size() != 0 && spec.center.norm() != 0.0)
    throw std::invalid_argument("population_gsscm: centered models only");
  const double s1 = spec.scatter_diag(0), s2 = spec.scatter_diag(1);
  if (!(s1 > 0.0 && s2 > 0.0))
    throw std::invalid_argument("population_gsscm: scatter entries must be positive");
  const Cutoffs c = population_cutoffs(s1, s2);
  const double rmax = 12.0 * std::sqrt(std::max(s1, s2));
  double m1, m2, m12;
  detail::radial_moments(
      s1, s2,
      [&](double r) {
        const double xi = weight(kind, r, c);
        return xi * xi;
      },
      detail::radial_segments(c, rmax), m1, m2, m12);
  ScatterMatrix S;
  S.values = Eigen::Vector2d(m1, m2).asDiagonal();
  S.kind = kind;
  S.cutoffs = c;
  return S;
}

}  // namespace gspca
