#pragma once

// GSPCA model fitting and diagnostics. Three equivalent decomposition paths
// (dense spectral, thin SVD of the weighted data, and a truncated SVD that
// never forms the p x p matrix), MAD-corrected eigenvalues for Fisher
// consistency at the normal, the combined covariance estimator, and
// ROBPCA-style score/orthogonal distance diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gspca/dataio.hpp"
#include "gspca/gsscm.hpp"
#include "gspca/location.hpp"
#include "gspca/radial.hpp"
#include "gspca/stats.hpp"

namespace gspca {

enum class FitPath { Auto, Spectral, Svd, TruncatedSvd };

inline const char* fit_path_name(FitPath p) {
  switch (p) {
    case FitPath::Auto: return "auto";
    case FitPath::Spectral: return "spectral";
    case FitPath::Svd: return "svd";
    case FitPath::TruncatedSvd: return "truncated_svd";
  }
  throw std::invalid_argument("fit_path_name: bad path");
}

inline FitPath parse_fit_path(const std::string& s) {
  if (s == "auto") return FitPath::Auto;
  if (s == "spectral") return FitPath::Spectral;
  if (s == "svd") return FitPath::Svd;
  if (s == "truncated_svd") return FitPath::TruncatedSvd;
  throw std::invalid_argument("unknown fit path '" + s +
                              "' (expected auto|spectral|svd|truncated_svd)");
}

// Retained rank: either a fixed count or the smallest k whose cumulative raw
// eigenvalue share reaches the target fraction.
struct RankSpec {
  int k = 0;
  double variance_target = 0.0;  // in (0,1] when used
  bool by_variance = false;

  static RankSpec rank(int k) { return RankSpec{k, 0.0, false}; }
  static RankSpec variance(double target) { return RankSpec{0, target, true}; }
};

struct PcaModel {
  Eigen::VectorXd center;
  Eigen::MatrixXd loadings;               // p x k, orthonormal columns
  Eigen::VectorXd eigenvalues_raw;        // k GSSCM eigenvalues, descending
  Eigen::VectorXd eigenvalues_corrected;  // k MAD^2-based eigenvalues
  RadialKind kind = RadialKind::Identity;
  int k = 0;
};

enum class OutlierClass { Regular, GoodLeverage, OrthogonalOutlier, BadLeverage };

inline const char* outlier_class_name(OutlierClass c) {
  switch (c) {
    case OutlierClass::Regular: return "regular";
    case OutlierClass::GoodLeverage: return "good_leverage";
    case OutlierClass::OrthogonalOutlier: return "orthogonal_outlier";
    case OutlierClass::BadLeverage: return "bad_leverage";
  }
  throw std::invalid_argument("outlier_class_name: bad class");
}

struct DiagnosticReport {
  Eigen::VectorXd score_distance;
  Eigen::VectorXd orthogonal_distance;
  double sd_cutoff = 0.0;
  double od_cutoff = 0.0;
  std::vector<OutlierClass> classes;
};

namespace detail {

// Fix each loading column's sign so its entry of largest magnitude is
// positive; deterministic output for golden tests.
inline void fix_signs(Eigen::MatrixXd& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::Index imax = 0;
    V.col(j).cwiseAbs().maxCoeff(&imax);
    if (V(imax, j) < 0.0) V.col(j) = -V.col(j);
  }
}

struct Decomposition {
  Eigen::MatrixXd vectors;    // p x q, descending eigenvalue order
  Eigen::VectorXd values;     // q, descending, clamped at 0
  double total_variance = 0;  // trace of the underlying scatter
};

// Dense symmetric eigendecomposition of (1/n) G^T G.
inline Decomposition decompose_spectral(const Eigen::MatrixXd& G) {
  const Eigen::Index n = G.rows(), p = G.cols();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p, p);
  S.selfadjointView<Eigen::Lower>().rankUpdate(G.adjoint(), 1.0 / double(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      S.selfadjointView<Eigen::Lower>());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("fit: eigendecomposition failed");
  Decomposition d;
  d.vectors = es.eigenvectors().rowwise().reverse();
  d.values = es.eigenvalues().reverse().cwiseMax(0.0);
  d.total_variance = d.values.sum();
  return d;
}

// Thin SVD of G/sqrt(n): eigenvalues are squared singular values.
inline Decomposition decompose_svd(const Eigen::MatrixXd& G) {
  const double inv_sqrt_n = 1.0 / std::sqrt(double(G.rows()));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(G * inv_sqrt_n, Eigen::ComputeThinV);
  Decomposition d;
  d.vectors = svd.matrixV();
  d.values = svd.singularValues().array().square();
  d.total_variance = d.values.sum();
  if (G.cols() > G.rows()) {
    // Thin SVD returns min(n,p) vectors; the missing eigenvalues are zero and
    // do not change the total.
    d.total_variance = d.values.sum();
  }
  return d;
}

// Orthonormalize the columns of Z in place by twice-iterated Cholesky QR.
// Two rounds restore machine-precision orthogonality for condition numbers up
// to about 1e7, which covers two scatter applications between orthonormal
// bases; a Householder pass handles the rare failure beyond that.
inline void orthonormalize(Eigen::MatrixXd& Z, Eigen::MatrixXd& gram,
                           Eigen::LLT<Eigen::MatrixXd>& llt,
                           Eigen::HouseholderQR<Eigen::MatrixXd>& qr,
                           const Eigen::MatrixXd& thin_identity) {
  for (int round = 0; round < 2; ++round) {
    gram.noalias() = Z.adjoint() * Z;
    llt.compute(gram);
    if (llt.info() != Eigen::Success) {
      qr.compute(Z);
      Z.noalias() = qr.householderQ() * thin_identity;
      return;
    }
    llt.matrixU().solveInPlace<Eigen::OnTheRight>(Z);
  }
}

// Truncated decomposition by blocked subspace iteration on G without forming
// the p x p matrix. Deterministic start block. Convergence is decided by the
// actual eigenpair residual of the leading `want` Ritz pairs (Ritz values
// alone stagnate one order earlier than the vectors and would accept an
// unconverged subspace). Per pass the scatter is applied twice between
// orthonormalizations and the residual is checked every other pass, so the
// fixed per-pass cost stays small next to the n-proportional products.
// Returns false (callers fall back to the dense path) if the iteration fails
// to converge.
inline bool decompose_truncated(const Eigen::MatrixXd& G, int want,
                                Decomposition& out) {
  const Eigen::Index n = G.rows(), p = G.cols();
  const Eigen::Index q = std::min<Eigen::Index>(p, std::min<Eigen::Index>(n, want + 8));
  if (q < want) return false;
  // Deterministic start block; any generic full-rank block works here, so a
  // plain uniform fill avoids the cost of inverse-CDF draws.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  Eigen::MatrixXd Q(p, q);
  for (Eigen::Index j = 0; j < q; ++j)
    for (Eigen::Index i = 0; i < p; ++i)
      Q(i, j) = (double(rng() >> 11) + 0.5) * 0x1.0p-53 - 0.5;
  const Eigen::MatrixXd thin_identity = Eigen::MatrixXd::Identity(p, q);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(p, q);
  Eigen::LLT<Eigen::MatrixXd> llt(q);
  Eigen::MatrixXd gram(q, q);
  orthonormalize(Q, gram, llt, qr, thin_identity);

  const double inv_n = 1.0 / double(n);
  Eigen::MatrixXd Y(n, q), Z(p, q), small(q, q), W(q, want), QW(p, want),
      resid(p, want);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_small;
  for (int pass = 0; pass < 200; ++pass) {
    Y.noalias() = G * Q;            // n x q
    Z.noalias() = G.adjoint() * Y;  // p x q, = n S Q
    Z *= inv_n;
    if (pass % 2 == 0) {
      // Rayleigh-Ritz with the scatter-block product already in hand: Ritz
      // pairs (theta_j, Q w_j) have residual S(Qw) - theta Qw = Zw - theta Qw.
      small.noalias() = Q.adjoint() * Z;
      es_small.compute(0.5 * (small + small.transpose()));
      W = es_small.eigenvectors().rowwise().reverse().leftCols(want);
      const Eigen::VectorXd theta =
          es_small.eigenvalues().reverse().head(want).cwiseMax(0.0);
      const double lead = std::max(theta(0), 1e-300);
      QW.noalias() = Q * W;
      resid.noalias() = Z * W;
      resid.noalias() -= QW * theta.asDiagonal();
      if (resid.cwiseAbs().maxCoeff() <= 1e-12 * lead) {
        out.vectors = QW;
        out.values = theta;
        out.total_variance = G.squaredNorm() * inv_n;  // trace identity
        return true;
      }
    }
    // Advance by a second application, then re-orthonormalize.
    Y.noalias() = G * Z;
    Z.noalias() = G.adjoint() * Y;
    Q.swap(Z);
    orthonormalize(Q, gram, llt, qr, thin_identity);
  }
  return false;
}

inline int resolve_rank(const RankSpec& spec, const Decomposition& d,
                        Eigen::Index n, Eigen::Index p) {
  const int kmax = int(std::min(n, p));
  if (!spec.by_variance) {
    if (spec.k < 1 || spec.k > kmax)
      throw std::invalid_argument("fit: k must be in [1, min(n,p)]");
    return spec.k;
  }
  if (!(spec.variance_target > 0.0 && spec.variance_target <= 1.0))
    throw std::invalid_argument("fit: variance target must be in (0,1]");
  const double total = d.total_variance;
  if (total <= 0.0) throw std::runtime_error("fit: zero total variance");
  double cum = 0.0;
  for (int j = 0; j < d.values.size(); ++j) {
    cum += d.values(j);
    if (cum / total >= spec.variance_target) return j + 1;
  }
  return int(d.values.size());
}

}  // namespace detail

// MAD^2-based eigenvalues: lambda_S,j = mad(v_j^T (x_i - center))^2.
inline Eigen::VectorXd correct_eigenvalues(const PcaModel& model,
                                           const Eigen::MatrixXd& X) {
  Eigen::MatrixXd T = (X.rowwise() - model.center.transpose()) * model.loadings;
  Eigen::VectorXd out(model.k);
  for (int j = 0; j < model.k; ++j) {
    const double s = mad(T.col(j));
    out(j) = s * s;
  }
  return out;
}

// Fit a GSPCA model. The default Auto path uses the truncated solver when p
// is large and few components are kept, and the dense spectral path
// otherwise. All paths agree to tight tolerance; the choice is performance.
inline PcaModel fit(const Eigen::MatrixXd& X, RadialKind kind, RankSpec rank,
                    FitPath path = FitPath::Auto, int location_k = 2) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n < 2) throw std::invalid_argument("fit: need at least 2 rows");
  if (!rank.by_variance && (rank.k < 1 || rank.k > std::min(n, p)))
    throw std::invalid_argument("fit: k must be in [1, min(n,p)]");

  detail::CenteredData cd = detail::center_and_cutoffs(X, location_k);
  if (!(cd.dist.maxCoeff() > 0.0))
    throw std::runtime_error("fit: degenerate data (all rows identical)");
  Eigen::MatrixXd G = cd.centered;
  detail::apply_weights(G, cd.dist, kind, cd.cutoffs);

  FitPath effective = path;
  if (path == FitPath::Auto) {
    const bool few = !rank.by_variance && rank.k <= int(std::min(n, p) / 2);
    effective = (p > 64 && few) ? FitPath::TruncatedSvd : FitPath::Spectral;
  }

  detail::Decomposition dec;
  if (effective == FitPath::TruncatedSvd && !rank.by_variance) {
    if (!detail::decompose_truncated(G, rank.k, dec))
      dec = detail::decompose_spectral(G);  // accuracy fallback
  } else if (effective == FitPath::Svd) {
    dec = detail::decompose_svd(G);
  } else {
    dec = detail::decompose_spectral(G);
  }

  PcaModel model;
  model.kind = kind;
  model.center = cd.center;
  model.k = detail::resolve_rank(rank, dec, n, p);
  if (model.k > dec.vectors.cols())
    throw std::runtime_error("fit: decomposition returned too few components");
  model.loadings = dec.vectors.leftCols(model.k);
  detail::fix_signs(model.loadings);
  model.eigenvalues_raw = dec.values.head(model.k);
  model.eigenvalues_corrected = correct_eigenvalues(model, X);
  return model;
}

inline PcaModel fit(const Eigen::MatrixXd& X, RadialKind kind, int k,
                    FitPath path = FitPath::Auto, int location_k = 2) {
  return fit(X, kind, RankSpec::rank(k), path, location_k);
}

// Scores t_i = loadings^T (x_i - center).
inline Eigen::MatrixXd scores(const PcaModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.center.size())
    throw std::invalid_argument("scores: dimension mismatch");
  return (X.rowwise() - model.center.transpose()) * model.loadings;
}

// Covariance rebuilt from all p GSSCM eigenvectors and corrected eigenvalues.
inline Eigen::MatrixXd combined_covariance(const PcaModel& model,
                                           const Eigen::MatrixXd& X) {
  if (model.k != X.cols())
    throw std::invalid_argument("combined_covariance: model must retain k = p components");
  (void)X;
  return model.loadings *
         model.eigenvalues_corrected.asDiagonal() *
         model.loadings.transpose();
}

// Score and orthogonal distances with their cutoffs and the four-way outlier
// classification. SD cutoff: sqrt of the 0.975 chi-squared quantile with k
// degrees of freedom. OD cutoff: Wilson-Hilferty style normalization of
// OD^(2/3) with the 0.975 normal quantile.
inline DiagnosticReport diagnose(const PcaModel& model, const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  for (int j = 0; j < model.k; ++j)
    if (!(model.eigenvalues_corrected(j) > 0.0))
      throw std::runtime_error("diagnose: zero corrected eigenvalue among retained components");
  const Eigen::MatrixXd centered = X.rowwise() - model.center.transpose();
  const Eigen::MatrixXd T = centered * model.loadings;
  DiagnosticReport rep;
  rep.score_distance =
      (T.array().square().rowwise() /
       model.eigenvalues_corrected.transpose().array())
          .rowwise()
          .sum()
          .sqrt();
  rep.orthogonal_distance =
      (centered - T * model.loadings.transpose()).rowwise().norm();
  rep.sd_cutoff = std::sqrt(chi2_quantile(0.975, double(model.k)));
  std::vector<double> u(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    u[std::size_t(i)] = two_thirds_power(rep.orthogonal_distance(i));
  const double med_u = median(u);
  const double s_u = kMadConsistency * mad_raw(u);
  const double z = normal_quantile(0.975);
  rep.od_cutoff = std::pow(std::max(0.0, med_u + s_u * z), 1.5);
  rep.classes.resize(std::size_t(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool sd_out = rep.score_distance(i) > rep.sd_cutoff;
    const bool od_out = rep.orthogonal_distance(i) > rep.od_cutoff;
    rep.classes[std::size_t(i)] =
        sd_out ? (od_out ? OutlierClass::BadLeverage : OutlierClass::GoodLeverage)
               : (od_out ? OutlierClass::OrthogonalOutlier : OutlierClass::Regular);
  }
  return rep;
}

// Rank-k reconstruction: X_hat = (X - 1 T^T) V V^T + 1 T^T.
inline Eigen::MatrixXd reconstruct(const PcaModel& model, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd centered = X.rowwise() - model.center.transpose();
  return (centered * model.loadings) * model.loadings.transpose() +
         Eigen::VectorXd::Ones(X.rows()) * model.center.transpose();
}

struct ResidualReport {
  Eigen::MatrixXd standardized;        // n x p
  std::vector<std::uint8_t> zero_scale;  // per-row flag: scale was zero
};

// Residuals X - X_hat standardized per row. Classical scaling uses the row
// mean and sample standard deviation; robust scaling uses the row median and
// 1.4826 * raw MAD. A zero-scale row is reported as all zeros and flagged.
inline ResidualReport residuals(const PcaModel& model, const Eigen::MatrixXd& X,
                                ScalingMode scaling) {
  const Eigen::Index n = X.rows(), p = X.cols();
  Eigen::MatrixXd R = X - reconstruct(model, X);
  ResidualReport rep;
  rep.standardized.resize(n, p);
  rep.zero_scale.assign(std::size_t(n), 0);
  std::vector<double> row(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) row[std::size_t(j)] = R(i, j);
    double center, scale;
    if (scaling == ScalingMode::Classical) {
      center = R.row(i).mean();
      scale = p > 1 ? std::sqrt((R.row(i).array() - center).square().sum() /
                                double(p - 1))
                    : 0.0;
    } else {
      center = median(row);
      scale = kMadConsistency * mad_raw(row);
    }
    if (scale > 0.0) {
      rep.standardized.row(i) = (R.row(i).array() - center) / scale;
    } else {
      rep.standardized.row(i).setZero();
      rep.zero_scale[std::size_t(i)] = 1;
    }
  }
  return rep;
}

}  // namespace gspca
