#pragma once

// Scalar statistics shared across the library: medians and MAD with fixed
// conventions, plus normal and chi-squared quantile routines so no external
// table lookups are needed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace gspca {

// Consistency factor 1/qnorm(0.75) as conventionally rounded.
inline constexpr double kMadConsistency = 1.4826;

// Median of `v`, partially sorting it in place. Even sample sizes average the
// two central order statistics; this convention is applied uniformly.
inline double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("median: empty sample");
  const std::size_t m = n / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  const double hi = v[m];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + m);
  return 0.5 * (lo + hi);
}

inline double median(std::vector<double> v) { return median_inplace(v); }

inline double median(const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::vector<double> buf(v.data(), v.data() + v.size());
  return median_inplace(buf);
}

// med|x - med(x)| with no consistency factor.
inline double mad_raw(const std::vector<double>& v) {
  std::vector<double> buf = v;
  const double m = median_inplace(buf);
  for (std::size_t i = 0; i < v.size(); ++i) buf[i] = std::abs(v[i] - m);
  return median_inplace(buf);
}

inline double mad_raw(const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::vector<double> buf(v.data(), v.data() + v.size());
  return mad_raw(buf);
}

// 1.4826 * med|x - med(x)|; returns 0 for constant samples.
inline double mad(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("mad: need at least 2 values");
  return kMadConsistency * mad_raw(v);
}

inline double mad(const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::vector<double> buf(v.data(), v.data() + v.size());
  return mad(buf);
}

// d^(2/3) evaluated as cbrt(d*d) to stay exact for d = 0 and cheap per call.
inline double two_thirds_power(double d) { return std::cbrt(d * d); }

inline double normal_pdf(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

// Inverse standard normal CDF: Acklam's rational approximation refined by one
// Halley step, giving close to full double precision.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the erfc-based CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * 2.5066282746310005024 * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

namespace detail {

// Regularized lower incomplete gamma P(a,x) by series (x < a+1) or continued
// fraction, standard formulation.
inline double gammp(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammp: bad arguments");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16)
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    throw std::runtime_error("gammp: series did not converge");
  }
  // Lentz continued fraction for Q(a,x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

// Inverse of P(a, .) by Newton iteration from a Wilson-Hilferty start.
inline double gammp_inv(double a, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("gammp_inv: p out of range");
  if (p == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  double x;
  if (a > 1.0) {
    const double z = normal_quantile(p);
    const double t = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
    x = a * t * t * t;
    if (x <= 0.0) x = 1e-3;
  } else {
    const double t = 1.0 - a * (0.253 + a * 0.12);
    x = (p < t) ? std::pow(p / t, 1.0 / a) : 1.0 - std::log1p(-(p - t) / (1.0 - t));
  }
  for (int it = 0; it < 60; ++it) {
    const double err = gammp(a, x) - p;
    const double dens = std::exp(-x + (a - 1.0) * std::log(x) - gln);
    if (dens <= 0.0) break;
    double dx = err / dens;
    // Halley-style correction improves convergence near the tails.
    dx /= std::max(0.5, 1.0 - 0.5 * dx * ((a - 1.0) / x - 1.0));
    const double x_new = std::max(0.5 * x, x - dx);
    if (std::abs(x_new - x) < 1e-14 * x) return x_new;
    x = x_new;
  }
  return x;
}

}  // namespace detail

// Chi-squared quantile with `dof` degrees of freedom.
inline double chi2_quantile(double p, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("chi2_quantile: dof must be positive");
  return 2.0 * detail::gammp_inv(0.5 * dof, p);
}

}  // namespace gspca
