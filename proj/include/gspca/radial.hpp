#pragma once

// Radial weight functions and the robust distance cutoffs they depend on.
// Cutoffs are quartile estimates built from the median and raw MAD of
// d^(2/3), so no order statistic depends on the dimension p.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gspca/stats.hpp"

namespace gspca {

enum class RadialKind { Identity, SpatialSign, Winsor, Quad, Ball, Shell, LR };

inline const char* radial_kind_name(RadialKind kind) {
  switch (kind) {
    case RadialKind::Identity: return "identity";
    case RadialKind::SpatialSign: return "sscm";
    case RadialKind::Winsor: return "winsor";
    case RadialKind::Quad: return "quad";
    case RadialKind::Ball: return "ball";
    case RadialKind::Shell: return "shell";
    case RadialKind::LR: return "lr";
  }
  throw std::invalid_argument("radial_kind_name: bad kind");
}

inline RadialKind parse_radial_kind(const std::string& s) {
  if (s == "identity") return RadialKind::Identity;
  if (s == "sscm") return RadialKind::SpatialSign;
  if (s == "winsor") return RadialKind::Winsor;
  if (s == "quad") return RadialKind::Quad;
  if (s == "ball") return RadialKind::Ball;
  if (s == "shell") return RadialKind::Shell;
  if (s == "lr") return RadialKind::LR;
  throw std::invalid_argument("unknown radial kind '" + s +
                              "' (expected identity|sscm|winsor|quad|ball|shell|lr)");
}

inline bool needs_cutoffs(RadialKind kind) {
  return kind != RadialKind::Identity && kind != RadialKind::SpatialSign;
}

struct Cutoffs {
  double q1 = 0.0, q2 = 0.0, q3 = 0.0, q3star = 0.0;
  // Endpoints of the shell band on the u = r^(2/3) scale (q1 = u1^(3/2),
  // q3 = u3^(3/2)). The shell inclusion test runs on this scale: when a
  // sample point itself realizes the MAD, its u-value equals an endpoint
  // bit-for-bit, so its classification cannot flip under rotations that
  // perturb every distance by an ulp. Comparing on the r scale would
  // re-round both sides through the 3/2 power and lose that exactness.
  double u1 = 0.0, u3 = 0.0;
};

// Quartile estimates of centered distances. With u_i = d_i^(2/3):
//   Q1  = max(0, med(u) - MAD_raw(u))^(3/2)
//   Q2  = med(d)
//   Q3  = (med(u) + MAD_raw(u))^(3/2)
//   Q3* = (med(u) + 1.4826 * MAD_raw(u))^(3/2)
// MAD_raw carries no consistency factor; the 1.4826 appears only in Q3*.
// Q1's bracket is clamped at zero before the 3/2 power.
inline Cutoffs estimate_cutoffs(const Eigen::Ref<const Eigen::VectorXd>& d) {
  const Eigen::Index n = d.size();
  if (n < 2) throw std::invalid_argument("estimate_cutoffs: need at least 2 distances");
  std::vector<double> u(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(d(i) >= 0.0) || !std::isfinite(d(i)))
      throw std::invalid_argument("estimate_cutoffs: distances must be finite and >= 0");
    u[std::size_t(i)] = two_thirds_power(d(i));
  }
  std::vector<double> buf = u;
  const double med_u = median_inplace(buf);
  for (std::size_t i = 0; i < u.size(); ++i) buf[i] = std::abs(u[i] - med_u);
  const double mad_u = median_inplace(buf);
  Cutoffs c;
  c.u1 = std::max(0.0, med_u - mad_u);
  c.u3 = med_u + mad_u;
  c.q1 = std::pow(c.u1, 1.5);
  c.q2 = median(d);
  c.q3 = std::pow(c.u3, 1.5);
  c.q3star = std::pow(med_u + kMadConsistency * mad_u, 1.5);
  return c;
}

// The radial weight xi(r). SpatialSign at r = 0 returns 0 so that the
// transformed point g(0) = 0 * xi = 0 without a special case at the caller.
inline double weight(RadialKind kind, double r, const Cutoffs& c) {
  switch (kind) {
    case RadialKind::Identity:
      return 1.0;
    case RadialKind::SpatialSign:
      return r > 0.0 ? 1.0 / r : 0.0;
    case RadialKind::Winsor:
      return r <= c.q2 ? 1.0 : c.q2 / r;
    case RadialKind::Quad:
      return r <= c.q2 ? 1.0 : (c.q2 * c.q2) / (r * r);
    case RadialKind::Ball:
      return r <= c.q2 ? 1.0 : 0.0;
    case RadialKind::Shell: {
      const double u = two_thirds_power(r);
      return (u >= c.u1 && u <= c.u3) ? 1.0 : 0.0;
    }
    case RadialKind::LR:
      if (r <= c.q2) return 1.0;
      if (r >= c.q3star) return 0.0;
      // Collapsed cutoffs degenerate to a hard cutoff at q2.
      if (c.q3star <= c.q2) return 0.0;
      return (c.q3star - r) / (c.q3star - c.q2);
  }
  throw std::invalid_argument("weight: bad kind");
}

}  // namespace gspca
