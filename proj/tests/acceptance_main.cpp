// Acceptance suite: one line per criterion, PASS or FAIL with measured
// numbers. Exits nonzero if any criterion fails. Tolerances are pinned in
// code next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gspca/analysis.hpp"
#include "gspca/gspca.hpp"
#include "gspca/simulate.hpp"

using gspca::RadialKind;

namespace {

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

std::string fmts(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return std::string(buf);
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

constexpr RadialKind kBounded[] = {RadialKind::SpatialSign, RadialKind::Winsor,
                                   RadialKind::Quad,        RadialKind::Ball,
                                   RadialKind::Shell,       RadialKind::LR};

constexpr RadialKind kCutoffKinds[] = {RadialKind::Winsor, RadialKind::Quad,
                                       RadialKind::Ball, RadialKind::Shell,
                                       RadialKind::LR};

// ---------------------------------------------------------------------------
// 1. GES table at gamma = 0.5, within 1% relative; Identity unbounded.
// ---------------------------------------------------------------------------
Outcome criterion_ges() {
  const double t0 = now_seconds();
  struct Row {
    RadialKind kind;
    double want;
  };
  const Row rows[] = {
      {RadialKind::SpatialSign, 2.914213}, {RadialKind::Winsor, 3.100523},
      {RadialKind::Quad, 6.569927},        {RadialKind::LR, 10.74909},
      {RadialKind::Ball, 29.27686},        {RadialKind::Shell, 12.42133},
  };
  Outcome out;
  double worst = 0.0;
  const char* worst_kind = "";
  for (const Row& row : rows) {
    const gspca::AnalysisModel m = gspca::make_analysis_model(0.5, row.kind);
    const double got = gspca::ges(m);
    const double rel = std::abs(got - row.want) / row.want;
    if (rel > worst) {
      worst = rel;
      worst_kind = gspca::radial_kind_name(row.kind);
    }
    if (rel > 0.01) {
      out.pass = false;
      out.detail += fmts("%s got %.6f want %.6f (%.2f%%); ",
                         gspca::radial_kind_name(row.kind), got, row.want,
                         100.0 * rel);
    }
  }
  const bool id_unbounded =
      std::isinf(gspca::ges(gspca::make_analysis_model(0.5, RadialKind::Identity)));
  if (!id_unbounded) {
    out.pass = false;
    out.detail += "identity not reported unbounded; ";
  }
  const double elapsed = now_seconds() - t0;
  if (elapsed >= 120.0) {
    out.pass = false;
    out.detail += fmts("runtime %.1f s exceeds 2 min; ", elapsed);
  }
  if (out.pass)
    out.detail = fmts("max rel dev %.3f%% (%s), identity unbounded, %.1f s",
                      100.0 * worst, worst_kind, elapsed);
  return out;
}

// ---------------------------------------------------------------------------
// 2. Uncontaminated maxsub table, Normal and t5, 500 reps, +-0.02 absolute.
// ---------------------------------------------------------------------------
Outcome criterion_maxsub_table() {
  const double t0 = now_seconds();
  const std::vector<std::string> names = {"cpca", "sscm", "ball",  "lr",
                                          "quad", "shell", "winsor"};
  const double paper_normal[] = {0.100, 0.137, 0.257, 0.163, 0.132, 0.149, 0.113};
  const double paper_t5[] = {0.134, 0.131, 0.243, 0.163, 0.137, 0.170, 0.113};
  const auto methods = gspca::parse_methods(names);

  Outcome out;
  double worst = 0.0;
  std::string worst_tag;
  auto check = [&](const char* tag, const gspca::ScenarioSpec& spec,
                   const double* paper) {
    const gspca::MaxsubResult res = gspca::run_experiment(spec, methods);
    for (int j = 0; j < int(names.size()); ++j) {
      const double dev = std::abs(res.mean_maxsub(j) - paper[j]);
      if (dev > worst) {
        worst = dev;
        worst_tag = fmts("%s/%s", tag, names[std::size_t(j)].c_str());
      }
      if (dev > 0.02) {
        out.pass = false;
        out.detail += fmts("%s %s got %.3f want %.3f; ", tag,
                           names[std::size_t(j)].c_str(), res.mean_maxsub(j),
                           paper[j]);
      }
    }
  };

  gspca::ScenarioSpec spec = gspca::lowdim_scenario();
  spec.reps = 500;
  spec.seed = 20240915ull;
  check("normal", spec, paper_normal);
  spec.family = gspca::Family::StudentT;
  spec.nu = 5.0;
  check("t5", spec, paper_t5);

  const double elapsed = now_seconds() - t0;
  if (elapsed >= 600.0) {
    out.pass = false;
    out.detail += fmts("runtime %.1f s exceeds 10 min; ", elapsed);
  }
  if (out.pass)
    out.detail = fmts("max abs dev %.4f (%s), %.1f s", worst,
                      worst_tag.c_str(), elapsed);
  return out;
}

// ---------------------------------------------------------------------------
// 3. Cauchy robustness: CPCA breaks down, Winsor and SSCM do not.
// ---------------------------------------------------------------------------
Outcome criterion_cauchy() {
  gspca::ScenarioSpec spec = gspca::lowdim_scenario();
  spec.family = gspca::Family::StudentT;
  spec.nu = 1.0;
  spec.reps = 500;
  spec.seed = 20240915ull;
  const auto methods = gspca::parse_methods({"cpca", "winsor", "sscm"});
  const gspca::MaxsubResult res = gspca::run_experiment(spec, methods);
  Outcome out;
  out.detail = fmts("cpca %.3f (>=0.35), winsor %.3f (<=0.15), sscm %.3f (<=0.15)",
                    res.mean_maxsub(0), res.mean_maxsub(1), res.mean_maxsub(2));
  out.pass = res.mean_maxsub(0) >= 0.35 && res.mean_maxsub(1) <= 0.15 &&
             res.mean_maxsub(2) <= 0.15;
  return out;
}

// ---------------------------------------------------------------------------
// 4. Contamination figure: hard-rejection kinds hold, others break.
// ---------------------------------------------------------------------------
Outcome criterion_contamination() {
  const std::vector<std::string> names = {"ball", "lr",   "shell",
                                          "cpca", "sscm", "winsor"};
  const auto methods = gspca::parse_methods(names);
  Outcome out;
  std::string summary;
  for (double f1 : {10.0, 20.0}) {
    gspca::ScenarioSpec spec = gspca::lowdim_scenario();
    spec.epsilon = 0.2;
    spec.f1 = f1;
    spec.f2 = 1.0;
    spec.reps = 500;
    spec.seed = 20240915ull;
    const gspca::MaxsubResult res = gspca::run_experiment(spec, methods);
    for (int j = 0; j < 3; ++j)
      if (!(res.mean_maxsub(j) < 0.25)) {
        out.pass = false;
        out.detail += fmts("f1=%g %s got %.3f (want < 0.25); ", f1,
                           names[std::size_t(j)].c_str(), res.mean_maxsub(j));
      }
    for (int j = 3; j < 6; ++j)
      if (!(res.mean_maxsub(j) > 0.8)) {
        out.pass = false;
        out.detail += fmts("f1=%g %s got %.3f (want > 0.8); ", f1,
                           names[std::size_t(j)].c_str(), res.mean_maxsub(j));
      }
    summary += fmts("f1=%g ball %.2f lr %.2f shell %.2f | cpca %.2f sscm %.2f winsor %.2f;  ",
                    f1, res.mean_maxsub(0), res.mean_maxsub(1), res.mean_maxsub(2),
                    res.mean_maxsub(3), res.mean_maxsub(4), res.mean_maxsub(5));
  }
  if (out.pass) out.detail = summary;
  return out;
}

// ---------------------------------------------------------------------------
// 5. Efficiency windows and ordering across gamma.
// ---------------------------------------------------------------------------
Outcome criterion_efficiency() {
  Outcome out;
  std::string summary;
  for (double gamma : {0.55, 0.7, 0.9}) {
    auto eff = [&](RadialKind kind) {
      return gspca::efficiency(gspca::make_analysis_model(gamma, kind));
    };
    const double w = eff(RadialKind::Winsor);
    const double s = eff(RadialKind::SpatialSign);
    const double q = eff(RadialKind::Quad);
    const double l = eff(RadialKind::LR);
    const double sh = eff(RadialKind::Shell);
    const double b = eff(RadialKind::Ball);
    if (!(w >= 0.6 && w <= 0.8))
      out.pass = false, out.detail += fmts("gamma=%g winsor %.4f outside [0.6,0.8]; ", gamma, w);
    if (!(s >= 0.45 && s <= 0.55))
      out.pass = false, out.detail += fmts("gamma=%g sscm %.4f outside [0.45,0.55]; ", gamma, s);
    if (!(q >= 0.25 && q <= 0.4))
      out.pass = false, out.detail += fmts("gamma=%g quad %.4f outside [0.25,0.4]; ", gamma, q);
    if (!(w > s && s > q && q > l && q > sh && l > b && sh > b))
      out.pass = false,
      out.detail += fmts("gamma=%g ordering violated (w %.3f s %.3f q %.3f l %.3f sh %.3f b %.3f); ",
                         gamma, w, s, q, l, sh, b);
    summary += fmts("g=%g: w %.3f s %.3f q %.3f l %.3f sh %.3f b %.3f;  ", gamma,
                    w, s, q, l, sh, b);
  }
  if (out.pass) out.detail = summary;
  return out;
}

// ---------------------------------------------------------------------------
// 6. Breakdown suite: bounded below half, exploding at half.
// ---------------------------------------------------------------------------
Outcome criterion_breakdown() {
  gspca::ScenarioSpec spec = gspca::lowdim_scenario();
  spec.seed = 20240915ull;
  const Eigen::MatrixXd X = gspca::generate(spec, 0);
  const int n = spec.n;                 // 100
  const int m_below = (n + 1) / 2 - 1;  // floor((n+1)/2) - 1 = 49
  const int m_at = (n + 2) / 2;         // ceil((n+1)/2) = 51
  const std::vector<double> mags = {1e2, 1e4, 1e6, 1e8};

  const Eigen::VectorXd clean_center = gspca::kstep_lts(X).center;
  const double c1 =
      (X.rowwise() - clean_center.transpose()).rowwise().norm().maxCoeff();

  Outcome out;
  double tightest = std::numeric_limits<double>::infinity();
  double smallest_excess = std::numeric_limits<double>::infinity();
  for (RadialKind kind : kCutoffKinds) {
    const gspca::BreakdownCurve below =
        gspca::empirical_breakdown(X, kind, m_below, mags);
    for (std::size_t i = 0; i < mags.size(); ++i) {
      const double bound = 2.4826 * (c1 + below.center_shift[i]);
      const double ratio = below.lambda_max[i] / (bound * bound);
      tightest = std::min(tightest, 1.0 / std::max(ratio, 1e-300));
      if (!(below.lambda_max[i] <= bound * bound)) {
        out.pass = false;
        out.detail += fmts("%s m=%d mag=%g lambda_max %.3g above bound %.3g; ",
                           gspca::radial_kind_name(kind), m_below, mags[i],
                           below.lambda_max[i], bound * bound);
      }
    }
    const gspca::BreakdownCurve at =
        gspca::empirical_breakdown(X, kind, m_at, mags);
    for (std::size_t i = 0; i < mags.size(); ++i) {
      const double floor_bound = mags[i] * mags[i] / (2.0 * n);
      smallest_excess = std::min(smallest_excess, at.lambda_max[i] / floor_bound);
      if (!(at.lambda_max[i] > floor_bound)) {
        out.pass = false;
        out.detail += fmts("%s m=%d mag=%g lambda_max %.3g not above %.3g; ",
                           gspca::radial_kind_name(kind), m_at, mags[i],
                           at.lambda_max[i], floor_bound);
      }
    }
  }
  if (out.pass)
    out.detail = fmts("m=%d: bound margin >= %.2fx; m=%d: excess >= %.2gx over lambda^2/(2n)",
                      m_below, tightest, m_at, smallest_excess);
  return out;
}

// ---------------------------------------------------------------------------
// 7. Oracle equivalences: fit paths, finite-difference influence, symmetry.
// ---------------------------------------------------------------------------
Outcome criterion_oracles() {
  Outcome out;
  // (a) three decomposition paths on 100 random instances.
  std::mt19937_64 eng(424242);
  std::normal_distribution<double> nd;
  constexpr RadialKind all_kinds[] = {
      RadialKind::Identity, RadialKind::SpatialSign, RadialKind::Winsor,
      RadialKind::Quad,     RadialKind::Ball,        RadialKind::Shell,
      RadialKind::LR};
  double worst_path = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 20 + 7 * (inst % 12);
    const int p = 2 + (inst % 15);
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) X(i, j) = nd(eng) * double(p - j);
    const int k = 1 + (inst % std::min({n, p, 8}));
    const RadialKind kind = all_kinds[inst % 7];
    const gspca::PcaModel a = gspca::fit(X, kind, k, gspca::FitPath::Spectral);
    const gspca::PcaModel b = gspca::fit(X, kind, k, gspca::FitPath::Svd);
    const gspca::PcaModel c =
        gspca::fit(X, kind, k, gspca::FitPath::TruncatedSvd);
    for (const gspca::PcaModel* other : {&b, &c}) {
      const double ev =
          (a.eigenvalues_raw - other->eigenvalues_raw).cwiseAbs().maxCoeff() /
          std::max(a.eigenvalues_raw(0), 1e-300);
      double vec = 0.0;
      for (int j = 0; j < k; ++j) {
        const double plus =
            (a.loadings.col(j) + other->loadings.col(j)).cwiseAbs().maxCoeff();
        const double minus =
            (a.loadings.col(j) - other->loadings.col(j)).cwiseAbs().maxCoeff();
        vec = std::max(vec, std::min(plus, minus));
      }
      const double err = std::max(ev, vec);
      worst_path = std::max(worst_path, err);
      if (err > 1e-10) {
        out.pass = false;
        out.detail += fmts("instance %d (n=%d p=%d k=%d %s) path dev %.2e; ",
                           inst, n, p, k, gspca::radial_kind_name(kind), err);
      }
    }
  }
  // (b) loading influence vs finite-difference contaminated functional.
  double worst_fd = 0.0;
  struct Pt {
    RadialKind kind;
    double x1, x2;
  };
  const Pt pts[] = {
      {RadialKind::SpatialSign, 1.5, 0.9}, {RadialKind::Winsor, 1.5, 0.9},
      {RadialKind::Winsor, 0.4, 0.2},      {RadialKind::Quad, 1.5, 0.9},
      {RadialKind::Ball, 0.4, 0.2},        {RadialKind::Ball, 1.5, 0.9},
      {RadialKind::Shell, 0.7, 0.4},       {RadialKind::Shell, 1.5, 0.9},
      {RadialKind::LR, 1.1, 0.4},          {RadialKind::LR, 0.4, 0.2},
  };
  for (const Pt& pt : pts) {
    const gspca::AnalysisModel m = gspca::make_analysis_model(0.5, pt.kind);
    const Eigen::Vector2d x0(pt.x1, pt.x2);
    const double eps = 1e-5;
    const Eigen::Matrix2d M = gspca::contaminated_gsscm(m, x0, eps);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
    Eigen::Vector2d v = es.eigenvectors().col(1);
    if (v(0) < 0.0) v = -v;
    const double fd = v(1) / eps;
    const double want = gspca::if_loading(m, x0, 1)(1);
    const double err = std::abs(fd - want) / std::max(1.0, std::abs(want));
    worst_fd = std::max(worst_fd, err);
    if (err > 1e-3) {
      out.pass = false;
      out.detail += fmts("%s at (%.2f,%.2f): fd %.6f vs IF %.6f; ",
                         gspca::radial_kind_name(pt.kind), pt.x1, pt.x2, fd,
                         want);
    }
  }
  // (c) cutoff-perturbation symmetry integral for every bounded kind.
  double worst_sym = 0.0;
  for (RadialKind kind : kBounded) {
    const double v =
        gspca::symmetry_integral_check(gspca::make_analysis_model(0.5, kind));
    worst_sym = std::max(worst_sym, v);
    if (!(v < 1e-4)) {
      out.pass = false;
      out.detail += fmts("symmetry check %s = %.2e; ",
                         gspca::radial_kind_name(kind), v);
    }
  }
  if (out.pass)
    out.detail = fmts("paths dev %.2e, fd dev %.2e, symmetry %.2e", worst_path,
                      worst_fd, worst_sym);
  return out;
}

// ---------------------------------------------------------------------------
// 8. Fisher consistency: corrected eigenvalues and eigenvector angles.
// ---------------------------------------------------------------------------
Outcome criterion_fisher() {
  Outcome out;
  constexpr RadialKind all_kinds[] = {
      RadialKind::Identity, RadialKind::SpatialSign, RadialKind::Winsor,
      RadialKind::Quad,     RadialKind::Ball,        RadialKind::Shell,
      RadialKind::LR};

  gspca::ScenarioSpec two = gspca::lowdim_scenario();
  two.p = 2;
  two.k = 1;
  two.n = 100000;
  two.seed = 20240915ull;
  two.sigma_diag = Eigen::Vector2d(4.0, 1.0);
  const Eigen::MatrixXd X2 = gspca::generate(two, 0);
  double worst_rel = 0.0;
  for (RadialKind kind : all_kinds) {
    const gspca::PcaModel m = gspca::fit(X2, kind, 2);
    const double r1 = std::abs(m.eigenvalues_corrected(0) - 4.0) / 4.0;
    const double r2 = std::abs(m.eigenvalues_corrected(1) - 1.0) / 1.0;
    worst_rel = std::max({worst_rel, r1, r2});
    if (r1 > 0.03 || r2 > 0.03) {
      out.pass = false;
      out.detail += fmts("%s corrected (%.4f, %.4f) vs (4, 1); ",
                         gspca::radial_kind_name(kind),
                         m.eigenvalues_corrected(0), m.eigenvalues_corrected(1));
    }
  }

  gspca::ScenarioSpec low = gspca::lowdim_scenario();
  low.n = 100000;
  low.seed = 20240915ull;
  const Eigen::MatrixXd X4 = gspca::generate(low, 0);
  double worst_angle = 0.0;
  for (RadialKind kind : all_kinds) {
    const gspca::PcaModel m = gspca::fit(X4, kind, 3);
    for (int j = 0; j < 3; ++j) {
      const double cosang = std::min(1.0, std::abs(m.loadings(j, j)));
      const double deg = std::acos(cosang) * 180.0 / M_PI;
      worst_angle = std::max(worst_angle, deg);
      if (!(deg < 2.0)) {
        out.pass = false;
        out.detail += fmts("%s eigenvector %d off by %.2f deg; ",
                           gspca::radial_kind_name(kind), j + 1, deg);
      }
    }
  }
  if (out.pass)
    out.detail = fmts("corrected eigenvalue dev <= %.2f%%, eigenvector angle <= %.3f deg",
                      100.0 * worst_rel, worst_angle);
  return out;
}

// ---------------------------------------------------------------------------
// 9. Equivariance: location, GSSCM, fit under rotation + translation.
// ---------------------------------------------------------------------------
Outcome criterion_equivariance() {
  Outcome out;
  std::mt19937_64 eng(1337);
  std::normal_distribution<double> nd;
  auto random_orthogonal = [&](int p) {
    Eigen::MatrixXd A(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) A(i, j) = nd(eng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    return Eigen::MatrixXd(qr.householderQ());
  };
  double worst_loc = 0.0, worst_scatter = 0.0, worst_fit = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 2 + (trial % 5);
    const int n = 30 + (trial % 31);
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) X(i, j) = nd(eng) * (1.0 + double(j));
    const Eigen::MatrixXd R = random_orthogonal(p);
    Eigen::VectorXd b(p);
    for (int j = 0; j < p; ++j) b(j) = 5.0 * nd(eng);
    const Eigen::MatrixXd Xt = (X * R.transpose()).rowwise() + b.transpose();
    const RadialKind kind = kBounded[trial % 6];

    // Location.
    const Eigen::VectorXd c = gspca::kstep_lts(X).center;
    const Eigen::VectorXd ct = gspca::kstep_lts(Xt).center;
    worst_loc = std::max(worst_loc, (ct - (R * c + b)).cwiseAbs().maxCoeff());

    // Scatter.
    const Eigen::MatrixXd S = gspca::sample_gsscm(X, kind).values;
    const Eigen::MatrixXd St = gspca::sample_gsscm(Xt, kind).values;
    worst_scatter = std::max(
        worst_scatter, (St - R * S * R.transpose()).cwiseAbs().maxCoeff());

    // Fit: center, eigenvalues, loadings up to per-column sign.
    const int k = std::min(3, p);
    const gspca::PcaModel m = gspca::fit(X, kind, k);
    const gspca::PcaModel mt = gspca::fit(Xt, kind, k);
    double dev = (mt.center - (R * m.center + b)).cwiseAbs().maxCoeff();
    dev = std::max(dev, (mt.eigenvalues_raw - m.eigenvalues_raw)
                            .cwiseAbs()
                            .maxCoeff() /
                            std::max(m.eigenvalues_raw(0), 1e-300));
    for (int j = 0; j < k; ++j) {
      const Eigen::VectorXd rv = R * m.loadings.col(j);
      const double plus = (rv + mt.loadings.col(j)).cwiseAbs().maxCoeff();
      const double minus = (rv - mt.loadings.col(j)).cwiseAbs().maxCoeff();
      dev = std::max(dev, std::min(plus, minus));
    }
    worst_fit = std::max(worst_fit, dev);
  }
  if (worst_loc > 1e-8)
    out.pass = false,
    out.detail += fmts("location dev %.2e exceeds 1e-8; ", worst_loc);
  if (worst_scatter > 1e-8)
    out.pass = false,
    out.detail += fmts("scatter dev %.2e exceeds 1e-8; ", worst_scatter);
  if (worst_fit > 1e-8)
    out.pass = false, out.detail += fmts("fit dev %.2e exceeds 1e-8; ", worst_fit);
  if (out.pass)
    out.detail = fmts("200 trials: location %.1e, scatter %.1e, fit %.1e",
                      worst_loc, worst_scatter, worst_fit);
  return out;
}

// ---------------------------------------------------------------------------
// 10. Timing: robust fit within 3x of classical at every n, near-linear
// scaling. Absolute seconds are logged, never asserted.
// ---------------------------------------------------------------------------
Outcome criterion_timing() {
  Outcome out;
  const std::vector<int> n_grid = {50, 100, 150, 200, 250, 300, 350, 400, 450, 500};
  const auto methods = gspca::parse_methods({"cpca", "winsor"});
  auto slope_of = [&](const Eigen::VectorXd& seconds) {
    // Least-squares slope of log(time) on log(n).
    const int m = int(n_grid.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
      const double x = std::log(double(n_grid[std::size_t(i)]));
      const double y = std::log(seconds(i));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (double(m) * sxy - sx * sy) / (double(m) * sxx - sx * sx);
  };
  for (const char* shape : {"lowdim", "highdim"}) {
    gspca::ScenarioSpec base = std::string(shape) == "lowdim"
                                   ? gspca::lowdim_scenario()
                                   : gspca::highdim_scenario();
    base.seed = 20240915ull;
    const gspca::TimingTable t =
        gspca::benchmark_timing(base, n_grid, methods, 100);
    double worst_ratio = 0.0;
    int worst_n = 0;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      const double ratio =
          t.total_seconds(Eigen::Index(i), 1) / t.total_seconds(Eigen::Index(i), 0);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst_n = n_grid[i];
      }
    }
    const double slope = slope_of(t.total_seconds.col(1));
    const double slope_c = slope_of(t.total_seconds.col(0));
    out.detail += fmts(
        "%s: max gspca/cpca %.2fx at n=%d, gspca slope %.2f (cpca %.2f), "
        "100-run totals at n=500: cpca %.4fs gspca %.4fs;  ",
        shape, worst_ratio, worst_n, slope, slope_c,
        t.total_seconds(Eigen::Index(n_grid.size()) - 1, 0),
        t.total_seconds(Eigen::Index(n_grid.size()) - 1, 1));
    if (!(worst_ratio <= 3.0)) out.pass = false;
    if (!(slope >= 0.8 && slope <= 1.3)) out.pass = false;
  }
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*run)();
  };
  const Entry entries[] = {
      {"ges table", criterion_ges},
      {"uncontaminated maxsub table", criterion_maxsub_table},
      {"cauchy robustness", criterion_cauchy},
      {"contamination figure", criterion_contamination},
      {"efficiency curve", criterion_efficiency},
      {"breakdown suite", criterion_breakdown},
      {"oracle equivalences", criterion_oracles},
      {"fisher consistency", criterion_fisher},
      {"equivariance suite", criterion_equivariance},
      {"timing", criterion_timing},
  };
  int failures = 0;
  for (std::size_t i = 0; i < sizeof entries / sizeof entries[0]; ++i) {
    const Outcome o = entries[i].run();
    std::printf("criterion %zu (%s): %s - %s\n", i + 1, entries[i].name,
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  if (failures > 0)
    std::printf("%d of 10 criteria failed\n", failures);
  else
    std::printf("all 10 criteria passed\n");
  return failures == 0 ? 0 : 1;
}
