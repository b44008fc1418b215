#pragma once

// Monte Carlo harness: contaminated elliptical data generation with
// replication-level determinism, the maxsub subspace-recovery measure,
// parallel experiment driver, fit timing benchmark, and the empirical
// breakdown experiment for the explosion breakdown value.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "gspca/gspca.hpp"
#include "gspca/gsscm.hpp"
#include "gspca/location.hpp"
#include "gspca/radial.hpp"
#include "gspca/stats.hpp"

namespace gspca {

// One simulation cell: (1-eps) F(0, Sigma) + eps F(f1 * e_axis, Sigma / f2)
// with F either Gaussian or multivariate Student t_nu.
struct ScenarioSpec {
  Family family = Family::Gaussian;
  double nu = 5.0;  // t degrees of freedom (used when family == StudentT)
  int n = 100;
  int p = 4;
  Eigen::VectorXd sigma_diag;
  double epsilon = 0.0;
  double f1 = 0.0;
  double f2 = 1.0;
  int shift_axis = 0;  // 1-based; 0 means default k+1
  int k = 1;
  int reps = 500;
  std::uint64_t seed = 1;
};

inline void validate_scenario(const ScenarioSpec& s) {
  if (s.n < 2 || s.p < 1) throw std::invalid_argument("scenario: need n >= 2, p >= 1");
  if (s.sigma_diag.size() != s.p)
    throw std::invalid_argument("scenario: sigma_diag must have p entries");
  if (s.sigma_diag.minCoeff() <= 0.0)
    throw std::invalid_argument("scenario: sigma_diag entries must be positive");
  if (!(s.epsilon >= 0.0 && s.epsilon < 0.5))
    throw std::invalid_argument("scenario: epsilon must be in [0, 0.5)");
  if (s.k < 1 || s.k > std::min(s.n, s.p))
    throw std::invalid_argument("scenario: k must be in [1, min(n,p)]");
  const int axis = s.shift_axis == 0 ? s.k + 1 : s.shift_axis;
  if (axis < 1 || axis > s.p)
    throw std::invalid_argument("scenario: shift axis must be in [1, p]");
  if (s.family == Family::StudentT &&
      !(s.nu == 1.0 || s.nu == 2.0 || s.nu == 3.0 || s.nu == 5.0))
    throw std::invalid_argument("scenario: t degrees of freedom must be 1, 2, 3 or 5");
  if (s.reps < 1) throw std::invalid_argument("scenario: reps must be positive");
}

// Low-dimensional setting: n=100, p=4, Sigma = diag(8,4,2,1), k=3.
inline Eigen::VectorXd lowdim_sigma() {
  Eigen::VectorXd s(4);
  s << 8.0, 4.0, 2.0, 1.0;
  return s;
}

// High-dimensional setting: n=50, p=100, k=5. The leading block is
// (17, 13.5, 8, 3, 1); the tail runs arithmetically 0.095, 0.094, ..., 0.001
// (step 0.001), which puts the top-5 variance share at 90.3% -- the smallest
// k reaching 90%.
inline Eigen::VectorXd highdim_sigma() {
  Eigen::VectorXd s(100);
  s(0) = 17.0; s(1) = 13.5; s(2) = 8.0; s(3) = 3.0; s(4) = 1.0;
  for (int j = 5; j < 100; ++j) s(j) = (95.0 - double(j - 5)) / 1000.0;
  return s;
}

inline ScenarioSpec lowdim_scenario() {
  ScenarioSpec s;
  s.n = 100;
  s.p = 4;
  s.sigma_diag = lowdim_sigma();
  s.k = 3;
  return s;
}

inline ScenarioSpec highdim_scenario() {
  ScenarioSpec s;
  s.n = 50;
  s.p = 100;
  s.sigma_diag = highdim_sigma();
  s.k = 5;
  return s;
}

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Independent per-replication generator derived from (seed, rep_index).
inline std::mt19937_64 rep_engine(std::uint64_t seed, std::uint64_t rep) {
  return std::mt19937_64(mix64(seed ^ mix64(rep + 1)));
}

// Uniform in (0,1) built directly from the top 53 bits; identical across
// platforms, unlike std::uniform_real_distribution.
inline double uniform_open(std::mt19937_64& e) {
  return (double(e() >> 11) + 0.5) * 0x1.0p-53;
}

inline double std_normal(std::mt19937_64& e) {
  return normal_quantile(uniform_open(e));
}

// Uniform index in [0, bound) by rejection; avoids the implementation-defined
// std::uniform_int_distribution.
inline std::uint64_t bounded_index(std::mt19937_64& e, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = e();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace detail

// Draw one replication. The first n - m rows come from the clean component,
// the last m = round(eps * n) from the contaminating one; rows are then
// shuffled within the same stream, so the result is deterministic in
// (seed, rep_index) and independent of everything else.
inline Eigen::MatrixXd generate(const ScenarioSpec& spec, std::uint64_t rep_index) {
  validate_scenario(spec);
  std::mt19937_64 e = detail::rep_engine(spec.seed, rep_index);
  const int n = spec.n, p = spec.p;
  const int m = int(std::floor(spec.epsilon * double(n) + 0.5));
  const int axis = (spec.shift_axis == 0 ? spec.k + 1 : spec.shift_axis) - 1;
  const Eigen::VectorXd scale_clean = spec.sigma_diag.cwiseSqrt();
  const Eigen::VectorXd scale_bad = (spec.sigma_diag / spec.f2).cwiseSqrt();
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i) {
    const bool bad = i >= n - m;
    for (int j = 0; j < p; ++j)
      X(i, j) = detail::std_normal(e) * (bad ? scale_bad(j) : scale_clean(j));
    if (spec.family == Family::StudentT) {
      double chi2 = 0.0;
      for (int d = 0; d < int(spec.nu); ++d) {
        const double z = detail::std_normal(e);
        chi2 += z * z;
      }
      X.row(i) /= std::sqrt(chi2 / spec.nu);
    }
    if (bad) X(i, axis) += spec.f1;
  }
  for (int i = n - 1; i > 0; --i) {
    const int j = int(detail::bounded_index(e, std::uint64_t(i) + 1));
    if (j != i) X.row(i).swap(X.row(j));
  }
  return X;
}

// maxsub = arccos(sqrt(lambda_min(I_pk^T V V^T I_pk))) / (pi/2): normalized
// maximal angle between span(V) and span(e_1..e_k). 0 = identical subspaces,
// 1 = orthogonal.
inline double maxsub(const Eigen::MatrixXd& V, int k) {
  if (V.cols() < 1 || k < 1 || k > V.rows() || V.cols() != k)
    throw std::invalid_argument("maxsub: V must be p x k with 1 <= k <= p");
  const Eigen::MatrixXd B = V.topRows(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B * B.transpose());
  double lmin = es.eigenvalues()(0);
  if (lmin < -1e-9 || lmin > 1.0 + 1e-9)
    throw std::logic_error("maxsub: subspace eigenvalue outside [0,1] beyond tolerance");
  lmin = std::min(1.0, std::max(0.0, lmin));
  return std::acos(std::sqrt(lmin)) / (M_PI / 2.0);
}

// Classical PCA baseline: mean center, eigenvectors of the sample covariance.
// Shares the decomposition paths (and their Auto rule) with the GSPCA fit so
// timing comparisons measure the robustness overhead only.
struct ClassicalPca {
  Eigen::VectorXd center;
  Eigen::MatrixXd loadings;
  Eigen::VectorXd eigenvalues;
};

inline ClassicalPca classical_pca(const Eigen::MatrixXd& X, int k,
                                  FitPath path = FitPath::Auto) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (k < 1 || k > std::min(n, p))
    throw std::invalid_argument("classical_pca: k must be in [1, min(n,p)]");
  ClassicalPca out;
  out.center = X.colwise().mean();
  Eigen::MatrixXd G = X.rowwise() - out.center.transpose();
  FitPath effective = path;
  if (path == FitPath::Auto)
    effective = (p > 64 && k <= int(std::min(n, p) / 2)) ? FitPath::TruncatedSvd
                                                         : FitPath::Spectral;
  detail::Decomposition dec;
  if (effective == FitPath::TruncatedSvd) {
    if (!detail::decompose_truncated(G, k, dec)) dec = detail::decompose_spectral(G);
  } else if (effective == FitPath::Svd) {
    dec = detail::decompose_svd(G);
  } else {
    dec = detail::decompose_spectral(G);
  }
  out.loadings = dec.vectors.leftCols(k);
  detail::fix_signs(out.loadings);
  out.eigenvalues = dec.values.head(k);
  return out;
}

// A method under study: classical PCA or GSPCA with a radial kind.
struct Method {
  bool classical = false;
  RadialKind kind = RadialKind::Identity;
  std::string name;
};

inline Method parse_method(const std::string& s) {
  Method m;
  m.name = s;
  if (s == "cpca") {
    m.classical = true;
    return m;
  }
  m.kind = parse_radial_kind(s);
  return m;
}

inline std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  out.reserve(names.size());
  for (const auto& s : names) out.push_back(parse_method(s));
  return out;
}

namespace detail {

// Worker count: GSPCA_THREADS caps it; defaults to the hardware concurrency.
inline int worker_count(int jobs) {
  int w = int(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  if (const char* env = std::getenv("GSPCA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) w = int(v);
  }
  return std::max(1, std::min(w, jobs));
}

// Run fn(job) for job = 0..jobs-1 on a small thread pool. The first thrown
// exception is rethrown on the calling thread after all workers join.
template <class Fn>
inline void parallel_for(int jobs, Fn&& fn) {
  const int workers = worker_count(jobs);
  if (workers == 1) {
    for (int j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::atomic<int> next(0);
  std::atomic<bool> failed(false);
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&]() {
    for (;;) {
      const int j = next.fetch_add(1);
      if (j >= jobs || failed.load()) return;
      try {
        fn(j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

struct MaxsubResult {
  std::vector<std::string> method_names;
  Eigen::VectorXd mean_maxsub;   // per method
  Eigen::VectorXd std_error;     // sd / sqrt(reps)
  Eigen::VectorXd wall_seconds;  // summed fit time per method
  int reps = 0;
};

// Mean maxsub over replications for each method. Replications run in
// parallel with per-rep generators and per-rep storage; the reduction is a
// fixed-order pass, so the result is bitwise identical for any worker count.
inline MaxsubResult run_experiment(const ScenarioSpec& spec,
                                   const std::vector<Method>& methods) {
  validate_scenario(spec);
  if (methods.empty()) throw std::invalid_argument("run_experiment: no methods");
  const int reps = spec.reps, nm = int(methods.size());
  Eigen::MatrixXd values(reps, nm);
  Eigen::MatrixXd seconds(reps, nm);
  detail::parallel_for(reps, [&](int rep) {
    const Eigen::MatrixXd X = generate(spec, std::uint64_t(rep));
    for (int j = 0; j < nm; ++j) {
      const auto t0 = std::chrono::steady_clock::now();
      Eigen::MatrixXd V;
      if (methods[std::size_t(j)].classical) {
        V = classical_pca(X, spec.k).loadings;
      } else {
        V = fit(X, methods[std::size_t(j)].kind, spec.k).loadings;
      }
      const auto t1 = std::chrono::steady_clock::now();
      values(rep, j) = maxsub(V, spec.k);
      seconds(rep, j) = std::chrono::duration<double>(t1 - t0).count();
    }
  });
  MaxsubResult out;
  out.reps = reps;
  out.method_names.reserve(std::size_t(nm));
  for (const auto& m : methods) out.method_names.push_back(m.name);
  out.mean_maxsub = values.colwise().mean();
  out.std_error.resize(nm);
  for (int j = 0; j < nm; ++j) {
    const double sd = reps > 1
                          ? std::sqrt((values.col(j).array() - out.mean_maxsub(j))
                                          .square()
                                          .sum() /
                                      double(reps - 1))
                          : 0.0;
    out.std_error(j) = sd / std::sqrt(double(reps));
  }
  out.wall_seconds = seconds.colwise().sum();
  return out;
}

struct TimingTable {
  std::vector<int> n_values;
  std::vector<std::string> method_names;
  Eigen::MatrixXd total_seconds;  // n_values.size() x methods
};

// Total fit wall time per method over `runs` replications at each n.
// Generation is excluded; fits run sequentially for clean measurements.
inline TimingTable benchmark_timing(const ScenarioSpec& base,
                                    const std::vector<int>& n_grid,
                                    const std::vector<Method>& methods,
                                    int runs = 100) {
  if (methods.empty()) throw std::invalid_argument("benchmark_timing: no methods");
  TimingTable table;
  table.n_values = n_grid;
  for (const auto& m : methods) table.method_names.push_back(m.name);
  table.total_seconds =
      Eigen::MatrixXd::Zero(Eigen::Index(n_grid.size()), Eigen::Index(methods.size()));
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    ScenarioSpec spec = base;
    spec.n = n_grid[ni];
    spec.reps = runs;
    validate_scenario(spec);
    std::vector<Eigen::MatrixXd> data;
    data.reserve(std::size_t(runs));
    for (int r = 0; r < runs; ++r) data.push_back(generate(spec, std::uint64_t(r)));
    for (std::size_t j = 0; j < methods.size(); ++j) {
      // Untimed warmup against cold caches and lazy allocations.
      for (int w = 0; w < 2; ++w) {
        if (methods[j].classical)
          classical_pca(data[0], spec.k);
        else
          fit(data[0], methods[j].kind, spec.k);
      }
      const auto t0 = std::chrono::steady_clock::now();
      for (int r = 0; r < runs; ++r) {
        if (methods[j].classical)
          classical_pca(data[std::size_t(r)], spec.k);
        else
          fit(data[std::size_t(r)], methods[j].kind, spec.k);
      }
      const auto t1 = std::chrono::steady_clock::now();
      table.total_seconds(Eigen::Index(ni), Eigen::Index(j)) =
          std::chrono::duration<double>(t1 - t0).count();
    }
  }
  return table;
}

struct BreakdownCurve {
  std::vector<double> magnitudes;
  std::vector<double> lambda_max;    // largest GSSCM eigenvalue per magnitude
  std::vector<double> center_shift;  // ||T(X*) - T(X)|| per magnitude
};

// Explosion breakdown experiment: replace the last m rows by points
// lambda * (2 + j) * R0 * u_j with fixed random unit directions u_j and
// R0 = 1 + max ||x_i||. The staggered radii keep the replacement points at
// least lambda apart from each other and from the clean data for every
// magnitude lambda > 1, as the breakdown construction requires.
inline BreakdownCurve empirical_breakdown(const Eigen::MatrixXd& X, RadialKind kind,
                                          int m, const std::vector<double>& magnitudes,
                                          std::uint64_t seed = 20240915ull) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (m < 0 || m > n)
    throw std::invalid_argument("empirical_breakdown: m must be in [0, n]");
  std::mt19937_64 e = detail::rep_engine(seed, 0);
  Eigen::MatrixXd U(m, p);
  for (int j = 0; j < m; ++j) {
    for (Eigen::Index c = 0; c < p; ++c) U(j, c) = detail::std_normal(e);
    U.row(j) /= U.row(j).norm();
  }
  const double r0 = 1.0 + X.rowwise().norm().maxCoeff();
  const Eigen::VectorXd clean_center = kstep_lts(X).center;
  BreakdownCurve curve;
  curve.magnitudes = magnitudes;
  for (double lambda : magnitudes) {
    Eigen::MatrixXd Y = X;
    for (int j = 0; j < m; ++j)
      Y.row(n - m + j) = lambda * (2.0 + double(j)) * r0 * U.row(j);
    const ScatterMatrix S = sample_gsscm(Y, kind);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.values);
    curve.lambda_max.push_back(es.eigenvalues().maxCoeff());
    curve.center_shift.push_back((kstep_lts(Y).center - clean_center).norm());
  }
  return curve;
}

}  // namespace gspca
