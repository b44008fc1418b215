// gspca: command-line front end for robust PCA via generalized spatial sign
// covariance matrices. Subcommands: fit, diagnose, simulate, influence,
// efficiency, ges, breakdown, bench. Exit codes: 0 success, 1 usage error,
// 2 data/runtime error. The GSPCA_THREADS environment variable caps the
// worker count used by simulation experiments.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gspca/analysis.hpp"
#include "gspca/dataio.hpp"
#include "gspca/gspca.hpp"
#include "gspca/serialize.hpp"
#include "gspca/simulate.hpp"

namespace {

// Flag combinations that CLI11 cannot express are checked in the handlers;
// violations are usage errors (exit 1), not data errors (exit 2).
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::string num(double v) {
  std::string out;
  gspca::detail::format17(v, out);
  return out;
}

Eigen::MatrixXd load_matrix(const std::string& path, bool header,
                            const std::string& standardize) {
  gspca::DataMatrix data = gspca::load_csv(path, header);
  if (standardize == "classical")
    data = gspca::standardize(data, gspca::ScalingMode::Classical);
  else if (standardize == "robust")
    data = gspca::standardize(data, gspca::ScalingMode::Robust);
  else if (standardize != "none")
    throw usage_error("--standardize must be none, classical or robust");
  return data.values;
}

gspca::RankSpec rank_from_flags(int k, double variance_target) {
  if ((k > 0) == (variance_target > 0.0))
    throw usage_error("exactly one of --k and --variance-target is required");
  return k > 0 ? gspca::RankSpec::rank(k)
               : gspca::RankSpec::variance(variance_target);
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> out;
  if (steps < 1) throw usage_error("--gamma-steps must be positive");
  if (steps == 1) return {lo};
  for (int i = 0; i < steps; ++i)
    out.push_back(lo + (hi - lo) * double(i) / double(steps - 1));
  return out;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string input, out, path = "auto", standardize = "none";
  std::string kind;
  int k = 0;
  double variance_target = 0.0;
  int location_steps = 2;
  bool header = false;
};

void run_fit(const FitArgs& a) {
  const Eigen::MatrixXd X = load_matrix(a.input, a.header, a.standardize);
  const gspca::PcaModel model =
      gspca::fit(X, gspca::parse_radial_kind(a.kind), rank_from_flags(a.k, a.variance_target),
                 gspca::parse_fit_path(a.path), a.location_steps);
  std::printf("kind=%s k=%d n=%d p=%d\n", gspca::radial_kind_name(model.kind),
              model.k, int(X.rows()), int(X.cols()));
  for (int j = 0; j < model.k; ++j)
    std::printf("component %d: eigenvalue_raw=%.10g eigenvalue_corrected=%.10g\n",
                j + 1, model.eigenvalues_raw(j), model.eigenvalues_corrected(j));
  if (!a.out.empty()) {
    gspca::save_model(model, a.out);
    std::printf("model written to %s\n", a.out.c_str());
  }
}

// ------------------------------------------------------------ diagnose

struct DiagnoseArgs {
  std::string input, model, out, residuals;
  std::string kind, path = "auto", standardize = "none", scaling = "robust";
  int k = 0;
  double variance_target = 0.0;
  int location_steps = 2;
  bool header = false;
};

void run_diagnose(const DiagnoseArgs& a) {
  const Eigen::MatrixXd X = load_matrix(a.input, a.header, a.standardize);
  gspca::PcaModel model;
  if (!a.model.empty()) {
    if (!a.kind.empty() || a.k > 0 || a.variance_target > 0.0)
      throw usage_error("--model excludes --kind/--k/--variance-target");
    model = gspca::load_model(a.model);
  } else {
    if (a.kind.empty()) throw usage_error("either --model or --kind is required");
    model = gspca::fit(X, gspca::parse_radial_kind(a.kind),
                       rank_from_flags(a.k, a.variance_target),
                       gspca::parse_fit_path(a.path), a.location_steps);
  }
  const gspca::DiagnosticReport rep = gspca::diagnose(model, X);
  int counts[4] = {0, 0, 0, 0};
  for (const auto c : rep.classes) ++counts[int(c)];
  std::printf("sd_cutoff=%.10g od_cutoff=%.10g\n", rep.sd_cutoff, rep.od_cutoff);
  std::printf("regular=%d good_leverage=%d orthogonal_outlier=%d bad_leverage=%d\n",
              counts[0], counts[1], counts[2], counts[3]);
  if (!a.out.empty()) {
    std::ofstream out = open_output(a.out);
    out << "index,score_distance,orthogonal_distance,outlier_class\n";
    for (Eigen::Index i = 0; i < rep.score_distance.size(); ++i)
      out << i << ',' << num(rep.score_distance(i)) << ','
          << num(rep.orthogonal_distance(i)) << ','
          << gspca::outlier_class_name(rep.classes[std::size_t(i)]) << '\n';
    std::printf("diagnostics written to %s\n", a.out.c_str());
  }
  if (!a.residuals.empty()) {
    const auto mode = a.scaling == "classical" ? gspca::ScalingMode::Classical
                      : a.scaling == "robust"
                          ? gspca::ScalingMode::Robust
                          : throw usage_error("--scaling must be classical or robust");
    const gspca::ResidualReport rr = gspca::residuals(model, X, mode);
    gspca::DataMatrix out_data;
    out_data.values = rr.standardized;
    gspca::save_csv(out_data, a.residuals);
    int flagged = 0;
    for (const auto f : rr.zero_scale) flagged += f;
    std::printf("residuals written to %s (zero-scale rows: %d)\n",
                a.residuals.c_str(), flagged);
  }
}

// ------------------------------------------------------------ simulate

struct SimulateArgs {
  std::string config, out;
  std::uint64_t seed = 0;  // 0: keep the config seed
};

void run_simulate(const SimulateArgs& a) {
  gspca::ScenarioConfig cfg = gspca::parse_scenario_config(a.config);
  if (a.seed != 0) cfg.base.seed = a.seed;
  const std::vector<gspca::Method> methods = gspca::parse_methods(cfg.methods);
  std::ofstream out;
  if (!a.out.empty()) {
    out = open_output(a.out);
    out << "family,nu,n,p,k,epsilon,f1,f2,method,mean_maxsub,std_error,"
           "wall_seconds,reps\n";
  }
  const char* family =
      cfg.base.family == gspca::Family::Gaussian ? "gaussian" : "student_t";
  for (const double eps : cfg.epsilon_list) {
    // With no contamination the shift is inert; run that cell once.
    const std::vector<double> f1s =
        eps == 0.0 ? std::vector<double>{cfg.f1_list.front()} : cfg.f1_list;
    for (const double f1 : f1s) {
      gspca::ScenarioSpec spec = cfg.base;
      spec.epsilon = eps;
      spec.f1 = f1;
      const gspca::MaxsubResult res = gspca::run_experiment(spec, methods);
      for (std::size_t j = 0; j < methods.size(); ++j) {
        std::printf("epsilon=%g f1=%g %-8s mean_maxsub=%.4f se=%.4f\n", eps, f1,
                    res.method_names[j].c_str(), res.mean_maxsub(Eigen::Index(j)),
                    res.std_error(Eigen::Index(j)));
        if (out)
          out << family << ',' << (spec.family == gspca::Family::StudentT ? num(spec.nu) : "")
              << ',' << spec.n << ',' << spec.p << ',' << spec.k << ','
              << num(eps) << ',' << num(f1) << ',' << num(spec.f2) << ','
              << res.method_names[j] << ',' << num(res.mean_maxsub(Eigen::Index(j)))
              << ',' << num(res.std_error(Eigen::Index(j))) << ','
              << num(res.wall_seconds(Eigen::Index(j))) << ',' << res.reps << '\n';
      }
    }
  }
  if (!a.out.empty()) std::printf("results written to %s\n", a.out.c_str());
}

// ------------------------------------------------------------ influence

struct InfluenceArgs {
  std::string kind, out;
  double gamma = 0.5;
  int component = 1;
  double x1 = 1.0, x2 = 1.0;
  double range = 4.0;
  int grid = 81;
};

void run_influence(const InfluenceArgs& a) {
  const gspca::AnalysisModel model =
      gspca::make_analysis_model(a.gamma, gspca::parse_radial_kind(a.kind));
  if (!a.out.empty()) {
    std::ofstream out = open_output(a.out);
    out << "x1,x2,if_loading_1,if_loading_2,if_eigenvalue\n";
    for (int i = 0; i < a.grid; ++i)
      for (int j = 0; j < a.grid; ++j) {
        const double x1 = -a.range + 2.0 * a.range * double(i) / double(a.grid - 1);
        const double x2 = -a.range + 2.0 * a.range * double(j) / double(a.grid - 1);
        const Eigen::Vector2d x(x1, x2);
        const Eigen::Vector2d iv = gspca::if_loading(model, x, a.component);
        out << num(x1) << ',' << num(x2) << ',' << num(iv(0)) << ',' << num(iv(1))
            << ',' << num(gspca::if_corrected_eigenvalue(model, x, a.component))
            << '\n';
      }
    std::printf("influence grid written to %s\n", a.out.c_str());
    return;
  }
  const Eigen::Vector2d x(a.x1, a.x2);
  const Eigen::Vector2d iv = gspca::if_loading(model, x, a.component);
  const Eigen::Matrix2d ic = gspca::if_combined_covariance(model, x);
  std::printf("if_loading(v_%d) = (%.10g, %.10g)\n", a.component, iv(0), iv(1));
  std::printf("if_corrected_eigenvalue(lambda_%d) = %.10g\n", a.component,
              gspca::if_corrected_eigenvalue(model, x, a.component));
  std::printf("if_combined_covariance = [%.10g %.10g; %.10g %.10g]\n", ic(0, 0),
              ic(0, 1), ic(1, 0), ic(1, 1));
}

// ----------------------------------------------------------- efficiency

struct EfficiencyArgs {
  std::string kinds = "winsor,sscm,quad,ball,shell,lr";
  std::string out;
  double gamma_min = 0.05, gamma_max = 0.95;
  int gamma_steps = 19;
};

void run_efficiency(const EfficiencyArgs& a) {
  const std::vector<std::string> kind_names = gspca::detail::split_list(a.kinds);
  if (kind_names.empty()) throw usage_error("--kinds must name at least one kind");
  std::ofstream out;
  if (!a.out.empty()) {
    out = open_output(a.out);
    out << "gamma,kind,asv,asv_classical,efficiency\n";
  }
  for (const double gamma : linspace(a.gamma_min, a.gamma_max, a.gamma_steps)) {
    for (const auto& name : kind_names) {
      const gspca::AnalysisModel model =
          gspca::make_analysis_model(gamma, gspca::parse_radial_kind(name));
      const double asv = gspca::asv_offdiag(model);
      const double eff = gspca::efficiency(model);
      std::printf("gamma=%.4f %-8s asv=%.6f efficiency=%.6f\n", gamma,
                  name.c_str(), asv, eff);
      if (out)
        out << num(gamma) << ',' << name << ',' << num(asv) << ','
            << num(gspca::asv_classical(gamma)) << ',' << num(eff) << '\n';
    }
  }
  if (!a.out.empty()) std::printf("curve written to %s\n", a.out.c_str());
}

// ------------------------------------------------------------------ ges

struct GesArgs {
  std::string kind;
  double gamma = 0.5;
  int component = 1;
  int radii = 2000, angles = 720;
  double rmax = 0.0;
};

void run_ges(const GesArgs& a) {
  const gspca::AnalysisModel model =
      gspca::make_analysis_model(a.gamma, gspca::parse_radial_kind(a.kind));
  gspca::GesGrid grid;
  grid.n_radii = a.radii;
  grid.n_angles = a.angles;
  grid.rmax = a.rmax;
  const double value = gspca::ges(model, a.component, grid);
  if (std::isinf(value))
    std::printf("unbounded\n");
  else
    std::printf("%.7g\n", value);
}

// ------------------------------------------------------------ breakdown

struct BreakdownArgs {
  std::string input, kind, out;
  std::string magnitudes = "1e2,1e3,1e4,1e5,1e6,1e7,1e8";
  int m = -1;
  bool header = false;
  std::uint64_t seed = 1;
};

void run_breakdown(const BreakdownArgs& a) {
  Eigen::MatrixXd X;
  if (!a.input.empty()) {
    X = gspca::load_csv(a.input, a.header).values;
  } else {
    gspca::ScenarioSpec spec = gspca::lowdim_scenario();
    spec.seed = a.seed;
    X = gspca::generate(spec, 0);
  }
  const int n = int(X.rows());
  const int m = a.m >= 0 ? a.m : (n + 2) / 2;  // default ceil((n+1)/2): past breakdown
  std::vector<double> mags;
  for (const auto& s : gspca::detail::split_list(a.magnitudes))
    mags.push_back(gspca::detail::config_number("magnitudes", s));
  if (mags.empty()) throw usage_error("--magnitudes must list at least one value");
  const gspca::BreakdownCurve curve = gspca::empirical_breakdown(
      X, gspca::parse_radial_kind(a.kind), m, mags, a.seed);
  const double c1 =
      (X.rowwise() - gspca::kstep_lts(X).center.transpose()).rowwise().norm().maxCoeff();
  std::printf("n=%d m=%d kind=%s c1=%.6g\n", n, m, a.kind.c_str(), c1);
  for (std::size_t i = 0; i < mags.size(); ++i) {
    const double bound = std::pow(2.4826 * (c1 + curve.center_shift[i]), 2);
    std::printf("magnitude=%.3g lambda_max=%.6g part1_bound=%.6g center_shift=%.6g\n",
                mags[i], curve.lambda_max[i], bound, curve.center_shift[i]);
  }
  if (!a.out.empty()) {
    std::ofstream out = open_output(a.out);
    out << "magnitude,lambda_max,center_shift\n";
    for (std::size_t i = 0; i < mags.size(); ++i)
      out << num(curve.magnitudes[i]) << ',' << num(curve.lambda_max[i]) << ','
          << num(curve.center_shift[i]) << '\n';
    std::printf("curve written to %s\n", a.out.c_str());
  }
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string shape = "lowdim";
  std::string methods = "cpca,ball,lr";
  std::string n_grid = "50,100,150,200,250,300,350,400,450,500";
  std::string out;
  int runs = 100;
  std::uint64_t seed = 1;
};

void run_bench(const BenchArgs& a) {
  gspca::ScenarioSpec base;
  if (a.shape == "lowdim") base = gspca::lowdim_scenario();
  else if (a.shape == "highdim") base = gspca::highdim_scenario();
  else throw usage_error("--shape must be lowdim or highdim");
  base.seed = a.seed;
  std::vector<int> grid;
  for (const auto& s : gspca::detail::split_list(a.n_grid))
    grid.push_back(int(gspca::detail::config_number("n-grid", s)));
  const std::vector<gspca::Method> methods =
      gspca::parse_methods(gspca::detail::split_list(a.methods));
  const gspca::TimingTable table = gspca::benchmark_timing(base, grid, methods, a.runs);
  for (std::size_t ni = 0; ni < grid.size(); ++ni) {
    std::printf("n=%-4d", grid[ni]);
    for (std::size_t j = 0; j < methods.size(); ++j)
      std::printf("  %s=%.6fs", table.method_names[j].c_str(),
                  table.total_seconds(Eigen::Index(ni), Eigen::Index(j)));
    std::printf("\n");
  }
  // Log-log slope of total time in n per method (least squares).
  for (std::size_t j = 0; j < methods.size(); ++j) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = double(grid.size());
    for (std::size_t ni = 0; ni < grid.size(); ++ni) {
      const double x = std::log(double(grid[ni]));
      const double y = std::log(table.total_seconds(Eigen::Index(ni), Eigen::Index(j)));
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    std::printf("slope %-8s %.3f\n", table.method_names[j].c_str(), slope);
  }
  if (!a.out.empty()) {
    std::ofstream out = open_output(a.out);
    out << "n,method,total_seconds\n";
    for (std::size_t ni = 0; ni < grid.size(); ++ni)
      for (std::size_t j = 0; j < methods.size(); ++j)
        out << grid[ni] << ',' << table.method_names[j] << ','
            << num(table.total_seconds(Eigen::Index(ni), Eigen::Index(j))) << '\n';
    std::printf("timings written to %s\n", a.out.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gspca: robust PCA via generalized spatial sign covariance matrices.\n"
      "GSPCA_THREADS caps the worker count of simulation experiments."};
  app.require_subcommand(1);
  std::uint64_t seed = 1;

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit a GSPCA model to a CSV dataset");
  fit->add_option("--input", fit_args.input, "input CSV path")->required();
  fit->add_option("--kind", fit_args.kind,
                  "radial kind: identity|sscm|winsor|quad|ball|shell|lr")->required();
  fit->add_option("--k", fit_args.k, "number of retained components");
  fit->add_option("--variance-target", fit_args.variance_target,
                  "retain smallest k whose raw-eigenvalue share reaches this");
  fit->add_option("--path", fit_args.path,
                  "decomposition path: auto|spectral|svd|truncated_svd");
  fit->add_option("--location-steps", fit_args.location_steps,
                  "k-step LTS refinement steps");
  fit->add_flag("--header", fit_args.header, "input CSV has a header row");
  fit->add_option("--standardize", fit_args.standardize,
                  "column scaling before the fit: none|classical|robust");
  fit->add_option("--out", fit_args.out, "write the model JSON here");
  fit->add_option("--seed", seed, "accepted on every subcommand; fit is deterministic");

  DiagnoseArgs diag_args;
  auto* diag = app.add_subcommand("diagnose",
                                  "score/orthogonal distances and outlier classes");
  diag->add_option("--input", diag_args.input, "input CSV path")->required();
  diag->add_option("--model", diag_args.model, "model JSON from fit");
  diag->add_option("--kind", diag_args.kind, "fit a model in place: radial kind");
  diag->add_option("--k", diag_args.k, "in-place fit: retained components");
  diag->add_option("--variance-target", diag_args.variance_target,
                   "in-place fit: variance-share target");
  diag->add_option("--path", diag_args.path, "in-place fit: decomposition path");
  diag->add_option("--location-steps", diag_args.location_steps,
                   "in-place fit: k-step LTS steps");
  diag->add_flag("--header", diag_args.header, "input CSV has a header row");
  diag->add_option("--standardize", diag_args.standardize,
                   "column scaling before the fit: none|classical|robust");
  diag->add_option("--out", diag_args.out, "write per-row diagnostics CSV here");
  diag->add_option("--residuals", diag_args.residuals,
                   "write standardized residuals CSV here");
  diag->add_option("--scaling", diag_args.scaling,
                   "residual row scaling: classical|robust");
  diag->add_option("--seed", seed, "accepted on every subcommand; diagnose is deterministic");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo scenario grid");
  sim->add_option("--config", sim_args.config, "scenario config path")->required();
  sim->add_option("--out", sim_args.out, "write per-cell results CSV here");
  sim->add_option("--seed", sim_args.seed, "override the config seed (0 keeps it)");

  InfluenceArgs inf_args;
  auto* inf = app.add_subcommand(
      "influence", "influence functions at N(0, diag(1, gamma))");
  inf->add_option("--gamma", inf_args.gamma, "scatter ratio in (0,1)")->required();
  inf->add_option("--kind", inf_args.kind, "radial kind")->required();
  inf->add_option("--component", inf_args.component, "loading index: 1 or 2");
  inf->add_option("--x1", inf_args.x1, "evaluation point, first coordinate");
  inf->add_option("--x2", inf_args.x2, "evaluation point, second coordinate");
  inf->add_option("--out", inf_args.out, "write a grid CSV instead of one point");
  inf->add_option("--range", inf_args.range, "grid half-width");
  inf->add_option("--grid", inf_args.grid, "grid points per axis");
  inf->add_option("--seed", seed, "accepted on every subcommand; influence is deterministic");

  EfficiencyArgs eff_args;
  auto* eff = app.add_subcommand("efficiency",
                                 "asymptotic relative efficiencies vs classical PCA");
  eff->add_option("--kinds", eff_args.kinds, "comma list of radial kinds");
  eff->add_option("--gamma-min", eff_args.gamma_min, "gamma grid start");
  eff->add_option("--gamma-max", eff_args.gamma_max, "gamma grid end");
  eff->add_option("--gamma-steps", eff_args.gamma_steps, "gamma grid size");
  eff->add_option("--out", eff_args.out, "write the curve CSV here");
  eff->add_option("--seed", seed, "accepted on every subcommand; efficiency is deterministic");

  GesArgs ges_args;
  auto* ges = app.add_subcommand("ges", "gross-error sensitivity of a loading");
  ges->add_option("--gamma", ges_args.gamma, "scatter ratio in (0,1)")->required();
  ges->add_option("--kind", ges_args.kind, "radial kind")->required();
  ges->add_option("--component", ges_args.component, "loading index: 1 or 2");
  ges->add_option("--radii", ges_args.radii, "polar grid: radius count");
  ges->add_option("--angles", ges_args.angles, "polar grid: angle count");
  ges->add_option("--rmax", ges_args.rmax, "radius cap (0: 20*sqrt(lambda_g1))");
  ges->add_option("--seed", seed, "accepted on every subcommand; ges is deterministic");

  BreakdownArgs brk_args;
  auto* brk = app.add_subcommand("breakdown", "empirical explosion-breakdown curve");
  brk->add_option("--kind", brk_args.kind, "radial kind")->required();
  brk->add_option("--m", brk_args.m,
                  "rows to replace (default: ceil((n+1)/2), past breakdown)");
  brk->add_option("--magnitudes", brk_args.magnitudes, "comma list of magnitudes");
  brk->add_option("--input", brk_args.input,
                  "clean data CSV (default: generated low-dim Gaussian)");
  brk->add_flag("--header", brk_args.header, "input CSV has a header row");
  brk->add_option("--out", brk_args.out, "write the curve CSV here");
  brk->add_option("--seed", brk_args.seed,
                  "seed for generated data and outlier directions");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "fit timing benchmark over an n grid");
  bench->add_option("--shape", bench_args.shape, "scenario shape: lowdim|highdim");
  bench->add_option("--methods", bench_args.methods, "comma list: cpca or radial kinds");
  bench->add_option("--n-grid", bench_args.n_grid, "comma list of sample sizes");
  bench->add_option("--runs", bench_args.runs, "replications per grid point");
  bench->add_option("--out", bench_args.out, "write the timing CSV here");
  bench->add_option("--seed", bench_args.seed, "seed for the generated datasets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (fit->parsed()) run_fit(fit_args);
    else if (diag->parsed()) run_diagnose(diag_args);
    else if (sim->parsed()) run_simulate(sim_args);
    else if (inf->parsed()) run_influence(inf_args);
    else if (eff->parsed()) run_efficiency(eff_args);
    else if (ges->parsed()) run_ges(ges_args);
    else if (brk->parsed()) run_breakdown(brk_args);
    else if (bench->parsed()) run_bench(bench_args);
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
