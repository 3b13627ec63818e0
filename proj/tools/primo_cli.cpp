// primo: differentially private multi-outcome regression from the command line.
//
//   primo simulate        synthetic error-vs-l sweeps, CSV out
//   primo sweep-subsample covariance subsampling sweeps, CSV out
//   primo fit             fit W on user supplied genotype/phenotype files
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "primo/csv.hpp"
#include "primo/errors.hpp"
#include "primo/harness.hpp"
#include "primo/solvers.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kDataError = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepArgs {
  primo::Index n = 2000;
  std::vector<primo::Index> d{200};
  std::vector<primo::Index> l{16};
  std::vector<primo::Index> s;
  std::vector<double> eps{5.0};
  std::string delta = "auto";
  double lambda = 0.23;
  std::vector<std::string> mech{"gauss"};
  primo::Index trials = 10;
  std::uint64_t seed = 7;
  std::string out = "results.csv";
  unsigned threads = 0;
  std::string geno;
  char delimiter = ',';
  double noise_std = 1.0;
  bool timings = false;
};

void add_sweep_options(CLI::App* cmd, SweepArgs& a, bool subsample) {
  cmd->add_option("--n", a.n, "number of individuals")->capture_default_str();
  cmd->add_option("--d", a.d, "number of SNPs (comma separated list)")->delimiter(',')->capture_default_str();
  cmd->add_option("--l", a.l, "number of outcomes (comma separated list)")->delimiter(',')->capture_default_str();
  auto* s = cmd->add_option("--s", a.s, "covariance subsample sizes (default: n)")->delimiter(',');
  if (subsample) s->required();
  cmd->add_option("--eps", a.eps, "privacy epsilon (comma separated list)")->delimiter(',')->capture_default_str();
  cmd->add_option("--delta", a.delta, "privacy delta, or 'auto' for 1/n^2")->capture_default_str();
  cmd->add_option("--lambda", a.lambda, "ridge parameter")->capture_default_str();
  cmd->add_option("--mech", a.mech, "gauss, proj, naive or none (comma separated list)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--trials", a.trials, "trials per grid cell")->capture_default_str();
  cmd->add_option("--seed", a.seed, "base seed")->capture_default_str();
  cmd->add_option("--out", a.out, "output CSV path")->capture_default_str();
  cmd->add_option("--threads", a.threads, "worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--geno", a.geno, "genotype matrix (rows individuals, columns SNPs); synthetic if omitted");
  cmd->add_option("--delimiter", a.delimiter, "genotype file delimiter")->capture_default_str();
  cmd->add_option("--noise-std", a.noise_std, "phenotype noise std")->capture_default_str();
  cmd->add_flag("--timings", a.timings, "record wall-clock runtime_ms (output no longer reproducible)");
}

double resolve_delta(const std::string& text, primo::Index n) {
  if (text == "auto") return 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  double v = 0.0;
  if (!primo::parse_double(text, v)) throw ConfigError("--delta must be a number or 'auto'");
  return v;
}

std::vector<primo::Method> resolve_methods(const std::vector<std::string>& names) {
  std::vector<primo::Method> out;
  for (const auto& name : names) {
    try {
      out.push_back(primo::parse_method(name));
    } catch (const primo::DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

int run_sweep_command(const SweepArgs& a) {
  if (a.n < 1 || a.trials < 0) throw ConfigError("--n must be >= 1 and --trials >= 0");
  const double delta = resolve_delta(a.delta, a.n);
  try {
    for (double e : a.eps) primo::PrivacyBudget(e, delta);
  } catch (const primo::DomainError& e) {
    throw ConfigError(e.what());
  }
  if (a.lambda < 0.0) throw ConfigError("--lambda must be nonnegative");
  for (primo::Index s : a.s) {
    if (s < 1 || s > a.n) throw ConfigError("--s values must lie in [1, n]");
  }
  for (primo::Index v : a.d) {
    if (v < 1) throw ConfigError("--d values must be positive");
  }
  for (primo::Index v : a.l) {
    if (v < 1) throw ConfigError("--l values must be positive");
  }
  const auto methods = resolve_methods(a.mech);

  primo::SweepOptions options;
  options.trials = a.trials;
  options.base_seed = a.seed;
  options.threads = a.threads;
  options.record_runtime = a.timings;
  options.noise_std = a.noise_std;
  if (!a.geno.empty()) {
    try {
      options.genotypes = std::make_shared<const primo::Matrix>(primo::load_genotype_matrix(a.geno, a.delimiter));
    } catch (const std::exception& e) {
      throw DataError(e.what());
    }
    if (options.genotypes->rows() != a.n) {
      throw DataError("genotype file has " + std::to_string(options.genotypes->rows()) +
                      " rows but --n is " + std::to_string(a.n));
    }
    for (primo::Index v : a.d) {
      if (v > options.genotypes->cols()) throw ConfigError("--d exceeds the number of SNPs in --geno");
    }
  }

  const auto grid = primo::make_grid(a.n, a.d, a.l, a.s, a.eps, delta, a.lambda, methods);
  const auto rows = primo::run_sweep(grid, options);
  try {
    primo::emit_csv(rows, a.out);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status != "ok";
  std::cerr << "wrote " << rows.size() << " rows to " << a.out;
  if (failed) std::cerr << " (" << failed << " failed, see status column)";
  std::cerr << '\n';
  return 0;
}

struct FitArgs {
  std::string x_path;
  std::string y_path;
  double eps = 1.0;
  std::string delta = "auto";
  double lambda = 0.23;
  std::string mech = "gauss";
  double x_bound = -1.0;
  double y_bound = -1.0;
  std::string out = "w.csv";
  std::uint64_t seed = 7;
  std::optional<primo::Index> s;
  char delimiter = ',';
};

int run_fit(const FitArgs& a) {
  const primo::Method method = resolve_methods({a.mech}).front();
  if (a.x_bound < 0.0 || a.y_bound < 0.0) throw ConfigError("--x-bound and --y-bound are required and must be >= 0");
  if (a.lambda < 0.0) throw ConfigError("--lambda must be nonnegative");

  primo::Matrix xm;
  primo::Matrix ym;
  try {
    xm = primo::load_genotype_matrix(a.x_path, a.delimiter);
    ym = primo::read_numeric_matrix(a.y_path, a.delimiter);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  const primo::Index n = xm.rows();
  const double delta = resolve_delta(a.delta, n);
  std::optional<primo::PrivacyBudget> budget;
  try {
    budget.emplace(a.eps, delta);
  } catch (const primo::DomainError& e) {
    throw ConfigError(e.what());
  }
  if (a.s && (*a.s < 1 || *a.s > n)) throw ConfigError("--s must lie in [1, n]");
  if (ym.rows() != n) {
    throw DataError("X has " + std::to_string(n) + " rows but Y has " + std::to_string(ym.rows()));
  }

  try {
    const primo::DesignMatrix x(std::move(xm), a.x_bound);
    const primo::OutcomeMatrix y(std::move(ym), a.y_bound);
    if (x.clipped_rows() > 0) {
      std::cerr << "clipped " << x.clipped_rows() << " rows of X to norm " << a.x_bound << '\n';
    }
    primo::PrimoSolution sol;
    if (method == primo::Method::naive) {
      sol = primo::naive_ssp_baseline(x, y, a.lambda, *budget, a.seed);
    } else {
      primo::SolverConfig cfg;
      cfg.lambda = a.lambda;
      cfg.budget = *budget;
      cfg.seed = a.seed;
      cfg.mechanism = method == primo::Method::none    ? primo::Mechanism::none
                      : method == primo::Method::proj ? primo::Mechanism::projection
                                                      : primo::Mechanism::gauss;
      cfg.subsample_s = a.s;
      sol = a.s ? primo::subsample_reuse_cov(x, y, cfg) : primo::reuse_cov(x, y, cfg);
    }
    primo::write_numeric_matrix(sol.w_hat, a.out);
    std::cerr << "wrote " << sol.w_hat.rows() << "x" << sol.w_hat.cols() << " coefficients to " << a.out
              << " (sigma_cov " << sol.sigma_cov << ", association noise " << sol.sigma_assoc_or_r << ")\n";
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private regression in multiple outcomes"};
  app.require_subcommand(1);

  SweepArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run a synthetic error-vs-l sweep");
  add_sweep_options(simulate, sim, false);
  sim.mech = {"gauss", "proj", "naive"};

  SweepArgs sub;
  auto* subsample = app.add_subcommand("sweep-subsample", "sweep the covariance subsample size");
  add_sweep_options(subsample, sub, true);
  sub.d = {50};

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit private coefficients on genotype/phenotype files");
  fit_cmd->add_option("--x", fit.x_path, "design matrix file (rows individuals)")->required();
  fit_cmd->add_option("--y", fit.y_path, "outcome matrix file (rows individuals)")->required();
  fit_cmd->add_option("--eps", fit.eps, "privacy epsilon")->capture_default_str();
  fit_cmd->add_option("--delta", fit.delta, "privacy delta, or 'auto' for 1/n^2")->capture_default_str();
  fit_cmd->add_option("--lambda", fit.lambda, "ridge parameter")->capture_default_str();
  fit_cmd->add_option("--mech", fit.mech, "gauss, proj, naive or none")->capture_default_str();
  fit_cmd->add_option("--x-bound", fit.x_bound, "row norm bound for X (rows are clipped)")->required();
  fit_cmd->add_option("--y-bound", fit.y_bound, "entry bound for Y")->required();
  fit_cmd->add_option("--out", fit.out, "output CSV for the d x l coefficients")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "noise seed")->capture_default_str();
  fit_cmd->add_option("--s", fit.s, "covariance subsample size");
  fit_cmd->add_option("--delimiter", fit.delimiter, "input delimiter")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*simulate) return run_sweep_command(sim);
    if (*subsample) return run_sweep_command(sub);
    if (*fit_cmd) return run_fit(fit);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const primo::DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
