#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "primo/data.hpp"
#include "primo/linalg.hpp"
#include "primo/rng.hpp"

namespace primo {

/// Genotype/haplotype text matrix: rows are individuals, columns SNPs.
Matrix load_genotype_matrix(const std::filesystem::path& path, char delimiter = ',');

/// d distinct column indices out of `total`, uniformly without replacement,
/// returned in increasing order.
std::vector<Index> select_snps(Index total, Index d, Rng& rng);

/// Pick d SNP columns, subtract each column's mean and set x_bound to the
/// largest centered row norm. The data-dependent bound is only appropriate for
/// public or synthetic data; the solvers themselves take the bound as input.
DesignMatrix center_and_subsample_snps(const Matrix& x, Index d, Rng& rng);

/// 0/1 haplotype matrix with a per-SNP allele frequency drawn from U(0.05, 0.5).
Matrix synthetic_haplotypes(Index n, Index snps, std::uint64_t seed);

struct SyntheticSpec {
  Index n = 0;
  Index d = 0;
  Index l = 0;
  double noise_std = 1.0;
  /// Per-coordinate std of theta; defaults to d^{-1/4} (covariance I_d / sqrt(d)).
  std::optional<double> theta_scale;
  std::uint64_t seed = 0;

  double theta_std() const;
};

/// y_j = X theta_j + N(0, noise_std^2)^n with theta_j ~ N(0, theta_std^2 I_d).
/// Column j draws theta_j and then its noise from stream (seed, phenotype, j).
/// y_bound is the empirical max |y_ij|.
OutcomeMatrix generate_phenotypes(const DesignMatrix& x, const SyntheticSpec& spec);

/// Estimators a sweep can run.
enum class Method { none, gauss, proj, naive };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct ExperimentCell {
  Index n = 0;
  Index d = 0;
  Index l = 0;
  Index s = 0;  // covariance subsample size; s == n means no subsampling
  double epsilon = 1.0;
  double delta = 1e-6;
  double lambda = 0.23;
  Method method = Method::gauss;
};

struct ExperimentRow {
  Index l = 0;
  Index d = 0;
  Index n = 0;
  Index s = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  std::string mechanism;
  Index trial = 0;
  double excess_loss = 0.0;
  double loss_ratio = 0.0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  std::string status;

  bool operator==(const ExperimentRow&) const = default;
};

struct SweepOptions {
  Index trials = 1;
  std::uint64_t base_seed = 0;
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Wall times make the output machine dependent, so they are opt-in;
  /// runtime_ms is 0 otherwise.
  bool record_runtime = false;
  double noise_std = 1.0;
  /// Optional real genotype pool; SNPs are subsampled from it per trial.
  std::shared_ptr<const Matrix> genotypes;
};

/// Cartesian product grid in a fixed nesting order (d, l, s, eps, method).
std::vector<ExperimentCell> make_grid(Index n, const std::vector<Index>& ds,
                                      const std::vector<Index>& ls, const std::vector<Index>& ss,
                                      const std::vector<double>& epsilons, double delta,
                                      double lambda, const std::vector<Method>& methods);

/// Runs every cell for every trial. Data for a trial depends only on
/// (base_seed, trial, n, d, l), so all cells of a trial see the same X and
/// nested Y; solver noise is keyed by the same per-trial seed. Rows come back
/// sorted by (cell index, trial). Solver failures are recorded in the status
/// column and the sweep continues.
std::vector<ExperimentRow> run_sweep(const std::vector<ExperimentCell>& grid,
                                     const SweepOptions& options);

inline constexpr std::string_view kCsvHeader =
    "l,d,n,s,epsilon,delta,lambda,mechanism,trial,excess_loss,loss_ratio,runtime_ms,seed,status";

std::string rows_to_csv(const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> rows_from_csv(std::string_view text);

void emit_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path);

}  // namespace primo
