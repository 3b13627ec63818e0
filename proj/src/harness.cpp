#include "primo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include "primo/csv.hpp"
#include "primo/errors.hpp"
#include "primo/solvers.hpp"

namespace primo {

Matrix load_genotype_matrix(const std::filesystem::path& path, char delimiter) {
  return read_numeric_matrix(path, delimiter);
}

std::vector<Index> select_snps(Index total, Index d, Rng& rng) {
  if (d < 1 || d > total) {
    throw DomainError("cannot select " + std::to_string(d) + " SNPs out of " +
                      std::to_string(total));
  }
  std::vector<Index> all(static_cast<std::size_t>(total));
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<Index> picked;
  picked.reserve(static_cast<std::size_t>(d));
  std::sample(all.begin(), all.end(), std::back_inserter(picked), d, rng.engine());
  return picked;
}

DesignMatrix center_and_subsample_snps(const Matrix& x, Index d, Rng& rng) {
  const std::vector<Index> cols = select_snps(x.cols(), d, rng);
  Matrix out(x.rows(), d);
  for (Index j = 0; j < d; ++j) {
    const auto col = x.col(cols[static_cast<std::size_t>(j)]);
    out.col(j) = col.array() - col.mean();
  }
  const double bound = out.rowwise().norm().maxCoeff();
  return DesignMatrix(std::move(out), bound);
}

Matrix synthetic_haplotypes(Index n, Index snps, std::uint64_t seed) {
  if (n < 1 || snps < 1) throw DomainError("synthetic_haplotypes: empty shape");
  Matrix x(n, snps);
  for (Index j = 0; j < snps; ++j) {
    Rng rng = Rng::stream(seed, StreamPurpose::design, static_cast<std::uint64_t>(j));
    const double freq = 0.05 + 0.45 * rng.uniform();
    for (Index i = 0; i < n; ++i) x(i, j) = rng.uniform() < freq ? 1.0 : 0.0;
  }
  return x;
}

double SyntheticSpec::theta_std() const {
  return theta_scale ? *theta_scale : std::pow(static_cast<double>(d), -0.25);
}

OutcomeMatrix generate_phenotypes(const DesignMatrix& x, const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1 || spec.l < 1) throw DomainError("generate_phenotypes: empty shape");
  if (spec.d != x.d() || spec.n != x.n()) {
    throw DimensionError("generate_phenotypes: spec shape does not match the design matrix");
  }
  if (!(spec.noise_std >= 0.0)) throw DomainError("generate_phenotypes: noise_std must be >= 0");
  const double theta_std = spec.theta_std();
  Matrix y(spec.n, spec.l);
  Vector theta(spec.d);
  for (Index j = 0; j < spec.l; ++j) {
    Rng rng = Rng::stream(spec.seed, StreamPurpose::phenotype, static_cast<std::uint64_t>(j));
    for (Index k = 0; k < spec.d; ++k) theta[k] = theta_std * rng.normal();
    y.col(j).noalias() = x.values() * theta;
    for (Index i = 0; i < spec.n; ++i) y(i, j) += spec.noise_std * rng.normal();
  }
  return OutcomeMatrix::with_empirical_bound(std::move(y));
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::none:
      return "none";
    case Method::gauss:
      return "gauss";
    case Method::proj:
      return "proj";
    case Method::naive:
      return "naive";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "none") return Method::none;
  if (name == "gauss") return Method::gauss;
  if (name == "proj" || name == "projection") return Method::proj;
  if (name == "naive") return Method::naive;
  throw DomainError("unknown mechanism '" + std::string(name) + "'");
}

std::vector<ExperimentCell> make_grid(Index n, const std::vector<Index>& ds,
                                      const std::vector<Index>& ls, const std::vector<Index>& ss,
                                      const std::vector<double>& epsilons, double delta,
                                      double lambda, const std::vector<Method>& methods) {
  std::vector<ExperimentCell> grid;
  const std::vector<Index> sizes = ss.empty() ? std::vector<Index>{n} : ss;
  for (Index d : ds) {
    for (Index l : ls) {
      for (Index s : sizes) {
        for (double eps : epsilons) {
          for (Method m : methods) grid.push_back({n, d, l, s, eps, delta, lambda, m});
        }
      }
    }
  }
  return grid;
}

namespace {

struct TrialData {
  DesignMatrix x;
  OutcomeMatrix y;
  Matrix w_star;
};

TrialData build_trial(Index n, Index d, Index l, std::uint64_t trial_seed,
                      const SweepOptions& options) {
  Rng select_rng = Rng::stream(trial_seed, StreamPurpose::snp_selection, static_cast<std::uint64_t>(d));
  DesignMatrix x = [&] {
    if (options.genotypes) {
      if (options.genotypes->rows() != n) {
        throw DimensionError("genotype pool has " + std::to_string(options.genotypes->rows()) +
                             " individuals but the grid asks for n = " + std::to_string(n));
      }
      return center_and_subsample_snps(*options.genotypes, d, select_rng);
    }
    const std::uint64_t shape_key = (static_cast<std::uint64_t>(n) << 32) ^ static_cast<std::uint64_t>(d);
    return center_and_subsample_snps(synthetic_haplotypes(n, d, derive_seed(trial_seed, shape_key)),
                                     d, select_rng);
  }();
  SyntheticSpec spec;
  spec.n = n;
  spec.d = d;
  spec.l = l;
  spec.noise_std = options.noise_std;
  spec.seed = trial_seed;
  OutcomeMatrix y = generate_phenotypes(x, spec);
  Matrix w_star = reference_solution(x, y);
  return {std::move(x), std::move(y), std::move(w_star)};
}

PrimoSolution run_cell(const ExperimentCell& cell, const TrialData& data, std::uint64_t seed) {
  const PrivacyBudget budget(cell.epsilon, cell.delta);
  if (cell.method == Method::naive) {
    return naive_ssp_baseline(data.x, data.y, cell.lambda, budget, seed);
  }
  SolverConfig cfg;
  cfg.lambda = cell.lambda;
  cfg.budget = budget;
  cfg.seed = seed;
  cfg.mechanism = cell.method == Method::none    ? Mechanism::none
                  : cell.method == Method::proj ? Mechanism::projection
                                                : Mechanism::gauss;
  if (cell.s != cell.n) {
    cfg.subsample_s = cell.s;
    return subsample_reuse_cov(data.x, data.y, cfg);
  }
  return reuse_cov(data.x, data.y, cfg);
}

std::string status_text(const std::exception& e) {
  if (dynamic_cast<const SingularSystemError*>(&e)) return "singular_system";
  std::string msg = e.what();
  for (char& c : msg) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return "error: " + msg;
}

ExperimentRow base_row(const ExperimentCell& cell, Index trial, std::uint64_t seed) {
  ExperimentRow row;
  row.l = cell.l;
  row.d = cell.d;
  row.n = cell.n;
  row.s = cell.s;
  row.epsilon = cell.epsilon;
  row.delta = cell.delta;
  row.lambda = cell.lambda;
  row.mechanism = std::string(to_string(cell.method));
  row.trial = trial;
  row.seed = seed;
  row.excess_loss = std::nan("");
  row.loss_ratio = std::nan("");
  return row;
}

}  // namespace

std::vector<ExperimentRow> run_sweep(const std::vector<ExperimentCell>& grid,
                                     const SweepOptions& options) {
  if (options.trials < 0) throw DomainError("run_sweep: trials must be nonnegative");
  const std::size_t trials = static_cast<std::size_t>(options.trials);
  std::vector<ExperimentRow> rows(grid.size() * trials);
  if (rows.empty()) return rows;

  // One task per (n, d, l, trial): the data is built once and every cell
  // sharing that shape runs on it.
  using ShapeKey = std::tuple<Index, Index, Index>;
  std::map<ShapeKey, std::vector<std::size_t>> cells_by_shape;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    cells_by_shape[{grid[c].n, grid[c].d, grid[c].l}].push_back(c);
  }
  struct Task {
    const std::vector<std::size_t>* cells;
    std::size_t trial;
  };
  std::vector<Task> tasks;
  for (const auto& [key, cells] : cells_by_shape) {
    for (std::size_t t = 0; t < trials; ++t) tasks.push_back({&cells, t});
  }

  auto run_task = [&](const Task& task) {
    const std::uint64_t seed = derive_seed(options.base_seed, task.trial);
    const ExperimentCell& first = grid[task.cells->front()];
    std::optional<TrialData> data;
    std::string data_error;
    try {
      data.emplace(build_trial(first.n, first.d, first.l, seed, options));
    } catch (const std::exception& e) {
      data_error = status_text(e);
    }
    for (std::size_t c : *task.cells) {
      const ExperimentCell& cell = grid[c];
      ExperimentRow row = base_row(cell, static_cast<Index>(task.trial), seed);
      if (!data) {
        row.status = data_error;
      } else {
        try {
          const auto start = std::chrono::steady_clock::now();
          const PrimoSolution sol = run_cell(cell, *data, seed);
          const double ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                  .count();
          row.excess_loss = excess_loss(data->x, data->y, sol.w_hat, data->w_star);
          row.loss_ratio = loss_ratio(data->x, data->y, sol.w_hat, data->w_star);
          row.runtime_ms = options.record_runtime ? ms : 0.0;
          row.status = "ok";
        } catch (const std::exception& e) {
          row.status = status_text(e);
        }
      }
      rows[c * trials + task.trial] = std::move(row);
    }
  };

  unsigned workers = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(tasks.size())));
  if (workers == 1) {
    for (const Task& t : tasks) run_task(t);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(tasks[i]);
    });
  }
  pool.clear();
  return rows;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const ExperimentRow& r : rows) {
    out << r.l << ',' << r.d << ',' << r.n << ',' << r.s << ',' << format_double(r.epsilon) << ','
        << format_double(r.delta) << ',' << format_double(r.lambda) << ',' << r.mechanism << ','
        << r.trial << ',' << format_double(r.excess_loss) << ',' << format_double(r.loss_ratio)
        << ',' << format_double(r.runtime_ms) << ',' << r.seed << ',' << r.status << '\n';
  }
  return out.str();
}

namespace {

template <typename Int>
Int parse_int(std::string_view cell, std::size_t row, std::size_t col) {
  Int v{};
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw ParseError("bad integer '" + std::string(cell) + "'", row, col);
  }
  return v;
}

double parse_real(std::string_view cell, std::size_t row, std::size_t col) {
  if (cell == "nan" || cell == "-nan") return std::nan("");
  if (cell == "inf") return HUGE_VAL;
  if (cell == "-inf") return -HUGE_VAL;
  double v = 0.0;
  if (!parse_double(cell, v)) throw ParseError("bad number '" + std::string(cell) + "'", row, col);
  return v;
}

}  // namespace

std::vector<ExperimentRow> rows_from_csv(std::string_view text) {
  std::vector<ExperimentRow> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kCsvHeader) throw ParseError("unexpected header", 1, 1);
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split_line(line, ',');
    if (cells.size() != 14) throw ShapeError("row " + std::to_string(line_no) + " has wrong width");
    ExperimentRow r;
    r.l = parse_int<Index>(cells[0], line_no, 1);
    r.d = parse_int<Index>(cells[1], line_no, 2);
    r.n = parse_int<Index>(cells[2], line_no, 3);
    r.s = parse_int<Index>(cells[3], line_no, 4);
    r.epsilon = parse_real(cells[4], line_no, 5);
    r.delta = parse_real(cells[5], line_no, 6);
    r.lambda = parse_real(cells[6], line_no, 7);
    r.mechanism = std::string(cells[7]);
    r.trial = parse_int<Index>(cells[8], line_no, 9);
    r.excess_loss = parse_real(cells[9], line_no, 10);
    r.loss_ratio = parse_real(cells[10], line_no, 11);
    r.runtime_ms = parse_real(cells[11], line_no, 12);
    r.seed = parse_int<std::uint64_t>(cells[12], line_no, 13);
    r.status = std::string(cells[13]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << rows_to_csv(rows);
  if (!file) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace primo
