#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "primo/errors.hpp"
#include "primo/harness.hpp"
#include "primo/privacy.hpp"
#include "primo/query_release.hpp"
#include "primo/solvers.hpp"

namespace py = pybind11;
using namespace primo;

namespace {

std::vector<std::uint64_t> default_ids(Index l) {
  std::vector<std::uint64_t> ids(static_cast<std::size_t>(l));
  for (std::size_t j = 0; j < ids.size(); ++j) ids[j] = j;
  return ids;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Differentially private multi-outcome linear regression";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SingularSystemError>(m, "SingularSystemError", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);

  py::class_<PrivacyBudget>(m, "PrivacyBudget")
      .def(py::init<double, double>(), py::arg("epsilon"), py::arg("delta"))
      .def_property_readonly("epsilon", &PrivacyBudget::epsilon)
      .def_property_readonly("delta", &PrivacyBudget::delta)
      .def("halved", &PrivacyBudget::halved)
      .def("__repr__", [](const PrivacyBudget& b) {
        return "PrivacyBudget(epsilon=" + std::to_string(b.epsilon()) +
               ", delta=" + std::to_string(b.delta()) + ")";
      });

  m.def("calibration_constant", &calibration_constant, py::arg("budget"));
  m.def("covariance_sensitivity", &covariance_sensitivity_value, py::arg("x_bound"), py::arg("n"));
  m.def(
      "association_sensitivity",
      [](double xb, double yb, Index l, Index n) { return association_sensitivity(xb, yb, l, n).l2; },
      py::arg("x_bound"), py::arg("y_bound"), py::arg("l"), py::arg("n"));
  m.def("subsample_amplified_budget", &subsample_amplified_budget, py::arg("budget"), py::arg("n"),
        py::arg("s"));

  py::class_<DesignMatrix>(m, "DesignMatrix")
      .def(py::init<Matrix, double>(), py::arg("x"), py::arg("x_bound"))
      .def_property_readonly("values", &DesignMatrix::values)
      .def_property_readonly("x_bound", &DesignMatrix::x_bound)
      .def_property_readonly("n", &DesignMatrix::n)
      .def_property_readonly("d", &DesignMatrix::d)
      .def_property_readonly("clipped_rows", &DesignMatrix::clipped_rows);

  py::class_<OutcomeMatrix>(m, "OutcomeMatrix")
      .def(py::init([](Matrix y, std::optional<double> y_bound,
                       std::optional<std::vector<std::uint64_t>> ids) {
             if (!y_bound) {
               if (ids) throw DomainError("column_ids require an explicit y_bound");
               return OutcomeMatrix::with_empirical_bound(std::move(y));
             }
             const Index l = y.cols();
             return OutcomeMatrix(std::move(y), *y_bound, ids ? *ids : default_ids(l));
           }),
           py::arg("y"), py::arg("y_bound") = py::none(), py::arg("column_ids") = py::none(),
           "Outcome matrix; without y_bound the empirical max |y_ij| is used.")
      .def_property_readonly("values", &OutcomeMatrix::values)
      .def_property_readonly("y_bound", &OutcomeMatrix::y_bound)
      .def_property_readonly("n", &OutcomeMatrix::n)
      .def_property_readonly("l", &OutcomeMatrix::l)
      .def_property_readonly("column_ids", &OutcomeMatrix::column_ids)
      .def_property_readonly("max_row_norm", &OutcomeMatrix::max_row_norm)
      .def("permute_columns", [](const OutcomeMatrix& y, std::vector<Index> perm) {
        return y.permute_columns(perm);
      });

  py::class_<KroneckerSpectrum>(m, "KroneckerSpectrum")
      .def_property_readonly("d", &KroneckerSpectrum::d)
      .def_property_readonly("n", &KroneckerSpectrum::n)
      .def_property_readonly("l", &KroneckerSpectrum::l)
      .def_property_readonly("left", &KroneckerSpectrum::left)
      .def_property_readonly("singular_values", &KroneckerSpectrum::singular_values)
      .def_property_readonly("right", &KroneckerSpectrum::v)
      .def_property_readonly("eigenvalues", &KroneckerSpectrum::eigenvalues)
      .def_property_readonly("rank", &KroneckerSpectrum::rank);

  m.def("kron_spectrum", &kron_spectrum, py::arg("y"), py::arg("d"));
  m.def("true_answers", &true_answers, py::arg("x"), py::arg("y"));
  m.def("apply_C", &apply_C, py::arg("spec"), py::arg("v"));
  m.def("apply_Ct", &apply_Ct, py::arg("spec"), py::arg("g"));

  py::class_<ProjectionResult>(m, "ProjectionResult")
      .def_readonly("answers", &ProjectionResult::answers)
      .def_readonly("coords", &ProjectionResult::coords)
      .def_readonly("multiplier", &ProjectionResult::multiplier)
      .def_readonly("preimage_norm", &ProjectionResult::preimage_norm)
      .def_readonly("radius", &ProjectionResult::radius);
  m.def("project_onto_feasible", &project_onto_feasible, py::arg("spec"), py::arg("g_tilde"),
        py::arg("x_bound"));
  m.def("feasible_preimage", &feasible_preimage, py::arg("spec"), py::arg("result"));

  py::class_<ProjectionRelease>(m, "ProjectionRelease")
      .def_readonly("answers", &ProjectionRelease::answers)
      .def_readonly("noisy_answers", &ProjectionRelease::noisy_answers)
      .def_readonly("noise_scale", &ProjectionRelease::noise_scale)
      .def_readonly("multiplier", &ProjectionRelease::multiplier)
      .def_readonly("preimage_norm", &ProjectionRelease::preimage_norm)
      .def_readonly("spectrum_rank", &ProjectionRelease::spectrum_rank);
  m.def(
      "projection_mechanism",
      [](const DesignMatrix& x, const OutcomeMatrix& y, const PrivacyBudget& b, std::uint64_t seed) {
        return projection_mechanism(x, y, b, seed);
      },
      py::arg("x"), py::arg("y"), py::arg("budget"), py::arg("seed"));

  py::enum_<Mechanism>(m, "Mechanism")
      .value("none", Mechanism::none)
      .value("gauss", Mechanism::gauss)
      .value("projection", Mechanism::projection);

  py::class_<PhaseTimes>(m, "PhaseTimes")
      .def_readonly("covariance_ms", &PhaseTimes::covariance_ms)
      .def_readonly("mechanism_ms", &PhaseTimes::mechanism_ms)
      .def_readonly("solve_ms", &PhaseTimes::solve_ms);

  py::class_<PrimoSolution>(m, "PrimoSolution")
      .def_readonly("w_hat", &PrimoSolution::w_hat)
      .def_readonly("sigma_cov", &PrimoSolution::sigma_cov)
      .def_readonly("sigma_assoc_or_r", &PrimoSolution::sigma_assoc_or_r)
      .def_readonly("mechanism", &PrimoSolution::mechanism)
      .def_readonly("wall_times", &PrimoSolution::wall_times)
      .def_readonly("seed", &PrimoSolution::seed)
      .def_readonly("covariance_factorizations", &PrimoSolution::covariance_factorizations)
      .def_readonly("covariance_rows", &PrimoSolution::covariance_rows);

  auto config = [](double lambda, const PrivacyBudget& b, Mechanism mech, std::uint64_t seed,
                   std::optional<Index> s) { return SolverConfig{lambda, b, mech, s, seed}; };

  m.def(
      "reuse_cov",
      [config](const DesignMatrix& x, const OutcomeMatrix& y, double lambda, const PrivacyBudget& b,
               Mechanism mech, std::uint64_t seed) {
        py::gil_scoped_release release;
        return reuse_cov(x, y, config(lambda, b, mech, seed, std::nullopt));
      },
      py::arg("x"), py::arg("y"), py::arg("lambda_"), py::arg("budget"),
      py::arg("mechanism") = Mechanism::gauss, py::arg("seed") = 0);
  m.def(
      "subsample_reuse_cov",
      [config](const DesignMatrix& x, const OutcomeMatrix& y, double lambda, const PrivacyBudget& b,
               Index s, Mechanism mech, std::uint64_t seed) {
        py::gil_scoped_release release;
        return subsample_reuse_cov(x, y, config(lambda, b, mech, seed, s));
      },
      py::arg("x"), py::arg("y"), py::arg("lambda_"), py::arg("budget"), py::arg("s"),
      py::arg("mechanism") = Mechanism::gauss, py::arg("seed") = 0);
  m.def(
      "naive_ssp_baseline",
      [](const DesignMatrix& x, const OutcomeMatrix& y, double lambda, const PrivacyBudget& b,
         std::uint64_t seed) {
        py::gil_scoped_release release;
        return naive_ssp_baseline(x, y, lambda, b, seed);
      },
      py::arg("x"), py::arg("y"), py::arg("lambda_"), py::arg("budget"), py::arg("seed") = 0);
  m.def("ols_ridge_solve", &ols_ridge_solve, py::arg("x"), py::arg("y"), py::arg("lambda_"));
  m.def("reference_solution", &reference_solution, py::arg("x"), py::arg("y"));
  m.def("excess_loss", &excess_loss, py::arg("x"), py::arg("y"), py::arg("w_hat"), py::arg("w_star"));
  m.def("loss_ratio", &loss_ratio, py::arg("x"), py::arg("y"), py::arg("w_hat"), py::arg("w_ref"));

  m.def("synthetic_haplotypes", &synthetic_haplotypes, py::arg("n"), py::arg("snps"),
        py::arg("seed"));
  m.def(
      "generate_phenotypes",
      [](const DesignMatrix& x, Index l, double noise_std, std::optional<double> theta_scale,
         std::uint64_t seed) {
        SyntheticSpec spec;
        spec.n = x.n();
        spec.d = x.d();
        spec.l = l;
        spec.noise_std = noise_std;
        spec.theta_scale = theta_scale;
        spec.seed = seed;
        return generate_phenotypes(x, spec);
      },
      py::arg("x"), py::arg("l"), py::arg("noise_std") = 1.0, py::arg("theta_scale") = py::none(),
      py::arg("seed") = 0);

  m.def(
      "sweep_csv",
      [](Index n, std::vector<Index> ds, std::vector<Index> ls, std::vector<double> epsilons,
         double delta, double lambda, std::vector<std::string> methods, std::vector<Index> ss,
         Index trials, std::uint64_t base_seed, unsigned threads) {
        std::vector<Method> parsed;
        for (const auto& name : methods) parsed.push_back(parse_method(name));
        SweepOptions opts;
        opts.trials = trials;
        opts.base_seed = base_seed;
        opts.threads = threads;
        const auto grid = make_grid(n, ds, ls, ss, epsilons, delta, lambda, parsed);
        py::gil_scoped_release release;
        return rows_to_csv(run_sweep(grid, opts));
      },
      py::arg("n"), py::arg("ds"), py::arg("ls"), py::arg("epsilons"), py::arg("delta"),
      py::arg("lambda_"), py::arg("methods"), py::arg("ss") = std::vector<Index>{}, py::arg("trials") = 1,
      py::arg("base_seed") = 0, py::arg("threads") = 1,
      "Run a synthetic experiment grid and return the results as CSV text.");
}
