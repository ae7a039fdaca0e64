#include "mprgp/bench.hpp"
#include "mprgp/problem_io.hpp"
#include "mprgp/svm.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace mprgp;

namespace {

// Value wrapper because the core passes operators as shared_ptr<const T>,
// which pybind11 cannot use as a class holder.
struct PyOperator {
  OperatorPtr ptr;
};

SolverConfig make_config(const std::string& strategy, double alpha_u, double rtol, double atol,
                         double gamma, std::int64_t max_hessian_mults,
                         std::optional<double> norm_a, const OperatorPtr& op) {
  SolverConfig cfg;
  cfg.strategy = parse_strategy(strategy);
  cfg.strategy.alpha_u = alpha_u;
  cfg.rtol = rtol;
  cfg.atol = atol;
  cfg.gamma = gamma;
  cfg.max_hessian_mults = max_hessian_mults;
  if (norm_a)
    cfg.norm_A = *norm_a;
  else if (cfg.strategy.needs_norm())
    cfg.norm_A = estimate_norm(*op).value;
  return cfg;
}

py::dict row_to_dict(const SweepRow& r) {
  py::dict d;
  d["benchmark"] = r.benchmark;
  d["strategy"] = r.strategy;
  d["alpha_u"] = r.alpha_u ? py::cast(*r.alpha_u) : py::none();
  d["outer_iterations"] = r.outer_iterations;
  d["hessian_mults"] = r.hessian_mults;
  d["cg_steps"] = r.cg_steps;
  d["expansion_steps"] = r.expansion_steps;
  d["proportioning_steps"] = r.proportioning_steps;
  d["converged"] = r.converged;
  d["projected_gradient_norm"] = r.projected_gradient_norm;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Matrix-free gradient-projection solver for box-constrained QPs";

  py::class_<PyOperator>(m, "LinearOperator")
      .def_property_readonly("dim", [](const PyOperator& o) { return o.ptr->dim(); })
      .def_property_readonly("mult_count", [](const PyOperator& o) { return o.ptr->mult_count(); })
      .def("apply", [](const PyOperator& o, const Vector& v) { return o.ptr->apply(v); },
           py::arg("v"));

  m.def(
      "dense_operator", [](Matrix matrix) { return PyOperator{dense_operator(std::move(matrix))}; },
      py::arg("matrix"), "Wrap a dense symmetric matrix as a matrix-free operator");
  m.def(
      "gram_operator",
      [](const SparseMatrix& samples, const Vector& labels) {
        return PyOperator{gram_operator(samples, labels)};
      },
      py::arg("samples"), py::arg("labels"),
      "Implicit Y X'X Y operator over samples stored as sparse columns");
  m.def(
      "gram_operator",
      [](const Matrix& samples, const Vector& labels) {
        return PyOperator{gram_operator(samples.sparseView(), labels)};
      },
      py::arg("samples"), py::arg("labels"));
  m.def(
      "shifted_operator",
      [](const PyOperator& base, double shift) { return PyOperator{shifted_operator(base.ptr, shift)}; },
      py::arg("base"), py::arg("shift"));

  m.def(
      "estimate_norm",
      [](const PyOperator& op, int max_iters, double rel_change_tol, std::uint64_t seed) {
        auto est = estimate_norm(*op.ptr, max_iters, rel_change_tol, seed);
        py::dict d;
        d["value"] = est.value;
        d["iterations"] = est.iterations;
        d["hessian_mults"] = est.mults_spent;
        return d;
      },
      py::arg("op"), py::arg("max_iters") = 50, py::arg("rel_change_tol") = 1e-4,
      py::arg("seed") = 0, "Power-iteration estimate of the largest eigenvalue");

  py::class_<BoxQp>(m, "BoxQp")
      .def(py::init([](const PyOperator& op, Vector b, std::optional<Vector> l,
                       std::optional<Vector> u, std::optional<Matrix> g,
                       std::optional<Vector> e) {
             Vector lower = l.value_or(Vector());
             Vector upper = u.value_or(Vector());
             if (g && e)
               return BoxQp(op.ptr, std::move(b), std::move(lower), std::move(upper),
                            std::move(*g), std::move(*e));
             if (g || e) throw std::invalid_argument("G and e must be given together");
             return BoxQp(op.ptr, std::move(b), std::move(lower), std::move(upper));
           }),
           py::arg("operator"), py::arg("b"), py::arg("l") = py::none(), py::arg("u") = py::none(),
           py::arg("G") = py::none(), py::arg("e") = py::none())
      .def(py::init([](const Matrix& a, Vector b, std::optional<Vector> l,
                       std::optional<Vector> u, std::optional<Matrix> g,
                       std::optional<Vector> e) {
             Vector lower = l.value_or(Vector());
             Vector upper = u.value_or(Vector());
             auto op = dense_operator(a);
             if (g && e)
               return BoxQp(op, std::move(b), std::move(lower), std::move(upper), std::move(*g),
                            std::move(*e));
             if (g || e) throw std::invalid_argument("G and e must be given together");
             return BoxQp(op, std::move(b), std::move(lower), std::move(upper));
           }),
           py::arg("A"), py::arg("b"), py::arg("l") = py::none(), py::arg("u") = py::none(),
           py::arg("G") = py::none(), py::arg("e") = py::none())
      .def_property_readonly("dim", &BoxQp::dim)
      .def_readonly("b", &BoxQp::rhs)
      .def_readonly("l", &BoxQp::lower)
      .def_readonly("u", &BoxQp::upper)
      .def_property_readonly("operator", [](const BoxQp& p) { return PyOperator{p.hessian}; })
      .def("cost", &cost, py::arg("x"))
      .def("gradient", &gradient, py::arg("x"))
      .def("project", &project, py::arg("x"))
      .def("is_feasible", &BoxQp::is_feasible, py::arg("x"))
      .def("has_equalities", &BoxQp::has_equalities);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("x", &SolveReport::x)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("projected_gradient_norm", &SolveReport::projected_gradient_norm)
      .def_readonly("final_cost", &SolveReport::final_cost)
      .def_readonly("hessian_mults", &SolveReport::hessian_mults)
      .def_readonly("cg_steps", &SolveReport::cg_steps)
      .def_readonly("expansion_steps", &SolveReport::expansion_steps)
      .def_readonly("proportioning_steps", &SolveReport::proportioning_steps)
      .def_readonly("dot_products", &SolveReport::dot_products)
      .def_readonly("vector_updates", &SolveReport::vector_updates)
      .def_readonly("gradient_splittings", &SolveReport::gradient_splittings)
      .def("__repr__", [](const SolveReport& r) {
        std::ostringstream os;
        os << "SolveReport(converged=" << (r.converged ? "True" : "False")
           << ", hessian_mults=" << r.hessian_mults << ", cg=" << r.cg_steps
           << ", expansion=" << r.expansion_steps << ", proportioning=" << r.proportioning_steps
           << ", |g^P|=" << r.projected_gradient_norm << ")";
        return os.str();
      });

  py::class_<SmalbeReport>(m, "SmalbeReport")
      .def_readonly("x", &SmalbeReport::x)
      .def_readonly("multipliers", &SmalbeReport::multipliers)
      .def_readonly("converged", &SmalbeReport::converged)
      .def_readonly("outer_iterations", &SmalbeReport::outer_iterations)
      .def_readonly("feasibility_norm", &SmalbeReport::feasibility_norm)
      .def_readonly("penalty_reductions", &SmalbeReport::penalty_reductions)
      .def_readonly("final_penalty", &SmalbeReport::final_penalty)
      .def_readonly("inner", &SmalbeReport::inner)
      .def("__repr__", [](const SmalbeReport& r) {
        std::ostringstream os;
        os << "SmalbeReport(converged=" << (r.converged ? "True" : "False")
           << ", outer=" << r.outer_iterations << ", |Gx-e|=" << r.feasibility_norm
           << ", hessian_mults=" << r.inner.hessian_mults << ")";
        return os.str();
      });

  m.def(
      "solve",
      [](const BoxQp& problem, std::optional<Vector> x0, const std::string& strategy,
         double alpha_u, double rtol, double atol, double gamma, std::int64_t max_hessian_mults,
         std::optional<double> norm_a) {
        SolverConfig cfg = make_config(strategy, alpha_u, rtol, atol, gamma, max_hessian_mults,
                                       norm_a, problem.hessian);
        Vector start = x0 ? *x0 : project(problem, Vector::Zero(problem.dim()));
        py::gil_scoped_release release;
        return solve(problem, start, cfg);
      },
      py::arg("problem"), py::arg("x0") = py::none(), py::arg("strategy") = "projcg",
      py::arg("alpha_u") = 1.0, py::arg("rtol") = 1e-6, py::arg("atol") = 0.0,
      py::arg("gamma") = 1.0, py::arg("max_hessian_mults") = 100000,
      py::arg("norm_a") = py::none(),
      "Solve a box-constrained QP with the selected expansion strategy");

  m.def(
      "solve_equality",
      [](const BoxQp& problem, std::optional<Vector> x0, const std::string& strategy,
         double alpha_u, double rtol, double atol, double gamma, std::int64_t max_hessian_mults,
         double outer_rtol, int max_outer) {
        SmalbeConfig cfg;
        cfg.inner = make_config(strategy, alpha_u, rtol, atol, gamma, max_hessian_mults,
                                std::nullopt, problem.hessian);
        cfg.outer_rtol = outer_rtol;
        cfg.max_outer = max_outer;
        Vector start = x0 ? *x0 : project(problem, Vector::Zero(problem.dim()));
        py::gil_scoped_release release;
        return solve_equality(problem, start, cfg);
      },
      py::arg("problem"), py::arg("x0") = py::none(), py::arg("strategy") = "projcg",
      py::arg("alpha_u") = 1.0, py::arg("rtol") = 1e-8, py::arg("atol") = 0.0,
      py::arg("gamma") = 1.0, py::arg("max_hessian_mults") = 100000,
      py::arg("outer_rtol") = 1e-6, py::arg("max_outer") = 100,
      "Solve a box- and equality-constrained QP with the augmented-Lagrangian outer loop");

  m.def("strategies", [] {
    return std::vector<std::string>{"fixed",    "grgr-optapprox", "gfgr-optapprox", "grgr-opt",
                                    "gfgr-opt", "gfgf-opt",       "grgf-opt",       "projcg"};
  });
  m.def("canonical_strategy_name",
        [](const std::string& name) { return strategy_name(parse_strategy(name)); },
        py::arg("name"));

  // SVM
  py::class_<LabeledDataset>(m, "LabeledDataset")
      .def(py::init([](const SparseMatrix& samples, const Vector& labels) {
             return LabeledDataset{samples, labels};
           }),
           py::arg("samples"), py::arg("labels"))
      .def(py::init([](const Matrix& samples, const Vector& labels) {
             return LabeledDataset{samples.sparseView(), labels};
           }),
           py::arg("samples"), py::arg("labels"))
      .def_readonly("samples", &LabeledDataset::samples)
      .def_readonly("labels", &LabeledDataset::labels)
      .def_property_readonly("feature_count", &LabeledDataset::feature_count)
      .def_property_readonly("sample_count", &LabeledDataset::sample_count);

  m.def("load_libsvm", &load_libsvm, py::arg("path"), py::arg("min_features") = 0,
        "Read a LIBSVM-format text file (samples become sparse columns)");
  m.def("augment_nobias", &augment_nobias, py::arg("data"), py::arg("beta") = 1.0);

  py::class_<SvmModel>(m, "SvmModel")
      .def_readonly("w_hat", &SvmModel::w_hat)
      .def_readonly("beta", &SvmModel::beta)
      .def_readonly("C", &SvmModel::C)
      .def_readonly("dual_solution", &SvmModel::dual_solution)
      .def_property_readonly("loss", [](const SvmModel& mdl) { return loss_name(mdl.loss); })
      .def("predict",
           [](const SvmModel& mdl, const SparseMatrix& samples) { return predict(mdl, samples); },
           py::arg("samples"))
      .def("predict",
           [](const SvmModel& mdl, const Matrix& samples) {
             return predict(mdl, samples.sparseView());
           },
           py::arg("samples"))
      .def("accuracy", &accuracy, py::arg("data"))
      .def("to_json", &model_to_json);

  m.def(
      "train_svm",
      [](const LabeledDataset& data, const std::string& loss, double C, double beta,
         const std::string& strategy, double alpha_u, double rtol, double gamma,
         std::int64_t max_hessian_mults) {
        SolverConfig cfg;
        cfg.strategy = parse_strategy(strategy);
        cfg.strategy.alpha_u = alpha_u;
        cfg.rtol = rtol;
        cfg.gamma = gamma;
        cfg.max_hessian_mults = max_hessian_mults;
        py::gil_scoped_release release;
        auto result = train(data, parse_loss(loss), C, beta, cfg);
        return std::make_pair(result.model, result.report);
      },
      py::arg("data"), py::arg("loss") = "l1", py::arg("C") = 1.0, py::arg("beta") = 1.0,
      py::arg("strategy") = "projcg", py::arg("alpha_u") = 1.0, py::arg("rtol") = 1e-1,
      py::arg("gamma") = 1.0, py::arg("max_hessian_mults") = 100000,
      "Train the no-bias SVM dual; returns (model, report)");

  // benchmark helpers
  m.def("generate_obstacle", &generate_obstacle, py::arg("nx"), py::arg("ny"), py::arg("load"),
        py::arg("obstacle"));
  m.def("generate_eq_toy", &generate_eq_toy, py::arg("n"), py::arg("m"), py::arg("seed") = 0);
  m.def("load_problem", &load_problem, py::arg("path"), "Read a QP problem JSON file");
  m.def("default_alpha_grid", &default_alpha_grid);

  m.def(
      "run_sweep",
      [](const BoxQp& problem, std::optional<Vector> x0, std::vector<std::string> strategies,
         std::vector<double> alpha_grid, const std::string& benchmark_id, double rtol,
         double gamma, std::int64_t max_hessian_mults, std::uint64_t seed) {
        SweepSpec spec;
        spec.benchmark_id = benchmark_id;
        if (!strategies.empty()) spec.strategies = std::move(strategies);
        if (!alpha_grid.empty()) spec.alpha_grid = std::move(alpha_grid);
        spec.rtol = rtol;
        spec.gamma = gamma;
        spec.max_hessian_mults = max_hessian_mults;
        spec.seed = seed;
        Vector start = x0 ? *x0 : project(problem, Vector::Zero(problem.dim()));
        SweepResult result;
        {
          py::gil_scoped_release release;
          result = run_sweep(problem, start, spec);
        }
        py::list rows;
        for (const auto& r : result.rows) rows.append(row_to_dict(r));
        return rows;
      },
      py::arg("problem"), py::arg("x0") = py::none(),
      py::arg("strategies") = std::vector<std::string>{},
      py::arg("alpha_grid") = std::vector<double>{}, py::arg("benchmark_id") = "qp",
      py::arg("rtol") = 1e-6, py::arg("gamma") = 1.0, py::arg("max_hessian_mults") = 100000,
      py::arg("seed") = 0, "One solve per (strategy, alpha_u) pair; returns a list of row dicts");
}
