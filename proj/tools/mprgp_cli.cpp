// Benchmark CLI: solves QP problem files, trains SVMs on LIBSVM data,
// and sweeps expansion strategies over the alpha_u grid, emitting the
// result tables as CSV or markdown.
//
// Exit codes: 0 full success, 1 at least one unconverged run, 2 input
// errors.
#include "mprgp/bench.hpp"
#include "mprgp/problem_io.hpp"
#include "mprgp/svm.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace {

using namespace mprgp;

struct SolverFlags {
  std::string strategy = "projcg";
  double alpha_u = 1.0;
  double rtol = 1e-6;
  double atol = 0.0;
  double gamma = 1.0;
  std::int64_t max_hess = 100000;
  double outer_rtol = 0.0;
  int max_outer = 100;
  std::uint64_t seed = 0;
};

struct OutputFlags {
  std::string out;
  std::string format = "csv";
};

struct SweepFlags {
  bool enabled = false;
  std::vector<std::string> strategies = default_strategies();
  std::vector<double> alpha_grid = default_alpha_grid();
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f, bool with_outer = true) {
  cmd->add_option("--strategy", f.strategy, "Expansion strategy name");
  cmd->add_option("--alpha-u", f.alpha_u, "Step-length multiplier in (0,2]");
  cmd->add_option("--rtol", f.rtol, "Relative tolerance on ||g^P||");
  cmd->add_option("--atol", f.atol, "Absolute tolerance on ||g^P||");
  cmd->add_option("--gamma", f.gamma, "Proportionality constant");
  cmd->add_option("--max-hess", f.max_hess, "Hessian-multiplication budget per solve");
  cmd->add_option("--seed", f.seed, "Seed for the power-iteration start vector");
  if (with_outer) {
    cmd->add_option("--outer-rtol", f.outer_rtol, "Outer tolerance for equality constraints");
    cmd->add_option("--max-outer", f.max_outer, "Outer iteration limit");
  }
}

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
  cmd->add_option("--out", f.out, "Write the table to this file instead of stdout");
  cmd->add_option("--format", f.format, "Output format: csv, markdown, or json")
      ->check(CLI::IsMember({"csv", "markdown", "json"}));
}

void add_sweep_flags(CLI::App* cmd, SweepFlags& f) {
  cmd->add_flag("--sweep", f.enabled, "Run every strategy over the alpha_u grid");
  cmd->add_option("--strategies", f.strategies, "Comma-separated strategy list")->delimiter(',');
  cmd->add_option("--alpha-grid", f.alpha_grid, "Comma-separated alpha_u values")->delimiter(',');
}

void write_output(const OutputFlags& out, const std::string& text) {
  if (out.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out.out);
  if (!file) throw std::runtime_error("cannot write output file: " + out.out);
  file << text;
}

nlohmann::json row_json(const SweepRow& r) {
  nlohmann::json j;
  j["benchmark"] = r.benchmark;
  j["strategy"] = r.strategy;
  if (r.alpha_u)
    j["alpha_u"] = *r.alpha_u;
  else
    j["alpha_u"] = nullptr;
  j["outer_iterations"] = r.outer_iterations;
  j["hessian_mults"] = r.hessian_mults;
  j["cg_steps"] = r.cg_steps;
  j["expansion_steps"] = r.expansion_steps;
  j["proportioning_steps"] = r.proportioning_steps;
  j["converged"] = r.converged;
  j["projected_gradient_norm"] = r.projected_gradient_norm;
  return j;
}

int emit_rows(const std::vector<SweepRow>& rows, const OutputFlags& out) {
  std::string text;
  if (out.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back(row_json(r));
    text = arr.dump(2) + "\n";
  } else {
    text = emit(rows, parse_format(out.format));
  }
  write_output(out, text);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.converged;
  return ok ? 0 : 1;
}

SweepRow run_single(const BoxQp& problem, const Vector& x0, const SolverFlags& f,
                    const std::string& benchmark_id) {
  SolverConfig cfg;
  cfg.strategy = parse_strategy(f.strategy);
  cfg.strategy.alpha_u = f.alpha_u;
  cfg.rtol = f.rtol;
  cfg.atol = f.atol;
  cfg.gamma = f.gamma;
  cfg.max_hessian_mults = f.max_hess;

  NormEstimate norm;
  norm = estimate_norm(*problem.hessian, 50, 1e-4, f.seed);
  cfg.norm_A = norm.value;
  std::cerr << "# ||A|| estimate " << norm.value << " (" << norm.mults_spent
            << " Hessian mults, excluded from the run counts)\n";

  SweepRow row;
  row.benchmark = benchmark_id;
  row.strategy = strategy_name(cfg.strategy);
  if (cfg.strategy.uses_alpha()) row.alpha_u = cfg.strategy.alpha_u;

  if (problem.has_equalities()) {
    SmalbeConfig outer;
    outer.inner = cfg;
    outer.outer_rtol = f.outer_rtol > 0.0 ? f.outer_rtol : f.rtol;
    outer.max_outer = f.max_outer;
    outer.norm_A = norm.value;
    auto rep = solve_equality(problem, x0, outer);
    row.outer_iterations = rep.outer_iterations;
    row.hessian_mults = rep.inner.hessian_mults;
    row.cg_steps = rep.inner.cg_steps;
    row.expansion_steps = rep.inner.expansion_steps;
    row.proportioning_steps = rep.inner.proportioning_steps;
    row.converged = rep.converged;
    row.projected_gradient_norm = rep.inner.projected_gradient_norm;
    std::cerr << "# feasibility ||Gx - e|| = " << rep.feasibility_norm << "\n";
  } else {
    auto rep = solve(problem, x0, cfg);
    row.hessian_mults = rep.hessian_mults;
    row.cg_steps = rep.cg_steps;
    row.expansion_steps = rep.expansion_steps;
    row.proportioning_steps = rep.proportioning_steps;
    row.converged = rep.converged;
    row.projected_gradient_norm = rep.projected_gradient_norm;
  }
  return row;
}

int run_problem_command(const BoxQp& problem, const Vector& x0, const std::string& benchmark_id,
                        const SolverFlags& solver, const SweepFlags& sweep,
                        const OutputFlags& out) {
  if (!sweep.enabled) return emit_rows({run_single(problem, x0, solver, benchmark_id)}, out);

  SweepSpec spec;
  spec.benchmark_id = benchmark_id;
  spec.strategies = sweep.strategies;
  spec.alpha_grid = sweep.alpha_grid;
  spec.gamma = solver.gamma;
  spec.rtol = solver.rtol;
  spec.atol = solver.atol;
  spec.max_hessian_mults = solver.max_hess;
  spec.outer_rtol = solver.outer_rtol;
  spec.max_outer = solver.max_outer;
  spec.seed = solver.seed;
  auto result = run_sweep(problem, x0, spec);
  std::cerr << "# ||A|| estimate " << result.norm.value << " (" << result.norm.mults_spent
            << " Hessian mults, excluded from the row counts)\n";
  std::cerr << "# sweep wall time " << result.elapsed_seconds << " s\n";
  return emit_rows(result.rows, out);
}

std::string file_stem(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-free box-constrained QP solver and strategy benchmark"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve a QP problem file");
  std::string problem_path;
  solve_cmd->add_option("--problem", problem_path, "QP problem JSON file")->required();
  SolverFlags solve_flags;
  SweepFlags solve_sweep;
  OutputFlags solve_out;
  add_solver_flags(solve_cmd, solve_flags);
  add_sweep_flags(solve_cmd, solve_sweep);
  add_output_flags(solve_cmd, solve_out);

  // svm
  auto* svm_cmd = app.add_subcommand("svm", "Train an SVM dual on a LIBSVM file");
  std::string data_path, loss_name_flag = "l1", model_out;
  double svm_c = 1.0, svm_beta = 1.0;
  SolverFlags svm_flags;
  SweepFlags svm_sweep;
  OutputFlags svm_out;
  svm_cmd->add_option("--data", data_path, "LIBSVM dataset file")->required();
  svm_cmd->add_option("--loss", loss_name_flag, "Hinge loss: l1 or l2")
      ->check(CLI::IsMember({"l1", "l2"}));
  svm_cmd->add_option("--C", svm_c, "Penalty parameter");
  svm_cmd->add_option("--beta", svm_beta, "No-bias augmentation constant");
  svm_cmd->add_option("--model-out", model_out, "Dump the trained model JSON here");
  svm_flags.rtol = 1e-1;  // classification needs little solver accuracy
  add_solver_flags(svm_cmd, svm_flags, false);
  add_sweep_flags(svm_cmd, svm_sweep);
  add_output_flags(svm_cmd, svm_out);

  // obstacle
  auto* obstacle_cmd = app.add_subcommand("obstacle", "Obstacle-problem benchmark");
  Index obs_nx = 32, obs_ny = 32;
  double obs_load = -30.0, obs_height = -0.05;
  SolverFlags obs_flags;
  SweepFlags obs_sweep;
  OutputFlags obs_out;
  obstacle_cmd->add_option("--nx", obs_nx, "Interior grid points in x");
  obstacle_cmd->add_option("--ny", obs_ny, "Interior grid points in y");
  obstacle_cmd->add_option("--load", obs_load, "Constant load");
  obstacle_cmd->add_option("--obstacle", obs_height, "Obstacle height (lower bound)");
  obs_flags.rtol = 1e-8;
  add_solver_flags(obstacle_cmd, obs_flags, false);
  add_sweep_flags(obstacle_cmd, obs_sweep);
  add_output_flags(obstacle_cmd, obs_out);

  // eq-toy; --seed doubles as the generator seed
  auto* eq_cmd = app.add_subcommand("eq-toy", "Random equality-constrained toy benchmark");
  Index eq_n = 20, eq_m = 2;
  SolverFlags eq_flags;
  SweepFlags eq_sweep;
  OutputFlags eq_out;
  eq_cmd->add_option("--n", eq_n, "Problem dimension");
  eq_cmd->add_option("--m", eq_m, "Number of equality constraints");
  eq_flags.rtol = 1e-6;
  add_solver_flags(eq_cmd, eq_flags);
  add_sweep_flags(eq_cmd, eq_sweep);
  add_output_flags(eq_cmd, eq_out);

  // norm
  auto* norm_cmd = app.add_subcommand("norm", "Power-iteration norm estimate of a problem Hessian");
  std::string norm_path;
  int norm_iters = 50;
  double norm_tol = 1e-4;
  std::uint64_t norm_seed = 0;
  norm_cmd->add_option("--problem", norm_path, "QP problem JSON file")->required();
  norm_cmd->add_option("--max-iters", norm_iters, "Iteration cap");
  norm_cmd->add_option("--tol", norm_tol, "Relative change tolerance");
  norm_cmd->add_option("--seed", norm_seed, "Start-vector seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve_cmd) {
      BoxQp problem = load_problem(problem_path);
      Vector x0 = project(problem, Vector::Zero(problem.dim()));
      return run_problem_command(problem, x0, file_stem(problem_path), solve_flags, solve_sweep,
                                 solve_out);
    }

    if (*svm_cmd) {
      LabeledDataset data = load_libsvm(data_path);
      const SvmLoss loss = parse_loss(loss_name_flag);
      std::cerr << "# " << data_path << ": " << data.sample_count() << " samples, "
                << data.feature_count() << " features\n";
      char c_tag[32];
      std::snprintf(c_tag, sizeof(c_tag), "%g", svm_c);
      const std::string benchmark_id =
          file_stem(data_path) + "-" + loss_name(loss) + "-C" + c_tag;

      if (svm_sweep.enabled) {
        LabeledDataset augmented = augment_nobias(data, svm_beta);
        BoxQp dual = build_dual(augmented, loss, svm_c);
        constexpr double eps = std::numeric_limits<double>::epsilon();
        Vector x0 = loss == SvmLoss::l1
                        ? Vector::Constant(dual.dim(), (1.0 - 100.0 * eps) * svm_c).eval()
                        : Vector::Zero(dual.dim()).eval();
        SweepFlags sweep = svm_sweep;
        return run_problem_command(dual, x0, benchmark_id, svm_flags, sweep, svm_out);
      }

      SolverConfig cfg;
      cfg.strategy = parse_strategy(svm_flags.strategy);
      cfg.strategy.alpha_u = svm_flags.alpha_u;
      cfg.rtol = svm_flags.rtol;
      cfg.atol = svm_flags.atol;
      cfg.gamma = svm_flags.gamma;
      cfg.max_hessian_mults = svm_flags.max_hess;
      auto result = train(data, loss, svm_c, svm_beta, cfg);
      if (!model_out.empty()) {
        std::ofstream file(model_out);
        if (!file) throw std::runtime_error("cannot write model file: " + model_out);
        file << model_to_json(result.model) << '\n';
      }
      std::cerr << "# training accuracy " << accuracy(result.model, data) << "\n";

      SweepRow row;
      row.benchmark = benchmark_id;
      row.strategy = strategy_name(cfg.strategy);
      if (cfg.strategy.uses_alpha()) row.alpha_u = cfg.strategy.alpha_u;
      row.hessian_mults = result.report.hessian_mults;
      row.cg_steps = result.report.cg_steps;
      row.expansion_steps = result.report.expansion_steps;
      row.proportioning_steps = result.report.proportioning_steps;
      row.converged = result.report.converged;
      row.projected_gradient_norm = result.report.projected_gradient_norm;
      return emit_rows({row}, svm_out);
    }

    if (*obstacle_cmd) {
      BoxQp problem = generate_obstacle(obs_nx, obs_ny, obs_load, obs_height);
      Vector x0 = project(problem, Vector::Zero(problem.dim()));
      std::ostringstream id;
      id << "obstacle-" << obs_nx << "x" << obs_ny;
      return run_problem_command(problem, x0, id.str(), obs_flags, obs_sweep, obs_out);
    }

    if (*eq_cmd) {
      BoxQp problem = generate_eq_toy(eq_n, eq_m, eq_flags.seed);
      Vector x0 = project(problem, Vector::Zero(problem.dim()));
      std::ostringstream id;
      id << "eq-toy-n" << eq_n << "-m" << eq_m << "-s" << eq_flags.seed;
      return run_problem_command(problem, x0, id.str(), eq_flags, eq_sweep, eq_out);
    }

    if (*norm_cmd) {
      BoxQp problem = load_problem(norm_path);
      auto est = estimate_norm(*problem.hessian, norm_iters, norm_tol, norm_seed);
      std::cout << "norm_estimate " << est.value << "\niterations " << est.iterations
                << "\nhessian_mults " << est.mults_spent << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
