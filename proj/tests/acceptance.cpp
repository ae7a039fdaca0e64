// Acceptance suite: runs every gate criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number
// of failed criteria.
#include "mprgp/bench.hpp"
#include "mprgp/problem_io.hpp"
#include "mprgp/svm.hpp"

#include "oracles.hpp"

#include <Eigen/Dense>

#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

using namespace mprgp;

namespace {

struct CriterionLog {
  int failures = 0;
  std::ostringstream detail;
};

// Violation tallies accumulated while criteria 1 and 7 run.
struct CrossRunTallies {
  long chain_checks = 0, chain_violations = 0;              // criterion 4
  long step_events = 0, accounting_violations = 0;          // criterion 6
  long degenerate_expansions = 0;
  long monotonicity_checks = 0, monotonicity_violations = 0;  // criterion 10
};

const std::vector<std::string> kEveryStrategy = {
    "fixed",    "gfgf-optapprox", "grgr-optapprox", "gfgr-optapprox", "grgf-optapprox",
    "gfgf-opt", "grgr-opt",       "gfgr-opt",       "grgf-opt",       "projcg"};

double dense_norm(const Matrix& a) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues().maxCoeff();
}

bool subset_of(const std::vector<Index>& small, const std::vector<Index>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

StepMonitor make_audit_monitor(CrossRunTallies& tally, const ExpansionStrategy& strategy,
                               const Matrix* dense_a, double alpha_u, double norm_a) {
  return [&tally, strategy, dense_a, alpha_u, norm_a](const StepEvent& ev) {
    // criterion 6: Hessian applications per completed step
    ++tally.step_events;
    std::int64_t expected = 1;
    if (ev.type == StepType::expansion) {
      if (strategy.kind == ExpansionKind::opt && ev.steplen_vector.size() > 0)
        expected = 3;
      else
        expected = 2;
      if (strategy.kind != ExpansionKind::projcg && ev.steplen_vector.size() == 0)
        ++tally.degenerate_expansions;
    }
    if (ev.hessian_mults != expected) ++tally.accounting_violations;

    // criterion 10: expansion grows, proportioning shrinks
    if (ev.type == StepType::expansion) {
      ++tally.monotonicity_checks;
      if (!subset_of(ev.active_before.at_lower, ev.active_after.at_lower) ||
          !subset_of(ev.active_before.at_upper, ev.active_after.at_upper))
        ++tally.monotonicity_violations;
    } else if (ev.type == StepType::proportioning) {
      ++tally.monotonicity_checks;
      if (!subset_of(ev.active_after.at_lower, ev.active_before.at_lower) ||
          !subset_of(ev.active_after.at_upper, ev.active_before.at_upper))
        ++tally.monotonicity_violations;
    }

    // criterion 4: step-length chain with the dense true norm
    if (dense_a && ev.type == StepType::expansion && ev.steplen_vector.size() > 0) {
      const Vector& d = ev.steplen_vector;
      const Vector& g = ev.gradient_at_half;
      const double dd = d.squaredNorm();
      const double dg = d.dot(g);
      const double dad = d.dot(*dense_a * d);
      if (dd > 0.0 && dad > 0.0) {
        ++tally.chain_checks;
        const double fixed_len = alpha_u / norm_a;
        const double optapprox_len = fixed_len * dg / dd;
        const double opt_len = alpha_u * dg / dad;
        const double slack = 1.0 + 1e-12;
        if (!(fixed_len <= optapprox_len * slack && optapprox_len <= opt_len * slack))
          ++tally.chain_violations;
      }
    }
  };
}

// ---- criterion 1 (+ feeds 4, 6, 10) ---------------------------------

bool criterion_1(CrossRunTallies& tally, std::ostringstream& note) {
  int bad = 0;
  long runs = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto p = oracle::random_box_problem(seed);
    BoxQp pb(dense_operator(p.a), p.b, p.l, p.u);
    Vector x0 = project(pb, p.x0);
    Vector expected = oracle::enumerate_box_solution(p.a, p.b, p.l, p.u);
    const double norm = dense_norm(p.a);

    for (const auto& name : kEveryStrategy) {
      for (double alpha_u : {1.0, 1.9}) {
        SolverConfig cfg;
        cfg.strategy = parse_strategy(name);
        cfg.strategy.alpha_u = alpha_u;
        cfg.norm_A = norm;
        cfg.rtol = 1e-12;
        cfg.atol = 1e-12;
        cfg.max_hessian_mults = 50000;
        cfg.monitor = make_audit_monitor(tally, cfg.strategy, &p.a, alpha_u, norm);
        auto rep = solve(pb, x0, cfg);
        ++runs;
        const double diff = (rep.x - expected).lpNorm<Eigen::Infinity>();
        worst = std::max(worst, diff);
        if (!rep.converged || diff > 1e-8) ++bad;
        if (!cfg.strategy.uses_alpha()) break;  // projcg: one run is enough
      }
    }
  }
  note << runs << " runs over 200 seeded problems, worst |x - oracle|_inf = " << worst;
  return bad == 0;
}

// ---- criterion 2 -----------------------------------------------------

bool criterion_2(std::ostringstream& note) {
  int bad = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto sys = oracle::random_spd_system(seed, 50);
    BoxQp pb(dense_operator(sys.a), sys.b);

    std::vector<Vector> iterates;
    SolverConfig cfg;
    cfg.strategy = parse_strategy("projcg");
    cfg.rtol = 1e-10;
    cfg.max_hessian_mults = 100000;
    cfg.monitor = [&](const StepEvent& ev) { iterates.push_back(ev.x_after); };
    auto rep = solve(pb, sys.x0, cfg);
    auto ref = oracle::reference_cg(sys.a, sys.b, sys.x0, 1e-10, 5000);

    if (!rep.converged || rep.expansion_steps != 0 || rep.proportioning_steps != 0 ||
        iterates.size() != ref.size()) {
      ++bad;
      continue;
    }
    for (std::size_t k = 0; k < ref.size(); ++k) {
      const double rel = (iterates[k] - ref[k]).norm() / (1.0 + ref[k].norm());
      worst = std::max(worst, rel);
      if (rel > 1e-12) {
        ++bad;
        break;
      }
    }
  }
  note << "50 unconstrained problems, worst per-iterate relative gap = " << worst;
  return bad == 0;
}

// ---- criterion 3 -----------------------------------------------------

bool criterion_3(std::ostringstream& note) {
  int bad = 0;
  for (std::uint64_t seed = 1000; seed < 1050; ++seed) {
    auto p = oracle::random_box_problem(seed);
    BoxQp pb(dense_operator(p.a), p.b, p.l, p.u);
    Vector x0 = project(pb, p.x0);
    const double norm = dense_norm(p.a);

    auto run = [&](const char* name, std::vector<Vector>& xs) {
      SolverConfig cfg;
      cfg.strategy = parse_strategy(name);
      cfg.strategy.alpha_u = 1.7;
      cfg.norm_A = norm;
      cfg.rtol = 1e-11;
      cfg.atol = 1e-12;
      cfg.max_hessian_mults = 50000;
      cfg.monitor = [&xs](const StepEvent& ev) { xs.push_back(ev.x_after); };
      return solve(pb, x0, cfg);
    };
    std::vector<Vector> xf, xo;
    auto rf = run("fixed", xf);
    auto ro = run("gfgf-optapprox", xo);

    bool same = xf.size() == xo.size() && rf.x == ro.x &&
                rf.hessian_mults == ro.hessian_mults && rf.cg_steps == ro.cg_steps &&
                rf.expansion_steps == ro.expansion_steps &&
                rf.proportioning_steps == ro.proportioning_steps &&
                rf.gradient_splittings == ro.gradient_splittings &&
                rf.vector_updates == ro.vector_updates && rf.converged == ro.converged;
    if (same)
      for (std::size_t k = 0; k < xf.size(); ++k)
        if (!(xf[k] == xo[k])) {
          same = false;
          break;
        }
    if (!same) ++bad;
  }
  note << "50 seeded problems compared bitwise (iterates and counters)";
  return bad == 0;
}

// ---- criterion 5 -----------------------------------------------------

bool criterion_5(std::ostringstream& note) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(unit(rng) * 10);
    Vector l(n), u(n), x(n), g(n);
    for (int j = 0; j < n; ++j) {
      l[j] = unit(rng) < 0.25 ? -kInf : dist(rng);
      u[j] = unit(rng) < 0.25 ? kInf : (std::isfinite(l[j]) ? l[j] : -2.0) + 2.5 * unit(rng);
      const double r = unit(rng);
      if (r < 0.25 && std::isfinite(l[j]))
        x[j] = l[j];
      else if (r < 0.5 && std::isfinite(u[j]))
        x[j] = u[j];
      else {
        const double lo = std::isfinite(l[j]) ? l[j] : -2.0;
        const double hi = std::isfinite(u[j]) ? u[j] : 2.0;
        x[j] = lo + (hi - lo) * unit(rng);
      }
      g[j] = 4.0 * dist(rng);
    }
    BoxQp pb(dense_operator(Matrix::Identity(n, n)), Vector::Zero(n), l, u);
    const double alpha_bar = 0.05 + 2.0 * unit(rng);
    auto s = split_gradient(pb, x, g, alpha_bar);
    Vector lhs = project(pb, x - alpha_bar * s.free);
    Vector rhs = x - alpha_bar * s.reduced_free;
    const double diff = (lhs - rhs).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, diff);
    if (diff > 1e-14) ++violations;
  }
  note << "10000 randomized triples, worst component gap = " << worst;
  return violations == 0;
}

// ---- criterion 7 (+ feeds 6, 10) -------------------------------------

struct SvmOutcome {
  bool all_converged = true;
  std::map<std::string, std::int64_t> best;          // strategy -> min mults
  std::int64_t fixed_19 = -1;
  std::int64_t projcg = -1;
};

SvmOutcome run_svm_dataset(const std::string& path, Index samples, Index features,
                           CrossRunTallies& tally) {
  SvmOutcome out;
  LabeledDataset data = load_libsvm(path);
  if (data.sample_count() != samples || data.feature_count() != features)
    throw std::runtime_error(path + ": unexpected shape " + std::to_string(data.sample_count()) +
                             "x" + std::to_string(data.feature_count()));
  LabeledDataset augmented = augment_nobias(data, 1.0);
  BoxQp dual = build_dual(augmented, SvmLoss::l1, 1.0);
  const double norm = estimate_norm(*dual.hessian).value;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  Vector x0 = Vector::Constant(dual.dim(), 1.0 - 100.0 * eps);

  for (const auto& name : default_strategies()) {
    ExpansionStrategy strategy = parse_strategy(name);
    std::vector<double> grid =
        strategy.uses_alpha() ? default_alpha_grid() : std::vector<double>{1.0};
    for (double alpha_u : grid) {
      SolverConfig cfg;
      cfg.strategy = strategy;
      cfg.strategy.alpha_u = alpha_u;
      cfg.norm_A = norm;
      cfg.rtol = 1e-1;
      cfg.gamma = 1.0;
      cfg.max_hessian_mults = 50000;
      cfg.monitor = make_audit_monitor(tally, cfg.strategy, nullptr, alpha_u, norm);
      auto rep = solve(dual, x0, cfg);
      if (!rep.converged) out.all_converged = false;

      auto it = out.best.find(name);
      if (it == out.best.end() || rep.hessian_mults < it->second)
        out.best[name] = rep.hessian_mults;
      if (name == "fixed" && alpha_u == 1.9) out.fixed_19 = rep.hessian_mults;
      if (name == "projcg") out.projcg = rep.hessian_mults;
    }
  }
  return out;
}

bool criterion_7(CrossRunTallies& tally, const std::string& data_dir, std::ostringstream& note) {
  struct Dataset {
    const char* name;
    Index samples, features;
  };
  const std::vector<Dataset> names = {
      {"australian", 690, 14}, {"diabetes", 768, 8}, {"ionosphere", 351, 34}};
  const std::map<std::string, std::int64_t> reference_fixed19 = {
      {"australian", 195}, {"diabetes", 630}, {"ionosphere", 381}};
  const std::map<std::string, std::int64_t> reference_projcg = {
      {"australian", 83}, {"diabetes", 133}, {"ionosphere", 125}};

  bool hard_ok = true;
  for (const auto& [name, samples, features] : names) {
    SvmOutcome out;
    try {
      out = run_svm_dataset(data_dir + "/" + name, samples, features, tally);
    } catch (const std::exception& e) {
      note << "\n  " << name << ": FAILED to run (" << e.what() << ")";
      hard_ok = false;
      continue;
    }

    std::int64_t best_fixed = out.best.count("fixed") ? out.best["fixed"] : -1;
    std::int64_t best_opt = std::numeric_limits<std::int64_t>::max();
    for (const auto& [strategy, mults] : out.best)
      if (strategy.find("-opt") != std::string::npos &&
          strategy.find("optapprox") == std::string::npos)
        best_opt = std::min(best_opt, mults);

    const bool converged_ok = out.all_converged;
    const bool projcg_ok = out.projcg >= 0 && out.fixed_19 > 0 && out.projcg < out.fixed_19;
    const bool opt_ok = best_opt < best_fixed;
    if (!(converged_ok && projcg_ok && opt_ok)) hard_ok = false;

    auto pct = [](std::int64_t mine, std::int64_t ref) {
      return 100.0 * (static_cast<double>(mine) - static_cast<double>(ref)) /
             static_cast<double>(ref);
    };
    note << "\n  " << name << ": converged=" << (converged_ok ? "all" : "NOT ALL")
         << ", fixed@1.9 = " << out.fixed_19 << " (reference " << reference_fixed19.at(name) << ", "
         << pct(out.fixed_19, reference_fixed19.at(name)) << "%), projcg = " << out.projcg
         << " (reference " << reference_projcg.at(name) << ", " << pct(out.projcg, reference_projcg.at(name))
         << "%), best opt = " << best_opt << ", best fixed = " << best_fixed;
    note << (projcg_ok ? " [projcg < fixed@1.9 ok]" : " [projcg < fixed@1.9 VIOLATED]");
    note << (opt_ok ? " [best opt < best fixed ok]" : " [best opt < best fixed VIOLATED]");
  }
  note << "\n  soft target (reported, not gating): counts within +-30% of the reference values";
  return hard_ok;
}

// ---- criterion 8 -----------------------------------------------------

bool criterion_8(std::ostringstream& note) {
  Matrix a(2, 2);
  a << 5, 4, 4, 5;
  Vector b(2);
  b << 4, 5;
  Vector u(2);
  u << kInf, 0.0;
  BoxQp pb(dense_operator(a), b, Vector(), u);
  Vector x0(2);
  x0 << 1.2, -0.2;

  std::vector<StepEvent> events;
  SolverConfig cfg;
  cfg.strategy = parse_strategy("projcg");
  cfg.rtol = 1e-12;
  cfg.atol = 1e-12;
  cfg.monitor = [&](const StepEvent& ev) { events.push_back(ev); };
  auto rep = solve(pb, x0, cfg);

  Vector expected = oracle::enumerate_box_solution(a, b, pb.lower, pb.upper);
  auto f = [&](const Vector& x) { return 0.5 * x.dot(a * x) - x.dot(b); };

  const bool shape_ok = events.size() == 2 && events[0].type == StepType::expansion &&
                        events[1].type == StepType::cg;
  const bool cost_bump = shape_ok && f(events[0].x_after) > f(events[0].x_before);
  const bool solved = rep.converged && (rep.x - expected).lpNorm<Eigen::Infinity>() <= 1e-10;
  if (shape_ok)
    note << "projected CG raised the cost from " << f(events[0].x_before) << " to "
         << f(events[0].x_after) << ", then converged on the next iteration";
  else
    note << "unexpected step sequence (" << events.size() << " events)";
  return shape_ok && cost_bump && solved;
}

// ---- criterion 9 -----------------------------------------------------

bool criterion_9(std::ostringstream& note) {
  int bad = 0;
  double worst_x = 0.0, worst_feas = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index n = 5 + static_cast<Index>((seed * 7) % 26);  // 5..30
    const Index m = 1 + static_cast<Index>(seed % 3);         // 1..3
    BoxQp pb = generate_eq_toy(n, m, seed);

    SmalbeConfig cfg;
    cfg.inner.strategy = parse_strategy("projcg");
    cfg.inner.rtol = 1e-10;
    cfg.inner.atol = 1e-12;
    cfg.inner.max_hessian_mults = 100000;
    cfg.outer_rtol = 1e-8;
    cfg.max_outer = 200;
    auto rep = solve_equality(pb, project(pb, Vector::Zero(n)), cfg);

    Matrix dense(n, n);
    for (Index j = 0; j < n; ++j) {
      Vector ej = Vector::Zero(n);
      ej[j] = 1.0;
      dense.col(j) = pb.hessian->apply(ej);
    }
    Vector expected = oracle::equality_kkt_solution(dense, pb.rhs, *pb.eq_matrix, *pb.eq_rhs);

    const double feas_rel = rep.feasibility_norm / pb.eq_rhs->norm();
    const double gap = (rep.x - expected).lpNorm<Eigen::Infinity>();
    worst_feas = std::max(worst_feas, feas_rel);
    worst_x = std::max(worst_x, gap);
    if (!rep.converged || feas_rel > 1e-6 || gap > 1e-6) ++bad;
  }

  // Obstacle monotonicity stands in for the full-scale contact problem.
  bool monotone = true;
  SolverConfig cfg;
  cfg.strategy = parse_strategy("projcg");
  cfg.rtol = 1e-11;
  Vector prev;
  for (double obstacle : {-0.25, -0.12, -0.06, -0.03}) {
    BoxQp pb = generate_obstacle(7, 7, -30.0, obstacle);
    auto rep = solve(pb, project(pb, Vector::Zero(pb.dim())), cfg);
    if (!rep.converged) monotone = false;
    if (prev.size() > 0 && !((rep.x.array() >= prev.array() - 1e-9).all())) monotone = false;
    prev = rep.x;
  }

  note << "20 toys: worst ||Gx-e||/||e|| = " << worst_feas << ", worst |x - kkt|_inf = " << worst_x
       << "; obstacle monotonicity " << (monotone ? "holds" : "VIOLATED");
  return bad == 0 && monotone;
}

}  // namespace

int main() {
  std::string data_dir = MPRGP_DATA_DIR;
  if (const char* env = std::getenv("MPRGP_DATA_DIR")) data_dir = env;

  CrossRunTallies tally;
  int failures = 0;
  auto report = [&](int id, bool pass, const std::string& text) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion-" << id << ": " << text << "\n";
    if (!pass) ++failures;
  };

  {
    std::ostringstream note;
    bool ok = criterion_1(tally, note);
    report(1, ok, "box-QP solutions match the active-set enumeration oracle within 1e-8 (" +
                      note.str() + ")");
  }
  {
    std::ostringstream note;
    bool ok = criterion_2(note);
    report(2, ok, "unbounded solves coincide with reference CG to 1e-12 (" + note.str() + ")");
  }
  {
    std::ostringstream note;
    bool ok = criterion_3(note);
    report(3, ok,
           "fixed and optapprox(steplen=g^f) are bitwise identical (" + note.str() + ")");
  }
  {
    std::ostringstream note;
    bool ok = criterion_5(note);
    report(5, ok, "projection identity P(x - a g^f) = x - a g^r to 1e-14 (" + note.str() + ")");
  }

  std::ostringstream svm_note;
  bool svm_ok = criterion_7(tally, data_dir, svm_note);

  // criteria 4, 6, 10 aggregate over the criterion-1 and criterion-7 runs
  {
    std::ostringstream note;
    note << tally.chain_checks << " expansions audited, " << tally.chain_violations
         << " violations";
    report(4, tally.chain_checks > 0 && tally.chain_violations == 0,
           "step-length chain fixed <= optapprox <= opt under the true norm (" + note.str() +
               ")");
  }
  {
    std::ostringstream note;
    note << tally.step_events << " steps audited, " << tally.accounting_violations
         << " deviations, " << tally.degenerate_expansions << " degenerate expansions";
    report(6, tally.step_events > 0 && tally.accounting_violations == 0,
           "per-step Hessian counts match the operation table (" + note.str() + ")");
  }

  report(7, svm_ok,
         "SVM benchmarks: all strategies converge, projcg beats fixed@1.9, best opt beats best "
         "fixed" +
             svm_note.str());

  {
    std::ostringstream note;
    bool ok = criterion_8(note);
    report(8, ok, "projected CG cost increase then next-iteration convergence (" + note.str() +
                      ")");
  }
  {
    std::ostringstream note;
    bool ok = criterion_9(note);
    report(9, ok, "equality-constrained toys match the dense KKT oracle (" + note.str() + ")");
  }
  {
    std::ostringstream note;
    note << tally.monotonicity_checks << " steps audited, " << tally.monotonicity_violations
         << " violations";
    report(10, tally.monotonicity_checks > 0 && tally.monotonicity_violations == 0,
           "expansions never shrink and proportioning never grows the active set (" + note.str() +
               ")");
  }

  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " (" << failures
            << " failures)\n";
  return failures;
}
