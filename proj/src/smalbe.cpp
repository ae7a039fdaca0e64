#include "mprgp/smalbe.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace mprgp {

namespace {

void accumulate(SolveReport& total, const SolveReport& part) {
  total.x = part.x;
  total.converged = part.converged;
  total.projected_gradient_norm = part.projected_gradient_norm;
  total.final_cost = part.final_cost;
  total.hessian_mults += part.hessian_mults;
  total.cg_steps += part.cg_steps;
  total.expansion_steps += part.expansion_steps;
  total.proportioning_steps += part.proportioning_steps;
  total.dot_products += part.dot_products;
  total.vector_updates += part.vector_updates;
  total.gradient_splittings += part.gradient_splittings;
  total.setup_mults += part.setup_mults;
  total.cg_mults += part.cg_mults;
  total.expansion_mults += part.expansion_mults;
  total.proportioning_mults += part.proportioning_mults;
}

}  // namespace

SmalbeReport solve_equality(const BoxQp& problem, const Vector& x0, const SmalbeConfig& config) {
  SmalbeReport rep;
  if (!problem.has_equalities()) {
    rep.x = x0;
    rep.inner = solve(problem, x0, config.inner);
    rep.x = rep.inner.x;
    rep.converged = rep.inner.converged;
    rep.multipliers = Vector(0);
    return rep;
  }

  const Matrix& G = *problem.eq_matrix;
  const Vector& e = *problem.eq_rhs;
  const Index m = G.rows();
  if (Eigen::ColPivHouseholderQR<Matrix>(G).rank() < m)
    throw std::invalid_argument("solve_equality: equality matrix is rank deficient");
  if (!problem.is_feasible(x0))
    throw std::invalid_argument("solve_equality: starting point violates the box");
  if (!(config.M_reduction > 1.0))
    throw std::invalid_argument("solve_equality: M_reduction must exceed 1");
  if (!(config.outer_rtol > 0.0))
    throw std::invalid_argument("solve_equality: outer_rtol must be positive");

  const auto& base = problem.hessian;
  auto overhead_since = [&](std::int64_t mark) { return base->mult_count() - mark; };

  double norm_A = config.norm_A;
  if (!(norm_A > 0.0)) {
    const std::int64_t mark = base->mult_count();
    norm_A = estimate_norm(*base).value;
    rep.overhead_mults += overhead_since(mark);
  }
  double M = config.M0 > 0.0 ? config.M0 : 100.0 * norm_A;
  const double eta = config.eta > 0.0 ? config.eta : 1.1 * norm_A;

  const double b_norm = problem.rhs.norm();
  const double gp_goal = config.outer_rtol * b_norm;
  // The inner cap eta is stated on the scale of ||A||; rescale it to
  // gradient-norm units commensurate with the final tolerance.
  const double eta_abs = eta * config.outer_rtol * b_norm / norm_A;
  const double e_norm = e.norm();
  const double feas_goal = e_norm > 0.0 ? config.outer_rtol * e_norm : config.outer_rtol;

  Vector x = x0;
  Vector mu = Vector::Zero(m);
  double lagrangian_prev = 0.0;

  auto lagrangian = [&](const Vector& xv, const Vector& muv, double Mv) {
    const std::int64_t mark = base->mult_count();
    const double f = cost(problem, xv);
    rep.overhead_mults += overhead_since(mark);
    const Vector r = G * xv - e;
    return f + muv.dot(r) + 0.5 * Mv * r.squaredNorm();
  };

  std::shared_ptr<const AugmentedOperator> aug;
  double aug_norm = 0.0;
  double aug_norm_for_M = -1.0;

  for (int outer = 1; outer <= config.max_outer; ++outer) {
    if (!aug || M != aug_norm_for_M) {
      if (aug) rep.eq_gram_mults += aug->gram_mult_count();
      aug = std::make_shared<AugmentedOperator>(base, G, M);
      if (config.inner.strategy.needs_norm()) {
        const std::int64_t mark = base->mult_count();
        aug_norm = estimate_norm(*aug).value;
        rep.overhead_mults += overhead_since(mark);
      } else {
        aug_norm = norm_A + M * G.squaredNorm();  // crude bound, only anchors g^r
      }
      aug_norm_for_M = M;
    }

    Vector inner_rhs = problem.rhs - G.transpose() * mu + M * (G.transpose() * e);
    BoxQp inner_problem(aug, inner_rhs, problem.lower, problem.upper);

    SolverConfig inner_cfg = config.inner;
    inner_cfg.norm_A = aug_norm;
    inner_cfg.stop_override = [&](const Vector& xv, double gp) {
      const double feas = (G * xv - e).norm();
      return gp <= std::max(std::min(M * feas, eta_abs), gp_goal);
    };

    SolveReport inner = solve(inner_problem, x, inner_cfg);
    accumulate(rep.inner, inner);
    x = inner.x;
    rep.outer_iterations = outer;

    const Vector residual = G * x - e;
    const double feas = residual.norm();
    rep.feasibility_norm = feas;

    const double lagrangian_now = lagrangian(x, mu, M);

    mu += M * residual;

    if (inner.projected_gradient_norm <= gp_goal && feas <= feas_goal) {
      rep.converged = true;
      break;
    }

    if (outer > 1 && lagrangian_now <= lagrangian_prev + 0.5 * M * feas * feas) {
      M /= config.M_reduction;
      ++rep.penalty_reductions;
    }
    lagrangian_prev = lagrangian_now;
  }

  rep.final_penalty = M;
  rep.x = x;
  rep.multipliers = mu;
  if (aug) rep.eq_gram_mults += aug->gram_mult_count();
  return rep;
}

}  // namespace mprgp
