#pragma once

#include "mprgp/solver.hpp"

namespace mprgp {

/// Parameters of the augmented-Lagrangian outer loop. The customary
/// choices scale with the spectral norm of the Hessian: M0 = 100*||A||
/// and eta = 1.1*||A||, with M divided by 10 whenever the Lagrangian
/// decrease test fires.
struct SmalbeConfig {
  double M0 = 0.0;             // initial penalty; 0 = derive as 100*norm_A
  double eta = 0.0;            // inner-tolerance cap; 0 = derive as 1.1*norm_A
  double M_reduction = 10.0;   // divisor applied to M
  double outer_rtol = 1e-6;    // relative to ||b|| (gradient) and ||e|| (feasibility)
  int max_outer = 100;
  SolverConfig inner;          // strategy, gamma, inner budget; stop rule is replaced
  double norm_A = 0.0;         // spectral norm of the *base* Hessian; 0 = estimate
};

struct SmalbeReport {
  Vector x;
  Vector multipliers;
  bool converged = false;
  std::int64_t outer_iterations = 0;
  double feasibility_norm = 0.0;
  int penalty_reductions = 0;   // times the Lagrangian-decrease test fired
  double final_penalty = 0.0;
  /// Aggregate over all inner solves: counters are summed, the iterate
  /// fields come from the last one.
  SolveReport inner;
  /// Hessian applications spent on spectral-norm estimates and
  /// Lagrangian evaluations; kept out of inner.hessian_mults the same
  /// way published operation counts exclude eigenvalue estimation.
  std::int64_t overhead_mults = 0;
  std::int64_t eq_gram_mults = 0;  // G^T G products inside the augmented operator
};

/// Solves min 1/2 x'Ax - x'b s.t. l <= x <= u, Gx = e by the M-variant
/// augmented-Lagrangian loop: repeatedly minimizes the augmented
/// Lagrangian over the box with the inner solver (warm-started, stopped
/// at ||g^P|| <= min(M*||Gx-e||, eta_abs)), updates mu <- mu + M(Gx-e),
/// and divides M by M_reduction when the Lagrangian decrease test
/// L_k <= L_{k-1} + (M/2)||Gx_k-e||^2 holds. Requires G of full row
/// rank. With no equality constraints this degrades to a single plain
/// solve.
SmalbeReport solve_equality(const BoxQp& problem, const Vector& x0, const SmalbeConfig& config);

}  // namespace mprgp
