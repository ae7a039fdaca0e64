#pragma once

#include "mprgp/problem.hpp"

#include <functional>
#include <string>

namespace mprgp {

enum class ExpansionKind { fixed, optapprox, opt, projcg };

/// Which gradient splitting feeds a role in the expansion step:
/// the free gradient g^f or the reduced free gradient g^r.
enum class GradientChoice { free, reduced };

/// Selects the expansion step: the step-length rule, the vector the
/// step length is computed from, the line-search direction, and the
/// step-length multiplier alpha_u in (0,2]. `fixed` ignores the vector
/// choices (its projected g^f step equals the g^r step); `projcg`
/// carries no parameters at all.
struct ExpansionStrategy {
  ExpansionKind kind = ExpansionKind::projcg;
  GradientChoice steplen_vector = GradientChoice::reduced;
  GradientChoice direction_vector = GradientChoice::free;
  double alpha_u = 1.0;

  bool uses_alpha() const { return kind != ExpansionKind::projcg; }
  /// True when the strategy needs a spectral-norm estimate, either for
  /// the step length itself or to build the reduced free gradient.
  bool needs_norm() const;
};

/// Canonical name: "fixed", "projcg", or "<direction><steplen>-<kind>"
/// with gf/gr tags, e.g. "gfgr-opt" = direction g^f, step length from
/// g^r.
std::string strategy_name(const ExpansionStrategy& strategy);

/// Inverse of strategy_name. Also accepts the "<dir><len>-fixed"
/// spelling used in result tables; alpha_u keeps its default and is set
/// separately. Throws on unknown names.
ExpansionStrategy parse_strategy(const std::string& name);

enum class StepType { cg, expansion, proportioning };

const char* step_type_name(StepType type);

/// Per-step observation handed to an optional monitor: which branch
/// ran, how many Hessian applications it consumed, the active sets
/// before/after, and the expansion internals needed to audit step
/// lengths. Populated only when a monitor is installed.
struct StepEvent {
  StepType type = StepType::cg;
  std::int64_t hessian_mults = 0;
  Vector x_before;
  Vector x_after;
  ActiveSetSnapshot active_before;
  ActiveSetSnapshot active_after;
  // Expansion-only payload (empty/zero otherwise). For projcg, and when
  // the line search is skipped because the free gradient vanished at
  // the half point, the fields stay empty.
  Vector x_half;
  Vector steplen_vector;
  Vector gradient_at_half;
  double step_length = 0.0;
};

using StepMonitor = std::function<void(const StepEvent&)>;

struct SolverConfig {
  double gamma = 1.0;          // proportionality constant
  double rtol = 1e-6;          // stop at ||g^P|| <= rtol * ||b||
  double atol = 0.0;           // absolute fallback
  std::int64_t max_hessian_mults = 100000;
  ExpansionStrategy strategy;
  double norm_A = 0.0;         // spectral norm estimate; 0 = not supplied
  /// Replaces the default stopping rule when set; receives the current
  /// iterate and ||g^P||. Used by the augmented-Lagrangian outer loop.
  std::function<bool(const Vector&, double)> stop_override;
  StepMonitor monitor;
};

struct SolveReport {
  Vector x;
  bool converged = false;
  double projected_gradient_norm = 0.0;
  double final_cost = 0.0;
  std::int64_t hessian_mults = 0;
  std::int64_t cg_steps = 0;
  std::int64_t expansion_steps = 0;
  std::int64_t proportioning_steps = 0;
  std::int64_t outer_iterations = 0;
  std::int64_t dot_products = 0;
  std::int64_t vector_updates = 0;
  std::int64_t gradient_splittings = 0;
  // Hessian applications attributed per branch; setup is the initial
  // explicit gradient. Their sum equals hessian_mults.
  std::int64_t setup_mults = 0;
  std::int64_t cg_mults = 0;
  std::int64_t expansion_mults = 0;
  std::int64_t proportioning_mults = 0;

  std::int64_t inner_iterations() const {
    return cg_steps + expansion_steps + proportioning_steps;
  }
};

/// Largest step t >= 0 keeping x - t*d inside the bounds; +inf when no
/// bound is approached.
double max_feasible_step(const Vector& x, const Vector& d, const Vector& lower,
                         const Vector& upper);

/// Active-set solver for box-constrained QPs: proportional iterates
/// take a CG step when the full step stays feasible and an expansion
/// step (per the configured strategy) otherwise; non-proportional
/// iterates take a proportioning step along the chopped gradient.
/// Requires a feasible x0 and a problem without equality constraints.
SolveReport solve(const BoxQp& problem, const Vector& x0, const SolverConfig& config);

}  // namespace mprgp
