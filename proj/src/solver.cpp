#include "mprgp/solver.hpp"

#include <cassert>
#include <cmath>

namespace mprgp {

bool ExpansionStrategy::needs_norm() const {
  switch (kind) {
    case ExpansionKind::fixed:
    case ExpansionKind::optapprox:
      return true;
    case ExpansionKind::opt:
      return steplen_vector == GradientChoice::reduced ||
             direction_vector == GradientChoice::reduced;
    case ExpansionKind::projcg:
      return false;
  }
  return false;
}

namespace {

const char* choice_tag(GradientChoice c) {
  return c == GradientChoice::free ? "gf" : "gr";
}

}  // namespace

std::string strategy_name(const ExpansionStrategy& strategy) {
  switch (strategy.kind) {
    case ExpansionKind::fixed:
      return "fixed";
    case ExpansionKind::projcg:
      return "projcg";
    case ExpansionKind::optapprox:
    case ExpansionKind::opt:
      return std::string(choice_tag(strategy.direction_vector)) +
             choice_tag(strategy.steplen_vector) +
             (strategy.kind == ExpansionKind::opt ? "-opt" : "-optapprox");
  }
  throw std::logic_error("unreachable strategy kind");
}

ExpansionStrategy parse_strategy(const std::string& name) {
  ExpansionStrategy s;
  if (name == "fixed") {
    s.kind = ExpansionKind::fixed;
    return s;
  }
  if (name == "projcg") {
    s.kind = ExpansionKind::projcg;
    return s;
  }
  const auto dash = name.find('-');
  if (dash == 4) {
    const std::string vectors = name.substr(0, 4);
    const std::string kind = name.substr(5);
    const std::string dir = vectors.substr(0, 2);
    const std::string len = vectors.substr(2, 2);
    if ((dir == "gf" || dir == "gr") && (len == "gf" || len == "gr")) {
      s.direction_vector = dir == "gf" ? GradientChoice::free : GradientChoice::reduced;
      s.steplen_vector = len == "gf" ? GradientChoice::free : GradientChoice::reduced;
      if (kind == "opt") {
        s.kind = ExpansionKind::opt;
        return s;
      }
      if (kind == "optapprox") {
        s.kind = ExpansionKind::optapprox;
        return s;
      }
      if (kind == "fixed") {
        // Result-table spelling such as "grgr-fixed"; the vector tags are
        // irrelevant for the fixed step.
        s.kind = ExpansionKind::fixed;
        return s;
      }
    }
  }
  throw std::invalid_argument("unknown expansion strategy: " + name);
}

const char* step_type_name(StepType type) {
  switch (type) {
    case StepType::cg:
      return "cg";
    case StepType::expansion:
      return "expansion";
    case StepType::proportioning:
      return "proportioning";
  }
  return "?";
}

double max_feasible_step(const Vector& x, const Vector& d, const Vector& lower,
                         const Vector& upper) {
  double step = kInf;
  for (Index j = 0; j < x.size(); ++j) {
    if (d[j] > 0.0)
      step = std::min(step, (x[j] - lower[j]) / d[j]);
    else if (d[j] < 0.0)
      step = std::min(step, (x[j] - upper[j]) / d[j]);
  }
  return step;
}

namespace {

struct Split {
  GradientSplit parts;
  double free_sq = 0.0;
  double chopped_sq = 0.0;
};

class Mprgp {
 public:
  Mprgp(const BoxQp& pb, const Vector& x0, const SolverConfig& cfg)
      : pb_(pb), cfg_(cfg), x_(x0), start_count_(pb.hessian->mult_count()) {
    if (pb_.has_equalities())
      throw std::invalid_argument("solve: equality constraints require the outer loop");
    if (!pb_.is_feasible(x0)) throw std::invalid_argument("solve: infeasible starting point");
    if (!(cfg_.gamma > 0.0)) throw std::invalid_argument("solve: gamma must be positive");
    if (!(cfg_.rtol > 0.0) && !(cfg_.atol > 0.0))
      throw std::invalid_argument("solve: either rtol or atol must be positive");
    if (cfg_.max_hessian_mults < 1) throw std::invalid_argument("solve: budget must be at least 1");
    const auto& st = cfg_.strategy;
    if (st.uses_alpha() && !(st.alpha_u > 0.0 && st.alpha_u <= 2.0))
      throw std::invalid_argument("solve: alpha_u must lie in (0, 2]");
    if (st.needs_norm() && !(cfg_.norm_A > 0.0))
      throw std::invalid_argument("solve: strategy '" + strategy_name(st) +
                                  "' needs a positive norm estimate");
    // Reference step length: the classical fixed expansion step, which
    // also anchors the reduced free gradient even under adaptive step
    // lengths. Unused (but required positive) by strategies that never
    // touch g^r or the fixed length.
    if (st.needs_norm())
      alpha_ref_ = st.alpha_u / cfg_.norm_A;
    else
      alpha_ref_ = cfg_.norm_A > 0.0 ? 1.0 / cfg_.norm_A : 1.0;
    stop_threshold_ = std::max(cfg_.rtol * pb_.rhs.norm(), cfg_.atol);
  }

  SolveReport run() {
    g_ = pb_.hessian->apply(x_) - pb_.rhs;
    rep_.setup_mults = 1;
    rep_.vector_updates += 1;
    refresh_split();
    p_ = split_.parts.free;
    rep_.vector_updates += 1;

    while (true) {
      if (stopped()) {
        rep_.converged = true;
        break;
      }
      if (used_mults() >= cfg_.max_hessian_mults) break;
      if (split_.chopped_sq <= cfg_.gamma * cfg_.gamma * split_.free_sq)
        proportional_step();
      else
        proportioning();
    }

    rep_.x = x_;
    rep_.projected_gradient_norm = split_.parts.projected_norm;
    rep_.final_cost = 0.5 * (x_.dot(g_) - x_.dot(pb_.rhs));
    rep_.hessian_mults = used_mults();
    assert(rep_.hessian_mults ==
           rep_.setup_mults + rep_.cg_mults + rep_.expansion_mults + rep_.proportioning_mults);
    return rep_;
  }

 private:
  std::int64_t used_mults() const { return pb_.hessian->mult_count() - start_count_; }

  bool stopped() const {
    if (cfg_.stop_override) return cfg_.stop_override(x_, split_.parts.projected_norm);
    return split_.parts.projected_norm <= stop_threshold_;
  }

  void refresh_split() {
    split_.parts = split_gradient(pb_, x_, g_, alpha_ref_);
    split_.free_sq = split_.parts.free.squaredNorm();
    split_.chopped_sq = split_.parts.chopped.squaredNorm();
    rep_.gradient_splittings += 1;
  }

  const Vector& chosen(GradientChoice c) const {
    return c == GradientChoice::free ? split_.parts.free : split_.parts.reduced_free;
  }

  /// x <- x - t*d. Components whose exit step equals t are assigned
  /// their bound value exactly; the rest are clamped only to absorb
  /// roundoff crossings (they stay interior in exact arithmetic).
  void feasible_update(double t, const Vector& d) {
    for (Index j = 0; j < x_.size(); ++j) {
      if (d[j] == 0.0) continue;
      const double exit_step =
          d[j] > 0.0 ? (x_[j] - pb_.lower[j]) / d[j] : (x_[j] - pb_.upper[j]) / d[j];
      if (exit_step <= t) {
        x_[j] = d[j] > 0.0 ? pb_.lower[j] : pb_.upper[j];
      } else {
        const double moved = x_[j] - t * d[j];
        x_[j] = std::min(pb_.upper[j], std::max(pb_.lower[j], moved));
      }
    }
    rep_.vector_updates += 1;
  }

  void begin_event(StepEvent& ev) {
    if (!cfg_.monitor) return;
    ev.x_before = x_;
    ev.active_before = active_set(pb_, x_);
    ev.hessian_mults = used_mults();
  }

  void finish_event(StepEvent& ev, StepType type) {
    if (!cfg_.monitor) return;
    ev.type = type;
    ev.x_after = x_;
    ev.active_after = active_set(pb_, x_);
    ev.hessian_mults = used_mults() - ev.hessian_mults;
    cfg_.monitor(ev);
  }

  void proportional_step() {
    if (p_.squaredNorm() == 0.0) p_ = split_.parts.free;  // conjugacy restart

    StepEvent ev;
    begin_event(ev);
    const std::int64_t before = used_mults();

    Vector ap = pb_.hessian->apply(p_);
    const double pap = p_.dot(ap);
    const double gp = g_.dot(p_);
    rep_.dot_products += 2;
    if (pap <= 0.0)
      throw std::runtime_error(
          "solve: direction of non-positive curvature (p'Ap <= 0); the operator is not positive "
          "definite on the search space");
    const double alpha_cg = gp / pap;
    const double alpha_f = max_feasible_step(x_, p_, pb_.lower, pb_.upper);

    if (alpha_cg <= alpha_f) {
      cg_step(alpha_cg, ap, pap);
      rep_.cg_mults += used_mults() - before;
      finish_event(ev, StepType::cg);
      return;
    }

    if (cfg_.strategy.kind == ExpansionKind::projcg)
      projcg_expansion(alpha_cg);
    else
      expansion(alpha_f, ap, ev);
    rep_.expansion_mults += used_mults() - before;
    finish_event(ev, StepType::expansion);
  }

  void cg_step(double alpha_cg, const Vector& ap, double pap) {
    feasible_update(alpha_cg, p_);
    g_ -= alpha_cg * ap;
    rep_.vector_updates += 1;
    refresh_split();
    const double beta = ap.dot(split_.parts.free) / pap;
    rep_.dot_products += 1;
    p_ = split_.parts.free - beta * p_;
    rep_.vector_updates += 1;
    rep_.cg_steps += 1;
  }

  void expansion(double alpha_f, const Vector& ap, StepEvent& ev) {
    // Half step to the boundary, gradient by recurrence.
    feasible_update(alpha_f, p_);
    g_ -= alpha_f * ap;
    rep_.vector_updates += 1;
    refresh_split();

    const Vector& d = chosen(cfg_.strategy.steplen_vector);
    const double dd = d.squaredNorm();
    if (dd == 0.0) {
      // Dead line search (the free gradient vanished at the half
      // point): keep the half-step iterate and refresh explicitly.
      g_ = pb_.hessian->apply(x_) - pb_.rhs;
      rep_.vector_updates += 1;
      refresh_split();
    } else {
      double alpha_bar = 0.0;
      switch (cfg_.strategy.kind) {
        case ExpansionKind::fixed:
          alpha_bar = alpha_ref_;
          break;
        case ExpansionKind::optapprox:
          alpha_bar = alpha_ref_ * (d.dot(g_) / dd);
          rep_.dot_products += 2;
          break;
        case ExpansionKind::opt: {
          Vector ad = pb_.hessian->apply(d);
          const double dad = d.dot(ad);
          rep_.dot_products += 2;
          if (dad <= 0.0)
            throw std::runtime_error("solve: expansion direction of non-positive curvature");
          alpha_bar = cfg_.strategy.alpha_u * (d.dot(g_) / dad);
          break;
        }
        case ExpansionKind::projcg:
          throw std::logic_error("projcg handled separately");
      }
      if (cfg_.monitor) {
        ev.x_half = x_;
        ev.steplen_vector = d;
        ev.gradient_at_half = g_;
        ev.step_length = alpha_bar;
      }
      const Vector& dir = chosen(cfg_.strategy.direction_vector);
      x_ = project(pb_, x_ - alpha_bar * dir);
      rep_.vector_updates += 1;
      g_ = pb_.hessian->apply(x_) - pb_.rhs;
      rep_.vector_updates += 1;
      refresh_split();
    }
    p_ = split_.parts.free;
    rep_.vector_updates += 1;
    rep_.expansion_steps += 1;
  }

  void projcg_expansion(double alpha_cg) {
    x_ = project(pb_, x_ - alpha_cg * p_);
    rep_.vector_updates += 1;
    g_ = pb_.hessian->apply(x_) - pb_.rhs;
    rep_.vector_updates += 1;
    refresh_split();
    p_ = split_.parts.free;
    rep_.vector_updates += 1;
    rep_.expansion_steps += 1;
  }

  void proportioning() {
    StepEvent ev;
    begin_event(ev);
    const std::int64_t before = used_mults();

    const Vector gc = split_.parts.chopped;
    Vector agc = pb_.hessian->apply(gc);
    const double gcagc = gc.dot(agc);
    const double ggc = g_.dot(gc);
    rep_.dot_products += 2;
    if (gcagc <= 0.0)
      throw std::runtime_error("solve: chopped gradient direction of non-positive curvature");
    // Optimal steepest-descent length, clipped so released components
    // cannot fly across the box to the opposite bound.
    const double alpha_f = max_feasible_step(x_, gc, pb_.lower, pb_.upper);
    const double alpha = std::min(ggc / gcagc, alpha_f);
    feasible_update(alpha, gc);
    g_ -= alpha * agc;
    rep_.vector_updates += 1;
    refresh_split();
    p_ = split_.parts.free;
    rep_.vector_updates += 1;
    rep_.proportioning_steps += 1;

    rep_.proportioning_mults += used_mults() - before;
    finish_event(ev, StepType::proportioning);
  }

  const BoxQp& pb_;
  const SolverConfig& cfg_;
  Vector x_;
  Vector g_;
  Vector p_;
  Split split_;
  double alpha_ref_ = 1.0;
  double stop_threshold_ = 0.0;
  std::int64_t start_count_ = 0;
  SolveReport rep_;
};

}  // namespace

SolveReport solve(const BoxQp& problem, const Vector& x0, const SolverConfig& config) {
  return Mprgp(problem, x0, config).run();
}

}  // namespace mprgp
