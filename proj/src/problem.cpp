#include "mprgp/problem.hpp"

#include <algorithm>
#include <cmath>

namespace mprgp {

BoxQp::BoxQp(OperatorPtr hessian_, Vector rhs_)
    : BoxQp(std::move(hessian_), std::move(rhs_), Vector(), Vector()) {}

BoxQp::BoxQp(OperatorPtr hessian_, Vector rhs_, Vector lower_, Vector upper_)
    : hessian(std::move(hessian_)), rhs(std::move(rhs_)), lower(std::move(lower_)), upper(std::move(upper_)) {
  if (lower.size() == 0) lower = Vector::Constant(rhs.size(), -kInf);
  if (upper.size() == 0) upper = Vector::Constant(rhs.size(), kInf);
  validate();
}

BoxQp::BoxQp(OperatorPtr hessian_, Vector rhs_, Vector lower_, Vector upper_, Matrix eq_matrix_,
             Vector eq_rhs_)
    : BoxQp(std::move(hessian_), std::move(rhs_), std::move(lower_), std::move(upper_)) {
  eq_matrix = std::move(eq_matrix_);
  eq_rhs = std::move(eq_rhs_);
  validate();
}

bool BoxQp::unconstrained() const {
  return !has_equalities() && (lower.array() == -kInf).all() && (upper.array() == kInf).all();
}

bool BoxQp::is_feasible(const Vector& x) const {
  if (x.size() != dim()) return false;
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

void BoxQp::validate() const {
  if (!hessian) throw std::invalid_argument("problem requires a Hessian operator");
  const Index n = rhs.size();
  if (hessian->dim() != n) throw std::invalid_argument("rhs length does not match operator dimension");
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("bound vectors must have the problem dimension");
  for (Index j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]))
      throw std::invalid_argument("bounds must not contain NaN");
    if (std::isfinite(lower[j]) && std::isfinite(upper[j]) && lower[j] > upper[j])
      throw std::invalid_argument("lower bound exceeds upper bound");
  }
  if (eq_matrix.has_value() != eq_rhs.has_value())
    throw std::invalid_argument("equality matrix and rhs must be given together");
  if (eq_matrix) {
    if (eq_matrix->cols() != n)
      throw std::invalid_argument("equality matrix column count does not match dimension");
    if (eq_matrix->rows() != eq_rhs->size())
      throw std::invalid_argument("equality matrix row count does not match equality rhs");
  }
}

bool ActiveSetSnapshot::contains_lower(Index j) const {
  return std::binary_search(at_lower.begin(), at_lower.end(), j);
}

bool ActiveSetSnapshot::contains_upper(Index j) const {
  return std::binary_search(at_upper.begin(), at_upper.end(), j);
}

double cost(const BoxQp& problem, const Vector& x) {
  if (x.size() != problem.dim()) throw std::invalid_argument("cost: dimension mismatch");
  Vector ax = problem.hessian->apply(x);
  return 0.5 * x.dot(ax) - x.dot(problem.rhs);
}

Vector gradient(const BoxQp& problem, const Vector& x) {
  if (x.size() != problem.dim()) throw std::invalid_argument("gradient: dimension mismatch");
  return problem.hessian->apply(x) - problem.rhs;
}

Vector project(const BoxQp& problem, const Vector& x) {
  if (x.size() != problem.dim()) throw std::invalid_argument("project: dimension mismatch");
  Vector out(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    if (x[j] < problem.lower[j])
      out[j] = problem.lower[j];
    else if (x[j] > problem.upper[j])
      out[j] = problem.upper[j];
    else
      out[j] = x[j];
  }
  return out;
}

namespace {

void require_feasible(const BoxQp& problem, const Vector& x, const char* who) {
  if (x.size() != problem.dim()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  if (!problem.is_feasible(x)) throw std::invalid_argument(std::string(who) + ": infeasible point");
}

}  // namespace

GradientSplit split_gradient(const BoxQp& problem, const Vector& x, const Vector& g,
                             double alpha_bar) {
  require_feasible(problem, x, "split_gradient");
  if (g.size() != x.size()) throw std::invalid_argument("split_gradient: gradient dimension mismatch");
  if (!(alpha_bar > 0.0)) throw std::invalid_argument("split_gradient: alpha_bar must be positive");

  const Index n = x.size();
  GradientSplit s;
  s.free = Vector::Zero(n);
  s.reduced_free = Vector::Zero(n);
  s.chopped = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    const double l = problem.lower[j];
    const double u = problem.upper[j];
    const bool at_l = x[j] == l;
    const bool at_u = x[j] == u;
    if (at_l && at_u) {
      // Equal bounds: permanently active, excluded from the chopped part.
      continue;
    }
    if (at_l) {
      s.chopped[j] = std::min(g[j], 0.0);
    } else if (at_u) {
      s.chopped[j] = std::max(g[j], 0.0);
    } else {
      s.free[j] = g[j];
      if (g[j] > 0.0)
        s.reduced_free[j] = std::min((x[j] - l) / alpha_bar, g[j]);
      else
        s.reduced_free[j] = std::max((x[j] - u) / alpha_bar, g[j]);
    }
  }
  s.projected_norm = std::sqrt(s.free.squaredNorm() + s.chopped.squaredNorm());
  return s;
}

ActiveSetSnapshot active_set(const BoxQp& problem, const Vector& x) {
  require_feasible(problem, x, "active_set");
  ActiveSetSnapshot snap;
  for (Index j = 0; j < x.size(); ++j) {
    if (x[j] == problem.lower[j]) snap.at_lower.push_back(j);
    if (x[j] == problem.upper[j]) snap.at_upper.push_back(j);
  }
  return snap;
}

}  // namespace mprgp
