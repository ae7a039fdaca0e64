#pragma once

#include "mprgp/linear_operator.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace mprgp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Convex box-constrained QP  min 1/2 x'Ax - x'b  s.t. l <= x <= u,
/// optionally with equality constraints G x = e handled by the outer
/// augmented-Lagrangian loop. Absent bounds are stored as +-infinity.
struct BoxQp {
  OperatorPtr hessian;
  Vector rhs;
  Vector lower;  // size n, -inf where absent
  Vector upper;  // size n, +inf where absent
  std::optional<Matrix> eq_matrix;
  std::optional<Vector> eq_rhs;

  BoxQp(OperatorPtr hessian_, Vector rhs_);
  BoxQp(OperatorPtr hessian_, Vector rhs_, Vector lower_, Vector upper_);
  BoxQp(OperatorPtr hessian_, Vector rhs_, Vector lower_, Vector upper_,
        Matrix eq_matrix_, Vector eq_rhs_);

  Index dim() const { return rhs.size(); }
  bool has_equalities() const { return eq_matrix.has_value() && eq_matrix->rows() > 0; }
  bool unconstrained() const;
  bool is_feasible(const Vector& x) const;

  /// Validates bound ordering and equality-block consistency; throws on
  /// violation. Called by the constructors.
  void validate() const;
};

/// The component-wise splitting of a gradient relative to the bounds:
/// free part (zeroed on active components), reduced free part (free
/// part capped so a step of length alpha_bar stays feasible), chopped
/// part (the outward-pointing gradient on active components), and the
/// norm of their sum g^P = g^f + g^c.
struct GradientSplit {
  Vector free;
  Vector reduced_free;
  Vector chopped;
  double projected_norm = 0.0;
};

struct ActiveSetSnapshot {
  std::vector<Index> at_lower;
  std::vector<Index> at_upper;

  std::size_t size() const { return at_lower.size() + at_upper.size(); }
  bool contains_lower(Index j) const;
  bool contains_upper(Index j) const;
};

/// 1/2 x'Ax - x'b; exactly one operator application.
double cost(const BoxQp& problem, const Vector& x);

/// Ax - b; exactly one operator application.
Vector gradient(const BoxQp& problem, const Vector& x);

/// Component-wise clamp onto the box. Bound values are assigned
/// exactly, never recomputed arithmetically.
Vector project(const BoxQp& problem, const Vector& x);

/// Splits g at the feasible point x. Bound membership uses exact
/// floating-point equality with l_j / u_j; the solver only ever writes
/// exact bound values, so the comparison is reliable. `alpha_bar` is
/// the fixed reference step entering the reduced-free formula.
GradientSplit split_gradient(const BoxQp& problem, const Vector& x, const Vector& g,
                             double alpha_bar);

/// Index sets of components sitting exactly on a bound.
ActiveSetSnapshot active_set(const BoxQp& problem, const Vector& x);

}  // namespace mprgp
