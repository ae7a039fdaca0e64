#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>

namespace mprgp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

/// Matrix-free symmetric linear operator. Every apply() bumps a
/// multiplication counter; that counter is the cost metric all solver
/// reports are built on, so implementations must route every product
/// through apply().
class LinearOperator {
 public:
  explicit LinearOperator(Index dim) : dim_(dim) {
    if (dim <= 0) throw std::invalid_argument("operator dimension must be positive");
  }
  virtual ~LinearOperator() = default;

  LinearOperator(const LinearOperator&) = delete;
  LinearOperator& operator=(const LinearOperator&) = delete;

  Index dim() const { return dim_; }

  Vector apply(const Vector& v) const {
    if (v.size() != dim_)
      throw std::invalid_argument("operator/vector dimension mismatch");
    count_.fetch_add(1, std::memory_order_relaxed);
    return apply_impl(v);
  }

  /// Total number of applications so far. Wrappers that delegate the
  /// actual product to a base operator override this to report the
  /// base count.
  virtual std::int64_t mult_count() const {
    return count_.load(std::memory_order_relaxed);
  }

 protected:
  virtual Vector apply_impl(const Vector& v) const = 0;

 private:
  Index dim_;
  mutable std::atomic<std::int64_t> count_{0};
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

/// Wraps a dense symmetric matrix.
class DenseOperator final : public LinearOperator {
 public:
  /// Throws if the matrix is not square or not symmetric to 1e-12
  /// relative.
  explicit DenseOperator(Matrix matrix);

  const Matrix& matrix() const { return matrix_; }

 protected:
  Vector apply_impl(const Vector& v) const override { return matrix_ * v; }

 private:
  Matrix matrix_;
};

/// Implicit Gram operator v -> Y X^T (X (Y v)) with Y = diag(labels).
/// The m-by-m matrix is never formed.
class GramOperator final : public LinearOperator {
 public:
  /// `samples` holds one sample per column; `labels` entries must be +-1.
  GramOperator(SparseMatrix samples, Vector labels);

  const SparseMatrix& samples() const { return samples_; }
  const Vector& labels() const { return labels_; }

 protected:
  Vector apply_impl(const Vector& v) const override;

 private:
  SparseMatrix samples_;
  Vector labels_;
};

/// v -> base(v) + shift * v.
class ShiftedOperator final : public LinearOperator {
 public:
  ShiftedOperator(OperatorPtr base, double shift);

  std::int64_t mult_count() const override { return base_->mult_count(); }

 protected:
  Vector apply_impl(const Vector& v) const override {
    return base_->apply(v) + shift_ * v;
  }

 private:
  OperatorPtr base_;
  double shift_;
};

/// Augmented-Lagrangian Hessian v -> base(v) + penalty * G^T (G v).
/// Counts as one application of the base operator; the G^T G products
/// are tracked separately.
class AugmentedOperator final : public LinearOperator {
 public:
  AugmentedOperator(OperatorPtr base, Matrix eq_matrix, double penalty);

  std::int64_t mult_count() const override { return base_->mult_count(); }
  std::int64_t gram_mult_count() const {
    return gram_count_.load(std::memory_order_relaxed);
  }

 protected:
  Vector apply_impl(const Vector& v) const override;

 private:
  OperatorPtr base_;
  Matrix eq_matrix_;
  double penalty_;
  mutable std::atomic<std::int64_t> gram_count_{0};
};

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  std::int64_t mults_spent = 0;
};

/// Largest-eigenvalue estimate by power iteration from a seeded start
/// vector. Stops when successive Rayleigh quotients agree to
/// `rel_change_tol` relatively or after `max_iters` applications.
/// Retries once with a fresh seed if the operator annihilates the start
/// vector, then throws.
NormEstimate estimate_norm(const LinearOperator& op, int max_iters = 50,
                           double rel_change_tol = 1e-4,
                           std::uint64_t seed = 0);

inline OperatorPtr dense_operator(Matrix matrix) {
  return std::make_shared<DenseOperator>(std::move(matrix));
}
inline OperatorPtr gram_operator(SparseMatrix samples, Vector labels) {
  return std::make_shared<GramOperator>(std::move(samples), std::move(labels));
}
inline OperatorPtr shifted_operator(OperatorPtr base, double shift) {
  return std::make_shared<ShiftedOperator>(std::move(base), shift);
}
inline OperatorPtr augmented_operator(OperatorPtr base, Matrix eq_matrix,
                                      double penalty) {
  return std::make_shared<AugmentedOperator>(std::move(base),
                                             std::move(eq_matrix), penalty);
}

}  // namespace mprgp
