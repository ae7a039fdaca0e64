#include "mprgp/linear_operator.hpp"

#include <cmath>
#include <random>

namespace mprgp {

DenseOperator::DenseOperator(Matrix matrix) : LinearOperator(matrix.rows()), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols())
    throw std::invalid_argument("dense operator requires a square matrix");
  const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
  const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw std::invalid_argument("dense operator requires a symmetric matrix");
}

GramOperator::GramOperator(SparseMatrix samples, Vector labels)
    : LinearOperator(labels.size()), samples_(std::move(samples)), labels_(std::move(labels)) {
  if (samples_.cols() != labels_.size())
    throw std::invalid_argument("sample count does not match label count");
  for (Index i = 0; i < labels_.size(); ++i)
    if (labels_[i] != 1.0 && labels_[i] != -1.0)
      throw std::invalid_argument("labels must be +1 or -1");
}

Vector GramOperator::apply_impl(const Vector& v) const {
  Vector yv = labels_.cwiseProduct(v);
  Vector w = samples_ * yv;
  Vector z = samples_.transpose() * w;
  return labels_.cwiseProduct(z);
}

ShiftedOperator::ShiftedOperator(OperatorPtr base, double shift)
    : LinearOperator(base ? base->dim() : 0), base_(std::move(base)), shift_(shift) {
  if (shift_ <= 0.0) throw std::invalid_argument("shift must be positive");
}

AugmentedOperator::AugmentedOperator(OperatorPtr base, Matrix eq_matrix, double penalty)
    : LinearOperator(base ? base->dim() : 0),
      base_(std::move(base)),
      eq_matrix_(std::move(eq_matrix)),
      penalty_(penalty) {
  if (eq_matrix_.cols() != dim())
    throw std::invalid_argument("equality matrix column count does not match operator dimension");
  if (penalty_ < 0.0) throw std::invalid_argument("penalty must be nonnegative");
}

Vector AugmentedOperator::apply_impl(const Vector& v) const {
  Vector out = base_->apply(v);
  if (penalty_ != 0.0 && eq_matrix_.rows() > 0) {
    gram_count_.fetch_add(1, std::memory_order_relaxed);
    out.noalias() += penalty_ * (eq_matrix_.transpose() * (eq_matrix_ * v));
  }
  return out;
}

namespace {

Vector seeded_start(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

NormEstimate estimate_norm(const LinearOperator& op, int max_iters, double rel_change_tol,
                           std::uint64_t seed) {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  for (int attempt = 0; attempt < 2; ++attempt) {
    Vector v = seeded_start(op.dim(), seed + 0x9e3779b9u * attempt);
    v /= v.norm();
    NormEstimate est;
    double prev = 0.0;
    bool dead = false;
    for (int it = 0; it < max_iters; ++it) {
      Vector w = op.apply(v);
      ++est.iterations;
      ++est.mults_spent;
      est.value = v.dot(w);
      const double wn = w.norm();
      if (wn == 0.0) {
        dead = true;
        break;
      }
      if (it > 0 && std::abs(est.value - prev) <= rel_change_tol * std::abs(est.value)) return est;
      prev = est.value;
      v = w / wn;
    }
    if (!dead) return est;
  }
  throw std::runtime_error("power iteration start vectors were annihilated by the operator");
}

}  // namespace mprgp
