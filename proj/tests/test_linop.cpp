#include "mprgp/linear_operator.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <Eigen/Dense>

#include <random>
#include <thread>

using namespace mprgp;

TEST_CASE("dense operator multiplies") {
  auto id = dense_operator(Matrix::Identity(3, 3));
  Vector v(3);
  v << 1, 2, 3;
  CHECK(id->apply(v) == v);

  Matrix d = Vector::LinSpaced(3, 1.0, 3.0).asDiagonal();
  auto diag = dense_operator(d);
  CHECK(diag->apply(Vector::Ones(3)) == v);

  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  auto op = dense_operator(a);
  Vector eig(2);
  eig << 1, -1;
  CHECK(op->apply(eig) == eig);  // eigenvector of eigenvalue 1
}

TEST_CASE("dense operator rejects bad matrices") {
  CHECK_THROWS_AS(dense_operator(Matrix::Ones(2, 3)), std::invalid_argument);
  Matrix asym(2, 2);
  asym << 1, 2, 3, 4;
  CHECK_THROWS_AS(dense_operator(asym), std::invalid_argument);
}

TEST_CASE("mult counter is exact") {
  auto op = dense_operator(Matrix::Identity(4, 4));
  CHECK(op->mult_count() == 0);
  for (int k = 1; k <= 17; ++k) {
    (void)op->apply(Vector::Ones(4));
    CHECK(op->mult_count() == k);
  }
  CHECK_THROWS_AS((void)op->apply(Vector::Ones(3)), std::invalid_argument);
  CHECK(op->mult_count() == 17);  // failed applies do not count
}

TEST_CASE("mult counter stays exact under concurrent applies") {
  auto op = dense_operator(Matrix::Identity(8, 8));
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t)
    workers.emplace_back([&op] {
      for (int k = 0; k < 1000; ++k) (void)op->apply(Vector::Ones(8));
    });
  for (auto& w : workers) w.join();
  CHECK(op->mult_count() == 4000);
}

TEST_CASE("gram operator matches the dense triple-loop oracle") {
  // Two 1-dimensional samples +1 and -1 with opposite labels.
  SparseMatrix x(1, 2);
  x.insert(0, 0) = 1.0;
  x.insert(0, 1) = -1.0;
  Vector y(2);
  y << 1, -1;
  auto op = gram_operator(x, y);

  Matrix h = oracle::dense_gram(Matrix(x), y);
  CHECK(h(0, 0) == doctest::Approx(1.0));
  CHECK(h(0, 1) == doctest::Approx(1.0));
  CHECK(h(1, 0) == doctest::Approx(1.0));
  CHECK(h(1, 1) == doctest::Approx(1.0));

  Vector e0(2);
  e0 << 1, 0;
  Vector he0 = op->apply(e0);
  CHECK(he0[0] == doctest::Approx(1.0));
  CHECK(he0[1] == doctest::Approx(1.0));

  CHECK(op->apply(Vector::Zero(2)).norm() == 0.0);
}

TEST_CASE("gram operator with orthonormal columns and positive labels is the identity") {
  SparseMatrix x(3, 3);
  for (int j = 0; j < 3; ++j) x.insert(j, j) = 1.0;
  auto op = gram_operator(x, Vector::Ones(3));
  Vector v(3);
  v << 0.3, -0.7, 2.0;
  CHECK((op->apply(v) - v).norm() <= 1e-15);
}

TEST_CASE("gram operator agrees with the dense oracle on random data") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_int_distribution<int> msize(2, 50), nsize(1, 20);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = msize(rng), n = nsize(rng);
    Matrix xd(n, m);
    Vector y(m);
    for (int c = 0; c < m; ++c) {
      y[c] = dist(rng) > 0 ? 1.0 : -1.0;
      for (int r = 0; r < n; ++r) xd(r, c) = dist(rng);
    }
    auto op = gram_operator(xd.sparseView(), y);
    Matrix h = oracle::dense_gram(xd, y);
    for (int t = 0; t < 3; ++t) {
      Vector v(m);
      for (int i = 0; i < m; ++i) v[i] = dist(rng);
      Vector lhs = op->apply(v);
      Vector rhs = h * v;
      CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }
  }
}

TEST_CASE("gram operator validates inputs") {
  SparseMatrix x(2, 2);
  Vector y(3);
  CHECK_THROWS_AS(gram_operator(x, y), std::invalid_argument);
  Vector bad(2);
  bad << 1.0, 0.5;
  CHECK_THROWS_AS(gram_operator(x, bad), std::invalid_argument);
}

TEST_CASE("shifted operator adds shift * v and delegates its counter") {
  auto zero = dense_operator(Matrix::Zero(2, 2));
  auto shifted_id = shifted_operator(zero, 1.0);
  Vector v(2);
  v << 3, -4;
  CHECK(shifted_id->apply(v) == v);
  CHECK(shifted_id->mult_count() == zero->mult_count());

  auto one_half = shifted_operator(dense_operator(Matrix::Identity(2, 2)), 0.5);
  CHECK(one_half->apply(Vector::Constant(2, 2.0)) == Vector::Constant(2, 3.0));

  Matrix d(2, 2);
  d << 1, 0, 0, 2;
  auto spectrum = shifted_operator(dense_operator(d), 1.0);
  Vector e0(2);
  e0 << 1, 0;
  CHECK(spectrum->apply(e0) == 2.0 * e0);
  CHECK(estimate_norm(*spectrum, 300, 1e-9).value == doctest::Approx(3.0).epsilon(1e-6));

  CHECK_THROWS_AS(shifted_operator(zero, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(shifted_operator(zero, -1.0), std::invalid_argument);
}

TEST_CASE("power iteration finds the dominant eigenvalue") {
  Matrix d = Vector::LinSpaced(3, 1.0, 3.0).asDiagonal();
  auto est = estimate_norm(*dense_operator(d), 200, 1e-8);
  CHECK(est.value == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(est.mults_spent == est.iterations);

  // The identity converges immediately: the Rayleigh quotient is exact
  // after the first application and the second confirms it.
  auto id = estimate_norm(*dense_operator(Matrix::Identity(5, 5)));
  CHECK(id.value == doctest::Approx(1.0));
  CHECK(id.iterations <= 2);
}

TEST_CASE("power iteration matches a dense eigensolve on random SPD matrices") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix base(10, 10);
    for (int r = 0; r < 10; ++r)
      for (int c = 0; c < 10; ++c) base(r, c) = dist(rng);
    Matrix a = base.transpose() * base + Matrix::Identity(10, 10);
    const double exact = Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues().maxCoeff();
    auto est = estimate_norm(*dense_operator(a), 500, 1e-10);
    CHECK(std::abs(est.value - exact) <= 1e-4 * exact);
  }
}

TEST_CASE("power iteration is deterministic") {
  Matrix a(4, 4);
  a << 4, 1, 0, 0, 1, 3, 1, 0, 0, 1, 2, 1, 0, 0, 1, 1;
  auto op = dense_operator(a);
  auto e1 = estimate_norm(*op);
  auto e2 = estimate_norm(*op);
  CHECK(e1.value == e2.value);
  CHECK(e1.iterations == e2.iterations);
}

TEST_CASE("augmented operator applies base + penalty * G'G") {
  auto zero = dense_operator(Matrix::Zero(2, 2));
  auto twice = augmented_operator(zero, Matrix::Identity(2, 2), 2.0);
  Vector v(2);
  v << 1, -1;
  CHECK(twice->apply(v) == 2.0 * v);

  auto id = dense_operator(Matrix::Identity(2, 2));
  auto same = augmented_operator(id, Matrix::Ones(1, 2), 0.0);
  CHECK(same->apply(v) == v);

  // Symmetry of the construction.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix g(2, 3);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) g(r, c) = dist(rng);
  auto aug = augmented_operator(dense_operator(Matrix::Identity(3, 3)), g, 1.7);
  for (int t = 0; t < 10; ++t) {
    Vector x(3), y(3);
    for (int j = 0; j < 3; ++j) {
      x[j] = dist(rng);
      y[j] = dist(rng);
    }
    CHECK(x.dot(aug->apply(y)) == doctest::Approx(y.dot(aug->apply(x))));
  }
}
