#include "mprgp/bench.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace mprgp {

namespace {

/// Matrix-free 5-point stencil on an nx-by-ny interior grid,
/// row-major node numbering.
class LaplacianOperator final : public LinearOperator {
 public:
  LaplacianOperator(Index nx, Index ny) : LinearOperator(nx * ny), nx_(nx), ny_(ny) {}

 protected:
  Vector apply_impl(const Vector& v) const override {
    Vector out(v.size());
    for (Index j = 0; j < ny_; ++j) {
      for (Index i = 0; i < nx_; ++i) {
        const Index k = j * nx_ + i;
        double acc = 4.0 * v[k];
        if (i > 0) acc -= v[k - 1];
        if (i + 1 < nx_) acc -= v[k + 1];
        if (j > 0) acc -= v[k - nx_];
        if (j + 1 < ny_) acc -= v[k + nx_];
        out[k] = acc;
      }
    }
    return out;
  }

 private:
  Index nx_, ny_;
};

Vector uniform_vector(std::mt19937_64& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

Matrix uniform_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

}  // namespace

BoxQp generate_obstacle(Index nx, Index ny, double load, double obstacle) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("generate_obstacle: degenerate grid");
  const double h2 = 1.0 / static_cast<double>((nx + 1) * (ny + 1));
  auto op = std::make_shared<LaplacianOperator>(nx, ny);
  Vector b = Vector::Constant(nx * ny, load * h2);
  Vector l = Vector::Constant(nx * ny, obstacle);
  Vector u = Vector::Constant(nx * ny, kInf);
  return BoxQp(std::move(op), std::move(b), std::move(l), std::move(u));
}

BoxQp generate_eq_toy(Index n, Index m, std::uint64_t seed) {
  if (n < 1 || m < 0 || m >= n) throw std::invalid_argument("generate_eq_toy: need 0 <= m < n");
  std::mt19937_64 rng(seed);

  Matrix factor = uniform_matrix(rng, n, n);
  Matrix a = factor.transpose() * factor + 0.5 * Matrix::Identity(n, n);
  Vector b = uniform_vector(rng, n, -1.0, 1.0);
  Vector x_hat = uniform_vector(rng, n, -1.0, 1.0);

  Matrix g;
  if (m > 0) {
    int retries = 0;
    for (;;) {
      g = uniform_matrix(rng, m, n);
      if (Eigen::ColPivHouseholderQR<Matrix>(g).rank() == m) break;
      if (++retries > 5)
        throw std::runtime_error("generate_eq_toy: could not draw a full-rank constraint matrix");
    }
  }

  // Size the box around both the reference interior point and the
  // equality-KKT solution so the bounds stay inactive at the optimum.
  Vector x_kkt;
  if (m > 0) {
    Matrix kkt = Matrix::Zero(n + m, n + m);
    kkt.topLeftCorner(n, n) = a;
    kkt.topRightCorner(n, m) = g.transpose();
    kkt.bottomLeftCorner(m, n) = g;
    Vector rhs(n + m);
    rhs.head(n) = b;
    rhs.tail(m) = g * x_hat;
    Vector sol = kkt.fullPivLu().solve(rhs);
    x_kkt = sol.head(n);
  } else {
    x_kkt = a.ldlt().solve(b);
  }
  Vector l = x_hat.cwiseMin(x_kkt).array() - 1.0;
  Vector u = x_hat.cwiseMax(x_kkt).array() + 1.0;

  if (m == 0) return BoxQp(dense_operator(std::move(a)), std::move(b), std::move(l), std::move(u));
  Vector e = g * x_hat;
  return BoxQp(dense_operator(std::move(a)), std::move(b), std::move(l), std::move(u), std::move(g),
               std::move(e));
}

std::vector<double> default_alpha_grid() {
  return {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 1.9, 1.95, 2.0};
}

std::vector<std::string> default_strategies() {
  return {"fixed",    "grgr-optapprox", "gfgr-optapprox", "grgr-opt",
          "gfgr-opt", "gfgf-opt",       "projcg"};
}

bool SweepResult::all_converged() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.converged; });
}

SweepResult run_sweep(const BoxQp& problem, const Vector& x0, const SweepSpec& spec) {
  if (spec.strategies.empty()) throw std::invalid_argument("run_sweep: no strategies given");
  for (double a : spec.alpha_grid)
    if (!(a > 0.0 && a <= 2.0)) throw std::invalid_argument("run_sweep: alpha grid values must lie in (0, 2]");

  const auto t0 = std::chrono::steady_clock::now();
  SweepResult result;
  result.norm = estimate_norm(*problem.hessian, 50, 1e-4, spec.seed);

  std::vector<double> grid = spec.alpha_grid;
  std::sort(grid.begin(), grid.end());

  for (const auto& name : spec.strategies) {
    ExpansionStrategy strategy = parse_strategy(name);
    std::vector<std::optional<double>> alphas;
    if (strategy.uses_alpha())
      for (double a : grid) alphas.emplace_back(a);
    else
      alphas.emplace_back(std::nullopt);

    for (const auto& alpha : alphas) {
      SweepRow row;
      row.benchmark = spec.benchmark_id;
      row.strategy = strategy_name(strategy);
      row.alpha_u = alpha;

      SolverConfig cfg;
      cfg.gamma = spec.gamma;
      cfg.rtol = spec.rtol;
      cfg.atol = spec.atol;
      cfg.max_hessian_mults = spec.max_hessian_mults;
      cfg.strategy = strategy;
      if (alpha) cfg.strategy.alpha_u = *alpha;
      cfg.norm_A = result.norm.value;

      try {
        if (problem.has_equalities()) {
          SmalbeConfig outer;
          outer.inner = cfg;
          outer.outer_rtol = spec.outer_rtol > 0.0 ? spec.outer_rtol : spec.rtol;
          outer.max_outer = spec.max_outer;
          outer.norm_A = result.norm.value;
          SmalbeReport rep = solve_equality(problem, x0, outer);
          row.outer_iterations = rep.outer_iterations;
          row.hessian_mults = rep.inner.hessian_mults;
          row.cg_steps = rep.inner.cg_steps;
          row.expansion_steps = rep.inner.expansion_steps;
          row.proportioning_steps = rep.inner.proportioning_steps;
          row.converged = rep.converged;
          row.projected_gradient_norm = rep.inner.projected_gradient_norm;
        } else {
          SolveReport rep = solve(problem, x0, cfg);
          row.hessian_mults = rep.hessian_mults;
          row.cg_steps = rep.cg_steps;
          row.expansion_steps = rep.expansion_steps;
          row.proportioning_steps = rep.proportioning_steps;
          row.converged = rep.converged;
          row.projected_gradient_norm = rep.projected_gradient_norm;
        }
      } catch (const std::exception&) {
        row.converged = false;
        row.projected_gradient_norm = std::nan("");
      }
      result.rows.push_back(std::move(row));
    }
  }

  result.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

TableFormat parse_format(const std::string& name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "markdown") return TableFormat::markdown;
  throw std::invalid_argument("unknown table format: " + name);
}

namespace {

std::string compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string emit(const std::vector<SweepRow>& rows, TableFormat format) {
  if (rows.empty()) throw std::invalid_argument("emit: no rows");
  std::ostringstream out;
  if (format == TableFormat::csv) {
    out << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
      out << r.benchmark << ',' << r.strategy << ',' << (r.alpha_u ? compact(*r.alpha_u) : "") << ','
          << r.outer_iterations << ',' << r.hessian_mults << ',' << r.cg_steps << ','
          << r.expansion_steps << ',' << r.proportioning_steps << ','
          << (r.converged ? "true" : "false") << ',' << full(r.projected_gradient_norm) << '\n';
    }
    return out.str();
  }

  out << "| exp. type | alpha_u | outer it. | #Hess. mult. | #CG | #Exp. | #Prop. | converged | ||g^P|| |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out << "| " << r.strategy << " | " << (r.alpha_u ? compact(*r.alpha_u) : "-") << " | "
        << r.outer_iterations << " | " << r.hessian_mults << " | " << r.cg_steps << " | "
        << r.expansion_steps << " | " << r.proportioning_steps << " | "
        << (r.converged ? "yes" : "no") << " | " << compact(r.projected_gradient_norm) << " |\n";
  }
  return out.str();
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader)
    throw std::runtime_error("sweep csv: missing or wrong header");

  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != 10) throw std::runtime_error("sweep csv: wrong field count in row");

    SweepRow r;
    r.benchmark = fields[0];
    r.strategy = fields[1];
    if (!fields[2].empty()) r.alpha_u = std::stod(fields[2]);
    r.outer_iterations = std::stoll(fields[3]);
    r.hessian_mults = std::stoll(fields[4]);
    r.cg_steps = std::stoll(fields[5]);
    r.expansion_steps = std::stoll(fields[6]);
    r.proportioning_steps = std::stoll(fields[7]);
    if (fields[8] == "true")
      r.converged = true;
    else if (fields[8] == "false")
      r.converged = false;
    else
      throw std::runtime_error("sweep csv: bad converged flag");
    r.projected_gradient_norm = std::stod(fields[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace mprgp
