#pragma once

#include "mprgp/smalbe.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mprgp {

/// Obstacle benchmark: 5-point-stencil discrete Laplacian on an nx-by-ny
/// interior grid of the unit square with homogeneous Dirichlet boundary,
/// constant load scaled by the cell area, and a constant lower bound
/// (the obstacle, -inf for the unconstrained limit).
BoxQp generate_obstacle(Index nx, Index ny, double load, double obstacle);

/// Seeded random equality-constrained toy: shifted Gram Hessian,
/// full-row-rank G with e = G*x_hat for an interior point x_hat, and a
/// box wide enough to keep both x_hat and the equality-KKT solution
/// strictly inside. Bit-reproducible from the seed.
BoxQp generate_eq_toy(Index n, Index m, std::uint64_t seed);

/// The alpha_u values benchmark tables are reported on.
std::vector<double> default_alpha_grid();

/// The seven strategies the result tables compare.
std::vector<std::string> default_strategies();

struct SweepSpec {
  std::string benchmark_id = "qp";
  std::vector<std::string> strategies = default_strategies();
  std::vector<double> alpha_grid = default_alpha_grid();
  double gamma = 1.0;
  double rtol = 1e-6;
  double atol = 0.0;
  std::int64_t max_hessian_mults = 100000;
  double outer_rtol = 0.0;  // equality problems only; 0 = use rtol
  int max_outer = 100;
  std::uint64_t seed = 0;   // governs the power-iteration start
};

struct SweepRow {
  std::string benchmark;
  std::string strategy;
  std::optional<double> alpha_u;  // empty for strategies without a grid
  std::int64_t outer_iterations = 0;
  std::int64_t hessian_mults = 0;
  std::int64_t cg_steps = 0;
  std::int64_t expansion_steps = 0;
  std::int64_t proportioning_steps = 0;
  bool converged = false;
  double projected_gradient_norm = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  NormEstimate norm;        // estimated once, shared by every run
  double elapsed_seconds = 0.0;

  bool all_converged() const;
};

/// Runs one solve per (strategy, alpha_u) pair; strategies without a
/// step-length parameter contribute a single row. Rows keep the
/// requested strategy order with alpha ascending inside. Per-run
/// failures are recorded in the row and the sweep continues.
SweepResult run_sweep(const BoxQp& problem, const Vector& x0, const SweepSpec& spec);

inline constexpr const char* kSweepCsvHeader =
    "benchmark,strategy,alpha_u,outer_iterations,hessian_mults,cg_steps,expansion_steps,"
    "proportioning_steps,converged,projected_gradient_norm";

enum class TableFormat { csv, markdown };

TableFormat parse_format(const std::string& name);

std::string emit(const std::vector<SweepRow>& rows, TableFormat format);

/// Inverse of emit(..., csv).
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

}  // namespace mprgp
