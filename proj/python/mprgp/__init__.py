"""Matrix-free gradient-projection solver for convex box-constrained QPs.

The heavy lifting lives in the compiled ``_core`` module; this package
re-exports its public surface.
"""

from ._core import (
    BoxQp,
    LabeledDataset,
    LinearOperator,
    SmalbeReport,
    SolveReport,
    SvmModel,
    augment_nobias,
    canonical_strategy_name,
    default_alpha_grid,
    dense_operator,
    estimate_norm,
    generate_eq_toy,
    generate_obstacle,
    gram_operator,
    load_libsvm,
    load_problem,
    run_sweep,
    shifted_operator,
    solve,
    solve_equality,
    strategies,
    train_svm,
)

__all__ = [
    "BoxQp",
    "LabeledDataset",
    "LinearOperator",
    "SmalbeReport",
    "SolveReport",
    "SvmModel",
    "augment_nobias",
    "canonical_strategy_name",
    "default_alpha_grid",
    "dense_operator",
    "estimate_norm",
    "generate_eq_toy",
    "generate_obstacle",
    "gram_operator",
    "load_libsvm",
    "load_problem",
    "run_sweep",
    "shifted_operator",
    "solve",
    "solve_equality",
    "strategies",
    "train_svm",
]
