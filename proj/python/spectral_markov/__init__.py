"""Fourier multiplier measures on the circle and bi-stochastic finite
operators: norm estimation, cyclic class structure, hyperboundedness
diagnostics, and equidistribution experiments."""

from ._spectral import (
    FiniteOp,
    InvariantError,
    Measure,
    Sequence,
    SpecError,
    aperiodicity_certificate,
    classify,
    compose,
    convergence_rate,
    cycle,
    cyclic_classes,
    del_series,
    deterministic_sets,
    discrepancy,
    example2,
    graph_period,
    ht_series,
    hr_series,
    limit_residuals,
    mix,
    opnorm,
    random_block_cyclic,
    random_doubly_stochastic,
    rank_one,
    sample,
    symmetrize,
    ud_experiment,
    weyl_sum,
    wiener_average,
)

__all__ = [
    "FiniteOp",
    "InvariantError",
    "Measure",
    "Sequence",
    "SpecError",
    "aperiodicity_certificate",
    "classify",
    "compose",
    "convergence_rate",
    "cycle",
    "cyclic_classes",
    "del_series",
    "deterministic_sets",
    "discrepancy",
    "example2",
    "graph_period",
    "ht_series",
    "hr_series",
    "limit_residuals",
    "mix",
    "opnorm",
    "random_block_cyclic",
    "random_doubly_stochastic",
    "rank_one",
    "sample",
    "symmetrize",
    "ud_experiment",
    "weyl_sum",
    "wiener_average",
]
