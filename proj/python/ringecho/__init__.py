"""Pulse-area bookkeeping for photon echoes in a ring cavity."""

from ._ringecho import (
    AreaSolution,
    BlochSeed,
    CavityParams,
    CouplingRatios,
    CubicSolution,
    EchoSeedContext,
    EchoTrainResult,
    PrimaryEchoResult,
    area_residual,
    coupling_ratios,
    echo_cubic,
    echo_linear,
    echo_train,
    impedance_matched,
    normalized_area,
    phase_bound,
    primary_echo_chain,
    primary_echo_seed,
    raw_area,
    rose_echo_seed,
    scan_roots,
    second_echo_seed,
    solve_composite_total,
    solve_echo,
    solve_first_pulse,
    solve_second_pulse,
    third_echo_seed,
    weak_signal_transmission,
)

__all__ = [
    "AreaSolution",
    "BlochSeed",
    "CavityParams",
    "CouplingRatios",
    "CubicSolution",
    "EchoSeedContext",
    "EchoTrainResult",
    "PrimaryEchoResult",
    "area_residual",
    "coupling_ratios",
    "echo_cubic",
    "echo_linear",
    "echo_train",
    "impedance_matched",
    "normalized_area",
    "phase_bound",
    "primary_echo_chain",
    "primary_echo_seed",
    "raw_area",
    "rose_echo_seed",
    "scan_roots",
    "second_echo_seed",
    "solve_composite_total",
    "solve_echo",
    "solve_first_pulse",
    "solve_second_pulse",
    "third_echo_seed",
    "weak_signal_transmission",
]
