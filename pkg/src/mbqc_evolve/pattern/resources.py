"""Measurement and gate counts per Trotter step, and the MBQC/CBQC runtime comparison."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MODELS = ("kitaev", "hubbard")
REPRESENTATIONS = ("slcs", "ccs", "circuit")


def _check(model: str, representation: str, N: int, M: int) -> None:
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    if representation not in REPRESENTATIONS:
        raise ValueError(f"representation must be one of {REPRESENTATIONS}, got {representation!r}")
    if N < 2 or M < 1:
        raise ValueError(f"need N >= 2 and M >= 1, got N={N}, M={M}")


def formula_count(model: str, representation: str, N: int, M: int) -> int:
    """Closed-form counts.

    Kitaev: ``(17N - 10) M`` lattice measurements and ``(7N - 1) M`` compact
    measurements or circuit gates (24/13 at ``N = 2``, 41/20 at ``N = 3``).
    Hubbard: ``(156N - 144) M`` and ``(34N - 32) M`` (168/36 at ``N = 2``).
    """
    _check(model, representation, N, M)
    if model == "kitaev":
        per_step = 17 * N - 10 if representation == "slcs" else 7 * N - 1
    else:
        per_step = 156 * N - 144 if representation == "slcs" else 34 * N - 32
    return per_step * M


def census_count(model: str, representation: str, N: int, M: int) -> int:
    """Counts taken from generated objects rather than formulas.

    ``slcs``: measured sites of the lattice pattern minus the first site of
    every wire in every step (those carry the step's input state).
    ``ccs``: measurements left after compactification minus the inputs.
    ``circuit``: rotation gates in the block-form gate list of one step, times ``M``.
    """
    _check(model, representation, N, M)
    if representation == "circuit":
        from ..oracle import hubbard_block_gates, kitaev_block_gates

        gates = kitaev_block_gates(N, 0.3, 0.1) if model == "kitaev" else hubbard_block_gates(N, 0.3, 0.1)
        return len(gates) * M
    p = _lattice(model, N, M)
    wires = p.num_logical
    if representation == "slcs":
        return len(p.measured) - wires * M
    return len(_compact(model, N, M).measured) - wires


@lru_cache(maxsize=8)
def _lattice(model: str, N: int, M: int):
    from .hubbard import hubbard_pattern
    from .kitaev import kitaev_pattern

    return kitaev_pattern(N, M, 0.3, 0.1) if model == "kitaev" else hubbard_pattern(N, M, 0.3, 0.1)


@lru_cache(maxsize=8)
def _compact(model: str, N: int, M: int):
    from .compact import compactify_pattern

    return compactify_pattern(_lattice(model, N, M))


def count_resources(model: str, representation: str, N: int, M: int, mode: str = "formula") -> int:
    """Resource count in ``formula`` or ``census`` mode."""
    if mode == "formula":
        return formula_count(model, representation, N, M)
    if mode == "census":
        return census_count(model, representation, N, M)
    raise ValueError(f"mode must be 'formula' or 'census', got {mode!r}")


def resource_table(model: str, N: int, M: int, mode: str = "formula") -> dict[str, int]:
    return {rep: count_resources(model, rep, N, M, mode) for rep in REPRESENTATIONS}


@dataclass(frozen=True)
class RuntimeComparison:
    regime: str
    t_mbqc: float
    t_cbqc: float
    threshold_ratio: float


def runtime_regime(n_m: float, n_g: float, dt_ratio: float, rel_tol: float = 1e-9) -> str:
    """Compare ``T_M ~ N_m dt_m`` with ``T_C ~ N_g dt_g`` where ``dt_ratio = dt_g / dt_m``.

    Returns ``"mbqc_favorable"``, ``"cbqc_favorable"`` or ``"tie"``.
    """
    return runtime_comparison(n_m, n_g, dt_ratio, rel_tol).regime


def runtime_comparison(n_m: float, n_g: float, dt_ratio: float, rel_tol: float = 1e-9) -> RuntimeComparison:
    if n_m <= 0 or n_g <= 0 or dt_ratio <= 0:
        raise ValueError("counts and time ratio must be positive")
    t_m, t_c = float(n_m), float(n_g) * dt_ratio
    if abs(t_m - t_c) <= rel_tol * max(t_m, t_c):
        regime = "tie"
    elif t_m < t_c:
        regime = "mbqc_favorable"
    else:
        regime = "cbqc_favorable"
    return RuntimeComparison(regime, t_m, t_c, n_m / n_g)
