"""Overlap time series, damped discrete Fourier transform and the analyses built on it.

The frequency grid is ``omega_m = m * domega``. Because ``domega * dt * L = 2 pi``
the kernel ``exp(i omega_m t_n)`` is periodic in ``m`` with period ``L``, so
the grid is labelled ``m = -L//2 .. L - L//2 - 1`` to make negative energies
visible; the values are identical to the ``m = 0 .. L-1`` labelling.
"""

from __future__ import annotations

import csv
import hashlib
import json
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .executor import ErrorSpec
from .oracle import (
    ExactEvolver,
    HubbardParams,
    KitaevParams,
    TrotterEvolver,
    ground_state,
    hamiltonian,
    kitaev_error_unitaries,
    kitaev_hamiltonian,
    step_phase,
    step_unitary,
)

M_CAP = 2**20
ENDPOINTS = ("half", "literal")


@dataclass(frozen=True)
class SpectralConfig:
    """Sampling grid and tolerances; ``dt`` follows from ``L`` and ``domega``."""

    L: int
    domega: float
    eta: float
    delta_f: float = 1e-2
    delta_t: float = 1e-2

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")
        if self.domega <= 0:
            raise ValueError("domega must be positive")
        if self.eta <= 0:
            raise ValueError("eta must be positive")

    @property
    def dt(self) -> float:
        return 2 * np.pi / (self.L * self.domega)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.L) * self.dt

    @property
    def m_indices(self) -> np.ndarray:
        return np.arange(self.L) - self.L // 2

    @property
    def omegas(self) -> np.ndarray:
        return self.m_indices * self.domega


@dataclass(frozen=True)
class Peak:
    omega: float
    weight: float
    index: int
    height: float


@dataclass
class SpectralSeries:
    overlaps: np.ndarray
    spectrum: np.ndarray
    omegas: np.ndarray
    sum_rule_deviation: float
    peaks: list[Peak] = field(default_factory=list)


# ----------------------------------------------------------------------
# Fourier pipeline


def _overlap_at(evolver, psi_i: np.ndarray, t: float) -> complex:
    out = evolver(t)
    state = out[0] if isinstance(out, tuple) else out
    return complex(np.vdot(psi_i, state))


def overlap_series(evolver: Callable, psi_i: np.ndarray, cfg: SpectralConfig) -> np.ndarray:
    """``<psi_I| U(t_n) |psi_I>`` for ``n = 0 .. L-1``.

    ``evolver(t)`` returns the evolved state, or a ``(state, overlap)`` pair;
    it must be phase coherent.
    """
    psi_i = np.asarray(psi_i, dtype=complex)
    return np.array([_overlap_at(evolver, psi_i, t) for t in cfg.times])


def spectral_function(overlaps: np.ndarray, cfg: SpectralConfig, endpoint: str = "half") -> np.ndarray:
    """``(dt/pi) sum_n w_n Re[exp((i omega_m - eta) t_n) overlap_n]`` on ``cfg.omegas``.

    ``endpoint="half"`` gives the ``n = 0`` sample weight 1/2, which is the
    symmetric two-sided transform of a Hermitian time series; ``"literal"``
    uses unit weights, which adds a flat background ``dt/(2 pi)`` whose
    grid sum is exactly 1.
    """
    overlaps = np.asarray(overlaps, dtype=complex)
    if overlaps.shape != (cfg.L,):
        raise ValueError(f"expected {cfg.L} overlaps, got shape {overlaps.shape}")
    if endpoint not in ENDPOINTS:
        raise ValueError(f"endpoint must be one of {ENDPOINTS}")
    t = cfg.times
    w = np.exp(-cfg.eta * t) * overlaps
    if endpoint == "half":
        w[0] *= 0.5
    # integer phase table keeps the kernel exactly periodic in m
    phase = np.outer(cfg.m_indices, np.arange(cfg.L)) % cfg.L
    kernel = np.exp(2j * np.pi * phase / cfg.L)
    return cfg.dt / np.pi * (kernel @ w).real


def sum_rule(spectrum: np.ndarray, cfg: SpectralConfig) -> float:
    """``|1 - domega * sum_m A(omega_m)|``."""
    return float(abs(1.0 - cfg.domega * np.sum(spectrum)))


def _lorentz_fraction(half_width: float, eta: float) -> float:
    return 2 / np.pi * np.arctan(half_width / eta)


def find_peaks(spectrum: np.ndarray, cfg: SpectralConfig, threshold_fraction: float = 1e-3) -> list[Peak]:
    """Local maxima above ``threshold_fraction * max``, with refined centers and weights.

    Centers come from a 3-point parabola through the grid maximum. The
    weight integrates the spectrum over the peak's basin (at most ``5 eta``
    either side) and divides by the Lorentzian mass inside that window.
    """
    a = np.asarray(spectrum, dtype=float)
    if a.size == 0:
        raise ValueError("empty spectrum")
    if not 0 < threshold_fraction < 1:
        raise ValueError("threshold_fraction must lie in (0, 1)")
    om = cfg.omegas
    floor = threshold_fraction * a.max()
    idx = [
        i
        for i in range(1, a.size - 1)
        if a[i] >= floor and a[i] > a[i - 1] and a[i] >= a[i + 1]
    ]
    reach = int(np.ceil(5 * cfg.eta / cfg.domega))
    peaks = []
    for k, i in enumerate(idx):
        y0, y1, y2 = a[i - 1], a[i], a[i + 1]
        den = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / den if den != 0 else 0.0
        center = om[i] + shift * cfg.domega
        lo = max(0, i - reach, (idx[k - 1] + i) // 2 + 1 if k > 0 else 0)
        hi = min(a.size - 1, i + reach, (idx[k + 1] + i) // 2 if k + 1 < len(idx) else a.size - 1)
        mass = cfg.domega * a[lo : hi + 1].sum()
        half = min(center - om[lo], om[hi] - center) + cfg.domega / 2
        peaks.append(Peak(float(center), float(mass / _lorentz_fraction(half, cfg.eta)), int(cfg.m_indices[i]), float(y1)))
    return sorted(peaks, key=lambda p: p.omega)


def analyze(evolver: Callable, psi_i: np.ndarray, cfg: SpectralConfig, threshold_fraction: float = 1e-3) -> SpectralSeries:
    ov = overlap_series(evolver, psi_i, cfg)
    a = spectral_function(ov, cfg)
    return SpectralSeries(ov, a, cfg.omegas, sum_rule(a, cfg), find_peaks(a, cfg, threshold_fraction))


def match_peaks(peaks: Sequence[Peak], energies: Sequence[float]) -> list[float]:
    """Distance from each peak center to the nearest energy."""
    e = np.asarray(energies)
    return [float(np.min(np.abs(e - p.omega))) for p in peaks]


# ----------------------------------------------------------------------
# inputs and evolvers


def kitaev_initial_state(N: int) -> np.ndarray:
    """Ground state of the chain at ``g_mu = 0``."""
    return ground_state(kitaev_hamiltonian(KitaevParams(N, 0.0)))[1]


def hubbard_initial_state(N: int) -> np.ndarray:
    """Ground state of the hopping-only chain."""
    return ground_state(hamiltonian(HubbardParams(N, 0.0)))[1]


def initial_state(params: KitaevParams | HubbardParams) -> np.ndarray:
    return kitaev_initial_state(params.N) if isinstance(params, KitaevParams) else hubbard_initial_state(params.N)


def exact_series(params, cfg: SpectralConfig, psi_i: np.ndarray | None = None) -> SpectralSeries:
    psi_i = initial_state(params) if psi_i is None else psi_i
    return analyze(ExactEvolver(hamiltonian(params), psi_i), psi_i, cfg)


def trotter_series(params, cfg: SpectralConfig, M: int, psi_i: np.ndarray | None = None) -> SpectralSeries:
    psi_i = initial_state(params) if psi_i is None else psi_i
    return analyze(TrotterEvolver(params, M, psi_i), psi_i, cfg)


# ----------------------------------------------------------------------
# minimum Trotter steps and precision


CRITERIA = {
    "overlap": "abs_overlap_difference_stable_under_doubling",
    "state": "state_norm_difference_stable_under_doubling",
}


def _trotter_state(params, t: float, M: int, psi: np.ndarray) -> np.ndarray:
    phi = params.w * t / M
    u = step_unitary(params, phi) * step_phase(params, phi)
    return np.linalg.matrix_power(u, M) @ psi


def min_trotter_steps(
    params: KitaevParams | HubbardParams,
    cfg: SpectralConfig,
    n: int,
    psi_i: np.ndarray | None = None,
    m_max: int = M_CAP,
    exact: ExactEvolver | None = None,
    stable: bool = True,
    criterion: str = "overlap",
) -> int:
    """Smallest ``M`` whose Trotter result at ``t_n`` is within ``delta_T`` of the exact one.

    ``criterion="overlap"`` compares ``|overlap_M - overlap_exact|``;
    ``"state"`` compares the evolved states in 2-norm, which is stricter.
    Doubling finds a converged power of two and bisection narrows the
    bracket. With ``stable`` a step count only counts as converged if every
    doubling of it up to ``m_max`` converges too; this rejects the accidental
    agreement that large per-step angles produce because the rotations are
    periodic. Raises ``RuntimeError`` if ``m_max`` is not enough.
    """
    if not 0 <= n < cfg.L:
        raise ValueError(f"n must lie in [0, {cfg.L})")
    psi_i = initial_state(params) if psi_i is None else np.asarray(psi_i, dtype=complex)
    exact = exact or ExactEvolver(hamiltonian(params), psi_i)
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {sorted(CRITERIA)}")
    t = n * cfg.dt
    target = exact.state(t)
    cache: dict[int, bool] = {}

    def close(M: int) -> bool:
        if M not in cache:
            got = _trotter_state(params, t, M, psi_i)
            if criterion == "overlap":
                err = abs(np.vdot(psi_i, got - target))
            else:
                err = np.linalg.norm(got - target)
            cache[M] = err < cfg.delta_t
        return cache[M]

    def ok(M: int) -> bool:
        if not stable:
            return close(M)
        k = M
        while k <= m_max:
            if not close(k):
                return False
            k *= 2
        return True

    if ok(1):
        return 1
    lo, hi = 1, 2
    while not ok(hi):
        lo, hi = hi, hi * 2
        if hi > m_max:
            raise RuntimeError(f"no convergence below M = {m_max} at n = {n}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def min_trotter_table(
    params,
    cfg: SpectralConfig,
    psi_i: np.ndarray | None = None,
    m_max: int = M_CAP,
    stable: bool = True,
    criterion: str = "overlap",
) -> list[int]:
    psi_i = initial_state(params) if psi_i is None else psi_i
    exact = ExactEvolver(hamiltonian(params), psi_i)
    return [min_trotter_steps(params, cfg, n, psi_i, m_max, exact, stable, criterion) for n in range(cfg.L)]


def min_trotter_steps_peaks(
    params, cfg: SpectralConfig, psi_i: np.ndarray | None = None, m_max: int = M_CAP, tol: float | None = None
) -> int:
    """Smallest fixed ``M`` whose Trotter spectrum reproduces every exact peak within ``tol``.

    Alternative to the per-time-index overlap criterion; ``tol`` defaults to
    ``delta_T``. The peak sets must also have equal size.
    """
    psi_i = initial_state(params) if psi_i is None else psi_i
    tol = cfg.delta_t if tol is None else tol
    ref = [p.omega for p in exact_series(params, cfg, psi_i).peaks]

    def ok(M: int) -> bool:
        got = [p.omega for p in trotter_series(params, cfg, M, psi_i).peaks]
        return len(got) == len(ref) and all(abs(a - b) < tol for a, b in zip(got, ref))

    if ok(1):
        return 1
    lo, hi = 1, 2
    while not ok(hi):
        lo, hi = hi, hi * 2
        if hi > m_max:
            raise RuntimeError(f"no convergence below M = {m_max}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


@dataclass
class PrecisionReport:
    """``chi_n = n w / (domega L M_n)``; extrema skip ``n = 0`` where ``chi`` vanishes."""

    n: list[int]
    M: list[int]
    chi: list[float]
    max_chi: float
    min_g_chi: float
    g: float


def precision_report(M_n: Sequence[int], cfg: SpectralConfig, g: float, w: float = 1.0) -> PrecisionReport:
    if any(m < 1 for m in M_n):
        raise ValueError("every M_n must be positive")
    n = list(range(len(M_n)))
    chi = [k * w / (cfg.domega * cfg.L * m) for k, m in zip(n, M_n)]
    tail = chi[1:] or chi
    return PrecisionReport(n, list(M_n), chi, max(tail), g * min(tail), g)


# ----------------------------------------------------------------------
# error experiments


@dataclass
class PeakShift:
    clean_omega: float
    perturbed_omega: float | None
    shift: float
    clean_weight: float
    perturbed_weight: float


@dataclass
class ErrorExperiment:
    """Clean and perturbed spectra.

    ``shifts`` pairs every clean peak with the nearest perturbed one.
    ``new_peaks`` are perturbed peaks far from every clean peak, and
    ``off_spectrum`` are perturbed peaks farther than ``domega`` from every
    eigenvalue of the Hamiltonian.
    """

    clean: SpectralSeries
    perturbed: SpectralSeries
    shifts: list[PeakShift]
    new_peaks: list[Peak]
    off_spectrum: list[Peak]
    errors: dict[str, float]

    def max_shift(self) -> float:
        return max((s.shift for s in self.shifts), default=0.0)

    def max_relative_weight_change(self) -> float:
        return max((abs(s.perturbed_weight - s.clean_weight) / s.clean_weight for s in self.shifts), default=0.0)


def absolute_errors(spec: ErrorSpec, N: int, seed=None) -> dict[str, float]:
    """Draw ``spec`` and expand it to absolute errors on every Kitaev wire tag.

    Relative entries are scaled by the static Euler constant, which is
    ``pi/2`` for every Kitaev leg angle.
    """
    drawn = spec.draw(seed)
    roles = ("psi-1", "psi-2", "phi", "psi1", "psi2", "psi3")
    out = {}
    for q in range(1, N + 1):
        for r in roles:
            eps = drawn.lookup(f"{r}_{q}")
            if eps:
                out[f"{r}_{q}"] = eps * (np.pi / 2 if spec.relative else 1.0)
    return out


def error_overlaps(params: KitaevParams, cfg: SpectralConfig, M: int, errors: dict[str, float], psi_i: np.ndarray) -> np.ndarray:
    """Overlaps of ``(U~^dag U_g U)^M psi_I`` with ``psi_I`` on the time grid."""
    u, ut = kitaev_error_unitaries(params.N, errors)
    out = np.empty(cfg.L, dtype=complex)
    for n, t in enumerate(cfg.times):
        phi = params.w * t / M
        step = ut.conj().T @ step_unitary(params, phi) @ u
        out[n] = np.vdot(psi_i, np.linalg.matrix_power(step, M) @ psi_i)
    return out


def error_experiment(
    params: KitaevParams,
    cfg: SpectralConfig,
    spec: ErrorSpec,
    seed=None,
    M: int = 8500,
    psi_i: np.ndarray | None = None,
    threshold_fraction: float = 1e-3,
) -> ErrorExperiment:
    """Clean and perturbed spectra of the gate-level error model at ``M`` steps."""
    if not isinstance(params, KitaevParams):
        raise TypeError("the gate-level error model is defined for the Kitaev chain")
    psi_i = kitaev_initial_state(params.N) if psi_i is None else psi_i
    errors = absolute_errors(spec, params.N, seed)
    series = []
    for errs in ({}, errors):
        ov = error_overlaps(params, cfg, M, errs, psi_i)
        a = spectral_function(ov, cfg)
        series.append(SpectralSeries(ov, a, cfg.omegas, sum_rule(a, cfg), find_peaks(a, cfg, threshold_fraction)))
    clean, pert = series
    shifts, used = [], set()
    for p in clean.peaks:
        if pert.peaks:
            j = int(np.argmin([abs(q.omega - p.omega) for q in pert.peaks]))
            q = pert.peaks[j]
            used.add(j)
            shifts.append(PeakShift(p.omega, q.omega, abs(q.omega - p.omega), p.weight, q.weight))
        else:
            shifts.append(PeakShift(p.omega, None, np.inf, p.weight, 0.0))
    new = [
        q for j, q in enumerate(pert.peaks)
        if j not in used and min((abs(q.omega - p.omega) for p in clean.peaks), default=np.inf) > cfg.domega
    ]
    energies = np.linalg.eigvalsh(hamiltonian(params))
    off = [q for q in pert.peaks if np.min(np.abs(energies - q.omega)) > cfg.domega]
    return ErrorExperiment(clean, pert, shifts, new, off, errors)


@dataclass
class PhiShiftReport:
    delta_phi: float
    clean: list[Peak]
    shifted: list[Peak]
    relative_shifts: list[float]
    sum_rule_change: float


def phi_M_shift_check(params, cfg: SpectralConfig, delta_phi: float, psi_i: np.ndarray | None = None) -> PhiShiftReport:
    """Rescale every step angle by ``1 + delta_phi`` and compare peak positions.

    A uniform ``phi_M`` error stretches the time axis, which is the same as
    scaling ``H`` by ``1 + delta_phi``, so each center moves to
    ``omega * (1 + delta_phi)``.
    """
    psi_i = initial_state(params) if psi_i is None else psi_i
    ev = ExactEvolver(hamiltonian(params), psi_i)
    clean = analyze(ev, psi_i, cfg)
    shifted = analyze(lambda t: ev.state(t * (1 + delta_phi)), psi_i, cfg)
    rel = []
    for p in clean.peaks:
        q = min(shifted.peaks, key=lambda q: abs(q.omega - p.omega * (1 + delta_phi)))
        rel.append((q.omega - p.omega) / p.omega if p.omega else q.omega - p.omega)
    return PhiShiftReport(delta_phi, clean.peaks, shifted.peaks, rel, shifted.sum_rule_deviation - clean.sum_rule_deviation)


# ----------------------------------------------------------------------
# files


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write(path: Path, header: Sequence[str], rows, chash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(f"# config_hash={chash}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_overlaps(path, overlaps: np.ndarray, cfg: SpectralConfig, chash: str) -> Path:
    rows = ((n, fmt(t), fmt(o.real), fmt(o.imag)) for n, (t, o) in enumerate(zip(cfg.times, overlaps)))
    return _write(path, ("n", "t", "re_overlap", "im_overlap"), rows, chash)


def write_spectrum(path, spectrum: np.ndarray, cfg: SpectralConfig, chash: str) -> Path:
    rows = ((int(m), fmt(w), fmt(a)) for m, w, a in zip(cfg.m_indices, cfg.omegas, spectrum))
    return _write(path, ("m", "omega", "A"), rows, chash)


def write_peaks(path, peaks: Sequence[Peak], chash: str) -> Path:
    rows = ((k, fmt(p.omega), fmt(p.weight)) for k, p in enumerate(peaks))
    return _write(path, ("peak_index", "omega", "weight"), rows, chash)


def write_precision(path, report: PrecisionReport, chash: str) -> Path:
    rows = ((n, m, fmt(c)) for n, m, c in zip(report.n, report.M, report.chi))
    return _write(path, ("n", "M_min", "chi"), rows, chash)


def write_energies(path, energies: Sequence[float], chash: str) -> Path:
    return _write(path, ("index", "energy"), ((k, fmt(e)) for k, e in enumerate(energies)), chash)


def write_metadata(path, config: dict, extra: dict | None = None) -> Path:
    from . import __version__

    meta = {
        "config": config,
        "config_hash": config_hash(config),
        "version": __version__,
    }
    meta.update(extra or {})
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
    return path


def config_dict(cfg: SpectralConfig) -> dict:
    return asdict(cfg)
