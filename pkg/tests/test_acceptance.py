"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from conftest import random_state
from mbqc_evolve.cli import suite_compactify, suite_hubbard, suite_kitaev
from mbqc_evolve.executor import (
    EnumerateAll,
    ErrorSpec,
    Sample,
    dependency_diff,
    enumerate_branches,
    execute,
    rederive_dependencies,
)
from mbqc_evolve.graph import (
    AXES,
    GENERATORS,
    Graph,
    cluster_state,
    generator_matrix,
    lc_unitary,
    local_complement,
    pauli_projector,
    propagate_projector,
)
from mbqc_evolve.oracle import (
    HubbardParams,
    KitaevParams,
    hamiltonian,
    rotation,
    step_phase,
    step_unitary,
)
from mbqc_evolve.pattern import (
    census_count,
    formula_count,
    hubbard_pattern,
    kitaev_pattern,
    rzz_pattern,
    rzzz_pattern,
)
from mbqc_evolve.spectral import (
    SpectralConfig,
    error_experiment,
    exact_series,
    kitaev_initial_state,
    min_trotter_table,
    precision_report,
    trotter_series,
)
from mbqc_evolve.statevec import Statevector, fidelity, overlap

REFERENCE = SpectralConfig(L=1272, domega=0.01, eta=0.02)
PRECISION = SpectralConfig(L=46, domega=0.01, eta=0.02)
SWAP12 = np.eye(4)[[0, 2, 1, 3]]
SWAP13 = np.eye(8)[[(i & 2) | ((i & 1) << 2) | ((i >> 2) & 1) for i in range(8)]]


@pytest.fixture
def report(capsys):
    def emit(k: int, title: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[criterion {k:2d}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def reference_chain():
    p = KitaevParams(4, 0.4)
    psi = kitaev_initial_state(4)
    return p, psi, np.linalg.eigvalsh(hamiltonian(p))


def test_c01_rzz_exhaustive(report):
    rng = np.random.default_rng(1)
    worst, branches = 1.0, 0
    for theta in (0.0, np.pi / 7, np.pi / 2, 1.234, -2.5):
        p = rzz_pattern(theta)
        target_u = SWAP12 @ rotation("zz", (1, 2), theta, 2)
        for _ in range(20):
            psi = random_state(2, rng)
            for r in execute(p, psi, EnumerateAll()):
                branches += 1
                worst = min(worst, abs(np.vdot(target_u @ psi, r.positional().amps)) ** 2)
    ok = branches == 5 * 20 * 2**10 and worst >= 1 - 1e-10
    report(1, "R_zz exhaustive", ok, f"{branches} branches, min fidelity {worst:.15f}")


def test_c02_rzzz_sampled(report):
    rng = np.random.default_rng(2)
    theta = 0.7
    p = rzzz_pattern(theta)
    target_u = SWAP13 @ rotation("zzz", (1, 2, 3), theta, 3)
    worst, peak = 1.0, 0
    for k in range(200):
        psi = random_state(3, rng)
        r = execute(p, psi, Sample(k))
        worst = min(worst, abs(np.vdot(target_u @ psi, r.positional().amps)) ** 2)
        peak = max(peak, r.peak_live)
    ok = worst >= 1 - 1e-9 and peak <= 12
    report(2, "R_zzz sampled", ok, f"200 branches, min fidelity {worst:.12f}, peak live qubits {peak}")


def test_c03_subroutines(report):
    kit, hub = suite_kitaev(samples=100, seed=3), suite_hubbard(samples=100, seed=3)
    cases = kit["cases"] + hub["cases"]
    worst = min(c["min_fidelity"] for c in cases)
    ok = kit["passed"] and hub["passed"] and len(cases) == 5 and all(c["branches"] >= 100 for c in cases)
    names = ", ".join(c["pattern"] for c in cases)
    report(3, "subroutine equivalence", ok, f"{names}; 100 branches each, min fidelity {worst:.12f}")


def test_c04_dependency_cross_derivation(report):
    builds = [kitaev_pattern(N, 1, 0.4, 0.05) for N in (2, 3, 4)]
    builds += [kitaev_pattern(3, 2, 0.4, 0.05)]
    builds += [hubbard_pattern(N, 1, 0.4, 0.05) for N in (2, 3)]
    diffs = [dependency_diff(p, rederive_dependencies(p)) for p in builds]
    sets = sum(len(p.adaptive) + len(p.byproduct.z) + len(p.byproduct.x) for p in builds)
    bad = [p.name for p, d in zip(builds, diffs) if not d.empty]
    report(4, "dependency cross-derivation", not bad, f"{len(builds)} patterns, {sets} sets compared, mismatches: {bad or 'none'}")


def test_c05_compactification(report):
    r = suite_compactify()
    ok = r["passed"] and r["branches"] == 2**7 and (r["qubits"], r["measurements"]) == (5, 3)
    detail = (
        f"{r['qubits']} qubits / {r['measurements']} measurements, {r['branches']} branches, "
        f"min fidelity {r['min_fidelity']:.15f}, policy agreement {r['policy_agreement']:.15f}"
    )
    report(5, "compactification", ok, detail)


def _expected_counts(model: str, N: int, M: int) -> dict[str, int]:
    if model == "kitaev":
        slcs = {2: 24, 3: 41}.get(N, 17 * N - 10)
        ccs = {2: 13, 3: 20}.get(N, 7 * N - 1)
        return {"slcs": slcs * M, "ccs": ccs * M}
    return {"slcs": (156 * N - 144) * M, "ccs": (34 * N - 32) * M}


def test_c06_resource_counts(report):
    mismatches, checked = [], 0
    for model, N, M in itertools.product(("kitaev", "hubbard"), range(2, 9), range(1, 5)):
        want = _expected_counts(model, N, M)
        for rep, value in want.items():
            got = (formula_count(model, rep, N, M), census_count(model, rep, N, M))
            checked += 1
            if got != (value, value):
                mismatches.append((model, rep, N, M, got, value))
    spot = (formula_count("hubbard", "slcs", 2, 1), formula_count("hubbard", "ccs", 2, 1))
    ok = not mismatches and spot == (168, 36)
    report(6, "resource counts", ok, f"{checked} formula/census pairs over N=2..8, M=1..4; hubbard N=2 {spot}; mismatches {mismatches[:3] or 'none'}")


def test_c07_spectral_reproduction(report, reference_chain):
    p, psi, energies = reference_chain
    ex = exact_series(p, REFERENCE, psi)
    dist = [float(np.min(np.abs(energies - q.omega))) for q in ex.peaks]
    tr = trotter_series(p, REFERENCE, 8500, psi)
    same = len(tr.peaks) == len(ex.peaks) and all(
        abs(a.omega - b.omega) < REFERENCE.domega for a, b in zip(ex.peaks, tr.peaks)
    )
    ok = len(ex.peaks) == 6 and max(dist) < REFERENCE.domega and ex.sum_rule_deviation < 1e-2 and same
    detail = (
        f"{len(ex.peaks)} peaks, max |peak - eigenvalue| {max(dist):.2e}, sum-rule deviation "
        f"{ex.sum_rule_deviation:.2e}, Trotter M=8500 same peak set: {same}"
    )
    report(7, "spectral reproduction", ok, detail)


def test_c08_precision_estimates(report):
    target_max = {0.01: 1.8e3, 0.4: 7.8e4}
    lines, ok = [], True
    max_chi, min_gchi = 0.0, np.inf
    for g in (0.01, 0.05, 0.1, 0.4):
        Ms = min_trotter_table(KitaevParams(4, g), PRECISION, m_max=2**20, criterion="state")
        rep = precision_report(Ms, PRECISION, g)
        max_chi, min_gchi = max(max_chi, rep.max_chi), min(min_gchi, rep.min_g_chi)
        if g in target_max:
            ratio = max(Ms) / target_max[g]
            ok &= 0.5 <= ratio <= 2.0
            alt = max(min_trotter_table(KitaevParams(4, g), PRECISION, m_max=2**20, criterion="overlap"))
            lines.append(f"g={g}: max M {max(Ms)} (ratio {ratio:.2f}; overlap criterion {alt})")
    ok &= max_chi <= 0.2 and min_gchi >= 2e-4
    lines.append(f"max chi {max_chi:.3f}, min g*chi {min_gchi:.2e}")
    report(8, "precision estimates (state criterion)", ok, "; ".join(lines))


def _errors(N: int, roles, symmetric: bool) -> ErrorSpec:
    table = {f"{r}_{q}": ("uniform", 0.45, 0.56) for q in range(1, N + 1) for r in roles}
    return ErrorSpec(table, symmetric_matched=symmetric, relative=True)


def test_c09_error_tolerance(report, reference_chain):
    p, psi, energies = reference_chain
    d = REFERENCE.domega
    sym = error_experiment(p, REFERENCE, _errors(4, ("phi",), True), seed=7, M=8500, psi_i=psi)
    ind = error_experiment(p, REFERENCE, _errors(4, ("phi", "psi3"), False), seed=7, M=8500, psi_i=psi)
    sym_ok = sym.max_shift() < d and not sym.off_spectrum and sym.max_relative_weight_change() > 0.01
    ind_ok = ind.max_shift() > d or bool(ind.new_peaks)
    detail = (
        f"symmetric: max shift {sym.max_shift():.1e}, weight change {100 * sym.max_relative_weight_change():.0f}%, "
        f"off-spectrum peaks {len(sym.off_spectrum)}; independent: max shift {ind.max_shift():.3f}, "
        f"spurious peaks {len(ind.new_peaks)}"
    )
    report(9, "error tolerance", sym_ok and ind_ok, detail)


def _propagator_error(p, t: float, M: int) -> float:
    e, v = np.linalg.eigh(hamiltonian(p))
    exact = (v * np.exp(-1j * e * t)) @ v.conj().T
    phi = p.w * t / M
    u = np.linalg.matrix_power(step_unitary(p, phi) * step_phase(p, phi), M)
    return float(np.linalg.norm(u - exact, 2))


def test_c10_trotter_scaling(report):
    Ms = 2 ** np.arange(4, 11)
    slopes = {}
    for name, p in (("kitaev", KitaevParams(4, 0.4)), ("hubbard", HubbardParams(3, 0.4))):
        errs = [_propagator_error(p, 1.0, int(M)) for M in Ms]
        slopes[name] = -np.polyfit(np.log(Ms), np.log(errs), 1)[0]
    ok = all(abs(s - 1) <= 0.1 for s in slopes.values())
    report(10, "Trotter scaling", ok, ", ".join(f"{k} slope {v:.3f}" for k, v in slopes.items()))


def test_c11_property_suites(report):
    rng = np.random.default_rng(11)
    failures, checks = [], 0

    def check(name, cond):
        nonlocal checks
        checks += 1
        if not cond:
            failures.append(name)

    for _ in range(40):
        n = int(rng.integers(2, 7))
        pairs = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5]
        g = Graph(range(n), pairs)
        j = int(rng.integers(n))
        check("lc involution", local_complement(local_complement(g, j), j) == g)
        lhs = cluster_state(local_complement(g, j))
        check("lc state", abs(fidelity(lhs, lc_unitary(g, j).apply(cluster_state(g))) - 1) < 1e-10)
        psi, phi = random_state(3, rng), random_state(3, rng)
        a = Statevector(range(3), psi).apply_cz(0, 2).apply_pauli_rotation("xy", (1, 0), rng.normal())
        b = Statevector(range(3), phi).apply_cz(0, 2).apply_pauli_rotation("xy", (1, 0), 0.0)
        check("norm", abs(a.norm() - 1) < 1e-12)
        check("cz involution", np.allclose(Statevector(range(3), psi).apply_cz(0, 1).apply_cz(0, 1).amps, psi))
        check("inner product", abs(overlap(Statevector(range(3), psi), Statevector(range(3), phi)) - np.vdot(psi, phi)) < 1e-12)
        check("identity rotation", np.allclose(b.amps, Statevector(range(3), phi).apply_cz(0, 2).amps))
    for axis, m, gen in itertools.product(AXES, (1, -1), GENERATORS):
        b_, m2, through = propagate_projector(axis, m, gen)
        u = generator_matrix(through)
        check("propagation", np.abs(pauli_projector(axis, m) @ u - u @ pauli_projector(b_, m2)).max() < 1e-12)
    for theta in (0.0, 0.9):
        total = sum(r.probability for r in enumerate_branches(rzz_pattern(theta), random_state(2, rng)))
        check("probability completeness", abs(total - 1) < 1e-10)
    psi = random_state(2, rng)
    for seed in range(10):
        a, b = execute(rzz_pattern(0.5), psi, Sample(seed)), execute(rzz_pattern(0.5), psi, Sample(seed))
        check("determinism", a.outcomes == b.outcomes and np.array_equal(a.output.amps, b.output.amps))
    report(11, "property suites", not failures, f"{checks} checks, {len(failures)} failures {sorted(set(failures)) or ''}")
