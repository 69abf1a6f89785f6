from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state
from mbqc_evolve.cli import target_unitary
from mbqc_evolve.executor import (
    DependencyMismatch,
    EnumerateAll,
    ErrorSpec,
    Forced,
    Sample,
    check_dependencies,
    dependency_diff,
    enumerate_branches,
    execute,
    inject_errors,
    measurement_order,
    phase_audit,
    rederive_dependencies,
)
from mbqc_evolve.oracle import KitaevParams, kitaev_error_unitaries, rotation, step_unitary
from mbqc_evolve.pattern import (
    Site,
    compactify_pattern,
    euler_leg,
    hubbard_pattern,
    kitaev_pattern,
    rzz_pattern,
    rzzz_pattern,
)

SWAP = np.eye(4)[[0, 2, 1, 3]]


def _target(p, psi):
    return target_unitary(p) @ psi


# ----------------------------------------------------------------------
# gadgets over every branch


def test_rzz_zero_is_swap_positionally(rng):
    p = rzz_pattern(0.0)
    psi = random_state(2, rng)
    for r in enumerate_branches(p, psi):
        assert abs(np.vdot(SWAP @ psi, r.positional().amps)) ** 2 == pytest.approx(1.0, abs=1e-10)
        assert r.fidelity_to(psi) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("theta", [0.0, 0.4, np.pi / 2, -1.1])
def test_rzz_all_branches(theta, rng):
    p = rzz_pattern(theta)
    psi = random_state(2, rng)
    results = list(execute(p, psi, EnumerateAll()))
    assert len(results) == 2 ** len(p.measured)
    assert sum(r.probability for r in results) == pytest.approx(1.0, abs=1e-10)
    assert min(r.fidelity_to(_target(p, psi)) for r in results) > 1 - 1e-10


def test_euler_identity_and_y_rotation(rng):
    psi = random_state(1, rng)
    for r in enumerate_branches(euler_leg(0.0, 0.0, 0.0), psi):
        assert r.fidelity_to(psi) == pytest.approx(1.0, abs=1e-10)
    # rx(pi/2) rz(pi/2) rx(-pi/2) conjugates z into -y
    ry = rotation("y", (1,), -np.pi / 2, 1)
    for r in enumerate_branches(euler_leg(-np.pi / 2, np.pi / 2, np.pi / 2), psi):
        assert r.fidelity_to(ry @ psi) == pytest.approx(1.0, abs=1e-10)


def test_rzzz_sampled_branches_and_frontier(rng):
    p = rzzz_pattern(0.731)
    psi = random_state(3, rng)
    t = _target(p, psi)
    for seed in range(20):
        r = execute(p, psi, Sample(seed))
        assert r.fidelity_to(t) > 1 - 1e-10
        assert r.peak_live <= 12


# ----------------------------------------------------------------------
# modes


def test_forced_branch_and_probability(rng):
    p = rzz_pattern(0.3)
    psi = random_state(2, rng)
    outcomes = {n.site: 1 for n in p.measured}
    r = execute(p, psi, Forced(outcomes))
    assert r.outcomes == outcomes
    assert r.probability == pytest.approx(2.0 ** -len(p.measured))


def test_forced_requires_full_assignment(rng):
    p = rzz_pattern(0.3)
    with pytest.raises(ValueError):
        execute(p, random_state(2, rng), Forced({Site(1, 1, 1): 0}))


@pytest.mark.parametrize("psi", [[1, 0], [0, 1], [2**-0.5, 2**-0.5]])
def test_branches_uniform_for_any_input(psi):
    p = euler_leg(0.3, -0.2, 0.9)
    probs = [r.probability for r in enumerate_branches(p, np.array(psi, dtype=complex))]
    assert len(probs) == 2 ** len(p.measured)
    assert np.allclose(probs, 2.0 ** -len(p.measured))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_sampling_deterministic(seed):
    p = rzz_pattern(0.9)
    psi = random_state(2, np.random.default_rng(seed))
    a, b = execute(p, psi, Sample(seed)), execute(p, psi, Sample(seed))
    assert a.outcomes == b.outcomes
    assert np.array_equal(a.output.amps, b.output.amps)


def test_measurement_order_respects_dependencies():
    p = kitaev_pattern(3, 1, 0.4, 0.05)
    pos = {s: i for i, s in enumerate(measurement_order(p))}
    for n in p.adaptive:
        assert all(pos[d] < pos[n.site] for d in n.angle.parity_deps)


# ----------------------------------------------------------------------
# model patterns


@pytest.mark.parametrize(
    "build,n",
    [
        (lambda: kitaev_pattern(2, 1, 0.4, 0.05), 2),
        (lambda: kitaev_pattern(3, 2, 0.4, 0.05), 3),
        (lambda: hubbard_pattern(2, 1, 0.4, 0.05), 4),
    ],
)
def test_model_patterns_sampled(build, n, rng):
    p = build()
    psi = random_state(n, rng)
    t = _target(p, psi)
    for seed in range(12):
        assert execute(p, psi, Sample(seed)).fidelity_to(t) > 1 - 1e-9


def test_compact_kitaev_sampled(rng):
    p = compactify_pattern(kitaev_pattern(2, 1, 0.4, 0.05))
    psi = random_state(2, rng)
    t = _target(p, psi)
    for seed in range(40):
        assert execute(p, psi, Sample(seed)).fidelity_to(t) > 1 - 1e-10


@pytest.mark.parametrize(
    "build",
    [
        lambda: kitaev_pattern(2, 1, 0.4, 0.05),
        lambda: kitaev_pattern(3, 2, 0.4, 0.05),
        lambda: hubbard_pattern(2, 1, 0.4, 0.05),
        lambda: hubbard_pattern(3, 1, 0.4, 0.05),
    ],
)
def test_rederived_dependencies_match_transcribed(build):
    p = build()
    assert dependency_diff(p, rederive_dependencies(p)).empty
    check_dependencies(p)


def test_literal_rewiring_is_caught(rng):
    p = hubbard_pattern(3, 1, 0.4, 0.05, literal_rewiring=True)
    diff = dependency_diff(p, rederive_dependencies(p))
    assert not diff.empty
    assert diff.report()
    with pytest.raises(DependencyMismatch):
        check_dependencies(p)


# ----------------------------------------------------------------------
# errors and phases


def test_zero_errors_leave_pattern_unchanged():
    p = kitaev_pattern(2, 1, 0.4, 0.05)
    assert inject_errors(p, ErrorSpec({})).to_text() == p.to_text()
    assert inject_errors(p, ErrorSpec({"phi": 0.0})).to_text() == p.to_text()


def test_unknown_error_role_rejected():
    with pytest.raises(ValueError):
        inject_errors(kitaev_pattern(2, 1, 0.4, 0.05), ErrorSpec({"chi": 0.1}))


def test_symmetric_spec_copies_partners():
    spec = ErrorSpec({"phi_1": 0.3, "psi-2": 0.1}, symmetric_matched=True)
    assert spec.resolved() == {"phi_1": 0.3, "psi3_1": 0.3, "psi-2": 0.1, "psi2": 0.1}
    with pytest.raises(ValueError):
        ErrorSpec({"phi_1": 0.3, "psi3_1": 0.2}, symmetric_matched=True).resolved()


def test_error_draw_is_seeded():
    spec = ErrorSpec({"phi": ("uniform", 0.45, 0.56), "psi3": ("normal", 0.1)})
    a, b = spec.draw(7).errors, spec.draw(7).errors
    assert a == b
    assert 0.45 <= a["phi"] <= 0.56
    with pytest.raises(ValueError):
        ErrorSpec({"phi": ("cauchy", 1.0)}).draw(0)


@pytest.mark.parametrize(
    "errs,sym",
    [
        ({"phi_1": 0.3, "psi-1_2": 0.2, "psi-2_1": -0.1}, True),
        ({"phi_1": 0.3, "psi3_1": -0.2, "psi1_2": 0.15}, False),
    ],
)
def test_injected_errors_match_dense_model(errs, sym, rng):
    p = kitaev_pattern(2, 1, 0.4, 0.05)
    spec = ErrorSpec(errs, symmetric_matched=sym)
    q = inject_errors(p, spec)
    u, ut = kitaev_error_unitaries(2, spec.resolved())
    psi = random_state(2, rng)
    t = ut.conj().T @ step_unitary(KitaevParams(2, 0.4), 0.05, "block") @ u @ psi
    for seed in range(8):
        assert execute(q, psi, Sample(seed)).fidelity_to(t) > 1 - 1e-9


def test_independent_errors_break_conjugation(rng):
    p = kitaev_pattern(2, 1, 0.4, 0.05)
    psi = random_state(2, rng)
    ind = inject_errors(p, ErrorSpec({"phi_1": 0.3, "psi3_1": -0.2}))
    u, _ = kitaev_error_unitaries(2, {"phi_1": 0.3, "psi3_1": 0.3})
    sym_target = u.conj().T @ step_unitary(KitaevParams(2, 0.4), 0.05, "block") @ u @ psi
    assert execute(ind, psi, Sample(0)).fidelity_to(sym_target) < 1 - 1e-4


def test_phase_audit_rzz_zero(rng):
    p = rzz_pattern(0.0)
    psi = random_state(2, rng)
    audit = phase_audit(p, psi, _target(p, psi))
    assert min(audit.fidelities) > 1 - 1e-10
    # sign is a quadratic function of the outcome bits, so only {0, pi} is guaranteed
    for ph in audit.phases:
        d = abs(np.angle(np.exp(1j * (ph - audit.phases[0]))))
        assert min(d, abs(d - np.pi)) < 1e-8
    assert len(audit.table()) == 2 ** len(p.measured)


def test_phase_audit_flags_theta_dependent_phase(rng):
    p = rzz_pattern(0.37)
    psi = random_state(2, rng)
    audit = phase_audit(p, psi, _target(p, psi))
    assert min(audit.fidelities) > 1 - 1e-10
    assert not audit.outcome_independent
    # relative phases lie in {0, pi} + {0, -theta}
    rel = np.mod(np.array(audit.phases) - audit.phases[0], np.pi)
    d = np.minimum(np.abs(np.exp(1j * 2 * rel) - 1), np.abs(np.exp(1j * 2 * (rel + 0.37)) - 1))
    assert d.max() < 1e-8


def test_phase_audit_kitaev_sampled(rng):
    p = kitaev_pattern(2, 1, 0.4, 0.05)
    psi = random_state(2, rng)
    audit = phase_audit(p, psi, _target(p, psi), branches=10, seed=3)
    assert len(audit.phases) == 10
    assert min(audit.fidelities) > 1 - 1e-9
