from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state
from mbqc_evolve.statevec import (
    PAULI,
    ImpossibleBranch,
    RegisterError,
    Statevector,
    XYBasis,
    attach_plus,
    fidelity,
    measure_pauli,
    measure_xy,
    new_plus_register,
    overlap,
    rotation_matrix,
)

R2 = 1 / np.sqrt(2)


def test_plus_register_amplitudes():
    assert np.allclose(new_plus_register(["a"]).amps, [R2, R2])
    assert np.allclose(new_plus_register(["a", "b"]).amps, 0.5)


def test_plus_register_is_x_stabilized():
    sv = new_plus_register(range(4))
    for q in range(4):
        assert sv.expectation({q: "x"}) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("labels", [[], ["a", "a"]])
def test_plus_register_rejects_bad_labels(labels):
    with pytest.raises((ValueError, RegisterError)):
        new_plus_register(labels)


def test_cz_on_plus_plus():
    sv = new_plus_register(["a", "b"]).apply_cz("a", "b")
    # (|0+> + |1->)/sqrt2: only |11> flips sign
    assert np.allclose(sv.amps, [0.5, 0.5, 0.5, -0.5])


def test_cz_involution_and_eleven(rng):
    psi = random_state(3, rng)
    sv = Statevector("abc", psi).apply_cz("a", "c").apply_cz("a", "c")
    assert np.allclose(sv.amps, psi)
    one = Statevector("ab", [0, 0, 0, 1]).apply_cz("a", "b")
    assert np.allclose(one.amps, [0, 0, 0, -1])


def test_cz_errors():
    sv = new_plus_register("ab")
    with pytest.raises(ValueError):
        sv.apply_cz("a", "a")
    with pytest.raises(RegisterError):
        sv.apply_cz("a", "z")


def test_rotation_identity_at_zero(rng):
    psi = random_state(3, rng)
    sv = Statevector("abc", psi).apply_pauli_rotation("xyz", "abc", 0.0)
    assert np.allclose(sv.amps, psi, atol=1e-14)


def test_rzz_on_zero_zero():
    th = 0.83
    sv = Statevector("ab").apply_pauli_rotation("zz", "ab", th)
    assert sv.amps[0] == pytest.approx(np.exp(-1j * th / 2), abs=1e-14)


@pytest.mark.parametrize("theta", [0.3, 1.0, 2.7])
def test_rxx_euler_conjugation(theta):
    lam = np.pi / 2
    ry = lambda a: rotation_matrix("y", a)  # noqa: E731
    left = np.kron(ry(-lam), ry(-lam))
    right = np.kron(ry(lam), ry(lam))
    assert np.abs(rotation_matrix("xx", theta) - left @ rotation_matrix("zz", theta) @ right).max() < 1e-12


@pytest.mark.parametrize("n,sites", [(3, (0, 2)), (4, (1, 2, 3)), (2, (0,))])
def test_z_rotation_is_diagonal_parity(rng, n, sites):
    th = 1.37
    psi = random_state(n, rng)
    sv = Statevector(range(n), psi).apply_pauli_rotation("z" * len(sites), sites, th)
    idx = np.arange(2**n)
    par = sum((idx >> s) & 1 for s in sites) % 2
    expected = psi * np.exp(-1j * th / 2 * (1 - 2 * par))
    assert np.abs(sv.amps - expected).max() < 1e-12


def test_rotation_matches_dense_matrix(rng):
    psi = random_state(3, rng)
    sv = Statevector("abc", psi).apply_pauli_rotation("xy", "ca", 0.9)
    # sites (c, a) -> dense operator with a on bit 0 needs axes ordered by bit
    u = np.kron(PAULI["x"], np.kron(np.eye(2), PAULI["y"]))
    dense = (np.cos(0.45) * np.eye(8) - 1j * np.sin(0.45) * u) @ psi
    assert np.allclose(sv.amps, dense)


def test_rotation_argument_errors():
    sv = new_plus_register("ab")
    with pytest.raises(ValueError):
        sv.apply_pauli_rotation("zz", "a", 0.1)
    with pytest.raises(ValueError):
        sv.apply_pauli_rotation("zz", "aa", 0.1)
    with pytest.raises(ValueError):
        sv.apply_pauli_rotation("zq", "ab", 0.1)


def test_measure_plus_in_xy_bases():
    s, p, sv = measure_xy(new_plus_register("a"), "a", XYBasis(0.0), ("forced", 0))
    assert (s, p) == (0, pytest.approx(1.0))
    assert sv.num_qubits == 0
    for s in (0, 1):
        _, p, _ = measure_xy(new_plus_register("a"), "a", np.pi / 2, ("forced", s))
        assert p == pytest.approx(0.5, abs=1e-12)


def test_forcing_impossible_branch():
    with pytest.raises(ImpossibleBranch):
        new_plus_register("a").measure_xy("a", 0.0, ("forced", 1))


def test_measure_pauli_on_plus():
    m, p, _ = measure_pauli(new_plus_register("a"), "a", "x", ("sample", 0))
    assert (m, p) == (1, pytest.approx(1.0))
    for m in (1, -1):
        _, p, _ = measure_pauli(new_plus_register("a"), "a", "z", ("forced", m))
        assert p == pytest.approx(0.5)


def test_measured_label_is_dead(rng):
    sv = Statevector("abc", random_state(3, rng))
    sv.measure_pauli("b", "z", ("sample", 1))
    assert sv.amps.shape == (4,)
    assert sv.labels == ["a", "c"]
    with pytest.raises(RegisterError):
        sv.apply_1q(PAULI["x"], "b")


def test_bad_mode_rejected():
    with pytest.raises(ValueError):
        new_plus_register("a").measure_xy("a", 0.0, ("guess", 0))


def test_overlap_basics(rng):
    psi = Statevector("ab", random_state(2, rng))
    assert overlap(psi, psi) == pytest.approx(1.0)
    assert overlap(Statevector("a", [1, 0]), Statevector("a", [0, 1])) == 0
    with pytest.raises(RegisterError):
        overlap(Statevector("a"), Statevector("b"))


def test_attach_plus():
    sv = attach_plus(Statevector([]), "a")
    assert np.allclose(sv.amps, [R2, R2])
    with pytest.raises(RegisterError):
        sv.attach_plus("a")


def test_attach_then_measure_x_restores(rng):
    psi = random_state(2, rng)
    sv = Statevector("ab", psi).attach_plus("c")
    m, p = sv.measure_pauli("c", "x", ("sample", 3))
    assert (m, p) == (1, pytest.approx(1.0))
    assert np.allclose(sv.amps, psi)


def test_reorder_and_fidelity(rng):
    psi = random_state(3, rng)
    a = Statevector("abc", psi)
    b = a.reorder("cab")
    assert fidelity(a, b) == pytest.approx(1.0)
    assert b.amps[0b001] == pytest.approx(a.amps[0b100])


def test_dump_round_trip(rng):
    sv = Statevector("ab", random_state(2, rng))
    text = sv.dump()
    assert text.splitlines()[1].startswith("10\t")
    assert np.array_equal(Statevector.from_dump(text, "ab").amps, sv.amps)


# ----------------------------------------------------------------------
# properties

axes = st.sampled_from("xyz")
angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


@st.composite
def gate_sequences(draw, n=3):
    ops = []
    for _ in range(draw(st.integers(1, 6))):
        k = draw(st.integers(1, n))
        sites = draw(st.permutations(range(n)))[:k]
        ops.append(("rot", "".join(draw(axes) for _ in sites), tuple(sites), draw(angles)))
        if draw(st.booleans()):
            a, b = draw(st.permutations(range(n)))[:2]
            ops.append(("cz", a, b))
    return ops


def _run(ops, psi):
    sv = Statevector(range(3), psi)
    for op in ops:
        if op[0] == "rot":
            sv.apply_pauli_rotation(op[1], op[2], op[3])
        else:
            sv.apply_cz(op[1], op[2])
    return sv


@settings(max_examples=60, deadline=None)
@given(gate_sequences(), st.integers(0, 2**31))
def test_gates_preserve_norm_and_inner_products(ops, seed):
    rng = np.random.default_rng(seed)
    psi, phi = random_state(3, rng), random_state(3, rng)
    a, b = _run(ops, psi), _run(ops, phi)
    assert abs(a.norm() - 1) < 1e-12
    assert abs(overlap(a, b) - np.vdot(psi, phi)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), angles, st.integers(0, 2))
def test_measurement_probabilities_complete(seed, angle, q):
    rng = np.random.default_rng(seed)
    psi = random_state(3, rng)
    probs = []
    for s in (0, 1):
        sv = Statevector(range(3), psi)
        try:
            probs.append(sv.measure_xy(q, angle, ("forced", s))[1])
        except ImpossibleBranch:
            probs.append(0.0)
    assert abs(sum(probs) - 1) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_sampling_is_deterministic_by_seed(seed):
    psi = random_state(4, np.random.default_rng(seed))
    outs = []
    for _ in range(2):
        sv = Statevector(range(4), psi)
        outs.append([sv.measure_xy(q, 0.3 * q, ("sample", seed))[0] for q in range(3)])
    assert outs[0] == outs[1]


def test_constructor_copies_amplitudes():
    a = np.full(4, 0.5, dtype=complex)
    Statevector("ab", a).apply_cz("a", "b")
    assert np.allclose(a, 0.5)
