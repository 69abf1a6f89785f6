"""Dense reference implementations: Hamiltonians, exact evolution and Trotter circuits.

Everything here is built from ``np.kron`` products of 2x2 matrices so that it
shares no code path with the statevector kernels it is used to check. Qubit
``q`` (1-based) is bit ``q - 1`` of the basis index, matching
:mod:`mbqc_evolve.statevec`.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
SIGMA = {
    "i": I2,
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Euler angles of R_y(lambda) = R_x(gamma) R_z(beta) R_x(alpha)
ALPHA = -np.pi / 2
BETA = np.pi / 2
GAMMA = np.pi / 2
LAMBDA = -np.pi / 2

MAX_QUBITS = 12


# ----------------------------------------------------------------------
# operators


def pauli_string(axes: str, wires: Sequence[int], n: int) -> np.ndarray:
    """Dense ``prod_k sigma_{axes[k]}`` on 1-based ``wires`` of an ``n``-qubit register."""
    if len(axes) != len(wires):
        raise ValueError("one axis letter per wire")
    if len(set(wires)) != len(wires):
        raise ValueError("wires must be distinct")
    ops = ["i"] * n
    for a, w in zip(axes, wires):
        if not 1 <= w <= n:
            raise ValueError(f"wire {w} outside 1..{n}")
        ops[w - 1] = a
    # highest wire is the most significant tensor factor
    return reduce(np.kron, [SIGMA[a] for a in reversed(ops)])


def rotation(axes: str, wires: Sequence[int], theta: float, n: int) -> np.ndarray:
    """``exp(-i theta/2 P)`` with ``P = pauli_string(axes, wires)``."""
    p = pauli_string(axes, wires, n)
    return np.cos(theta / 2) * np.eye(2**n, dtype=complex) - 1j * np.sin(theta / 2) * p


@dataclass(frozen=True)
class Gate:
    """Pauli rotation ``R_axes(theta)`` on 1-based ``wires``."""

    axes: str
    wires: tuple[int, ...]
    theta: float

    def matrix(self, n: int) -> np.ndarray:
        return rotation(self.axes, self.wires, self.theta, n)


def circuit_unitary(gates: Sequence[Gate], n: int) -> np.ndarray:
    """Product of ``gates`` applied in list order (first gate acts first)."""
    u = np.eye(2**n, dtype=complex)
    for g in gates:
        u = g.matrix(n) @ u
    return u


def _ops(*written: Gate) -> list[Gate]:
    """Gates written as an operator product (leftmost acts last), returned in time order."""
    return list(reversed(written))


# ----------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class KitaevParams:
    N: int
    g_mu: float
    w: float = 1.0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")
        if self.w <= 0:
            raise ValueError("w must be positive")
        if self.g_mu < 0:
            raise ValueError("g_mu must be non-negative")

    @property
    def n_qubits(self) -> int:
        return self.N

    @property
    def coupling(self) -> float:
        return self.g_mu


@dataclass(frozen=True)
class HubbardParams:
    N: int
    g_u: float
    w: float = 1.0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")
        if self.w <= 0:
            raise ValueError("w must be positive")

    @property
    def n_qubits(self) -> int:
        return 2 * self.N

    @property
    def coupling(self) -> float:
        return self.g_u


@dataclass(frozen=True)
class TrotterPlan:
    """Total time ``t`` (units of ``1/w``) split into ``M`` steps."""

    t: float
    M: int
    w: float = 1.0

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")

    @property
    def phi_m(self) -> float:
        return self.w * self.t / self.M


def _check_size(n: int) -> None:
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceed the dense limit of {MAX_QUBITS}")


# ----------------------------------------------------------------------
# Hamiltonians


def kitaev_hamiltonian(p: KitaevParams) -> np.ndarray:
    """``H = -w sum_j X_j X_{j+1} - (mu/2) sum_k Z_k`` with ``mu = 2 w g_mu``."""
    n = p.N
    _check_size(n)
    h = np.zeros((2**n, 2**n), dtype=complex)
    for j in range(1, n):
        h -= p.w * pauli_string("xx", (j, j + 1), n)
    for k in range(1, n + 1):
        h -= p.w * p.g_mu * pauli_string("z", (k,), n)
    return h


def hubbard_hamiltonian(p: HubbardParams, hopping: bool = True) -> np.ndarray:
    """``(w/2) sum_k (XZX + YZY)_{k,k+1,k+2} + (U/4) sum_j (I + Z_{2j-1})(I + Z_{2j})``.

    ``U = 2 w g_U``; wire ``2j - 1`` is spin up and ``2j`` spin down on site ``j``.
    ``hopping=False`` keeps only the interaction.
    """
    n = 2 * p.N
    _check_size(n)
    u_int = 2 * p.w * p.g_u
    h = np.zeros((2**n, 2**n), dtype=complex)
    if hopping:
        for k in range(1, n - 1):
            h += p.w / 2 * (pauli_string("xzx", (k, k + 1, k + 2), n) + pauli_string("yzy", (k, k + 1, k + 2), n))
    eye = np.eye(2**n, dtype=complex)
    for j in range(1, p.N + 1):
        a, b = 2 * j - 1, 2 * j
        h += u_int / 4 * (eye + pauli_string("z", (a,), n)) @ (eye + pauli_string("z", (b,), n))
    return h


def hamiltonian(p: KitaevParams | HubbardParams) -> np.ndarray:
    return kitaev_hamiltonian(p) if isinstance(p, KitaevParams) else hubbard_hamiltonian(p)


def _check_hermitian(h: np.ndarray) -> None:
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("Hamiltonian must be a square matrix")
    if not np.allclose(h, h.conj().T, atol=1e-12):
        raise ValueError("Hamiltonian is not Hermitian")


def ground_state(h: np.ndarray, tol: float = 1e-9) -> tuple[float, np.ndarray]:
    """Lowest eigenpair with a basis-independent choice inside a degenerate ground space.

    The returned vector is the normalized projection of the first
    computational basis state that overlaps the ground space, with its
    first non-negligible amplitude made real and positive.
    """
    _check_hermitian(h)
    evals, evecs = np.linalg.eigh(h)
    e0 = float(evals[0])
    ground = evecs[:, np.abs(evals - e0) < tol]
    proj = ground @ ground.conj().T
    for i in range(h.shape[0]):
        v = proj[:, i]
        nrm = np.linalg.norm(v)
        if nrm > 1e-6:
            v = v / nrm
            break
    k = int(np.flatnonzero(np.abs(v) > 1e-12)[0])
    v = v * np.exp(-1j * np.angle(v[k]))
    return e0, v


# ----------------------------------------------------------------------
# evolvers


class ExactEvolver:
    """``t -> exp(-iHt) psi`` from a one-time eigendecomposition; phase coherent."""

    def __init__(self, h: np.ndarray, psi: np.ndarray):
        _check_hermitian(h)
        self.evals, self.evecs = np.linalg.eigh(h)
        self.psi = np.asarray(psi, dtype=complex)
        self._coef = self.evecs.conj().T @ self.psi

    def state(self, t: float) -> np.ndarray:
        return self.evecs @ (np.exp(-1j * self.evals * t) * self._coef)

    def overlap(self, t: float) -> complex:
        return complex(np.sum(np.abs(self._coef) ** 2 * np.exp(-1j * self.evals * t)))

    def weights(self) -> np.ndarray:
        """``|<u_j|psi>|^2`` for each eigenvalue in ``self.evals``."""
        return np.abs(self._coef) ** 2

    def __call__(self, t: float) -> tuple[np.ndarray, complex]:
        return self.state(t), self.overlap(t)


def exact_evolver(h: np.ndarray, psi: np.ndarray) -> ExactEvolver:
    return ExactEvolver(h, psi)


# -- Kitaev circuits --------------------------------------------------


def kitaev_product_gates(N: int, g_mu: float, phi_m: float) -> list[Gate]:
    """One step ``prod_j R_xx(-2 phi_M) prod_k R_z(-2 g_mu phi_M)`` in time order."""
    gates = [Gate("z", (k,), -2 * g_mu * phi_m) for k in range(1, N + 1)]
    gates += [Gate("xx", (j, j + 1), -2 * phi_m) for j in range(1, N)]
    return gates


def _kitaev_pre(q: int, g_mu: float, phi_m: float) -> list[Gate]:
    # R_x(2 g phi + gamma) R_z(beta) R_x(alpha)
    return _ops(Gate("x", (q,), 2 * g_mu * phi_m + GAMMA), Gate("z", (q,), BETA), Gate("x", (q,), ALPHA))


def _kitaev_post(q: int) -> list[Gate]:
    # R_x(-alpha) R_z(-beta) R_x(-gamma)
    return _ops(Gate("x", (q,), -ALPHA), Gate("z", (q,), -BETA), Gate("x", (q,), -GAMMA))


def kitaev_block_gates(N: int, g_mu: float, phi_m: float) -> list[Gate]:
    """One step in the MBQC-adapted block form, in time order.

    ``N = 2`` is a single block; longer chains apply ``W^(1)``, then the
    ``V^(j)`` for ``j = 2 .. N-2``, then the closing block.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    gates: list[Gate] = []
    for j in range(1, N):
        k = j + 1
        if j == 1:
            gates += _kitaev_pre(j, g_mu, phi_m)
        gates += _kitaev_pre(k, g_mu, phi_m)
        gates.append(Gate("zz", (j, k), -2 * phi_m))
        gates += _kitaev_post(j)
        if j == N - 1:
            gates += _kitaev_post(k)
    return gates


# -- Hubbard circuits -------------------------------------------------


def hubbard_product_gates(N: int, g_u: float, phi_m: float) -> list[Gate]:
    """One step in time order: hopping terms for ``k = 1 .. 2N-2``, then on-site terms.

    Within each ``k`` the ``XZX`` and ``YZY`` rotations commute; the order
    across ``k`` follows the block form, which acts on the lowest triple first.
    """
    gates: list[Gate] = []
    for k in range(1, 2 * N - 1):
        gates += [Gate("xzx", (k, k + 1, k + 2), phi_m), Gate("yzy", (k, k + 1, k + 2), phi_m)]
    for j in range(1, N + 1):
        a, b = 2 * j - 1, 2 * j
        gates += [Gate("z", (a,), g_u * phi_m), Gate("z", (b,), g_u * phi_m), Gate("zz", (a, b), g_u * phi_m)]
    return gates


def _hubbard_hops(a: int, b: int, c: int, d: int, phi: float) -> list[Gate]:
    """Shared part of both blocks: the four R_zzz gadgets and their dressing, time order."""
    x = lambda q, t: Gate("x", (q,), t)  # noqa: E731
    z = lambda q, t: Gate("z", (q,), t)  # noqa: E731
    return _ops(
        Gate("zzz", (b, c, d), phi),
        x(b, GAMMA), z(b, BETA), x(b, LAMBDA + ALPHA), x(d, GAMMA), z(d, BETA), x(d, LAMBDA + ALPHA),
        Gate("zzz", (b, c, d), phi),
        x(a, ALPHA), x(b, -ALPHA), x(c, ALPHA), x(d, -ALPHA),
        Gate("zzz", (a, b, c), phi),
        x(a, -LAMBDA - ALPHA), z(a, -BETA), x(a, -GAMMA), x(c, -LAMBDA - ALPHA), z(c, -BETA), x(c, -GAMMA),
        Gate("zzz", (a, b, c), phi),
        x(a, GAMMA), z(a, BETA), x(a, ALPHA), x(c, GAMMA), z(c, BETA), x(c, ALPHA),
    )


def _hubbard_onsite(a: int, b: int, g_u: float, phi: float) -> list[Gate]:
    return _ops(
        Gate("zz", (a, b), g_u * phi),
        Gate("z", (a,), g_u * phi),
        Gate("x", (b,), -ALPHA),
        Gate("z", (b,), -BETA),
        Gate("x", (b,), -g_u * phi - GAMMA),
    )


def hubbard_block_gates(N: int, g_u: float, phi_m: float) -> list[Gate]:
    """One step as ``V^(1)``, ..., ``V^(N-2)`` followed by the closing block, in time order."""
    if N < 2:
        raise ValueError("N must be >= 2")
    gates: list[Gate] = []
    for j in range(1, N):
        a, b, c, d = 2 * j - 1, 2 * j, 2 * j + 1, 2 * j + 2
        gates += _hubbard_hops(a, b, c, d, phi_m)
        if j < N - 1:
            gates += _ops(
                Gate("x", (d,), -ALPHA), Gate("z", (d,), -BETA), Gate("x", (d,), -GAMMA)
            )
            gates += _hubbard_onsite(a, b, g_u, phi_m)
        else:
            gates += _hubbard_onsite(c, d, g_u, phi_m)
            gates += _hubbard_onsite(a, b, g_u, phi_m)
    return gates


# -- step unitaries and Trotter evolvers ------------------------------


def step_unitary(p: KitaevParams | HubbardParams, phi_m: float, form: str = "product") -> np.ndarray:
    """Single Trotter step as a dense matrix; ``form`` is ``product`` or ``block``."""
    n = p.n_qubits
    _check_size(n)
    if isinstance(p, KitaevParams):
        gates = kitaev_product_gates(p.N, p.g_mu, phi_m) if form == "product" else kitaev_block_gates(p.N, p.g_mu, phi_m)
    else:
        gates = hubbard_product_gates(p.N, p.g_u, phi_m) if form == "product" else hubbard_block_gates(p.N, p.g_u, phi_m)
    if form not in ("product", "block"):
        raise ValueError(f"form must be 'product' or 'block', got {form!r}")
    return circuit_unitary(gates, n)


def step_phase(p: KitaevParams | HubbardParams, phi_m: float) -> complex:
    """Scalar dropped by the gate product: the identity part of the Hubbard interaction."""
    if isinstance(p, HubbardParams):
        return complex(np.exp(-1j * p.N * p.g_u * phi_m / 2))
    return 1.0 + 0j


class TrotterEvolver:
    """``t -> (step(w t / M))^M psi`` at a fixed number of steps ``M``.

    The identity part of the Hamiltonian is restored as a scalar so that
    overlaps are phase coherent with :class:`ExactEvolver`.
    """

    def __init__(self, p: KitaevParams | HubbardParams, M: int, psi: np.ndarray, form: str = "product"):
        if M < 1:
            raise ValueError("M must be >= 1")
        self.params, self.M, self.form = p, M, form
        self.psi = np.asarray(psi, dtype=complex)

    def propagator(self, t: float) -> np.ndarray:
        phi = self.params.w * t / self.M
        u = step_unitary(self.params, phi, self.form) * step_phase(self.params, phi)
        return np.linalg.matrix_power(u, self.M)

    def state(self, t: float) -> np.ndarray:
        return self.propagator(t) @ self.psi

    def overlap(self, t: float) -> complex:
        return complex(np.vdot(self.psi, self.state(t)))

    def __call__(self, t: float) -> tuple[np.ndarray, complex]:
        s = self.state(t)
        return s, complex(np.vdot(self.psi, s))


def trotter_evolver_kitaev(p: KitaevParams, plan: TrotterPlan, psi: np.ndarray | None = None):
    """Evolver for ``plan.M`` Kitaev steps; returns ``psi -> U^M psi`` and exposes ``step``."""
    return _PlanEvolver(p, plan, psi)


def trotter_evolver_hubbard(p: HubbardParams, plan: TrotterPlan, psi: np.ndarray | None = None):
    return _PlanEvolver(p, plan, psi)


class _PlanEvolver:
    def __init__(self, p, plan: TrotterPlan, psi=None):
        self.params, self.plan = p, plan
        self.step = step_unitary(p, plan.phi_m)
        self.phase = step_phase(p, plan.phi_m)
        self.unitary = np.linalg.matrix_power(self.step * self.phase, plan.M)
        self.psi = psi

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        return self.unitary @ np.asarray(psi, dtype=complex)


def trotter_error(p: KitaevParams | HubbardParams, t: float, M: int, psi: np.ndarray) -> float:
    """``|| U_trotter^M psi - exp(-iHt) psi ||`` at fixed ``t``."""
    exact = ExactEvolver(hamiltonian(p), psi).state(t)
    return float(np.linalg.norm(TrotterEvolver(p, M, psi).state(t) - exact))


# -- measurement-angle errors -----------------------------------------


def kitaev_error_unitaries(N: int, errors) -> tuple[np.ndarray, np.ndarray]:
    """``(U_eps, U~_eps)`` induced by Euler-angle errors on every wire.

    ``errors`` maps angle tags (``psi-1_q``, ``psi-2_q``, ``phi_q``, ``psi1_q``,
    ``psi2_q``, ``psi3_q``) to absolute errors; missing tags mean zero. Per
    wire ``U_eps = R_z(-e_phi) R_y(-e_psi-2) R_x(e_psi-1)`` and ``U~_eps`` is the
    same with ``psi3, psi2, psi1``. One Trotter step then reads
    ``U~_eps^dag U_g U_eps``.
    """
    get = errors.get if hasattr(errors, "get") else (lambda k, d=0.0: errors(k))
    pre, post = [], []
    for q in range(1, N + 1):
        pre += [
            Gate("x", (q,), get(f"psi-1_{q}", 0.0)),
            Gate("y", (q,), -get(f"psi-2_{q}", 0.0)),
            Gate("z", (q,), -get(f"phi_{q}", 0.0)),
        ]
        post += [
            Gate("x", (q,), get(f"psi1_{q}", 0.0)),
            Gate("y", (q,), -get(f"psi2_{q}", 0.0)),
            Gate("z", (q,), -get(f"psi3_{q}", 0.0)),
        ]
    return circuit_unitary(pre, N), circuit_unitary(post, N)
