"""Dense statevector engine over a dynamic register of labeled qubits.

The ``i``-th label in ``Statevector.labels`` owns bit ``i`` of the basis
index (little-endian). Qubits can be attached lazily as ``|+>`` and are
removed from the register once measured, which keeps the live register at
the frontier width of a measurement pattern.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

QubitLabel = Hashable

IMPOSSIBLE_BRANCH_TOL = 1e-12

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class ImpossibleBranch(ValueError):
    """Raised when a forced measurement outcome has vanishing probability."""


class RegisterError(KeyError):
    """Raised on unknown, dead or duplicated qubit labels."""


@dataclass(frozen=True)
class XYBasis:
    """Measurement basis ``(|0> + (-1)^s e^{i angle}|1>)/sqrt(2)`` in the x-y plane."""

    angle: float

    def vector(self, s: int) -> np.ndarray:
        sign = -1.0 if s else 1.0
        return np.array([1.0, sign * np.exp(1j * self.angle)], dtype=complex) / np.sqrt(2.0)

    def projector(self, s: int) -> np.ndarray:
        v = self.vector(s)
        return np.outer(v, v.conj())


def _check_mode(mode: tuple) -> tuple[str, object]:
    if not isinstance(mode, tuple) or len(mode) != 2 or mode[0] not in ("sample", "forced"):
        raise ValueError(f"mode must be ('sample', rng) or ('forced', s), got {mode!r}")
    return mode


class Statevector:
    """Unit-norm amplitude vector over an ordered list of live qubit labels.

    Parameters
    ----------
    labels : sequence of hashable
        Register order; label ``labels[i]`` owns bit ``i``.
    amps : array_like, optional
        Amplitudes of length ``2**len(labels)``. Defaults to ``|0...0>``.
    """

    def __init__(self, labels: Sequence[QubitLabel] = (), amps: np.ndarray | None = None):
        labels = list(labels)
        if len(set(labels)) != len(labels):
            raise RegisterError(f"duplicate labels in {labels!r}")
        n = len(labels)
        if amps is None:
            amps = np.zeros(2**n, dtype=complex)
            amps[0] = 1.0
        amps = np.array(amps, dtype=complex).reshape(-1)
        if amps.size != 2**n:
            raise ValueError(f"expected {2**n} amplitudes, got {amps.size}")
        self.labels: list[QubitLabel] = labels
        # tensor axis n-1-i holds bit i
        self._psi = amps.reshape((2,) * n) if n else amps.reshape(())

    # ------------------------------------------------------------------
    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    @property
    def amps(self) -> np.ndarray:
        """Flat amplitude array in little-endian basis order."""
        return self._psi.reshape(-1)

    def copy(self) -> Statevector:
        out = Statevector.__new__(Statevector)
        out.labels = list(self.labels)
        out._psi = self._psi.copy()
        return out

    def norm(self) -> float:
        return float(np.linalg.norm(self._psi))

    def _axis(self, label: QubitLabel) -> int:
        try:
            i = self.labels.index(label)
        except ValueError:
            raise RegisterError(f"qubit {label!r} is not live") from None
        return self.num_qubits - 1 - i

    def __contains__(self, label: QubitLabel) -> bool:
        return label in self.labels

    def __repr__(self) -> str:
        return f"Statevector(n={self.num_qubits}, labels={self.labels!r})"

    # ------------------------------------------------------------------
    def attach_plus(self, label: QubitLabel) -> Statevector:
        """Append ``|+>`` on a fresh label as the new most significant bit."""
        if label in self.labels:
            raise RegisterError(f"qubit {label!r} already live")
        plus = np.full(2, 1 / np.sqrt(2.0), dtype=complex)
        self._psi = np.multiply.outer(plus, self._psi)
        self.labels.append(label)
        return self

    def attach(self, label: QubitLabel, vec: np.ndarray) -> Statevector:
        """Append an arbitrary single-qubit state on a fresh label."""
        if label in self.labels:
            raise RegisterError(f"qubit {label!r} already live")
        vec = np.asarray(vec, dtype=complex)
        self._psi = np.multiply.outer(vec / np.linalg.norm(vec), self._psi)
        self.labels.append(label)
        return self

    def apply_cz(self, j: QubitLabel, k: QubitLabel) -> Statevector:
        if j == k:
            raise ValueError("CZ needs two distinct qubits")
        aj, ak = self._axis(j), self._axis(k)
        idx = [slice(None)] * self.num_qubits
        idx[aj] = 1
        idx[ak] = 1
        self._psi[tuple(idx)] *= -1
        return self

    def apply_1q(self, u: np.ndarray, j: QubitLabel) -> Statevector:
        """Apply a 2x2 matrix to qubit ``j``."""
        ax = self._axis(j)
        moved = np.tensordot(u, self._psi, axes=([1], [ax]))
        self._psi = np.moveaxis(moved, 0, ax)
        return self

    def apply_matrix(self, u: np.ndarray, sites: Sequence[QubitLabel]) -> Statevector:
        """Apply a ``2^k x 2^k`` matrix; ``sites[0]`` is the least significant bit of ``u``."""
        k = len(sites)
        if len(set(sites)) != k:
            raise ValueError("sites must be distinct")
        u = np.asarray(u, dtype=complex).reshape((2,) * (2 * k))
        # tensor axes of u: output bits (msb first) then input bits (msb first)
        axes = [self._axis(s) for s in reversed(sites)]
        moved = np.tensordot(u, self._psi, axes=(list(range(k, 2 * k)), axes))
        self._psi = np.moveaxis(moved, list(range(k)), axes)
        return self

    def apply_pauli_string(self, axes: Sequence[str], sites: Sequence[QubitLabel]) -> Statevector:
        for a, s in zip(axes, sites):
            if a != "i":
                self.apply_1q(PAULI[a], s)
        return self

    def apply_pauli_rotation(
        self, axes: Sequence[str], sites: Sequence[QubitLabel], theta: float
    ) -> Statevector:
        """Apply ``exp(-i theta/2 sigma_{a1} ... sigma_{aN})``."""
        if len(axes) != len(sites) or not axes:
            raise ValueError("axes and sites must be nonempty and of equal length")
        if len(set(sites)) != len(sites):
            raise ValueError("sites must be distinct")
        for a in axes:
            if a not in ("x", "y", "z"):
                raise ValueError(f"unknown axis {a!r}")
        for s in sites:
            self._axis(s)
        rotated = self.copy().apply_pauli_string(axes, sites)._psi
        self._psi = np.cos(theta / 2) * self._psi - 1j * np.sin(theta / 2) * rotated
        return self

    # ------------------------------------------------------------------
    def _project(self, j: QubitLabel, bra: np.ndarray, mode: tuple) -> tuple[int, float]:
        """Contract qubit ``j`` with ``bra[s]`` and drop it from the register."""
        kind, arg = _check_mode(mode)
        ax = self._axis(j)
        branches = [np.tensordot(bra[s].conj(), self._psi, axes=([0], [ax])) for s in (0, 1)]
        probs = [float(np.vdot(b, b).real) for b in branches]
        total = probs[0] + probs[1]
        probs = [p / total for p in probs]
        if kind == "sample":
            rng = arg if isinstance(arg, np.random.Generator) else np.random.default_rng(arg)
            s = int(rng.random() >= probs[0])
        else:
            s = int(arg)
            if s not in (0, 1):
                raise ValueError(f"forced outcome must be 0 or 1, got {arg!r}")
        p = probs[s]
        if p < IMPOSSIBLE_BRANCH_TOL:
            raise ImpossibleBranch(f"outcome {s} on {j!r} has probability {p:.3e}")
        self._psi = branches[s] / np.sqrt(p * total)
        self.labels.remove(j)
        return s, p

    def measure_xy(self, j: QubitLabel, basis: XYBasis | float, mode: tuple) -> tuple[int, float]:
        """Measure in an x-y plane basis; returns ``(s, p)`` and removes ``j``."""
        if not isinstance(basis, XYBasis):
            basis = XYBasis(float(basis))
        bra = np.stack([basis.vector(0), basis.vector(1)])
        return self._project(j, bra, mode)

    def measure_basis(self, j: QubitLabel, vecs: np.ndarray, mode: tuple) -> tuple[int, float]:
        """Measure in an arbitrary orthonormal basis ``vecs[0], vecs[1]``; returns ``(s, p)``."""
        vecs = np.asarray(vecs, dtype=complex)
        if vecs.shape != (2, 2) or not np.allclose(vecs @ vecs.conj().T, np.eye(2), atol=1e-10):
            raise ValueError("basis must be two orthonormal rows")
        return self._project(j, vecs, mode)

    def measure_pauli(self, j: QubitLabel, axis: str, mode: tuple) -> tuple[int, float]:
        """Measure a Pauli observable; returns ``(m, p)`` with ``m`` in ``{+1, -1}``.

        In forced mode the second entry of ``mode`` is the eigenvalue ``+1/-1``.
        """
        kind, arg = _check_mode(mode)
        if kind == "forced":
            if arg not in (-1, 1):
                raise ValueError(f"forced Pauli outcome must be +1 or -1, got {arg!r}")
            mode = ("forced", 0 if arg == 1 else 1)
        bra = _pauli_eigvecs(axis)
        s, p = self._project(j, bra, mode)
        return (1 if s == 0 else -1), p

    # ------------------------------------------------------------------
    def expectation(self, paulis: dict[QubitLabel, str]) -> float:
        """Real expectation value of a Pauli product given as ``{label: axis}``."""
        other = self.copy().apply_pauli_string(list(paulis.values()), list(paulis.keys()))
        return float(np.vdot(self._psi, other._psi).real)

    def reorder(self, labels: Sequence[QubitLabel]) -> Statevector:
        """Return a copy whose register order is ``labels``."""
        labels = list(labels)
        if sorted(map(repr, labels)) != sorted(map(repr, self.labels)) or len(labels) != self.num_qubits:
            raise RegisterError(f"label sets differ: {labels!r} vs {self.labels!r}")
        n = self.num_qubits
        perm = [self._axis(lab) for lab in reversed(labels)]
        out = Statevector.__new__(Statevector)
        out.labels = labels
        out._psi = np.transpose(self._psi, perm).copy() if n else self._psi.copy()
        return out

    def dump(self) -> str:
        """Text dump, one ``bitstring<TAB>re<TAB>im`` line per basis state."""
        n = self.num_qubits
        lines = []
        for idx, a in enumerate(self.amps):
            bits = "".join(str((idx >> i) & 1) for i in range(n))
            lines.append(f"{bits}\t{a.real:.17g}\t{a.imag:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dump(cls, text: str, labels: Sequence[QubitLabel]) -> Statevector:
        labels = list(labels)
        amps = np.zeros(2 ** len(labels), dtype=complex)
        for line in text.strip().splitlines():
            bits, re, im = line.split("\t")
            idx = sum(int(b) << i for i, b in enumerate(bits))
            amps[idx] = complex(float(re), float(im))
        return cls(labels, amps)


def _pauli_eigvecs(axis: str) -> np.ndarray:
    r = 1 / np.sqrt(2.0)
    if axis == "x":
        return np.array([[r, r], [r, -r]], dtype=complex)
    if axis == "y":
        return np.array([[r, 1j * r], [r, -1j * r]], dtype=complex)
    if axis == "z":
        return np.array([[1, 0], [0, 1]], dtype=complex)
    raise ValueError(f"unknown Pauli axis {axis!r}")


# ----------------------------------------------------------------------
# functional interface


def new_plus_register(labels: Iterable[QubitLabel]) -> Statevector:
    labels = list(labels)
    if not labels:
        raise ValueError("labels must be nonempty")
    if len(set(labels)) != len(labels):
        raise RegisterError(f"duplicate labels in {labels!r}")
    n = len(labels)
    return Statevector(labels, np.full(2**n, 2 ** (-n / 2), dtype=complex))


def apply_cz(state: Statevector, j: QubitLabel, k: QubitLabel) -> Statevector:
    return state.apply_cz(j, k)


def apply_pauli_rotation(
    state: Statevector, axes: Sequence[str], sites: Sequence[QubitLabel], theta: float
) -> Statevector:
    return state.apply_pauli_rotation(axes, sites, theta)


def measure_xy(
    state: Statevector, j: QubitLabel, basis: XYBasis | float, mode: tuple
) -> tuple[int, float, Statevector]:
    s, p = state.measure_xy(j, basis, mode)
    return s, p, state


def measure_pauli(
    state: Statevector, j: QubitLabel, axis: Literal["x", "y", "z"], mode: tuple
) -> tuple[int, float, Statevector]:
    m, p = state.measure_pauli(j, axis, mode)
    return m, p, state


def attach_plus(state: Statevector, j: QubitLabel) -> Statevector:
    return state.attach_plus(j)


def overlap(a: Statevector, b: Statevector) -> complex:
    """Inner product ``<a|b>``; both registers must carry the same labels in the same order."""
    if a.labels != b.labels:
        raise RegisterError(f"register mismatch: {a.labels!r} vs {b.labels!r}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: Statevector, b: Statevector) -> float:
    """``|<a|b>|^2`` after aligning ``b`` to the register order of ``a``."""
    if a.labels != b.labels:
        b = b.reorder(a.labels)
    return abs(overlap(a, b)) ** 2


def rotation_matrix(axes: str | Sequence[str], theta: float) -> np.ndarray:
    """Dense ``exp(-i theta/2 sigma_{a1}...sigma_{aN})``; ``axes[0]`` is the least significant qubit."""
    p = np.array([[1.0]], dtype=complex)
    for a in axes:
        p = np.kron(PAULI[a], p)
    return np.cos(theta / 2) * np.eye(p.shape[0]) - 1j * np.sin(theta / 2) * p
