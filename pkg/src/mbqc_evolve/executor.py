"""Run measurement patterns on the statevector engine.

Qubits are attached lazily: a site is created (and entangled with its already
live neighbours) only when it or one of its neighbours is about to be
measured, so the live register follows the measurement frontier.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import LocalUnitaryWord
from .pattern.ir import ByproductSpec, MeasurementPattern, PatternError, Site, parity
from .statevec import PAULI, ImpossibleBranch, Statevector, XYBasis, fidelity, overlap

__all__ = [
    "Sample",
    "Forced",
    "EnumerateAll",
    "ExecutionResult",
    "DependencyMismatch",
    "DependencyDiff",
    "ErrorSpec",
    "execute",
    "enumerate_branches",
    "measurement_order",
    "rederive_dependencies",
    "dependency_diff",
    "check_dependencies",
    "inject_errors",
    "phase_audit",
]


# ----------------------------------------------------------------------
# modes and results


@dataclass(frozen=True)
class Sample:
    """Draw outcomes from the Born rule with a seeded generator."""

    seed: int | np.random.Generator | None = None


@dataclass(frozen=True)
class Forced:
    """Follow a fixed outcome assignment covering every measured site."""

    outcomes: Mapping[Site, int]


@dataclass(frozen=True)
class EnumerateAll:
    """Visit every outcome branch with non-vanishing probability."""


@dataclass
class ExecutionResult:
    """One executed branch.

    ``output`` and ``raw`` are registers over the pattern's output sites in
    logical order, so ``output.amps`` has logical qubit ``k`` on bit ``k-1``.
    ``byproduct`` maps each output site to its ``(z, x)`` exponents.
    """

    output: Statevector
    raw: Statevector
    outcomes: dict[Site, int]
    probability: float
    byproduct: dict[Site, tuple[int, int]]
    peak_live: int = 0

    def positional(self) -> Statevector:
        """Corrected output with the register ordered by output column instead of logical wire.

        For the stand-alone gadgets this undoes the absorbed swap, so slot ``k``
        is the physical column where input ``k`` entered.
        """
        order = sorted(self.output.labels, key=lambda s: (s.col, s.block, s.row))
        return self.output.reorder(order)

    def fidelity_to(self, target: np.ndarray) -> float:
        t = Statevector(self.output.labels, target)
        return fidelity(t, self.output)

    def overlap_with(self, target: np.ndarray) -> complex:
        return overlap(Statevector(self.output.labels, target), self.output)


# ----------------------------------------------------------------------
# scheduling


def measurement_order(p: MeasurementPattern) -> list[Site]:
    """Dependency-respecting order that follows ``p.schedule`` as closely as possible."""
    measured = [n.site for n in p.measured]
    pref = list(p.schedule) if p.schedule else sorted(measured)
    deps = {s: (p.node(s).angle.parity_deps if p.node(s).angle else frozenset()) for s in measured}
    done: set[Site] = set()
    order: list[Site] = []
    waiting: list[Site] = []
    for s in pref:
        waiting.append(s)
        progress = True
        while progress:
            progress = False
            for t in list(waiting):
                if deps[t] <= done:
                    waiting.remove(t)
                    order.append(t)
                    done.add(t)
                    progress = True
    if waiting:
        raise PatternError(f"dependency cycle or missing sites among {sorted(waiting)[:5]}")
    return order


# ----------------------------------------------------------------------
# execution core


def _input_state(p: MeasurementPattern, psi_in) -> Statevector:
    if isinstance(psi_in, Statevector):
        amps = psi_in.amps
    else:
        amps = np.asarray(psi_in, dtype=complex)
    if amps.shape != (2 ** p.num_logical,):
        raise ValueError(f"input state must have {2 ** p.num_logical} amplitudes, got shape {amps.shape}")
    return Statevector(list(p.inputs), amps)


class _Run:
    """Mutable per-branch execution state."""

    def __init__(self, p: MeasurementPattern, st: Statevector, nbrs, frames):
        self.p = p
        self.st = st
        self.nbrs = nbrs
        self.frames = frames
        self.outcomes: dict[Site, int] = {}
        self.prob = 1.0
        self.peak = st.num_qubits

    def copy(self) -> _Run:
        r = _Run.__new__(_Run)
        r.p, r.nbrs, r.frames = self.p, self.nbrs, self.frames
        r.st = self.st.copy()
        r.outcomes = dict(self.outcomes)
        r.prob, r.peak = self.prob, self.peak
        return r

    def _live(self, q: Site) -> bool:
        return q in self.st or q in self.outcomes

    def ensure(self, q: Site) -> None:
        if self._live(q):
            return
        self.st.attach_plus(q)
        for w in self.nbrs[q]:
            if w in self.st and w != q:
                self.st.apply_cz(q, w)
        self.peak = max(self.peak, self.st.num_qubits)

    def prepare(self, q: Site) -> np.ndarray:
        """Attach ``q`` and its neighbourhood; return the two basis bras for ``q``."""
        self.ensure(q)
        for w in self.nbrs[q]:
            self.ensure(w)
        node = self.p.node(q)
        if node.angle is not None:
            try:
                angle = node.angle.evaluate(self.outcomes, self.p.phi_m)
            except KeyError as exc:
                raise PatternError(f"{q} measured before its dependency {exc.args[0]}") from None
        else:
            angle = 0.0
        basis = XYBasis(angle)
        vecs = np.stack([basis.vector(0), basis.vector(1)])
        w = self.frames.get(q)
        if w is not None:
            vecs = (w.conj().T @ vecs.T).T
        return vecs

    def record(self, q: Site, s: int, p: float) -> None:
        self.outcomes[q] = s
        self.prob *= p

    def finish(self) -> ExecutionResult:
        p = self.p
        for q in p.outputs:
            self.ensure(q)
        self.peak = max(self.peak, self.st.num_qubits)
        raw = self.st.reorder(list(p.outputs))
        out = raw.copy()
        for q in p.outputs:
            w = self.frames.get(q)
            if w is not None:
                out.apply_1q(w, q)
        byp = {}
        for q in p.outputs:
            z, x = p.byproduct.exponents(q, self.outcomes)
            if z:
                out.apply_1q(PAULI["z"], q)
            if x:
                out.apply_1q(PAULI["x"], q)
            byp[q] = (z, x)
        return ExecutionResult(out, raw, dict(self.outcomes), self.prob, byp, self.peak)


def _start(p: MeasurementPattern, psi_in) -> _Run:
    st = _input_state(p, psi_in)
    nbrs: dict[Site, set] = {s: set() for s in p.sites}
    for a, b in p.graph.sorted_edges():
        nbrs[a].add(b)
        nbrs[b].add(a)
    frames = {n.site: LocalUnitaryWord({n.site: n.frame}).matrix(n.site) for n in p.nodes if n.frame}
    inputs = set(p.inputs)
    for a, b in p.graph.sorted_edges():
        if a in inputs and b in inputs:
            st.apply_cz(a, b)
    return _Run(p, st, nbrs, frames)


def execute(p: MeasurementPattern, psi_in, mode=None) -> ExecutionResult | Iterator[ExecutionResult]:
    """Execute ``p`` on the logical input ``psi_in``.

    ``mode`` is :class:`Sample` (default, unseeded), :class:`Forced` or
    :class:`EnumerateAll`; the last returns an iterator over branches.
    Forced branches whose probability falls below ``1e-12`` raise
    :class:`~mbqc_evolve.statevec.ImpossibleBranch`.
    """
    mode = Sample() if mode is None else mode
    if isinstance(mode, EnumerateAll):
        return enumerate_branches(p, psi_in)
    order = measurement_order(p)
    run = _start(p, psi_in)
    if isinstance(mode, Sample):
        rng = mode.seed if isinstance(mode.seed, np.random.Generator) else np.random.default_rng(mode.seed)
        for q in order:
            s, pr = run.st.measure_basis(q, run.prepare(q), ("sample", rng))
            run.record(q, s, pr)
    elif isinstance(mode, Forced):
        missing = [q for q in order if q not in mode.outcomes]
        if missing:
            raise PatternError(f"forced assignment misses {len(missing)} sites, e.g. {missing[0]}")
        for q in order:
            s, pr = run.st.measure_basis(q, run.prepare(q), ("forced", int(mode.outcomes[q])))
            run.record(q, s, pr)
    else:
        raise TypeError(f"unknown execution mode {mode!r}")
    return run.finish()


def enumerate_branches(p: MeasurementPattern, psi_in) -> Iterator[ExecutionResult]:
    """Depth-first walk over all branches; vanishing branches are skipped."""
    order = measurement_order(p)
    root = _start(p, psi_in)

    def walk(run: _Run, k: int):
        if k == len(order):
            yield run.finish()
            return
        q = order[k]
        vecs = run.prepare(q)
        for s in (0, 1):
            child = run.copy() if s == 0 else run
            try:
                _, pr = child.st.measure_basis(q, vecs, ("forced", s))
            except ImpossibleBranch:
                continue
            child.record(q, s, pr)
            yield from walk(child, k + 1)

    yield from walk(root, 0)


# ----------------------------------------------------------------------
# dependency re-derivation


@dataclass
class DependencyDiff:
    """Set differences between two dependency tables (``only_a`` / ``only_b`` per key)."""

    angles: dict[Site, tuple[frozenset, frozenset]] = field(default_factory=dict)
    byproduct: dict[tuple[Site, str], tuple[frozenset, frozenset]] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not self.angles and not self.byproduct

    def report(self) -> str:
        lines = []
        for s, (a, b) in sorted(self.angles.items()):
            lines.append(f"angle {s}: only transcribed {_fmt(a)}; only derived {_fmt(b)}")
        for (q, ax), (a, b) in sorted(self.byproduct.items()):
            lines.append(f"byproduct {ax}{q}: only transcribed {_fmt(a)}; only derived {_fmt(b)}")
        return "\n".join(lines) if lines else "no differences"


def _fmt(sites) -> str:
    return "{" + " ".join(str(s) for s in sorted(sites)) + "}"


class DependencyMismatch(AssertionError):
    def __init__(self, diff: DependencyDiff):
        super().__init__(diff.report())
        self.diff = diff


def propagate_frames(p: MeasurementPattern) -> tuple[dict[Site, frozenset], dict[int, tuple[frozenset, frozenset]]]:
    """Push every byproduct of the gate array to the end.

    Returns the sign-flip set of every rotation site and the final
    ``(x, z)`` frame of every logical wire.
    """
    if not p.gates:
        raise PatternError(f"pattern {p.name!r} carries no gate array")
    frame: dict[int, list[set]] = {q: [set(), set()] for q in range(1, p.num_logical + 1)}
    flips: dict[Site, frozenset] = {}
    for op in p.gates:
        if op.kind == "h":
            f = frame[op.wires[0]]
            f[0], f[1] = f[1], f[0]
        elif op.kind == "byp":
            f = frame[op.wires[0]][0 if op.axis == "x" else 1]
            f ^= {op.site}
        elif op.kind == "rot":
            acc = set(op.intrinsic)
            for w, a in zip(op.wires, op.axis):
                if a in "zy":
                    acc ^= frame[w][0]
                if a in "xy":
                    acc ^= frame[w][1]
            if op.site in flips:
                raise PatternError(f"two rotations claim site {op.site}")
            flips[op.site] = frozenset(acc)
        else:
            raise PatternError(f"unknown gate kind {op.kind!r}")
    return flips, {q: (frozenset(f[0]), frozenset(f[1])) for q, f in frame.items()}


def rederive_dependencies(p: MeasurementPattern) -> MeasurementPattern:
    """Recompute every angle dependency set and the byproduct from the gate array."""
    flips, frames = propagate_frames(p)
    nodes = []
    for n in p.nodes:
        if n.angle is not None:
            if n.site not in flips:
                raise PatternError(f"adaptive site {n.site} has no rotation in the gate array")
            n = replace(n, angle=n.angle.with_deps(flips[n.site]))
        nodes.append(n)
    z = {p.outputs[q - 1]: fz for q, (fx, fz) in frames.items() if fz}
    x = {p.outputs[q - 1]: fx for q, (fx, fz) in frames.items() if fx}
    return p.with_nodes(nodes, byproduct=ByproductSpec(z, x))


def dependency_diff(a: MeasurementPattern, b: MeasurementPattern) -> DependencyDiff:
    diff = DependencyDiff()
    da, db = a.angle_deps(), b.angle_deps()
    for s in sorted(set(da) | set(db)):
        sa, sb = da.get(s, frozenset()), db.get(s, frozenset())
        if sa != sb:
            diff.angles[s] = (sa - sb, sb - sa)
    for q in a.outputs:
        for ax, ma, mb in (("Z", a.byproduct.z, b.byproduct.z), ("X", a.byproduct.x, b.byproduct.x)):
            sa, sb = ma.get(q, frozenset()), mb.get(q, frozenset())
            if sa != sb:
                diff.byproduct[(q, ax)] = (sa - sb, sb - sa)
    return diff


def check_dependencies(p: MeasurementPattern) -> MeasurementPattern:
    """Raise :class:`DependencyMismatch` unless the transcribed tables equal the derived ones."""
    derived = rederive_dependencies(p)
    diff = dependency_diff(p, derived)
    if not diff.empty:
        raise DependencyMismatch(diff)
    return derived


# ----------------------------------------------------------------------
# error injection


@dataclass(frozen=True)
class ErrorSpec:
    """Angle perturbations keyed by angle role (node tag without the wire suffix, or full tag).

    Values are floats, ``("normal", sigma)`` or ``("uniform", low, high)``.
    ``symmetric_matched`` copies each pre-rotation error onto its partner
    post-rotation (``psi-1 -> psi1``, ``psi-2 -> psi2``, ``phi_j -> psi3``),
    so the partner entries must not be given separately. ``relative`` scales
    each error by the static Euler constant of the angle it perturbs; paired
    angles share that constant, so matched errors stay matched.
    """

    errors: Mapping[str, float | tuple]
    symmetric_matched: bool = False
    relative: bool = False

    PAIRS = {"psi-1": "psi1", "psi-2": "psi2", "phi": "psi3"}

    def draw(self, rng: np.random.Generator | int | None = None) -> ErrorSpec:
        """Replace distribution entries by samples, in sorted key order."""
        rng = np.random.default_rng(rng)
        table = {}
        for tag in sorted(self.errors):
            eps = self.errors[tag]
            if isinstance(eps, tuple):
                kind, *args = eps
                if kind == "normal" and len(args) == 1:
                    eps = rng.normal(0.0, args[0])
                elif kind == "uniform" and len(args) == 2:
                    eps = rng.uniform(args[0], args[1])
                else:
                    raise ValueError(f"bad error distribution {eps!r}")
            table[tag] = float(eps)
        return ErrorSpec(table, self.symmetric_matched, self.relative)

    def resolved(self) -> dict[str, float]:
        for eps in self.errors.values():
            if isinstance(eps, tuple):
                raise ValueError("call draw() before resolving distribution entries")
        out = dict(self.errors)
        if self.symmetric_matched:
            for tag, eps in self.errors.items():
                role, _, wire = tag.partition("_")
                partner = self.PAIRS.get(role)
                if partner is None:
                    continue
                ptag = f"{partner}_{wire}" if wire else partner
                if ptag in self.errors and self.errors[ptag] != eps:
                    raise ValueError(f"symmetric errors conflict on {ptag}")
                out[ptag] = eps
        return out

    def lookup(self, tag: str) -> float:
        """Resolved error for a full tag, falling back to its role."""
        res = self.resolved()
        return res.get(tag, res.get(tag.split("_", 1)[0], 0.0))


def inject_errors(p: MeasurementPattern, spec: ErrorSpec, seed=None) -> MeasurementPattern:
    """Perturb adaptive angle magnitudes; Pauli-x measurements are left untouched."""
    spec = spec.draw(seed)
    resolved = spec.resolved()
    tags = {n.tag for n in p.adaptive}
    roles = {t.split("_", 1)[0] for t in tags}
    for key in resolved:
        if key not in tags and key not in roles:
            raise ValueError(f"no adaptive angle with role {key!r}")
    nodes = []
    for n in p.nodes:
        if n.angle is not None:
            eps = spec.lookup(n.tag)
            if eps:
                if spec.relative:
                    eps *= abs(float(n.angle.const_term)) * np.pi
                n = replace(n, angle=replace(n.angle, offset=n.angle.offset + eps))
        nodes.append(n)
    return p.with_nodes(nodes)


# ----------------------------------------------------------------------
# phase audit


@dataclass
class PhaseAudit:
    """Global phase of each corrected output relative to the target state."""

    phases: list[float]
    outcomes: list[dict]
    fidelities: list[float]
    outcome_independent: bool
    spread: float

    def table(self) -> list[tuple[str, float]]:
        return [("".join(str(o[s]) for s in sorted(o)), ph) for o, ph in zip(self.outcomes, self.phases)]


def phase_audit(
    p: MeasurementPattern,
    psi_in,
    target: np.ndarray,
    branches: int | str = "all",
    seed: int = 0,
    tol: float = 1e-8,
) -> PhaseAudit:
    """Per-branch phase ``arg <target|output>``.

    ``branches`` is ``"all"`` for exhaustive enumeration or a number of
    sampled branches drawn from ``seed``.
    """
    if branches == "all":
        results = list(enumerate_branches(p, psi_in))
    else:
        rng = np.random.default_rng(seed)
        results = [execute(p, psi_in, Sample(int(rng.integers(2**63)))) for _ in range(int(branches))]
    phases = [float(np.angle(r.overlap_with(target))) for r in results]
    fids = [r.fidelity_to(target) for r in results]
    spread = 0.0
    if phases:
        spread = max(abs(float(np.angle(np.exp(1j * (ph - phases[0]))))) for ph in phases)
    return PhaseAudit(phases, [dict(r.outcomes) for r in results], fids, spread < tol, spread)


def corrected_parity(p: MeasurementPattern, q: Site, outcomes: Mapping[Site, int]) -> tuple[int, int]:
    return parity(p.byproduct.z.get(q, ()), outcomes), parity(p.byproduct.x.get(q, ()), outcomes)
