"""Graph-state algebra: stabilizers, local complementation and compactification.

Local unitary words are kept symbolic. A generator is one of ``I, X, Y, Z``
or ``+iX, -iX, +iY, -iY, +iZ, -iZ`` where ``+iA`` stands for
``sqrt(iA) = exp(i pi/4 A)``. A per-vertex word ``(g1, g2, ..., gn)`` denotes
the product ``g1 g2 ... gn``, so the leftmost generator acts last.
"""

from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .statevec import PAULI, Statevector, new_plus_register

Label = Hashable

GENERATORS = ("I", "X", "Y", "Z", "+iX", "-iX", "+iY", "-iY", "+iZ", "-iZ")
AXES = ("x", "y", "z")


def label_key(v: Label):
    """Total order on labels: natural order within a type, type name across types."""
    return (type(v).__name__, v)


def generator_matrix(g: str) -> np.ndarray:
    if g not in GENERATORS:
        raise ValueError(f"unknown generator {g!r}")
    if len(g) == 1:
        return PAULI[g.lower()].copy()
    sign = 1.0 if g[0] == "+" else -1.0
    return (np.eye(2) + sign * 1j * PAULI[g[-1].lower()]) / np.sqrt(2.0)


# ----------------------------------------------------------------------
# graphs


class Graph:
    """Simple undirected graph on hashable labels; treat instances as immutable."""

    __slots__ = ("_adj", "_edges", "_vertices")

    def __init__(self, vertices: Iterable[Label] = (), edges: Iterable[tuple[Label, Label]] = ()):
        vs = frozenset(vertices)
        acc: dict = {v: set() for v in vs}
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if a not in vs or b not in vs:
                raise ValueError(f"edge ({a!r}, {b!r}) touches an unknown vertex")
            acc[a].add(b)
            acc[b].add(a)
        adj = {v: frozenset(n) for v, n in acc.items()}
        self._init(vs, adj)

    def _init(self, vertices: frozenset, adj: dict) -> None:
        self._vertices = vertices
        self._adj = adj
        self._edges = None

    @classmethod
    def _trusted(cls, vertices: frozenset, adj: dict) -> Graph:
        # skips validation; callers keep ``adj`` symmetric and loop free
        g = object.__new__(cls)
        g._init(vertices, adj)
        return g

    @property
    def vertices(self) -> frozenset:
        return self._vertices

    @property
    def edges(self) -> frozenset:
        if self._edges is None:
            self._edges = frozenset(frozenset((a, b)) for a, nb in self._adj.items() for b in nb)
        return self._edges

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._vertices, self.edges))

    def __repr__(self) -> str:
        return f"Graph(vertices={len(self._vertices)}, edges={len(self.edges)})"

    def neighbors(self, v: Label) -> set:
        if v not in self._vertices:
            raise KeyError(f"unknown vertex {v!r}")
        return set(self._adj[v])

    def degree(self, v: Label) -> int:
        return len(self._adj[v])

    def has_edge(self, a: Label, b: Label) -> bool:
        return b in self._adj.get(a, ())

    def sorted_vertices(self) -> list:
        return sorted(self._vertices, key=label_key)

    def sorted_edges(self) -> list[tuple]:
        pairs = [tuple(sorted(e, key=label_key)) for e in self.edges]
        return sorted(pairs, key=lambda p: (label_key(p[0]), label_key(p[1])))

    def remove_vertex(self, v: Label) -> Graph:
        if v not in self._vertices:
            raise KeyError(f"unknown vertex {v!r}")
        adj = dict(self._adj)
        for w in adj.pop(v):
            adj[w] = adj[w] - {v}
        return Graph._trusted(self._vertices - {v}, adj)

    def to_text(self) -> str:
        lines = [f"v {_fmt_label(v)}" for v in self.sorted_vertices()]
        lines += [f"e {_fmt_label(a)} {_fmt_label(b)}" for a, b in self.sorted_edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Graph:
        vs, es = [], []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            kind, *rest = line.split()
            if kind == "v" and len(rest) == 1:
                vs.append(_parse_label(rest[0]))
            elif kind == "e" and len(rest) == 2:
                es.append((_parse_label(rest[0]), _parse_label(rest[1])))
            else:
                raise ValueError(f"bad graph line: {raw!r}")
        return cls(vs, es)


def _fmt_label(v: Label) -> str:
    if isinstance(v, tuple):
        return ",".join(str(x) for x in v)
    return str(v)


def _parse_label(tok: str) -> Label:
    parts = tok.split(",")
    conv = [int(p) if p.lstrip("-").isdigit() else p for p in parts]
    return tuple(conv) if len(conv) > 1 else conv[0]


def grid_graph(rows: int, cols: int) -> Graph:
    vs = [(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1)]
    es = [((r, c), (r + 1, c)) for r in range(1, rows) for c in range(1, cols + 1)]
    es += [((r, c), (r, c + 1)) for r in range(1, rows + 1) for c in range(1, cols)]
    return Graph(vs, es)


def cluster_state(g: Graph, order: Sequence[Label] | None = None) -> Statevector:
    """``|+>`` on every vertex followed by CZ on every edge."""
    if not g.vertices:
        raise ValueError("graph is empty")
    labels = list(order) if order is not None else g.sorted_vertices()
    st = new_plus_register(labels)
    for a, b in g.sorted_edges():
        st.apply_cz(a, b)
    return st


def check_stabilizer(g: Graph, state: Statevector, j: Label) -> float:
    """Expectation of ``K_j = X_j prod_{k in N_j} Z_k``."""
    ops = {j: "x"}
    ops.update({k: "z" for k in g.neighbors(j)})
    return state.expectation(ops)


def local_complement(g: Graph, j: Label) -> Graph:
    """Toggle every edge inside the neighborhood of ``j``."""
    nb = frozenset(g.neighbors(j))
    adj = dict(g._adj)
    for a in nb:
        adj[a] = adj[a] ^ (nb - {a})
    return Graph._trusted(g.vertices, adj)


# ----------------------------------------------------------------------
# local unitary words


def _inverse(g: str) -> str:
    if len(g) == 1:
        return g
    return ("-" if g[0] == "+" else "+") + g[1:]


def _cancel_inverses(gens: Iterable[str]) -> tuple[str, ...]:
    out: list[str] = []
    for g in gens:
        if out and out[-1] == _inverse(g):
            out.pop()
        else:
            out.append(g)
    return tuple(out)


@dataclass(frozen=True)
class LocalUnitaryWord:
    """Per-vertex generator sequences; the leftmost generator acts last."""

    word: Mapping[Label, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for v, gens in self.word.items():
            gens = tuple(gens)
            for g in gens:
                if g not in GENERATORS:
                    raise ValueError(f"unknown generator {g!r}")
            gens = _cancel_inverses(g for g in gens if g != "I")
            if gens:
                clean[v] = gens
        object.__setattr__(self, "word", clean)

    @classmethod
    def _trusted(cls, clean: dict) -> LocalUnitaryWord:
        w = object.__new__(cls)
        object.__setattr__(w, "word", clean)
        return w

    def on(self, v: Label) -> tuple[str, ...]:
        return self.word.get(v, ())

    def then_first(self, other: LocalUnitaryWord) -> LocalUnitaryWord:
        """``self * other``: ``other`` acts first."""
        out = dict(self.word)
        for v, g in other.word.items():
            gens = _cancel_inverses(out.get(v, ()) + g)
            if gens:
                out[v] = gens
            else:
                out.pop(v, None)
        return LocalUnitaryWord._trusted(out)

    def drop(self, v: Label) -> LocalUnitaryWord:
        out = dict(self.word)
        out.pop(v, None)
        return LocalUnitaryWord._trusted(out)

    def matrix(self, v: Label) -> np.ndarray:
        m = np.eye(2, dtype=complex)
        for g in self.on(v):
            m = m @ generator_matrix(g)
        return m

    def apply(self, state: Statevector) -> Statevector:
        """Apply the word in place to every live vertex it touches."""
        for v in self.word:
            state.apply_1q(self.matrix(v), v)
        return state

    def is_identity(self) -> bool:
        return not self.word

    def lines(self) -> list[str]:
        return [
            f"u {_fmt_label(v)} {' '.join(self.word[v])}" for v in sorted(self.word, key=label_key)
        ]


def lc_unitary(g: Graph, j: Label) -> LocalUnitaryWord:
    """``U = sqrt(-iX_j) prod_{l in N_j} sqrt(iZ_l)`` with ``|tau_j(G)> = U|G>``."""
    word = {j: ("-iX",)}
    for v in g.neighbors(j):
        word[v] = ("+iZ",)
    return LocalUnitaryWord(word)


# ----------------------------------------------------------------------
# projector propagation


def pauli_projector(axis: str, m: int) -> np.ndarray:
    if axis not in AXES or m not in (1, -1):
        raise ValueError(f"bad projector ({axis!r}, {m!r})")
    return (np.eye(2) + m * PAULI[axis]) / 2


def _conjugation_table() -> dict[tuple[str, str], tuple[str, int]]:
    """``U^dag sigma_a U = sign * sigma_b`` for every generator ``U``."""
    table = {}
    for gen in GENERATORS:
        u = generator_matrix(gen)
        for a in AXES:
            c = u.conj().T @ PAULI[a] @ u
            for b in AXES:
                for sign in (1, -1):
                    if np.allclose(c, sign * PAULI[b], atol=1e-12):
                        table[(a, gen)] = (b, sign)
    return table


_CONJ = _conjugation_table()


def propagate_projector(axis: str, m: int, through: str) -> tuple[str, int, str]:
    """Rewrite ``P_{axis,m} U`` as ``U P_{axis',m'}``; returns ``(axis', m', U)``."""
    if through not in GENERATORS:
        raise ValueError(f"unknown generator {through!r}")
    if axis not in AXES or m not in (1, -1):
        raise ValueError(f"bad projector ({axis!r}, {m!r})")
    b, sign = _CONJ[(axis, through)]
    return b, m * sign, through


def propagate_through_word(axis: str, m: int, gens: Sequence[str]) -> tuple[str, int]:
    """Push ``P_{axis,m}`` rightwards through ``g1 g2 ... gn``."""
    for g in gens:
        axis, m, _ = propagate_projector(axis, m, g)
    return axis, m


# ----------------------------------------------------------------------
# Pauli measurements on graph states


@dataclass(frozen=True)
class CompactificationResult:
    """Graph after Pauli measurements plus the local unitaries that restore the state.

    ``corrections`` applied to ``cluster_state(graph)`` reproduce the projected
    state on the surviving vertices, up to normalization and global phase.
    ``residual_projector_rewrites`` lists ``(site, effective_axis, sign_flipped)``
    for every measured site whose projector had to be pushed through earlier
    corrections.
    """

    graph: Graph
    corrections: LocalUnitaryWord
    residual_projector_rewrites: tuple = ()
    measured: tuple = ()


SpecialNeighborPolicy = Callable[[Graph, Label], Label]


def smallest_neighbor(g: Graph, j: Label) -> Label:
    return min(g.neighbors(j), key=label_key)


def largest_neighbor(g: Graph, j: Label) -> Label:
    return max(g.neighbors(j), key=label_key)


def fixed_neighbors(choices: Mapping[Label, Label], fallback: SpecialNeighborPolicy = smallest_neighbor):
    """Policy that uses ``choices[j]`` when it is a current neighbor of ``j``."""

    def policy(g: Graph, j: Label) -> Label:
        k = choices.get(j)
        if k is not None and k in g.neighbors(j):
            return k
        return fallback(g, j)

    return policy


POLICIES: dict[str, SpecialNeighborPolicy] = {
    "smallest": smallest_neighbor,
    "largest": largest_neighbor,
}


def pauli_measurement_rule(
    g: Graph, j: Label, axis: str, m: int, policy: SpecialNeighborPolicy = smallest_neighbor
) -> tuple[Graph, LocalUnitaryWord]:
    """Graph and correction word for ``P_{axis,m}`` on vertex ``j`` of ``|G>``.

    ``P |G> = |m>_axis (x) U |G'>`` up to normalization and phase.
    """
    if j not in g.vertices:
        raise KeyError(f"unknown vertex {j!r}")
    if m not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {m!r}")
    nj = g.neighbors(j)
    if axis == "x" and not nj:
        axis = "z"
    if axis == "z":
        word = {} if m == 1 else {v: ("Z",) for v in nj}
        return g.remove_vertex(j), LocalUnitaryWord(word)
    if axis == "y":
        gen = "-iZ" if m == 1 else "+iZ"
        return local_complement(g, j).remove_vertex(j), LocalUnitaryWord({v: (gen,) for v in nj})
    if axis == "x":
        k = policy(g, j)
        if k not in nj:
            raise ValueError(f"special neighbor {k!r} is not adjacent to {j!r}")
        nk = g.neighbors(k)
        if m == 1:
            word = {k: ("+iY",)}
            zs = nj - nk - {k}
        else:
            word = {k: ("-iY",)}
            zs = nk - nj - {j}
        for v in zs:
            word[v] = ("Z",)
        g2 = local_complement(local_complement(local_complement(g, k), j).remove_vertex(j), k)
        return g2, LocalUnitaryWord(word)
    raise ValueError(f"unknown Pauli axis {axis!r}")


def project_and_compactify(
    g: Graph,
    site: Label,
    axis: str,
    m: int,
    policy: SpecialNeighborPolicy = smallest_neighbor,
    corrections: LocalUnitaryWord | None = None,
) -> CompactificationResult:
    """Measure ``site`` on ``C|G>`` where ``C`` is an accumulated correction word.

    The projector is first pushed through the generators of ``C`` sitting on
    ``site``; the resulting Pauli projector is then handled by
    :func:`pauli_measurement_rule` and the new correction is appended so that
    it acts before ``C``.
    """
    corrections = corrections or LocalUnitaryWord()
    eff_axis, eff_m = propagate_through_word(axis, m, corrections.on(site))
    rewrites = ()
    if corrections.on(site):
        rewrites = ((site, eff_axis, eff_m != m),)
    g2, u = pauli_measurement_rule(g, site, eff_axis, eff_m, policy)
    return CompactificationResult(
        graph=g2,
        corrections=corrections.drop(site).then_first(u),
        residual_projector_rewrites=rewrites,
        measured=((site, axis, m),),
    )


class CompactificationError(RuntimeError):
    pass


def compactify_sequence(
    g: Graph,
    sites: Sequence[Label],
    axes: Sequence[str],
    outcomes: Sequence[int],
    policy: SpecialNeighborPolicy = smallest_neighbor,
) -> CompactificationResult:
    """Apply :func:`project_and_compactify` site by site."""
    if not (len(sites) == len(axes) == len(outcomes)):
        raise ValueError("sites, axes and outcomes must have equal length")
    if len(set(sites)) != len(sites):
        raise ValueError("sites must be distinct")
    res = CompactificationResult(g, LocalUnitaryWord())
    rewrites, measured = [], []
    for step, (s, a, m) in enumerate(zip(sites, axes, outcomes), start=1):
        try:
            res = project_and_compactify(res.graph, s, a, m, policy, res.corrections)
        except (KeyError, ValueError) as exc:
            raise CompactificationError(f"step {step} at site {s!r}: {exc}") from exc
        rewrites.extend(res.residual_projector_rewrites)
        measured.extend(res.measured)
    return CompactificationResult(res.graph, res.corrections, tuple(rewrites), tuple(measured))


def projected_state(
    state: Statevector, sites: Sequence[Label], axes: Sequence[str], outcomes: Sequence[int]
) -> Statevector | None:
    """Apply Pauli projectors and drop the measured qubits; ``None`` if the branch vanishes."""
    st = state.copy()
    for s, a, m in zip(sites, axes, outcomes):
        ax = st._axis(s)
        vec = _pauli_eigvec(a, m)
        st._psi = np.tensordot(vec.conj(), st._psi, axes=([0], [ax]))
        st.labels.remove(s)
    n = st.norm()
    if n < 1e-12:
        return None
    st._psi = st._psi / n
    return st


def _pauli_eigvec(axis: str, m: int) -> np.ndarray:
    w, v = np.linalg.eigh(PAULI[axis])
    return v[:, int(np.argmin(np.abs(w - m)))]


def compactified_state(res: CompactificationResult, order: Sequence[Label] | None = None) -> Statevector:
    st = cluster_state(res.graph, order)
    return res.corrections.apply(st)
