"""Gadget placement: chains, R_zz and R_zzz blocks on labelled lattice sites.

A gadget's output qubit is the same physical qubit as the next gadget's
input, and it carries the consumer's label. The builder therefore never
creates output sites eagerly: each logical wire remembers which placed sites
its next qubit must be entangled with.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from ..graph import Graph
from .ir import AngleExpr, ByproductSpec, GateOp, MeasurementPattern, PatternError, PatternNode, Site


@dataclass(frozen=True)
class AngleSpec:
    """Angle template without its dependency set.

    The measured angle is ``static_sign * P * (phi_coeff*phi_m + const*pi)``
    with ``P`` supplied later by the exponent tables.
    """

    static_sign: int
    phi_coeff: float
    const: Fraction
    tag: str

    def expr(self, deps) -> AngleExpr:
        return AngleExpr(self.static_sign, self.phi_coeff, Fraction(self.const), frozenset(deps))


# local (row, col) offsets shared by the two-site and three-site blocks

RZZ_BODY = [(2, 1), (3, 1), (4, 1), (2, 2), (3, 2), (2, 3), (3, 3), (4, 3)]
RZZ_ADAPTIVE = (2, 2)
RZZ_INTRINSIC = [(2, 1), (2, 3), (3, 2)]
RZZ_BYPRODUCT = {
    # keyed by input column: Z path, X path
    1: ([(1, 1), (2, 2), (3, 3)], [(2, 1), (3, 2), (4, 3)]),
    3: ([(1, 3), (2, 2), (3, 1)], [(2, 3), (3, 2), (4, 1)]),
}
RZZ_EXIT = {1: 3, 3: 1}

RZZZ_BODY = [(r, c) for r in range(2, 6) for c in range(1, 6)] + [(6, 1), (6, 3), (6, 5)]
RZZZ_ADAPTIVE = (3, 3)
RZZZ_INTRINSIC = [(2, 1), (2, 3), (2, 5), (4, 1), (4, 5), (5, 2), (5, 4)]
RZZZ_BYPRODUCT = {
    1: ([(1, 1), (2, 2), (3, 3), (4, 4), (5, 5)], [(2, 1), (3, 2), (4, 3), (5, 4), (6, 5)]),
    3: (
        [(1, 3), (2, 2), (2, 4), (3, 1), (3, 3), (3, 5), (4, 2), (4, 4), (5, 3)],
        [(2, 3), (3, 2), (3, 4), (4, 1), (4, 3), (4, 5), (5, 2), (5, 4), (6, 3)],
    ),
    5: ([(1, 5), (2, 4), (3, 3), (4, 2), (5, 1)], [(2, 5), (3, 4), (4, 3), (5, 2), (6, 1)]),
}
RZZZ_EXIT = {1: 5, 3: 3, 5: 1}


class PatternBuilder:
    """Accumulates sites, edges and the symbolic gate array of a pattern."""

    def __init__(self):
        self._nodes: dict[Site, dict] = {}
        self._edges: list[tuple[Site, Site]] = []
        self._gates: list[GateOp] = []
        self._order: list[Site] = []
        self._head: dict[int, list[Site] | None] = {}
        self._inputs: dict[int, Site] = {}
        self._outputs: dict[int, Site] = {}
        self.specs: dict[Site, AngleSpec] = {}

    # -- wires ---------------------------------------------------------

    def start(self, q: int) -> None:
        """Declare a fresh logical wire; its first placed site becomes an input."""
        if q in self._head or q in self._outputs:
            raise PatternError(f"wire {q} already started")
        self._head[q] = None

    def connect(self, q: int, nbrs: Sequence[Site]) -> None:
        """Continue wire ``q`` from an earlier pattern (its next site links to ``nbrs``)."""
        self._head[q] = list(nbrs)

    def head(self, q: int) -> list[Site] | None:
        return self._head[q]

    def _node(self, site: Site, role: str) -> None:
        if site in self._nodes:
            raise PatternError(f"site {site} placed twice")
        self._nodes[site] = {"role": role}

    def _enter(self, q: int, site: Site) -> Site:
        if q not in self._head:
            raise PatternError(f"wire {q} is not live")
        prev = self._head.pop(q)
        if prev is None:
            self._node(site, "input")
            self._inputs[q] = site
        else:
            self._node(site, "body")
            self._edges += [(p, site) for p in prev]
        return site

    def _measure(self, site: Site, spec: AngleSpec | None) -> None:
        if spec is not None:
            self.specs[site] = spec
        self._order.append(site)

    def finish(self, q: int, site: Site) -> Site:
        """Terminate wire ``q`` on an output site."""
        prev = self._head.pop(q)
        if prev is None:
            raise PatternError(f"wire {q} finished before any gadget")
        self._node(site, "output")
        self._edges += [(p, site) for p in prev]
        self._outputs[q] = site
        return site

    # -- gadgets -------------------------------------------------------

    def chain(self, q: int, sites: Sequence[Site], specs: Sequence[AngleSpec | None]) -> None:
        """Linear cluster on wire ``q``; each site implements ``X^s H R_z(-angle)``."""
        if len(sites) != len(specs) or not sites:
            raise PatternError("chain needs one spec per site")
        prev = None
        for k, (site, spec) in enumerate(zip(sites, specs)):
            if k == 0:
                self._enter(q, site)
            else:
                self._node(site, "body")
                self._edges.append((prev, site))
            self._measure(site, spec)
            if spec is not None:
                self._gates.append(GateOp("rot", (q,), "z", site))
            self._gates.append(GateOp("h", (q,)))
            self._gates.append(GateOp("byp", (q,), "x", site))
            prev = site
        self._head[q] = [prev]

    def euler_leg(self, q: int, block: int, row: int, col: int, specs: Sequence[AngleSpec | None]) -> None:
        """Four measured sites in one column starting at ``(row, col)``."""
        if len(specs) != 3:
            raise PatternError("an Euler leg carries three angles")
        sites = [Site(block, row + k, col) for k in range(4)]
        self.chain(q, sites, [None, *specs])

    def segment(self, q: int, block: int, row: int, col: int, spec: AngleSpec) -> None:
        """Two measured sites: Pauli-x, then one angle (net ``R_x``)."""
        self.chain(q, [Site(block, row, col), Site(block, row + 1, col)], [None, spec])

    def _block(self, wires, block, row, col, body, adaptive, intrinsic, byproduct, exits, spec, axis, height):
        b = lambda r, c: Site(block, row + r - 1, col + c - 1)  # noqa: E731
        in_cols = sorted(byproduct)
        for q, c in zip(wires, in_cols):
            self._enter(q, b(1, c))
        for rc in body:
            self._node(b(*rc), "body")
        placed = {(1, c) for c in in_cols} | set(body)
        for r, c in sorted(placed):
            if (r + 1, c) in placed:
                self._edges.append((b(r, c), b(r + 1, c)))
            if (r, c + 1) in placed:
                self._edges.append((b(r, c), b(r, c + 1)))
        order = sorted(placed - {adaptive})
        intr = frozenset(b(*rc) for rc in intrinsic)
        for rc in order:
            self._measure(b(*rc), None)
        self._measure(b(*adaptive), spec)
        self._gates.append(GateOp("rot", tuple(wires), axis, b(*adaptive), intr))
        for q, c in zip(wires, in_cols):
            zs, xs = byproduct[c]
            self._gates += [GateOp("byp", (q,), "z", b(*rc)) for rc in zs]
            self._gates += [GateOp("byp", (q,), "x", b(*rc)) for rc in xs]
            self._head[q] = [b(height - 1, exits[c])]

    def rzz(self, qa: int, qb: int, block: int, row: int, col: int, spec: AngleSpec) -> None:
        """Two-qubit block with top-left input at ``(row, col)``; outputs swap columns."""
        self._block(
            (qa, qb), block, row, col, RZZ_BODY, RZZ_ADAPTIVE, RZZ_INTRINSIC, RZZ_BYPRODUCT, RZZ_EXIT, spec, "zz", 5
        )

    def rzzz(self, qa: int, qb: int, qc: int, block: int, row: int, col: int, spec: AngleSpec) -> None:
        """Three-qubit block; the outer wires swap columns, the middle one stays."""
        self._block(
            (qa, qb, qc),
            block,
            row,
            col,
            RZZZ_BODY,
            RZZZ_ADAPTIVE,
            RZZZ_INTRINSIC,
            RZZZ_BYPRODUCT,
            RZZZ_EXIT,
            spec,
            "zzz",
            7,
        )

    # -- assembly ------------------------------------------------------

    @property
    def sites(self) -> list[Site]:
        return list(self._nodes)

    @property
    def gates(self) -> list[GateOp]:
        return list(self._gates)

    def outputs(self) -> dict[int, Site]:
        return dict(self._outputs)

    def build(
        self,
        name: str,
        deps: Mapping[Site, frozenset],
        z: Mapping[int, frozenset],
        x: Mapping[int, frozenset],
        phi_m: float,
        target: str = "",
        params: Mapping[str, float] | None = None,
    ) -> MeasurementPattern:
        """Freeze the pattern with dependency sets keyed by adaptive site and byproducts by wire."""
        if self._head:
            raise PatternError(f"wires left open: {sorted(self._head)}")
        missing = set(self.specs) - set(deps)
        extra = set(deps) - set(self.specs)
        if missing or extra:
            raise PatternError(f"dependency table mismatch: missing {sorted(missing)}, extra {sorted(extra)}")
        wires = sorted(self._inputs)
        if wires != sorted(self._outputs) or wires != list(range(1, len(wires) + 1)):
            raise PatternError("wires must be numbered 1..n with one input and one output each")
        rounds: dict[Site, int] = {}
        for s in self._order:
            d = deps.get(s, ())
            rounds[s] = 1 + max((rounds[t] for t in d), default=0) if s in self.specs else 1
        nodes = []
        for s, kw in self._nodes.items():
            spec = self.specs.get(s)
            nodes.append(
                PatternNode(
                    site=s,
                    role=kw["role"],
                    angle=spec.expr(deps[s]) if spec else None,
                    round=rounds.get(s, 0),
                    tag=spec.tag if spec else "",
                )
            )
        outs = [self._outputs[q] for q in wires]
        byp = ByproductSpec(
            {self._outputs[q]: frozenset(z[q]) for q in wires if z.get(q)},
            {self._outputs[q]: frozenset(x[q]) for q in wires if x.get(q)},
        )
        p = MeasurementPattern(
            name=name,
            nodes=tuple(sorted(nodes, key=lambda n: n.site)),
            graph=Graph(self._nodes, self._edges),
            inputs=tuple(self._inputs[q] for q in wires),
            outputs=tuple(outs),
            byproduct=byp,
            phi_m=phi_m,
            target=target,
            gates=tuple(self._gates),
            params=dict(params or {}),
            schedule=tuple(self._order),
        )
        p.validate()
        return p
