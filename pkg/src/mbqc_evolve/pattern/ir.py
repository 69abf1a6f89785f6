"""Pattern intermediate representation and its canonical text form."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..graph import Graph, GENERATORS

FORMAT_HEADER = "# mbqc-pattern v1"

ROLES = ("input", "body", "output")


class PatternError(ValueError):
    """Structural problem in a measurement pattern."""


@dataclass(frozen=True, order=True)
class Site:
    """Qubit address: composite-gate copy ``block`` and ``(row, col)`` inside it."""

    block: int
    row: int
    col: int

    @property
    def coord(self) -> tuple[int, int]:
        return (self.row, self.col)

    def token(self) -> str:
        return f"{self.block},{self.row},{self.col}"

    @classmethod
    def parse(cls, tok: str) -> Site:
        try:
            b, r, c = (int(x) for x in tok.split(","))
        except ValueError as exc:
            raise PatternError(f"bad site token {tok!r}") from exc
        return cls(b, r, c)

    def __str__(self) -> str:
        return f"({self.row},{self.col})^{self.block}"


def _sites_token(sites: Iterable[Site]) -> str:
    return ";".join(s.token() for s in sorted(sites))


def _parse_sites(tok: str) -> frozenset[Site]:
    return frozenset(Site.parse(t) for t in tok.split(";") if t)


def parity(deps: Iterable[Site], outcomes: Mapping[Site, int]) -> int:
    """Parity of the outcomes over ``deps``; missing sites raise ``KeyError``."""
    p = 0
    for s in deps:
        p ^= outcomes[s] & 1
    return p


def sym_diff(*sets: Iterable[Site]) -> frozenset[Site]:
    """Mod-2 sum of dependency sets."""
    out: set[Site] = set()
    for s in sets:
        for x in s:
            out ^= {x}
    return frozenset(out)


@dataclass(frozen=True)
class AngleExpr:
    """Adaptive measurement angle.

    Evaluates to ``static_sign * (-1)**parity(parity_deps) * (phi_coeff*phi_m + const_term*pi + offset)``.
    ``offset`` is zero for built patterns and carries injected angle errors.
    """

    static_sign: int
    phi_coeff: float
    const_term: Fraction
    parity_deps: frozenset = frozenset()
    offset: float = 0.0

    def __post_init__(self):
        if self.static_sign not in (1, -1):
            raise PatternError(f"static_sign must be +-1, got {self.static_sign}")
        object.__setattr__(self, "const_term", Fraction(self.const_term))
        object.__setattr__(self, "parity_deps", frozenset(self.parity_deps))

    def magnitude(self, phi_m: float) -> float:
        return self.phi_coeff * phi_m + float(self.const_term) * math.pi + self.offset

    def evaluate(self, outcomes: Mapping[Site, int], phi_m: float) -> float:
        sign = -1 if parity(self.parity_deps, outcomes) else 1
        return self.static_sign * sign * self.magnitude(phi_m)

    def with_deps(self, deps: Iterable[Site]) -> AngleExpr:
        return replace(self, parity_deps=frozenset(deps))


@dataclass(frozen=True)
class PatternNode:
    """One qubit of the pattern.

    ``angle`` is None for Pauli-x measurements and for outputs. ``frame`` is a
    local generator word applied to the qubit right before it is measured; it
    stays empty for lattice patterns and is filled in by compactification.
    ``round`` is 0 for outputs, which the pattern never measures.
    """

    site: Site
    role: str
    angle: AngleExpr | None = None
    round: int = 1
    tag: str = ""
    frame: tuple[str, ...] = ()

    def __post_init__(self):
        if self.role not in ROLES:
            raise PatternError(f"unknown role {self.role!r}")
        for g in self.frame:
            if g not in GENERATORS:
                raise PatternError(f"unknown generator {g!r} on {self.site}")

    @property
    def measured(self) -> bool:
        return self.role != "output"

    @property
    def adaptive(self) -> bool:
        return self.angle is not None


@dataclass(frozen=True)
class ByproductSpec:
    """Per-output exponents of ``U_Sigma = prod_q Z_q^{z_q} X_q^{x_q}``."""

    z: Mapping[Site, frozenset] = field(default_factory=dict)
    x: Mapping[Site, frozenset] = field(default_factory=dict)

    def exponents(self, q: Site, outcomes: Mapping[Site, int]) -> tuple[int, int]:
        return (parity(self.z.get(q, ()), outcomes), parity(self.x.get(q, ()), outcomes))

    def deps(self) -> frozenset:
        out: set = set()
        for d in (*self.z.values(), *self.x.values()):
            out |= d
        return frozenset(out)


@dataclass(frozen=True)
class GateOp:
    """Symbolic gate on logical wires used for byproduct propagation.

    ``kind`` is ``rot`` (rotation whose sign is fixed by the measurement at
    ``site``; ``axis`` is one Pauli letter per wire), ``h`` (Hadamard), or
    ``byp`` (Pauli ``axis`` raised to the outcome of ``site``).
    ``intrinsic`` lists outcomes that flip the rotation inside its gadget.
    """

    kind: str
    wires: tuple[int, ...]
    axis: str = ""
    site: Site | None = None
    intrinsic: frozenset = frozenset()

    def line(self) -> str:
        w = ",".join(str(x) for x in self.wires)
        if self.kind == "h":
            return f"gate h {w}"
        if self.kind == "byp":
            return f"gate byp {self.axis} {w} {self.site.token()}"
        return f"gate rot {self.axis} {w} {self.site.token()} intrinsic={_sites_token(self.intrinsic)}"

    @classmethod
    def parse(cls, parts: list[str]) -> GateOp:
        kind = parts[0]
        if kind == "h":
            return cls("h", (int(parts[1]),))
        wires = tuple(int(x) for x in parts[2].split(","))
        site = Site.parse(parts[3])
        if kind == "byp":
            return cls("byp", wires, parts[1], site)
        if kind == "rot":
            intr = _parse_sites(parts[4].split("=", 1)[1])
            return cls("rot", wires, parts[1], site, intr)
        raise PatternError(f"unknown gate kind {kind!r}")


@dataclass(frozen=True)
class MeasurementPattern:
    """Immutable measurement pattern.

    ``inputs[k]`` and ``outputs[k]`` carry logical qubit ``k + 1``; any built-in
    swap is absorbed into the output ordering. ``gates`` is the symbolic gate
    array used to re-derive dependency sets, and ``target`` is a short
    description of the unitary implemented on the logical register.
    ``schedule`` is the preferred measurement order (time order of the
    gadgets); executors may deviate from it as long as dependencies allow.
    """

    name: str
    nodes: tuple[PatternNode, ...]
    graph: Graph
    inputs: tuple[Site, ...]
    outputs: tuple[Site, ...]
    byproduct: ByproductSpec
    phi_m: float = 0.0
    target: str = ""
    gates: tuple[GateOp, ...] = ()
    params: Mapping[str, float] = field(default_factory=dict)
    schedule: tuple[Site, ...] = ()

    def __post_init__(self):
        by_site = {}
        for n in self.nodes:
            if n.site in by_site:
                raise PatternError(f"duplicate site {n.site}")
            by_site[n.site] = n
        object.__setattr__(self, "_by_site", by_site)

    # -- lookups -------------------------------------------------------

    def node(self, site: Site) -> PatternNode:
        try:
            return self._by_site[site]
        except KeyError:
            raise PatternError(f"unknown site {site}") from None

    def __contains__(self, site: Site) -> bool:
        return site in self._by_site

    @property
    def sites(self) -> list[Site]:
        return sorted(self._by_site)

    @property
    def measured(self) -> list[PatternNode]:
        return [n for n in self.nodes if n.measured]

    @property
    def adaptive(self) -> list[PatternNode]:
        return [n for n in self.nodes if n.adaptive]

    @property
    def num_logical(self) -> int:
        return len(self.inputs)

    def angle_deps(self) -> dict[Site, frozenset]:
        return {n.site: n.angle.parity_deps for n in self.adaptive}

    def with_nodes(self, nodes: Iterable[PatternNode], **changes) -> MeasurementPattern:
        return replace(self, nodes=tuple(sorted(nodes, key=lambda n: n.site)), **changes)

    # -- validation ----------------------------------------------------

    def validate(self) -> None:
        if len(self.inputs) != len(self.outputs):
            raise PatternError("inputs and outputs differ in length")
        sites = set(self._by_site)
        if set(self.graph.vertices) != sites:
            raise PatternError("graph vertices differ from pattern sites")
        for s in self.inputs:
            if self.node(s).role != "input":
                raise PatternError(f"{s} listed as input but role is {self.node(s).role}")
        for s in self.outputs:
            if self.node(s).role != "output":
                raise PatternError(f"{s} listed as output but role is {self.node(s).role}")
        for n in self.nodes:
            if n.role == "output" and n.site not in self.outputs:
                raise PatternError(f"output node {n.site} missing from outputs")
            if n.angle is None:
                continue
            for d in n.angle.parity_deps:
                if d not in sites or not self.node(d).measured:
                    raise PatternError(f"{n.site} depends on unmeasured site {d}")
                if self.node(d).round >= n.round:
                    raise PatternError(f"{n.site} (round {n.round}) depends on {d} (round {self.node(d).round})")
        for d in self.byproduct.deps():
            if d not in sites or not self.node(d).measured:
                raise PatternError(f"byproduct depends on unmeasured site {d}")
        for q in (*self.byproduct.z, *self.byproduct.x):
            if q not in self.outputs:
                raise PatternError(f"byproduct on non-output {q}")
        if self.schedule:
            measured = {n.site for n in self.nodes if n.measured}
            if set(self.schedule) != measured or len(self.schedule) != len(measured):
                raise PatternError("schedule must list every measured site once")

    # -- serialization -------------------------------------------------

    def to_text(self) -> str:
        lines = [FORMAT_HEADER, f"name {self.name}", f"phi_m {self.phi_m!r}"]
        if self.target:
            lines.append(f"target {self.target}")
        for k, v in sorted(self.params.items()):
            lines.append(f"param {k} {v!r}")
        for k, s in enumerate(self.inputs, 1):
            lines.append(f"input {s.token()} {k}")
        for k, s in enumerate(self.outputs, 1):
            lines.append(f"output {s.token()} {k}")
        for n in sorted(self.nodes, key=lambda n: n.site):
            extra = f" tag={n.tag}" if n.tag else ""
            lines.append(f"site {n.site.block} {n.site.row} {n.site.col} {n.role} {n.round}{extra}")
        for a, b in self.graph.sorted_edges():
            lines.append(f"edge {a.token()} {b.token()}")
        for n in sorted(self.nodes, key=lambda n: n.site):
            if n.angle is not None:
                a = n.angle
                lines.append(
                    f"adaptive {n.site.token()} sign={a.static_sign:+d} phi={a.phi_coeff!r} "
                    f"const={a.const_term} deps={_sites_token(a.parity_deps)}"
                    + (f" offset={a.offset!r}" if a.offset else "")
                )
            if n.frame:
                lines.append(f"frame {n.site.token()} {' '.join(n.frame)}")
        for q in self.outputs:
            z = self.byproduct.z.get(q, frozenset())
            x = self.byproduct.x.get(q, frozenset())
            lines.append(f"byproduct {q.token()} Z={_sites_token(z)} X={_sites_token(x)}")
        lines += [g.line() for g in self.gates]
        if self.schedule:
            lines.append("schedule " + " ".join(s.token() for s in self.schedule))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> MeasurementPattern:
        rows = text.splitlines()
        if not rows or rows[0].strip() != FORMAT_HEADER:
            raise PatternError(f"missing header {FORMAT_HEADER!r}")
        name, phi_m, target = "", 0.0, ""
        params: dict[str, float] = {}
        inputs: dict[int, Site] = {}
        outputs: dict[int, Site] = {}
        nodes: dict[Site, dict] = {}
        edges, gates, schedule = [], [], []
        bz, bx = {}, {}
        for raw in rows[1:]:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            kind, *rest = line.split()
            try:
                if kind == "name":
                    name = " ".join(rest)
                elif kind == "phi_m":
                    phi_m = float(rest[0])
                elif kind == "target":
                    target = " ".join(rest)
                elif kind == "param":
                    params[rest[0]] = int(rest[1]) if rest[1].lstrip("-").isdigit() else float(rest[1])
                elif kind == "input":
                    inputs[int(rest[1])] = Site.parse(rest[0])
                elif kind == "output":
                    outputs[int(rest[1])] = Site.parse(rest[0])
                elif kind == "site":
                    s = Site(int(rest[0]), int(rest[1]), int(rest[2]))
                    kw = {"role": rest[3], "round": int(rest[4])}
                    for tok in rest[5:]:
                        if tok.startswith("tag="):
                            kw["tag"] = tok[4:]
                    nodes[s] = kw
                elif kind == "edge":
                    edges.append((Site.parse(rest[0]), Site.parse(rest[1])))
                elif kind == "adaptive":
                    s = Site.parse(rest[0])
                    kv = dict(tok.split("=", 1) for tok in rest[1:])
                    nodes[s]["angle"] = AngleExpr(
                        int(kv["sign"]),
                        float(kv["phi"]),
                        Fraction(kv["const"]),
                        _parse_sites(kv["deps"]),
                        float(kv.get("offset", 0.0)),
                    )
                elif kind == "frame":
                    nodes[Site.parse(rest[0])]["frame"] = tuple(rest[1:])
                elif kind == "byproduct":
                    q = Site.parse(rest[0])
                    kv = dict(tok.split("=", 1) for tok in rest[1:])
                    bz[q] = _parse_sites(kv["Z"])
                    bx[q] = _parse_sites(kv["X"])
                elif kind == "gate":
                    gates.append(GateOp.parse(rest))
                elif kind == "schedule":
                    schedule = [Site.parse(t) for t in rest]
                else:
                    raise PatternError(f"unknown line kind {kind!r}")
            except (IndexError, KeyError, ValueError) as exc:
                raise PatternError(f"bad pattern line: {raw!r}") from exc
        node_list = [PatternNode(site=s, **kw) for s, kw in nodes.items()]
        p = cls(
            name=name,
            nodes=tuple(sorted(node_list, key=lambda n: n.site)),
            graph=Graph(nodes, edges),
            inputs=tuple(inputs[k] for k in sorted(inputs)),
            outputs=tuple(outputs[k] for k in sorted(outputs)),
            byproduct=ByproductSpec({q: z for q, z in bz.items() if z}, {q: x for q, x in bx.items() if x}),
            phi_m=phi_m,
            target=target,
            gates=tuple(gates),
            params=params,
            schedule=tuple(schedule),
        )
        p.validate()
        return p
