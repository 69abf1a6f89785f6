"""Remove Pauli-x measured qubits from a pattern by graph-state rewriting."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import replace

from ..graph import Graph, LocalUnitaryWord, compactify_sequence, label_key
from .ir import ByproductSpec, MeasurementPattern, PatternError, Site, parity


def avoid_inputs(inputs) -> callable:
    """Special-neighbour policy: smallest neighbour that is not a logical input.

    The local complementation at the special neighbour needs that qubit in
    ``|+>``, which inputs carrying arbitrary states are not.
    """
    inputs = frozenset(inputs)

    def policy(g: Graph, j):
        cands = [v for v in g.neighbors(j) if v not in inputs]
        if not cands:
            raise PatternError(f"every neighbour of {j} is an input; cannot compactify it")
        return min(cands, key=label_key)

    return policy


def compactify_pattern(
    p: MeasurementPattern,
    outcomes: Mapping[Site, int] | None = None,
    policy=None,
) -> MeasurementPattern:
    """Classically pre-measure every Pauli-x body qubit of ``p``.

    Parameters
    ----------
    p : MeasurementPattern
        Pattern to shrink; inputs, adaptive sites and outputs survive.
    outcomes : mapping, optional
        Outcome bits assumed for the removed sites (default: all 0). Their
        parities are folded into the static signs of the angles and into
        constant Paulis on the output frames.
    policy : callable, optional
        Special-neighbour policy; must never pick an input.

    Returns
    -------
    MeasurementPattern
        The compact pattern. Surviving nodes carry the local correction word
        as their ``frame``; the gate array is dropped because it refers to
        removed sites.
    """
    inputs = set(p.inputs)
    removed = [s for s in (p.schedule or p.sites) if p.node(s).role == "body" and p.node(s).angle is None]
    removed_set = set(removed)
    fixed = {s: 0 for s in removed}
    if outcomes is not None:
        for s, v in outcomes.items():
            if s not in removed_set:
                raise PatternError(f"{s} is not a removable Pauli-x site")
            if v not in (0, 1):
                raise PatternError(f"outcome for {s} must be 0 or 1")
            fixed[s] = v
    policy = policy or avoid_inputs(inputs)
    res = compactify_sequence(
        p.graph,
        removed,
        ["x"] * len(removed),
        [1 - 2 * fixed[s] for s in removed],
        policy,
    )
    corr: LocalUnitaryWord = res.corrections

    def strip(deps):
        kept = frozenset(d for d in deps if d not in removed_set)
        return kept, parity(deps & removed_set, fixed)

    nodes = []
    for n in p.nodes:
        if n.site in removed_set:
            continue
        frame = tuple(n.frame) + corr.on(n.site)
        angle = n.angle
        if angle is not None:
            kept, flip = strip(angle.parity_deps)
            angle = replace(angle, parity_deps=kept, static_sign=-angle.static_sign if flip else angle.static_sign)
        nodes.append(replace(n, angle=angle, frame=frame))
    z, x = {}, {}
    by_site = {n.site: n for n in nodes}
    for q in p.outputs:
        kz, cz = strip(p.byproduct.z.get(q, frozenset()))
        kx, cx = strip(p.byproduct.x.get(q, frozenset()))
        if kz:
            z[q] = kz
        if kx:
            x[q] = kx
        const = ("X",) * cx + ("Z",) * cz
        if const:
            n = by_site[q]
            by_site[q] = replace(n, frame=const + n.frame)
    nodes = [by_site[n.site] for n in nodes]
    graph = res.graph
    out = replace(
        p,
        name=f"{p.name} compact",
        nodes=tuple(sorted(nodes, key=lambda n: n.site)),
        graph=graph,
        byproduct=ByproductSpec(z, x),
        gates=(),
        schedule=tuple(s for s in p.schedule if s not in removed_set),
    )
    out.validate()
    return out
