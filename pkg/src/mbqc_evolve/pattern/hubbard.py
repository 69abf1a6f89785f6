"""Measurement pattern for the Trotterized Hubbard-chain propagator.

The chain of ``N`` sites is mapped to ``2N`` spin-orbital wires. Block ``j``
acts on wires ``A, B, C, D = 2j-1, 2j, 2j+1, 2j+2`` and spans local rows
1-47 and columns 1-7:

* rows 1-4: Euler legs of ``A`` (column 1) and ``C`` (column 5),
* rows 5-10 and 15-20: two ``R_zzz`` gadgets on ``(A, B, C)``,
* rows 11-14: legs of ``A`` (column 5) and ``C`` (column 1),
* rows 21-22: single-angle segments on all four wires (``D`` enters here),
* rows 23-28 and 33-38: two ``R_zzz`` gadgets on ``(B, C, D)``,
* rows 29-32 and 39-42: legs of ``B`` and ``D``,
* rows 43-47: the on-site ``R_zz`` gadget on ``(A, B)``.

The last block additionally closes ``(C, D)`` with a second ``R_zz``
gadget; every other block hands ``C`` and ``D`` over to the next block,
where they play the roles of ``A`` and ``B``.
"""

from __future__ import annotations

from fractions import Fraction

from .builder import AngleSpec, PatternBuilder
from .ir import MeasurementPattern, PatternError, Site, sym_diff

# ---------------------------------------------------------------------------
# angle templates

_PSI_CONST = {
    "psi-1": Fraction(1, 2),
    "psi-2": Fraction(-1, 2),
    "psi-3": Fraction(-1, 2),
    "psi-4": Fraction(1, 2),
    "psi1": Fraction(-1, 2),
    "psi2": Fraction(1, 2),
    "psi3": Fraction(1, 2),
    "psi4": Fraction(-1, 2),
}


def hubbard_spec(role: str, g_u: float, wires: tuple[int, ...]) -> AngleSpec:
    """Angle template for ``role`` on ``wires`` (one wire for single-qubit roles)."""
    tag = f"{role}_{','.join(map(str, wires))}"
    if role in _PSI_CONST:
        return AngleSpec(1, 0.0, _PSI_CONST[role], tag)
    if role in ("phizzz-", "phizzz+"):
        return AngleSpec(-1, 1.0, Fraction(0), tag)
    if role == "phizz":
        return AngleSpec(-1, g_u, Fraction(0), tag)
    if role == "phi+":
        return AngleSpec(1, g_u, Fraction(1, 2), tag)
    if role == "phi-":
        return AngleSpec(-1, g_u, Fraction(0), tag)
    if role == "chi+":
        return AngleSpec(1, 0.0, Fraction(-1), tag)
    if role == "chi-":
        return AngleSpec(-1, 0.0, Fraction(-1), tag)
    raise PatternError(f"unknown Hubbard angle role {role!r}")


# ---------------------------------------------------------------------------
# exponent tables in local (row, col) coordinates
#
# Single-wire chains are cumulative: each entry adds sites to the previous
# one. ``x`` chains collect the outcomes that flip x-type rotations, ``z``
# chains the ones that flip z-type rotations.

CHAINS = {
    "A": {
        "x": [
            ("psi-1", (2, 1), [(1, 1)]),
            ("psi-3", (4, 1), [(3, 1)]),
            ("psi3", (12, 5), [(5, 1), (6, 2), (7, 3), (8, 4), (9, 5), (11, 5)]),
            ("chi+", (14, 5), [(13, 5)]),
            ("psi-4", (22, 1), [(15, 5), (16, 4), (17, 3), (18, 2), (19, 1), (21, 1)]),
        ],
        "z": [
            ("psi-2", (3, 1), [(2, 1)]),
            ("psi2", (13, 5), [(4, 1), (6, 1), (7, 2), (8, 3), (9, 4), (10, 5), (12, 5)]),
            ("phi-", (41, 1), [(14, 5), (16, 5), (17, 4), (18, 3), (19, 2), (20, 1), (22, 1), (40, 1)]),
        ],
    },
    "B": {
        "x": [
            (
                "psi4",
                (22, 3),
                [
                    (5, 3), (6, 2), (6, 4), (7, 1), (7, 3), (7, 5), (8, 2), (8, 4), (9, 3),
                    (15, 3), (16, 2), (16, 4), (17, 1), (17, 3), (17, 5), (18, 2), (18, 4), (19, 3), (21, 3),
                ],
            ),
            ("chi-", (30, 7), [(23, 3), (24, 4), (25, 5), (26, 6), (27, 7), (29, 7)]),
            ("psi-3", (32, 7), [(31, 7)]),
            ("phi+", (40, 3), [(33, 7), (34, 6), (35, 5), (36, 4), (37, 3), (39, 3)]),
            ("psi1", (42, 3), [(41, 3)]),
        ],
        "z": [
            (
                "psi-2",
                (31, 7),
                [
                    (6, 3), (7, 2), (7, 4), (8, 1), (8, 3), (8, 5), (9, 2), (9, 4), (10, 3),
                    (16, 3), (17, 2), (17, 4), (18, 1), (18, 3), (18, 5), (19, 2), (19, 4), (20, 3),
                    (22, 3), (24, 3), (25, 4), (26, 5), (27, 6), (28, 7), (30, 7),
                ],
            ),
            ("psi2", (41, 3), [(32, 7), (34, 7), (35, 6), (36, 5), (37, 4), (38, 3), (40, 3)]),
        ],
    },
    "C": {
        "x": [
            ("psi-1", (2, 5), [(1, 5)]),
            ("psi-3", (4, 5), [(3, 5)]),
            ("psi3", (12, 1), [(5, 5), (6, 4), (7, 3), (8, 2), (9, 1), (11, 1)]),
            ("chi+", (14, 1), [(13, 1)]),
            ("psi-4", (22, 5), [(15, 1), (16, 2), (17, 3), (18, 4), (19, 5), (21, 5)]),
        ],
        "z": [
            ("psi-2", (3, 5), [(2, 5)]),
            ("psi2", (13, 1), [(4, 5), (6, 5), (7, 4), (8, 3), (9, 2), (10, 1), (12, 1)]),
        ],
    },
    "D": {
        "x": [
            ("psi4", (22, 7), [(21, 7)]),
            ("chi-", (30, 3), [(23, 7), (24, 6), (25, 5), (26, 4), (27, 3), (29, 3)]),
            ("psi-3", (32, 3), [(31, 3)]),
            ("psi3", (40, 7), [(33, 3), (34, 4), (35, 5), (36, 6), (37, 7), (39, 7)]),
            ("psi1", (42, 7), [(41, 7)]),
        ],
        "z": [
            ("psi-2", (31, 3), [(22, 7), (24, 7), (25, 6), (26, 5), (27, 4), (28, 3), (30, 3)]),
            ("psi2", (41, 7), [(32, 3), (34, 3), (35, 4), (36, 5), (37, 6), (38, 7), (40, 7)]),
        ],
    },
}

# multi-qubit rotations: (role, wires, adaptive site, sites)
COUPLINGS = {
    "abc-": (
        "phizzz-",
        "ABC",
        (7, 3),
        [(2, 1), (2, 5), (4, 1), (4, 5), (6, 1), (6, 3), (6, 5), (8, 1), (8, 5), (9, 2), (9, 4)],
    ),
    "abc+": (
        "phizzz+",
        "CBA",
        (17, 3),
        [
            (2, 1), (2, 5), (4, 1), (4, 5), (6, 1), (6, 3), (6, 5), (8, 1), (8, 3), (8, 5),
            (10, 1), (10, 3), (10, 5), (12, 1), (12, 5), (14, 1), (14, 5), (16, 1), (16, 3), (16, 5),
            (18, 1), (18, 5), (19, 2), (19, 4),
        ],
    ),
    "bcd-": (
        "phizzz-",
        "BCD",
        (25, 5),
        [
            (2, 5), (4, 5), (6, 3), (6, 5), (7, 2), (8, 1), (8, 5), (9, 4), (10, 1), (10, 3),
            (12, 1), (14, 1), (16, 1), (16, 3), (17, 4), (18, 1), (18, 5), (19, 2), (20, 3), (20, 5),
            (22, 3), (22, 5), (22, 7), (24, 3), (24, 5), (24, 7), (26, 3), (26, 7), (27, 4), (27, 6),
        ],
    ),
    "bcd+": (
        "phizzz+",
        "DCB",
        (35, 5),
        [
            (2, 5), (4, 5), (6, 3), (6, 5), (7, 2), (8, 1), (8, 5), (9, 4), (10, 1), (10, 3),
            (12, 1), (14, 1), (16, 1), (16, 3), (17, 4), (18, 1), (18, 5), (19, 2), (20, 3), (20, 5),
            (22, 3), (22, 5), (22, 7), (24, 3), (24, 5), (24, 7), (26, 3), (26, 5), (26, 7),
            (28, 3), (28, 5), (28, 7), (30, 3), (30, 7), (32, 3), (32, 7), (34, 3), (34, 5), (34, 7),
            (36, 3), (36, 7), (37, 4), (37, 6),
        ],
    ),
    "ab": (
        "phizz",
        "AB",
        (44, 2),
        [
            (2, 1), (4, 1), (6, 1), (6, 3), (7, 4), (8, 1), (8, 5), (9, 2), (10, 3), (10, 5),
            (12, 5), (14, 5), (16, 3), (16, 5), (17, 2), (18, 1), (18, 5), (19, 4), (20, 1), (20, 3),
            (22, 1), (22, 3), (24, 3), (25, 4), (26, 5), (27, 6), (28, 7), (30, 7), (32, 7), (34, 7),
            (35, 6), (36, 5), (37, 4), (38, 3), (40, 1), (40, 3), (42, 1), (42, 3), (44, 1), (44, 3),
            (45, 2),
        ],
    ),
    "cd": (
        "phizz",
        "CD",
        (44, 6),
        [
            (2, 5), (4, 5), (6, 5), (7, 4), (8, 3), (9, 2), (10, 1), (12, 1), (14, 1), (16, 1),
            (17, 2), (18, 3), (19, 4), (20, 5), (22, 5), (22, 7), (24, 5), (24, 7), (25, 4), (26, 3),
            (26, 7), (27, 6), (28, 5), (28, 3), (30, 3), (32, 3), (34, 3), (34, 5), (35, 6), (36, 3),
            (36, 7), (37, 4), (38, 5), (38, 7), (40, 5), (40, 7), (42, 5), (42, 7), (44, 5), (44, 7),
            (45, 6),
        ],
    ),
}

# byproducts: (wire, axis) -> (chain entry it extends, extra sites)
BYPRODUCTS = {
    ("A", "z"): (("A", "x", "psi-4"), [(39, 1), (41, 1), (43, 1), (44, 2), (45, 3)]),
    ("A", "x"): (("A", "z", "phi-"), [(42, 1), (44, 1), (45, 2), (46, 3)]),
    ("B", "z"): (("B", "x", "psi1"), [(43, 3), (44, 2), (45, 1)]),
    ("B", "x"): (("B", "z", "psi2"), [(42, 3), (44, 3), (45, 2), (46, 1)]),
    ("C", "z"): (
        ("C", "x", "psi-4"),
        [
            (23, 5), (24, 4), (24, 6), (25, 3), (25, 5), (25, 7), (26, 4), (26, 6), (27, 5),
            (33, 5), (34, 4), (34, 6), (35, 3), (35, 5), (35, 7), (36, 4), (36, 6), (37, 5),
        ],
    ),
    ("C", "x"): (
        ("C", "z", "psi2"),
        [
            (14, 1), (16, 1), (17, 2), (18, 3), (19, 4), (20, 5), (22, 5), (24, 5), (25, 4), (25, 6),
            (26, 3), (26, 5), (26, 7), (27, 4), (27, 6), (28, 5), (34, 5), (35, 4), (35, 6), (36, 3),
            (36, 5), (36, 7), (37, 4), (37, 6), (38, 5),
        ],
    ),
    ("D", "z"): (("D", "x", "psi1"), []),
    ("D", "x"): (("D", "z", "psi2"), [(42, 7)]),
}

# extra sites of the last block, where C and D pass through a second R_zz gadget
W_BYPRODUCT_EXTRA = {
    ("C", "z"): [(39, 5), (41, 5), (43, 5), (44, 6), (45, 7)],
    ("C", "x"): [(40, 5), (42, 5), (44, 5), (45, 6), (46, 7)],
    ("D", "z"): [(43, 7), (44, 6), (45, 5)],
    ("D", "x"): [(44, 7), (45, 6), (46, 5)],
}
W_PHI_MINUS_C = ((41, 5), [(40, 5)])  # extends the un-tilded X byproduct of C


def wires_of(j: int) -> dict[str, int]:
    return {"A": 2 * j - 1, "B": 2 * j, "C": 2 * j + 1, "D": 2 * j + 2}


def block_index(N: int, m: int, j: int) -> int:
    return (m - 1) * (N - 1) + j


Frames = dict[int, tuple[frozenset, frozenset]]
_EMPTY = (frozenset(), frozenset())


def _block_tables(
    N: int, m: int, j: int, base: dict[str, tuple[frozenset, frozenset]], deps: dict, literal: bool
) -> dict[str, tuple[frozenset, frozenset]]:
    """Dependency sets of block ``j`` of step ``m`` given each wire's entering ``(Z, X)`` frame.

    Returns the ``(Z, X)`` byproduct frames of the wires leaving the block.
    """
    b = block_index(N, m, j)
    last = j == N - 1
    loc = lambda rcs: frozenset(Site(b, r, c) for r, c in rcs)  # noqa: E731
    chain_sets: dict[tuple[str, str, str], frozenset] = {}
    for w, axes in CHAINS.items():
        zin, xin = base[w]
        for axis, entries in axes.items():
            acc = zin if axis == "x" else xin
            for role, site, extra in entries:
                acc = sym_diff(acc, loc(extra))
                chain_sets[(w, axis, role)] = acc
                deps[Site(b, *site)] = acc

    for key, (role, wires, site, sites) in COUPLINGS.items():
        if key == "cd" and not last:
            continue
        acc = loc(sites)
        for w in set(wires):
            if literal and j > 1 and w == "B" and key in ("bcd-", "bcd+"):
                continue
            acc = sym_diff(acc, base[w][1])
        deps[Site(b, *site)] = acc

    frames: dict[str, tuple[frozenset, frozenset]] = {}
    for w in "ABCD":
        zx = []
        for axis in ("z", "x"):
            ref, extra = BYPRODUCTS[(w, axis)]
            s = sym_diff(chain_sets[ref], loc(extra))
            if last and (w, axis) in W_BYPRODUCT_EXTRA:
                s = sym_diff(s, loc(W_BYPRODUCT_EXTRA[(w, axis)]))
            zx.append(s)
        frames[w] = (zx[0], zx[1])
    if last:
        site, extra = W_PHI_MINUS_C
        ref, bx = BYPRODUCTS[("C", "x")]
        deps[Site(b, *site)] = sym_diff(chain_sets[ref], loc(bx), loc(extra))
    return frames


def _step_tables(N: int, m: int, incoming: Frames, deps: dict, literal: bool) -> Frames:
    out: Frames = {}
    carry: dict[str, tuple[frozenset, frozenset]] = {}
    for j in range(1, N):
        wn = wires_of(j)
        base = {
            "A": carry.get("A", incoming.get(wn["A"], _EMPTY)),
            "B": carry.get("B", incoming.get(wn["B"], _EMPTY)),
            "C": incoming.get(wn["C"], _EMPTY),
            "D": incoming.get(wn["D"], _EMPTY),
        }
        frames = _block_tables(N, m, j, base, deps, literal)
        out[wn["A"]], out[wn["B"]] = frames["A"], frames["B"]
        if j == N - 1:
            out[wn["C"]], out[wn["D"]] = frames["C"], frames["D"]
        carry = {"A": frames["C"], "B": frames["D"]}
    return out


def hubbard_pattern(N: int, M: int, g_u: float, phi_m: float, literal_rewiring: bool = False) -> MeasurementPattern:
    """Pattern for ``M`` first-order Trotter steps of the ``N``-site Hubbard chain.

    Parameters
    ----------
    N : int
        Number of lattice sites (``2N`` wires), at least 2.
    M : int
        Number of Trotter steps.
    g_u : float
        Interaction ``U / (2w)``.
    phi_m : float
        Time per step times ``w``.
    literal_rewiring : bool
        Leave out the ``X`` frame of wire ``B`` from the ``(B, C, D)``
        rotations of blocks ``j >= 2``. Such a pattern does not implement
        the target; the flag exists so the tests can show that the term is
        needed.
    """
    if N < 2:
        raise PatternError(f"Hubbard pattern needs N >= 2, got {N}")
    if M < 1:
        raise PatternError(f"Hubbard pattern needs M >= 1, got {M}")
    b = PatternBuilder()
    for q in range(1, 2 * N + 1):
        b.start(q)
    sp = lambda role, *ws: hubbard_spec(role, g_u, ws)  # noqa: E731
    for m in range(1, M + 1):
        for j in range(1, N):
            blk = block_index(N, m, j)
            last = j == N - 1
            A, B, C, D = (wires_of(j)[w] for w in "ABCD")
            b.euler_leg(A, blk, 1, 1, [sp("psi-1", A), sp("psi-2", A), sp("psi-3", A)])
            b.euler_leg(C, blk, 1, 5, [sp("psi-1", C), sp("psi-2", C), sp("psi-3", C)])
            b.rzzz(A, B, C, blk, 5, 1, sp("phizzz-", A, B, C))
            b.euler_leg(A, blk, 11, 5, [sp("psi3", A), sp("psi2", A), sp("chi+", A)])
            b.euler_leg(C, blk, 11, 1, [sp("psi3", C), sp("psi2", C), sp("chi+", C)])
            b.rzzz(C, B, A, blk, 15, 1, sp("phizzz+", A, B, C))
            b.segment(A, blk, 21, 1, sp("psi-4", A))
            b.segment(B, blk, 21, 3, sp("psi4", B))
            b.segment(C, blk, 21, 5, sp("psi-4", C))
            b.segment(D, blk, 21, 7, sp("psi4", D))
            b.rzzz(B, C, D, blk, 23, 3, sp("phizzz-", B, C, D))
            b.euler_leg(B, blk, 29, 7, [sp("chi-", B), sp("psi-2", B), sp("psi-3", B)])
            b.euler_leg(D, blk, 29, 3, [sp("chi-", D), sp("psi-2", D), sp("psi-3", D)])
            b.rzzz(D, C, B, blk, 33, 3, sp("phizzz+", B, C, D))
            b.euler_leg(B, blk, 39, 3, [sp("phi+", B), sp("psi2", B), sp("psi1", B)])
            d4 = sp("phi+", D) if last else sp("psi3", D)
            b.euler_leg(D, blk, 39, 7, [d4, sp("psi2", D), sp("psi1", D)])
            b.chain(A, [Site(blk, r, 1) for r in range(39, 43)], [None, None, sp("phi-", A), None])
            if last:
                b.chain(C, [Site(blk, r, 5) for r in range(39, 43)], [None, None, sp("phi-", C), None])
            b.rzz(A, B, blk, 43, 1, sp("phizz", A, B))
            if last:
                b.rzz(C, D, blk, 43, 5, sp("phizz", C, D))
    for j in range(1, N):
        blk = block_index(N, M, j)
        A, B, C, D = (wires_of(j)[w] for w in "ABCD")
        b.finish(A, Site(blk, 47, 3))
        b.finish(B, Site(blk, 47, 1))
        if j == N - 1:
            b.finish(C, Site(blk, 47, 7))
            b.finish(D, Site(blk, 47, 5))

    deps: dict[Site, frozenset] = {}
    frames: Frames = {}
    for m in range(1, M + 1):
        frames = _step_tables(N, m, frames, deps, literal_rewiring)
    return b.build(
        f"hubbard N={N} M={M}",
        deps,
        {q: f[0] for q, f in frames.items()},
        {q: f[1] for q, f in frames.items()},
        phi_m=phi_m,
        target=f"hubbard trotter N={N} M={M} g_U={g_u!r}",
        params={"N": N, "M": M, "g_U": g_u},
    )
