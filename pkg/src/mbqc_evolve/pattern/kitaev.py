"""Measurement pattern for the Trotterized Kitaev-chain propagator.

One Trotter step is a cascade of ``N - 1`` blocks. Block ``j`` couples wires
``j`` and ``k = j + 1`` and uses local rows 1-13:

* rows 1-4: Euler legs before the coupling (wire ``j`` in column 1 for the
  first block only, wire ``k`` in column 3 always),
* rows 5-8: the ``R_zz`` gadget with its adaptive site at (6,2),
* rows 9-12: Euler legs after the coupling (wire ``j`` in column 3; wire
  ``N`` in column 1 of the last block). Rows 13 hold the outputs.

In every other block wire ``k`` leaves the gadget and enters the next block's
gadget directly. Step ``m`` uses block numbers ``(m-1)(N-1)+1 .. m(N-1)``;
later steps take over the previous step's open wires, so the outputs of
one step are the first leg sites of the next.
"""

from __future__ import annotations

from fractions import Fraction

from .builder import AngleSpec, PatternBuilder
from .ir import MeasurementPattern, PatternError, Site, sym_diff

HALF = Fraction(1, 2)


def kitaev_specs(g_mu: float, q: int) -> dict[str, AngleSpec]:
    """Angle templates of wire ``q``: ``psi^r = P psi^r`` and ``phi_q = -P(2 g phi_M + gamma)``."""
    return {
        "psi-1": AngleSpec(-1, 0.0, -HALF, f"psi-1_{q}"),
        "psi-2": AngleSpec(-1, 0.0, HALF, f"psi-2_{q}"),
        "phi": AngleSpec(-1, 2.0 * g_mu, HALF, f"phi_{q}"),
        "psi3": AngleSpec(1, 0.0, HALF, f"psi3_{q}"),
        "psi2": AngleSpec(1, 0.0, HALF, f"psi2_{q}"),
        "psi1": AngleSpec(1, 0.0, -HALF, f"psi1_{q}"),
    }


def coupling_spec(j: int) -> AngleSpec:
    return AngleSpec(1, 2.0, Fraction(0), f"phizz_{j},{j + 1}")


def block_index(N: int, m: int, j: int) -> int:
    return (m - 1) * (N - 1) + j


Frames = dict[int, tuple[frozenset, frozenset]]


def _step_tables(N: int, m: int, incoming: Frames, deps: dict) -> Frames:
    """Fill ``deps`` for step ``m`` and return the wire frames leaving it."""
    out: Frames = {}
    zprev = xprev = frozenset()
    for j in range(1, N):
        b = block_index(N, m, j)
        s = lambda r, c, b=b: Site(b, r, c)  # noqa: E731
        first, last = j == 1, j == N - 1
        k = j + 1
        zin_k, xin_k = incoming.get(k, (frozenset(), frozenset()))

        # wire j
        if first:
            zin_j, xin_j = incoming.get(j, (frozenset(), frozenset()))
            m1 = sym_diff(zin_j, [s(1, 1)])
            m2 = sym_diff(xin_j, [s(2, 1)])
            ph = sym_diff(m1, [s(3, 1)])
            deps[s(2, 1)], deps[s(3, 1)], deps[s(4, 1)] = m1, m2, ph
            zx_j = ph
            xx_j = sym_diff(m2, [s(4, 1)])
        else:
            zx_j, xx_j = zprev, xprev
        psi3_j = sym_diff(zx_j, [s(5, 1), s(6, 2), s(7, 3), s(9, 3)])
        psi1_j = sym_diff(psi3_j, [s(11, 3)])
        psi2_j = sym_diff(xx_j, [s(6, 1), s(7, 2), s(8, 3), s(10, 3)])
        deps[s(10, 3)], deps[s(11, 3)], deps[s(12, 3)] = psi3_j, psi2_j, psi1_j
        out[j] = (psi1_j, sym_diff(psi2_j, [s(12, 3)]))

        # wire k
        k1 = sym_diff(zin_k, [s(1, 3)])
        k2 = sym_diff(xin_k, [s(2, 3)])
        kph = sym_diff(k1, [s(3, 3)])
        deps[s(2, 3)], deps[s(3, 3)], deps[s(4, 3)] = k1, k2, kph
        xk_pre = sym_diff(k2, [s(4, 3)])

        deps[s(6, 2)] = sym_diff(xx_j, xk_pre, [s(6, 1), s(6, 3), s(7, 2)])

        psi3_k = sym_diff(kph, [s(5, 3), s(6, 2), s(7, 1)])
        psi2_k = sym_diff(xk_pre, [s(6, 3), s(7, 2), s(8, 1)])
        if last:
            psi3_k = sym_diff(psi3_k, [s(9, 1)])
            psi1_k = sym_diff(psi3_k, [s(11, 1)])
            psi2_k = sym_diff(psi2_k, [s(10, 1)])
            deps[s(10, 1)], deps[s(11, 1)], deps[s(12, 1)] = psi3_k, psi2_k, psi1_k
            out[k] = (psi1_k, sym_diff(psi2_k, [s(12, 1)]))
        else:
            zprev, xprev = psi3_k, psi2_k
    return out


def kitaev_pattern(N: int, M: int, g_mu: float, phi_m: float) -> MeasurementPattern:
    """Pattern for ``[prod_j R_xx(-2 phi_M) prod_k R_z(-2 g_mu phi_M)]^M`` on ``N`` wires.

    Parameters
    ----------
    N : int
        Chain length (logical qubits), at least 2.
    M : int
        Number of Trotter steps, at least 1.
    g_mu : float
        Chemical potential in units of ``2w``.
    phi_m : float
        Time per step times ``w``; becomes the pattern's ``phi_m``.

    Returns
    -------
    MeasurementPattern
        Adaptive angles carry their outcome-parity sets and the byproduct
        is given per output wire.
    """
    if N < 2:
        raise PatternError(f"Kitaev pattern needs N >= 2, got {N}")
    if M < 1:
        raise PatternError(f"Kitaev pattern needs M >= 1, got {M}")
    b = PatternBuilder()
    for q in range(1, N + 1):
        b.start(q)
    for m in range(1, M + 1):
        for j in range(1, N):
            blk = block_index(N, m, j)
            k = j + 1
            if j == 1:
                sp = kitaev_specs(g_mu, j)
                b.euler_leg(j, blk, 1, 1, [sp["psi-1"], sp["psi-2"], sp["phi"]])
            sk = kitaev_specs(g_mu, k)
            b.euler_leg(k, blk, 1, 3, [sk["psi-1"], sk["psi-2"], sk["phi"]])
            b.rzz(j, k, blk, 5, 1, coupling_spec(j))
            sj = kitaev_specs(g_mu, j)
            b.euler_leg(j, blk, 9, 3, [sj["psi3"], sj["psi2"], sj["psi1"]])
            if j == N - 1:
                b.euler_leg(k, blk, 9, 1, [sk["psi3"], sk["psi2"], sk["psi1"]])
    last = block_index(N, M, N - 1)
    for j in range(1, N):
        b.finish(j, Site(block_index(N, M, j), 13, 3))
    b.finish(N, Site(last, 13, 1))

    deps: dict[Site, frozenset] = {}
    frames: Frames = {}
    for m in range(1, M + 1):
        frames = _step_tables(N, m, frames, deps)
    z = {q: frames[q][0] for q in frames}
    x = {q: frames[q][1] for q in frames}
    return b.build(
        f"kitaev N={N} M={M}",
        deps,
        z,
        x,
        phi_m=phi_m,
        target=f"kitaev trotter N={N} M={M} g_mu={g_mu!r}",
        params={"N": N, "M": M, "g_mu": g_mu},
    )
