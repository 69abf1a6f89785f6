"""Stand-alone gadget patterns: R_zz, R_zzz and the Euler leg."""

from __future__ import annotations

import math
from fractions import Fraction

from .builder import RZZ_BYPRODUCT, RZZ_INTRINSIC, RZZZ_BYPRODUCT, RZZZ_INTRINSIC, AngleSpec, PatternBuilder
from .ir import MeasurementPattern, PatternError, Site


def reduce_angle(theta: float) -> float:
    """Map an angle into ``(-2 pi, 2 pi)`` keeping its sign."""
    if not math.isfinite(theta):
        raise PatternError(f"angle must be finite, got {theta}")
    return math.fmod(theta, 2 * math.pi)


def _sites(rcs, block=1) -> frozenset[Site]:
    return frozenset(Site(block, r, c) for r, c in rcs)


def rzz_pattern(theta: float) -> MeasurementPattern:
    """Twelve-qubit pattern for ``R_zz(theta)``.

    The lattice also swaps the two wires: logical qubit 1 enters at (1,1) and
    leaves at (5,3), qubit 2 enters at (1,3) and leaves at (5,1). ``outputs``
    lists them in logical order, so the swap is absorbed; see
    ``ExecutionResult.positional``. The only adaptive site is (2,2).
    """
    theta = reduce_angle(theta)
    b = PatternBuilder()
    b.start(1)
    b.start(2)
    b.rzz(1, 2, 1, 1, 1, AngleSpec(-1, 1.0, Fraction(0), "phi_12"))
    b.finish(1, Site(1, 5, 3))
    b.finish(2, Site(1, 5, 1))
    z = {1: _sites(RZZ_BYPRODUCT[1][0]), 2: _sites(RZZ_BYPRODUCT[3][0])}
    x = {1: _sites(RZZ_BYPRODUCT[1][1]), 2: _sites(RZZ_BYPRODUCT[3][1])}
    deps = {Site(1, 2, 2): _sites(RZZ_INTRINSIC)}
    return b.build("rzz", deps, z, x, phi_m=theta, target="rzz(theta)", params={"theta": theta})


def rzzz_pattern(theta: float) -> MeasurementPattern:
    """Twenty-nine-qubit pattern for ``R_zzz(theta)``.

    The lattice exchanges wires 1 and 3, which the logical output order absorbs. Inputs sit at (1,1), (1,3), (1,5); qubit 1 leaves at (7,5), qubit 2 at
    (7,3) and qubit 3 at (7,1). The only adaptive site is (3,3).
    """
    theta = reduce_angle(theta)
    b = PatternBuilder()
    for q in (1, 2, 3):
        b.start(q)
    b.rzzz(1, 2, 3, 1, 1, 1, AngleSpec(-1, 1.0, Fraction(0), "phi_123"))
    for q, c in ((1, 5), (2, 3), (3, 1)):
        b.finish(q, Site(1, 7, c))
    z = {q: _sites(RZZZ_BYPRODUCT[c][0]) for q, c in ((1, 1), (2, 3), (3, 5))}
    x = {q: _sites(RZZZ_BYPRODUCT[c][1]) for q, c in ((1, 1), (2, 3), (3, 5))}
    deps = {Site(1, 3, 3): _sites(RZZZ_INTRINSIC)}
    return b.build("rzzz", deps, z, x, phi_m=theta, target="rzzz(theta)", params={"theta": theta})


def euler_leg(alpha: float, beta: float, gamma: float) -> MeasurementPattern:
    """Five-qubit chain implementing ``R_x(gamma) R_z(beta) R_x(alpha)``.

    The chain runs down column 1 from (1,1) to the output (5,1). The three
    angles are free reals, so each is stored as ``phi_coeff`` with
    ``phi_m = 1``.
    """
    alpha, beta, gamma = (reduce_angle(a) for a in (alpha, beta, gamma))
    b = PatternBuilder()
    b.start(1)
    specs = [AngleSpec(-1, a, Fraction(0), name) for a, name in ((alpha, "psi1"), (beta, "psi2"), (gamma, "psi3"))]
    b.euler_leg(1, 1, 1, 1, specs)
    b.finish(1, Site(1, 5, 1))
    s = lambda r: Site(1, r, 1)  # noqa: E731
    deps = {s(2): {s(1)}, s(3): {s(2)}, s(4): {s(1), s(3)}}
    z = {1: {s(1), s(3)}}
    x = {1: {s(2), s(4)}}
    return b.build(
        "euler",
        deps,
        z,
        x,
        phi_m=1.0,
        target="rx(gamma) rz(beta) rx(alpha)",
        params={"alpha": alpha, "beta": beta, "gamma": gamma},
    )
