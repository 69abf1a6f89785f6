"""Measurement-pattern IR, gadget builders and the model pattern generators."""

from .builder import AngleSpec, PatternBuilder
from .compact import avoid_inputs, compactify_pattern
from .gadgets import euler_leg, reduce_angle, rzz_pattern, rzzz_pattern
from .ir import (
    FORMAT_HEADER,
    AngleExpr,
    ByproductSpec,
    GateOp,
    MeasurementPattern,
    PatternError,
    PatternNode,
    Site,
    parity,
    sym_diff,
)
from .hubbard import hubbard_pattern
from .kitaev import kitaev_pattern
from .resources import (
    MODELS,
    REPRESENTATIONS,
    RuntimeComparison,
    census_count,
    count_resources,
    formula_count,
    resource_table,
    runtime_comparison,
    runtime_regime,
)

__all__ = [
    "FORMAT_HEADER",
    "MODELS",
    "REPRESENTATIONS",
    "RuntimeComparison",
    "AngleExpr",
    "AngleSpec",
    "ByproductSpec",
    "GateOp",
    "MeasurementPattern",
    "PatternBuilder",
    "PatternError",
    "PatternNode",
    "Site",
    "avoid_inputs",
    "census_count",
    "compactify_pattern",
    "count_resources",
    "euler_leg",
    "formula_count",
    "hubbard_pattern",
    "kitaev_pattern",
    "parity",
    "reduce_angle",
    "rzz_pattern",
    "resource_table",
    "runtime_comparison",
    "runtime_regime",
    "rzzz_pattern",
    "sym_diff",
]
