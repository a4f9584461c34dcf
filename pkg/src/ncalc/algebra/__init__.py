from .builtins import BUILTIN_NAMES, builtin_algebra, builtin_source
from .coeff import Coeff
from .dsl import from_json, parse_algebra, to_dsl, to_json
from .expr import DT, NO_LABEL, OperatorExpr, format_expr, label_product, make_label
from .spec import (GeneratorSymbol, LieAlgebraSpec, StructureReport, adjoint_expr, bracket,
                   bracket_linear, check_structure)

__all__ = [
    "BUILTIN_NAMES", "Coeff", "DT", "GeneratorSymbol", "LieAlgebraSpec", "NO_LABEL",
    "OperatorExpr", "StructureReport", "adjoint_expr", "bracket", "bracket_linear",
    "builtin_algebra", "builtin_source", "check_structure", "format_expr", "from_json",
    "label_product", "make_label", "parse_algebra", "to_dsl", "to_json",
]
