"""The four algebras shipped with the package, stored as DSL text under data/."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

from ..errors import InputError
from .dsl import parse_algebra
from .spec import LieAlgebraSpec

BUILTIN_NAMES = ("heisenberg", "iso11", "iso31", "iso21")


def builtin_source(name: str) -> str:
    if name not in BUILTIN_NAMES:
        raise InputError(f"unknown algebra {name!r}; expected one of {', '.join(BUILTIN_NAMES)}")
    return resources.files(__package__).joinpath("data", f"{name}.alg").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def builtin_algebra(name: str) -> LieAlgebraSpec:
    return parse_algebra(builtin_source(name))
