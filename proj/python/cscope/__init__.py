"""Python bindings for the cscope literature search engine."""

from ._cscope import (
    CscopeError,
    Engine,
    compare,
    error_codes,
    f_measure,
    precision,
    recall,
)

__all__ = [
    "CscopeError",
    "Engine",
    "compare",
    "error_codes",
    "f_measure",
    "precision",
    "recall",
]
