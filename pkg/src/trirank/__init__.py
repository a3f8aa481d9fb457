"""Analytic, geometric, and slice rank of 3-tensors over finite fields."""

from .fields import Field, make_field, parse_field
from .tensor import Tensor3, load, loads, dump, dumps

__all__ = [
    "Field",
    "make_field",
    "parse_field",
    "Tensor3",
    "load",
    "loads",
    "dump",
    "dumps",
]
