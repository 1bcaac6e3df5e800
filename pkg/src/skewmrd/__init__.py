"""MRD codes in skew polynomial rings over finite fields."""

from .gf import FieldCtx, FieldError, field_ctx_new, get_field
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["FieldCtx", "FieldError", "field_ctx_new", "get_field", "BACKEND"]
