"""4D 5-sided orthogonal range reporting over shallow cuttings."""

from ._core import FormatError, Index, generate, oracle

__all__ = ["FormatError", "Index", "generate", "oracle"]
