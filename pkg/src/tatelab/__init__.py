"""Exact p-adic and semi-linear algebra for abeloid varieties over Q_p."""

from .errors import ParseError, TatelabError
from .multgroup import MultElement, QpContext
from .padic import PadicNumber, make_padic

__version__ = "0.1.0"

__all__ = ["MultElement", "PadicNumber", "ParseError", "QpContext", "TatelabError", "make_padic", "__version__"]
