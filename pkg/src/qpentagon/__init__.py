"""Quantum dilogarithm, the pentagon operator and the A2 cluster structures around it."""

from . import cluster, errors, kop, moduli, qtorus, specfun, wspace
from .errors import QPentagonError

__all__ = ["cluster", "errors", "kop", "moduli", "qtorus", "specfun", "wspace", "QPentagonError"]
__version__ = "0.1.0"
