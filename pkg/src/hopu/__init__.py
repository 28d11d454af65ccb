"""An interpreter for a higher-order logic programming language.

Terms use de Bruijn indexes with explicit suspensions, unification is
restricted to higher-order patterns, and goals follow hereditary Harrop
formulas. The usual entry points are ``load`` and ``solve``.
"""

from .engine import Answer, Engine, load, solve
from .errors import EngineError, HopuError, LoadError, ParseError, StepLimit, TypeCheckError
from .frontend import Program

__all__ = [
    "Answer",
    "Engine",
    "EngineError",
    "HopuError",
    "LoadError",
    "ParseError",
    "Program",
    "StepLimit",
    "TypeCheckError",
    "load",
    "solve",
]
