"""Temporal-logic task compilation and trust-based motion planning.

The package compiles regular-expression or co-safe LTL mission
specifications into minimal DFAs, decomposes them into parallel subtasks,
composes capability / motion / planning MDPs, scores grid cells from a
grayscale heightmap, and searches for the most trustworthy plan with a
label-setting strategy driven by a linear-Gaussian trust recursion.
"""

from .automata import Dfa, Nfa
from .speclang import SpecAst, parse_re, parse_ltl, compile_spec
from .trust import TrustBelief, TrustParams, propagate_trust, mc_trust, path_trust
from .terrain import Heightmap, CellStats, CellGrid, load_heightmap, discretize

__all__ = [
    "Dfa",
    "Nfa",
    "SpecAst",
    "parse_re",
    "parse_ltl",
    "compile_spec",
    "TrustBelief",
    "TrustParams",
    "propagate_trust",
    "mc_trust",
    "path_trust",
    "Heightmap",
    "CellStats",
    "CellGrid",
    "load_heightmap",
    "discretize",
]
