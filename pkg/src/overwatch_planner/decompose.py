"""Decomposition of a global task DFA into parallel subtask automata.

The search is iterated bisection: try every bipartition of the alphabet
(smaller block first, lexicographic order), project the DFA onto each
block, and accept the first bipartition whose shuffle composition is
language-equal to the original.  Each accepted part is decomposed
recursively.  Every result carries a certificate check, so a returned
decomposition is sound by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .automata import Dfa, AutomatonError, language_equal, parallel_compose, project


@dataclass
class Decomposition:
    parts: list  # Dfa per block
    partition: list  # letter tuple per block
    verified: bool


def _bipartitions(alphabet):
    """Candidate (block_a, block_b) pairs, block_a lexicographically
    smallest first and never larger than block_b."""
    letters = sorted(alphabet)
    n = len(letters)
    for size in range(1, n // 2 + 1):
        for combo in combinations(letters, size):
            rest = tuple(l for l in letters if l not in combo)
            if size * 2 == n and letters[0] not in combo:
                continue  # complement already enumerated
            yield combo, rest


def decompose(g: Dfa) -> Decomposition:
    """Split ``g`` into the finest parallel parts reachable by iterated
    alphabet bisection.  A DFA that admits no valid bipartition comes
    back as the singleton decomposition."""
    if g.is_empty():
        raise AutomatonError("cannot decompose an empty-language automaton")
    parts = _decompose(g)
    partition = [p.alphabet for p in parts]
    verified = check_decomposition(g, parts)
    return Decomposition(parts, partition, verified)


def _decompose(g: Dfa):
    for block_a, block_b in _bipartitions(g.alphabet):
        part_a = project(g, block_a)
        part_b = project(g, block_b)
        if language_equal(parallel_compose([part_a, part_b]), g):
            return _decompose(part_a) + _decompose(part_b)
    return [g]


def check_decomposition(g: Dfa, parts) -> bool:
    """True iff the parts' alphabets partition g's alphabet and their
    shuffle composition has exactly g's language."""
    seen = set()
    for p in parts:
        block = set(p.alphabet)
        if block & seen:
            raise AutomatonError("part alphabets overlap")
        seen |= block
    if seen != set(g.alphabet):
        raise AutomatonError("part alphabets do not cover the global alphabet")
    return language_equal(parallel_compose(parts), g)
