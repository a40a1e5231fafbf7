"""Parsing and compilation of mission task specifications.

Two surface syntaxes share one AST type:

* regular expressions -- atoms, ``eps``, juxtaposition or ``.`` for
  concatenation, ``+`` for union, postfix ``*``, parentheses.  ``*``
  binds tightest, then concatenation, then ``+``.
* co-safe LTL -- ``!  & | X U F G true``; unary operators bind tightest,
  then ``U`` (right-associative), then ``&``, then ``|``.  Negation is
  only allowed directly above an atom and ``G`` only in the pattern
  ``F G p``, which collapses to ``F p`` under finite-word semantics.

Letters of the compiled automata are single atomic propositions: one
event names one exploration target.
"""

from __future__ import annotations

import json
import re as _re
from dataclasses import dataclass, field

from .automata import Dfa, Nfa, determinize, minimize, trim

RE_KINDS = {"atom", "epsilon", "concat", "union", "star"}
LTL_KINDS = {"true", "atom", "not", "and", "or", "next", "until", "eventually"}
ATOM_RX = _re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*")


class SpecSyntaxError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class CoSafetyError(ValueError):
    """A formula outside the syntactically co-safe fragment."""


@dataclass(frozen=True)
class SpecAst:
    kind: str
    children: tuple = ()
    name: str | None = None

    def atoms(self):
        if self.kind == "atom":
            return [self.name]
        out = []
        for child in self.children:
            for a in child.atoms():
                if a not in out:
                    out.append(a)
        return out

    def serialize(self) -> str:
        """Round-trippable surface form (parenthesized)."""
        k = self.kind
        if k == "atom":
            return self.name
        if k == "epsilon":
            return "eps"
        if k == "true":
            return "true"
        if k == "concat":
            return "(" + " ".join(c.serialize() for c in self.children) + ")"
        if k == "union":
            return "(" + " + ".join(c.serialize() for c in self.children) + ")"
        if k == "star":
            return self.children[0].serialize() + "*"
        if k == "not":
            return "!" + self.children[0].serialize()
        if k == "and":
            return "(" + " & ".join(c.serialize() for c in self.children) + ")"
        if k == "or":
            return "(" + " | ".join(c.serialize() for c in self.children) + ")"
        if k == "next":
            return "X " + self.children[0].serialize()
        if k == "until":
            return "(" + self.children[0].serialize() + " U " + self.children[1].serialize() + ")"
        if k == "eventually":
            return "F " + self.children[0].serialize()
        raise ValueError(f"unknown node kind {k!r}")

    def to_json(self) -> str:
        return json.dumps(self._payload(), indent=2, sort_keys=True)

    def _payload(self):
        node = {"kind": self.kind}
        if self.name is not None:
            node["name"] = self.name
        if self.children:
            node["children"] = [c._payload() for c in self.children]
        return node


def atom(name):
    return SpecAst("atom", name=name)


# ---------------------------------------------------------------------------
# regular expressions


class _Tokens:
    def __init__(self, text, symbols):
        if not text.strip():
            raise SpecSyntaxError("empty specification", 0)
        self.items = []  # (kind, value, offset)
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in symbols:
                self.items.append((ch, ch, i))
                i += 1
                continue
            m = ATOM_RX.match(text, i)
            if not m:
                raise SpecSyntaxError(f"unexpected character {ch!r}", i)
            self.items.append(("name", m.group(), i))
            i = m.end()
        self.end = len(text)
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None, self.end)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok


def parse_re(text: str) -> SpecAst:
    """Parse a regular expression into a SpecAst."""
    toks = _Tokens(text, "+*.()")

    def fold_right(kind, items):
        node = items[-1]
        for item in reversed(items[:-1]):
            node = SpecAst(kind, (item, node))
        return node

    def parse_union():
        items = [parse_concat()]
        while toks.peek()[0] == "+":
            toks.take()
            items.append(parse_concat())
        return fold_right("union", items)

    def parse_concat():
        items = [parse_postfix()]
        while True:
            kind = toks.peek()[0]
            if kind == ".":
                toks.take()
                items.append(parse_postfix())
            elif kind in ("name", "("):
                items.append(parse_postfix())
            else:
                return fold_right("concat", items)

    def parse_postfix():
        node = parse_primary()
        while toks.peek()[0] == "*":
            toks.take()
            node = SpecAst("star", (node,))
        return node

    def parse_primary():
        kind, value, offset = toks.take()
        if kind == "name":
            return SpecAst("epsilon") if value == "eps" else atom(value)
        if kind == "(":
            node = parse_union()
            k, _, off = toks.take()
            if k != ")":
                raise SpecSyntaxError("expected ')'", off)
            return node
        raise SpecSyntaxError(f"unexpected token {value!r}", offset)

    node = parse_union()
    kind, value, offset = toks.peek()
    if kind is not None:
        raise SpecSyntaxError(f"trailing input {value!r}", offset)
    return node


# ---------------------------------------------------------------------------
# co-safe LTL

_LTL_UNARY = {"!": "not", "X": "next", "F": "eventually", "G": "always"}


def parse_ltl(text: str) -> SpecAst:
    """Parse a co-safe LTL formula into a SpecAst.

    Rejects formulas outside the co-safe fragment: negation above a
    non-atom, or ``G`` anywhere except the ``F G p`` pattern.
    """
    toks = _Tokens(text, "!&|()")

    def parse_or():
        items = [parse_and()]
        while toks.peek()[0] == "|":
            toks.take()
            items.append(parse_and())
        node = items[-1]
        for item in reversed(items[:-1]):
            node = SpecAst("or", (item, node))
        return node

    def parse_and():
        items = [parse_until()]
        while toks.peek()[0] == "&":
            toks.take()
            items.append(parse_until())
        node = items[-1]
        for item in reversed(items[:-1]):
            node = SpecAst("and", (item, node))
        return node

    def parse_until():
        node = parse_unary()
        if toks.peek()[:2] == ("name", "U"):
            toks.take()
            node = SpecAst("until", (node, parse_until()))  # right-associative
        return node

    def parse_unary():
        kind, value, offset = toks.peek()
        if kind == "!" or (kind == "name" and value in ("X", "F", "G")):
            toks.take()
            op = _LTL_UNARY[value if kind == "name" else "!"]
            if op == "always":
                raise CoSafetyError(
                    "always (G) is only allowed in the pattern 'F G <atom>' "
                    "(offending operator: G)"
                )
            if op == "eventually" and toks.peek()[:2] == ("name", "G"):
                # F G p over finite words terminates on reaching p
                toks.take()
                kind2, value2, _ = toks.take()
                if kind2 != "name" or value2 in ("U", "X", "F", "G", "true"):
                    raise CoSafetyError(
                        "always (G) is only allowed in the pattern 'F G <atom>' "
                        "(offending operator: G)"
                    )
                return SpecAst("eventually", (atom(value2),))
            child = parse_unary()
            if op == "not" and child.kind != "atom":
                raise CoSafetyError(
                    "negation is only allowed directly above an atom (offending operator: !)"
                )
            return SpecAst(op, (child,))
        return parse_primary()

    def parse_primary():
        kind, value, offset = toks.take()
        if kind == "name":
            if value == "true":
                return SpecAst("true")
            if value in ("U", "X", "F", "G"):
                raise SpecSyntaxError(f"operator {value!r} used as an atom", offset)
            return atom(value)
        if kind == "(":
            node = parse_or()
            k, _, off = toks.take()
            if k != ")":
                raise SpecSyntaxError("expected ')'", off)
            return node
        raise SpecSyntaxError(f"unexpected token {value!r}", offset)

    node = parse_or()
    kind, value, offset = toks.peek()
    if kind is not None:
        raise SpecSyntaxError(f"trailing input {value!r}", offset)
    return node


# ---------------------------------------------------------------------------
# compilation

_TRUE = ("true",)
_FALSE = ("false",)


def _formula(ast: SpecAst):
    """SpecAst -> hashable normalized formula tuple."""
    k = ast.kind
    if k == "true":
        return _TRUE
    if k == "atom":
        return ("atom", ast.name)
    if k == "not":
        return ("not", ast.children[0].name)
    if k in ("and", "or"):
        return _norm(k, tuple(_formula(c) for c in ast.children))
    if k in ("next", "eventually"):
        return (k, _formula(ast.children[0]))
    if k == "until":
        return ("until", _formula(ast.children[0]), _formula(ast.children[1]))
    raise ValueError(f"not an LTL node: {k!r}")


def _norm(op, operands):
    """Flatten, deduplicate and short-circuit and/or formulas."""
    absorb, unit = (_FALSE, _TRUE) if op == "and" else (_TRUE, _FALSE)
    flat = []
    for f in operands:
        if f == absorb:
            return absorb
        if f == unit:
            continue
        parts = f[1:] if f[0] == op else (f,)
        for p in parts:
            if p not in flat:
                flat.append(p)
    if not flat:
        return unit
    if len(flat) == 1:
        return flat[0]
    return (op,) + tuple(sorted(flat))


def _progress(f, letter):
    """One-letter formula progression under single-proposition events."""
    op = f[0]
    if op == "true":
        return _TRUE
    if op == "false":
        return _FALSE
    if op == "atom":
        return _TRUE if f[1] == letter else _FALSE
    if op == "not":
        return _FALSE if f[1] == letter else _TRUE
    if op in ("and", "or"):
        return _norm(op, tuple(_progress(g, letter) for g in f[1:]))
    if op == "next":
        return f[1]
    if op == "eventually":
        return _norm("or", (_progress(f[1], letter), f))
    if op == "until":
        lhs, rhs = f[1], f[2]
        return _norm("or", (_progress(rhs, letter), _norm("and", (_progress(lhs, letter), f))))
    raise ValueError(f"unknown formula {f!r}")


def _compile_ltl(ast: SpecAst, alphabet) -> Dfa:
    """Formula-progression expansion to the DFA of minimal good prefixes.

    A state is an outstanding obligation; it accepts when the obligation
    has collapsed to true.  Accepting states keep no outgoing edges so
    the language is the set of minimal satisfying prefixes, matching the
    regular-expression reading of the same task.
    """
    start = _formula(ast)
    index = {start: 0}
    order = [start]
    transitions = {}
    queue = [start]
    while queue:
        f = queue.pop(0)
        if f == _TRUE:
            continue  # accepting: minimal prefix reached, stop here
        src = index[f]
        for letter in alphabet:
            g = _progress(f, letter)
            if g == _FALSE:
                continue
            if g not in index:
                index[g] = len(order)
                order.append(g)
                queue.append(g)
            transitions[(src, letter)] = index[g]
    accepting = frozenset({index[_TRUE]}) if _TRUE in index else frozenset()
    return minimize(Dfa(len(order), tuple(alphabet), transitions, 0, accepting))


def _thompson(ast: SpecAst, alphabet) -> Nfa:
    """Thompson construction; returns an Nfa with one initial and one
    accepting state."""
    transitions = set()
    counter = [0]

    def fresh():
        counter[0] += 1
        return counter[0] - 1

    def build(node):
        start, end = fresh(), fresh()
        k = node.kind
        if k == "epsilon":
            transitions.add((start, None, end))
        elif k == "atom":
            transitions.add((start, node.name, end))
        elif k == "concat":
            sa, ea = build(node.children[0])
            sb, eb = build(node.children[1])
            transitions.add((start, None, sa))
            transitions.add((ea, None, sb))
            transitions.add((eb, None, end))
        elif k == "union":
            sa, ea = build(node.children[0])
            sb, eb = build(node.children[1])
            transitions.update({(start, None, sa), (start, None, sb)})
            transitions.update({(ea, None, end), (eb, None, end)})
        elif k == "star":
            sa, ea = build(node.children[0])
            transitions.update(
                {(start, None, sa), (ea, None, end), (start, None, end), (ea, None, sa)}
            )
        else:
            raise ValueError(f"not a regular-expression node: {k!r}")
        return start, end

    start, end = build(ast)
    return Nfa(counter[0], tuple(alphabet), transitions, frozenset({start}), frozenset({end}))


def compile_spec(ast: SpecAst, alphabet) -> Dfa:
    """Compile a parsed specification to a minimal trim DFA over finite
    words.  Regular expressions go through Thompson construction and
    subset determinization; co-safe LTL through formula progression."""
    alphabet = tuple(alphabet)
    if len(set(alphabet)) != len(alphabet) or not alphabet:
        raise ValueError("alphabet must be nonempty and duplicate-free")
    missing = [a for a in ast.atoms() if a not in alphabet]
    if missing:
        raise ValueError(f"atoms not in alphabet: {missing}")
    kinds = _kinds(ast)
    if kinds <= RE_KINDS and not (kinds <= LTL_KINDS):
        return minimize(determinize(_thompson(ast, alphabet)))
    if kinds <= LTL_KINDS:
        return _compile_ltl(ast, alphabet)
    if kinds <= RE_KINDS:
        return minimize(determinize(_thompson(ast, alphabet)))
    raise ValueError(f"mixed regular-expression / LTL tree: kinds {sorted(kinds)}")


def _kinds(ast: SpecAst):
    out = {ast.kind}
    for c in ast.children:
        out |= _kinds(c)
    return out
