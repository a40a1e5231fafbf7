"""Finite-automaton algebra over finite words.

States are integers, letters are identifier strings.  The DFA transition
function is partial: a missing (state, letter) entry means the word is
rejected, which lets small task automata be represented without an
explicit sink.  Algorithms that need totality complete to a sink
internally and trim afterwards.

All constructors return canonical automata: determinized, minimized, and
renumbered breadth-first from the initial state so that equal languages
serialize identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from collections import deque


class AutomatonError(ValueError):
    pass


@dataclass
class Nfa:
    """Nondeterministic automaton with optional epsilon moves.

    ``transitions`` holds triples (src, letter, dst); ``letter`` is None
    for an epsilon move.
    """

    n_states: int
    alphabet: tuple[str, ...]
    transitions: set = field(default_factory=set)
    initial: frozenset = frozenset()
    accepting: frozenset = frozenset()

    def validate(self):
        for src, letter, dst in self.transitions:
            if not (0 <= src < self.n_states and 0 <= dst < self.n_states):
                raise AutomatonError(f"transition endpoint out of range: {(src, letter, dst)}")
            if letter is not None and letter not in self.alphabet:
                raise AutomatonError(f"unknown letter {letter!r}")
        for s in self.initial | self.accepting:
            if not 0 <= s < self.n_states:
                raise AutomatonError(f"state {s} out of range")

    def step(self, states, letter):
        """One-letter successor set, epsilon closures included."""
        out = {dst for src, let, dst in self.transitions if src in states and let == letter}
        return self.closure(out)

    def closure(self, states):
        seen = set(states)
        todo = list(states)
        while todo:
            s = todo.pop()
            for src, let, dst in self.transitions:
                if src == s and let is None and dst not in seen:
                    seen.add(dst)
                    todo.append(dst)
        return frozenset(seen)

    def accepts(self, word):
        """Breadth-first simulation; the membership oracle for determinize."""
        current = self.closure(self.initial)
        for letter in word:
            current = self.step(current, letter)
            if not current:
                return False
        return bool(current & self.accepting)


@dataclass
class Dfa:
    n_states: int
    alphabet: tuple[str, ...]
    transitions: dict  # (state, letter) -> state
    initial: int
    accepting: frozenset

    def validate(self):
        if len(set(self.alphabet)) != len(self.alphabet):
            raise AutomatonError("duplicate letters in alphabet")
        if not 0 <= self.initial < self.n_states:
            raise AutomatonError("initial state out of range")
        if not self.accepting <= set(range(self.n_states)):
            raise AutomatonError("accepting state out of range")
        for (src, letter), dst in self.transitions.items():
            if letter not in self.alphabet:
                raise AutomatonError(f"unknown letter {letter!r}")
            if not (0 <= src < self.n_states and 0 <= dst < self.n_states):
                raise AutomatonError(f"transition endpoint out of range: {(src, letter, dst)}")

    def step(self, state, letter):
        return self.transitions.get((state, letter))

    def accepts(self, word) -> bool:
        state = self.initial
        for letter in word:
            if letter not in self.alphabet:
                raise AutomatonError(f"unknown letter {letter!r}")
            state = self.transitions.get((state, letter))
            if state is None:
                return False
        return state in self.accepting

    def is_empty(self) -> bool:
        return not self.accepting

    # -- serialization ------------------------------------------------

    def to_json(self) -> str:
        payload = {
            "states": list(range(self.n_states)),
            "alphabet": list(self.alphabet),
            "transitions": sorted(
                [src, letter, dst] for (src, letter), dst in self.transitions.items()
            ),
            "initial": self.initial,
            "accepting": sorted(self.accepting),
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Dfa":
        payload = json.loads(text)
        dfa = cls(
            n_states=len(payload["states"]),
            alphabet=tuple(payload["alphabet"]),
            transitions={(src, letter): dst for src, letter, dst in payload["transitions"]},
            initial=payload["initial"],
            accepting=frozenset(payload["accepting"]),
        )
        dfa.validate()
        return dfa

    def to_dot(self, name="G") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=none, label=""];']
        for s in range(self.n_states):
            shape = "doublecircle" if s in self.accepting else "circle"
            lines.append(f"  {s} [shape={shape}];")
        lines.append(f"  __start -> {self.initial};")
        for (src, letter), dst in sorted(self.transitions.items()):
            lines.append(f'  {src} -> {dst} [label="{letter}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def empty_dfa(alphabet) -> Dfa:
    """The one-state rejecting automaton (empty language)."""
    return Dfa(1, tuple(alphabet), {}, 0, frozenset())


def determinize(nfa: Nfa) -> Dfa:
    """Subset construction; states are canonicalized in discovery order."""
    nfa.validate()
    start = nfa.closure(nfa.initial)
    index = {start: 0}
    order = [start]
    transitions = {}
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        src = index[subset]
        for letter in nfa.alphabet:
            nxt = nfa.step(subset, letter)
            if not nxt:
                continue
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            transitions[(src, letter)] = index[nxt]
    accepting = frozenset(i for subset, i in index.items() if subset & nfa.accepting)
    return trim(Dfa(len(order), nfa.alphabet, transitions, 0, accepting))


def trim(dfa: Dfa) -> Dfa:
    """Keep states reachable from the initial state and co-reachable to
    an accepting state.  An empty language collapses to the one-state
    rejecting automaton."""
    reachable = {dfa.initial}
    queue = deque([dfa.initial])
    while queue:
        s = queue.popleft()
        for letter in dfa.alphabet:
            dst = dfa.transitions.get((s, letter))
            if dst is not None and dst not in reachable:
                reachable.add(dst)
                queue.append(dst)
    # reverse reachability from accepting states
    rev = {}
    for (src, letter), dst in dfa.transitions.items():
        rev.setdefault(dst, set()).add(src)
    co = set(dfa.accepting & reachable)
    queue = deque(co)
    while queue:
        s = queue.popleft()
        for src in rev.get(s, ()):
            if src in reachable and src not in co:
                co.add(src)
                queue.append(src)
    if dfa.initial not in co:
        return empty_dfa(dfa.alphabet)
    keep = co
    return _renumber_bfs(dfa, keep)


def _renumber_bfs(dfa: Dfa, keep) -> Dfa:
    """Canonical breadth-first renumbering restricted to ``keep``."""
    index = {dfa.initial: 0}
    order = [dfa.initial]
    queue = deque([dfa.initial])
    while queue:
        s = queue.popleft()
        for letter in dfa.alphabet:
            dst = dfa.transitions.get((s, letter))
            if dst is not None and dst in keep and dst not in index:
                index[dst] = len(order)
                order.append(dst)
                queue.append(dst)
    transitions = {
        (index[src], letter): index[dst]
        for (src, letter), dst in dfa.transitions.items()
        if src in index and dst in index
    }
    accepting = frozenset(index[s] for s in dfa.accepting if s in index)
    return Dfa(len(order), dfa.alphabet, transitions, 0, accepting)


def _complete(dfa: Dfa):
    """Total transition table with an explicit sink appended last."""
    sink = dfa.n_states
    table = dict(dfa.transitions)
    for s in range(dfa.n_states + 1):
        for letter in dfa.alphabet:
            table.setdefault((s, letter), sink)
    return table, sink


def minimize(dfa: Dfa) -> Dfa:
    """Hopcroft partition refinement, then trim and BFS renumbering."""
    dfa = trim(dfa)
    if dfa.is_empty():
        return dfa
    table, sink = _complete(dfa)
    n = dfa.n_states + 1
    accepting = set(dfa.accepting)
    rest = set(range(n)) - accepting
    partition = [accepting] + ([rest] if rest else [])
    # preimage map per letter
    pre = {letter: {} for letter in dfa.alphabet}
    for (src, letter), dst in table.items():
        pre[letter].setdefault(dst, set()).add(src)
    work = {(i, letter) for i in range(len(partition)) for letter in dfa.alphabet}
    while work:
        i, letter = work.pop()
        splitter = partition[i]
        x = set()
        for dst in splitter:
            x |= pre[letter].get(dst, set())
        for j, block in enumerate(list(partition)):
            inter = block & x
            if not inter or inter == block:
                continue
            diff = block - inter
            partition[j] = inter
            partition.append(diff)
            k = len(partition) - 1
            for let in dfa.alphabet:
                if (j, let) in work:
                    work.add((k, let))
                else:
                    work.add((j, let) if len(inter) <= len(diff) else (k, let))
    block_of = {}
    for i, block in enumerate(partition):
        for s in block:
            block_of[s] = i
    merged = Dfa(
        n_states=len(partition),
        alphabet=dfa.alphabet,
        transitions={
            (block_of[s], letter): block_of[table[(s, letter)]]
            for s in range(n)
            for letter in dfa.alphabet
        },
        initial=block_of[dfa.initial],
        accepting=frozenset(block_of[s] for s in dfa.accepting),
    )
    return trim(merged)


def to_nfa(dfa: Dfa) -> Nfa:
    return Nfa(
        n_states=dfa.n_states,
        alphabet=dfa.alphabet,
        transitions={(src, letter, dst) for (src, letter), dst in dfa.transitions.items()},
        initial=frozenset({dfa.initial}),
        accepting=dfa.accepting,
    )


def _shift(nfa: Nfa, offset: int):
    return (
        {(s + offset, letter, d + offset) for s, letter, d in nfa.transitions},
        {s + offset for s in nfa.initial},
        {s + offset for s in nfa.accepting},
    )


def _merged_alphabet(a, b):
    return tuple(list(a) + [x for x in b if x not in a])


def combine(kind: str, operands) -> Dfa:
    """Regular combinators: concat | union | star | intersect.

    concat/union/intersect take two operands, star takes one; union and
    concat over unequal alphabets use the alphabet union, intersect
    requires equal alphabets.  The result is determinized and minimized.
    """
    operands = list(operands)
    arity = {"concat": 2, "union": 2, "star": 1, "intersect": 2}
    if kind not in arity:
        raise AutomatonError(f"unknown combinator {kind!r}")
    if len(operands) != arity[kind]:
        raise AutomatonError(f"{kind} takes {arity[kind]} operands, got {len(operands)}")

    if kind == "intersect":
        a, b = operands
        if tuple(a.alphabet) != tuple(b.alphabet):
            raise AutomatonError("intersect requires equal alphabets")
        ta, sink_a = _complete(a)
        tb, sink_b = _complete(b)
        pairs = {(a.initial, b.initial): 0}
        order = [(a.initial, b.initial)]
        transitions = {}
        queue = deque(order)
        while queue:
            pa, pb = queue.popleft()
            src = pairs[(pa, pb)]
            for letter in a.alphabet:
                nxt = (ta[(pa, letter)], tb[(pb, letter)])
                if nxt not in pairs:
                    pairs[nxt] = len(order)
                    order.append(nxt)
                    queue.append(nxt)
                transitions[(src, letter)] = pairs[nxt]
        accepting = frozenset(
            i for (pa, pb), i in pairs.items() if pa in a.accepting and pb in b.accepting
        )
        return minimize(Dfa(len(order), a.alphabet, transitions, 0, accepting))

    if kind == "star":
        (a,) = operands
        na = to_nfa(a)
        trans, init, acc = _shift(na, 1)
        start = 0
        for s in init:
            trans.add((start, None, s))
        for s in acc:
            for t in init:
                trans.add((s, None, t))
        nfa = Nfa(na.n_states + 1, na.alphabet, trans, frozenset({start}), frozenset(acc | {start}))
        return minimize(determinize(nfa))

    a, b = operands
    alphabet = _merged_alphabet(a.alphabet, b.alphabet)
    na, nb = to_nfa(a), to_nfa(b)
    na.alphabet = nb.alphabet = alphabet
    trans_a, init_a, acc_a = _shift(na, 0)
    trans_b, init_b, acc_b = _shift(nb, na.n_states)
    trans = trans_a | trans_b
    total = na.n_states + nb.n_states
    if kind == "concat":
        for s in acc_a:
            for t in init_b:
                trans.add((s, None, t))
        nfa = Nfa(total, alphabet, trans, frozenset(init_a), frozenset(acc_b))
    else:  # union
        start = total
        for s in init_a | init_b:
            trans.add((start, None, s))
        nfa = Nfa(total + 1, alphabet, trans, frozenset({start}), frozenset(acc_a | acc_b))
    return minimize(determinize(nfa))


def _pad(dfa: Dfa, alphabet) -> Dfa:
    """Same language over a larger alphabet (missing letters reject)."""
    return Dfa(dfa.n_states, tuple(alphabet), dict(dfa.transitions), dfa.initial, dfa.accepting)


def language_equal(a: Dfa, b: Dfa) -> bool:
    """Walk the synchronized product of the completed automata and check
    acceptance agreement on every reachable pair."""
    alphabet = _merged_alphabet(a.alphabet, b.alphabet)
    a, b = _pad(a, alphabet), _pad(b, alphabet)
    ta, _ = _complete(a)
    tb, _ = _complete(b)
    seen = {(a.initial, b.initial)}
    queue = deque(seen)
    while queue:
        pa, pb = queue.popleft()
        if (pa in a.accepting) != (pb in b.accepting):
            return False
        for letter in alphabet:
            nxt = (ta[(pa, letter)], tb[(pb, letter)])
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True


def parallel_compose(parts) -> Dfa:
    """Shuffle product: a letter advances every part that carries it in
    its alphabet and leaves the others in place; shared letters
    synchronize.  Accepting iff all parts accept."""
    parts = list(parts)
    if not parts:
        raise AutomatonError("parallel_compose needs at least one part")
    alphabet = parts[0].alphabet
    for p in parts[1:]:
        alphabet = _merged_alphabet(alphabet, p.alphabet)
    start = tuple(p.initial for p in parts)
    index = {start: 0}
    order = [start]
    transitions = {}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        src = index[state]
        for letter in alphabet:
            nxt = []
            ok = True
            for p, s in zip(parts, state):
                if letter in p.alphabet:
                    dst = p.transitions.get((s, letter))
                    if dst is None:
                        ok = False
                        break
                    nxt.append(dst)
                else:
                    nxt.append(s)
            if not ok:
                continue
            nxt = tuple(nxt)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            transitions[(src, letter)] = index[nxt]
    accepting = frozenset(
        i
        for state, i in index.items()
        if all(s in p.accepting for p, s in zip(parts, state))
    )
    return minimize(Dfa(len(order), alphabet, transitions, 0, accepting))


def project(dfa: Dfa, letters) -> Dfa:
    """Natural projection: erase letters outside ``letters`` (they become
    epsilon moves), then determinize and minimize."""
    letters = tuple(letters)
    trans = set()
    for (src, letter), dst in dfa.transitions.items():
        trans.add((src, letter if letter in letters else None, dst))
    nfa = Nfa(dfa.n_states, letters, trans, frozenset({dfa.initial}), dfa.accepting)
    return minimize(determinize(nfa))


def enumerate_words(alphabet, max_len):
    """All words over ``alphabet`` of length 0..max_len (test helper)."""
    words = [()]
    frontier = [()]
    for _ in range(max_len):
        frontier = [w + (a,) for w in frontier for a in alphabet]
        words.extend(frontier)
    return words
