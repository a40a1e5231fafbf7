"""Compile task specifications to automata and split them into
parallel subtasks.

Run from the repository root:

    python3 demos/01_compile_and_decompose.py
"""

from overwatch_planner import compile_spec, parse_ltl, parse_re
from overwatch_planner.automata import language_equal, parallel_compose
from overwatch_planner.decompose import decompose

# A mission in regular-expression form: visit fort p1 (possibly holding
# there), then either fort p2 or fort p3.
ast = parse_re("p1 p1* (p2 + p3)")
print("parsed:", ast.serialize())

dfa = compile_spec(ast, ("p1", "p2", "p3"))
print(f"\nminimal DFA: {dfa.n_states} states, accepting {sorted(dfa.accepting)}")
print(dfa.to_dot().rstrip())

# The same mission in temporal-logic form compiles to the same language.
ltl = parse_ltl("p1 & X(p1 U (p2 | p3))")
print("\nLTL reading agrees:", language_equal(dfa, compile_spec(ltl, ("p1", "p2", "p3"))))

# A task whose sub-missions touch disjoint forts splits into parts that
# independent teams can run concurrently.
joint = parallel_compose(
    [
        compile_spec(parse_re("a c"), ("a", "c")),
        compile_spec(parse_re("b"), ("b",)),
    ]
)
result = decompose(joint)
print(f"\nshuffled mission splits into {len(result.parts)} parts:")
for part in result.parts:
    print(f"  alphabet {part.alphabet}: {part.n_states} states")
print("certificate verified:", result.verified)

# An inherently ordered mission does not split.
ordered = compile_spec(parse_re("a b"), ("a", "b"))
print("\n'a then b' parts:", len(decompose(ordered).parts), "(order forbids a split)")
