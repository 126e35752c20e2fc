"""Least derivable bounds, their proofs, and the models that show they are tight."""

from fractions import Fraction

from quantalg import QuantEq, Signature, check_proof, least_derivable_distance, build_universe, search_countermodel, var, app
from quantalg.equations import ConditionalEquation

x, y, z = var("x"), var("y"), var("z")
f = lambda t: app("f", t)
unary = Signature.of({"f": 1})

# Two hypotheses chained through y.
hyps = [QuantEq(x, y, 1), QuantEq(y, z, 2)]
table = least_derivable_distance(hyps, [], build_universe(hyps, QuantEq(x, z, 3)), record=True)
print("bound(x, z) =", table.bound(x, z))
proof = table.proof(x, z)
print(proof)
print("checker accepts:", bool(check_proof(proof)))

# Is 3 really least?  Ask for a model of the hypotheses where x, z sit further apart than 5/2.
cm = search_countermodel(Signature.of({}), hyps, QuantEq(x, z, Fraction(5, 2)))
print("\ncountermodel below 3:")
print(cm)

# Operations are non-expansive, so f inherits the bound of its argument.
hyps = [QuantEq(x, y, 1)]
table = least_derivable_distance(hyps, [], build_universe(hyps, QuantEq(f(x), f(y), 1)))
print("\nbound(f(x), f(y)) =", table.bound(f(x), f(y)))
cm = search_countermodel(unary, hyps, QuantEq(f(x), f(y), Fraction(1, 2)))
print("no better than 1 -- witness:")
print(cm)

# An axiom saying f halves distances: a contraction.
contraction = ConditionalEquation([QuantEq(x, y, 1)], QuantEq(f(x), f(y), Fraction(1, 2)))
goal = QuantEq(f(f(x)), f(f(y)), Fraction(1, 2))
U = build_universe(hyps, goal, [contraction], depth=1)
table = least_derivable_distance(hyps, [contraction], U, record=True)
print("\nunder the contraction axiom:")
for s, t in [(f(x), f(y)), (f(f(x)), f(f(y)))]:
    print(f"  bound({s}, {t}) =", table.bound(s, t))
print(table.proof(f(f(x)), f(f(y))))
