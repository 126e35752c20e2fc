"""The canonical model of a small class, and the maps out of it."""

import itertools

from quantalg import QuantitativeAlgebra, Signature, canonical_model, is_homomorphism, r_of_K, var, weak_universality_beta
from quantalg.algebra import is_c_reflexive, satisfies
from quantalg.equations import unconditional

x, y = var("x"), var("y")

A = QuantitativeAlgebra.build(Signature.of({}), "ab", {}, {("a", "b"): 1}, name="A")
M = canonical_model([A], ["x", "y"], depth=2)
for line in M.manifest():
    print(line)
print("product size:", len(M.product.carrier))
print("d(<x>, <y>) =", M.distance(x, y))

# Each assignment into A factors through the model.
beta = weak_universality_beta(M, 0, {"x": "a", "y": "b"})
print("\nbeta:", beta.mapping)
print("homomorphism:", is_homomorphism(beta), " reflexive up to r(K) =", r_of_K([A]), ":",
      all(is_c_reflexive(beta, c) for c in range(1, r_of_K([A]) + 1)))

# A unary example: the model satisfies exactly what the class does.
sig = Signature.of({"f": 1})
swap = QuantitativeAlgebra.build(sig, "ab", {"f": lambda a: "b" if a == "a" else "a"}, {("a", "b"): 1}, name="swap")
drop = QuantitativeAlgebra.build(sig, "ab", {"f": lambda a: "a"}, {("a", "b"): 2}, name="drop")
K = [swap, drop]
M = canonical_model(K, ["x", "y"], depth=2)
print(f"\nK = swap, drop: {len(M.components)} components, {len(M.product.carrier)} elements")
agree = 0
for s, t in itertools.combinations(M.universe, 2):
    for eps in (0, 1, 2):
        ce = unconditional(s, t, eps)
        assert all(satisfies(B, ce) for B in K) == satisfies(M.product, ce) == (M.distance(s, t) <= eps)
        agree += 1
print("equations on which class, model and d^K agree:", agree)
