"""Reflexive homomorphisms and the constructions that keep them reflexive."""

from quantalg import Homomorphism, QuantitativeAlgebra, Signature, is_c_reflexive, is_homomorphism
from quantalg.algebra import reflexivity_failure
from quantalg.constructions import generated_subalgebra, product_of_homomorphisms, pullback_restriction
from quantalg.generators import random_surjection, rng_for

sig = Signature.of({"f": 1})
swap = lambda d: QuantitativeAlgebra.build(sig, "ab", {"f": lambda a: "b" if a == "a" else "a"}, {("a", "b"): d})

# Shrinking distances is a homomorphism, but the pair {a, b} has no isometric preimage.
h = Homomorphism(swap(2), swap(1), {"a": "a", "b": "b"})
print("homomorphism:", is_homomorphism(h))
for c in (1, 2, 3):
    print(f"  {c}-reflexive:", is_c_reflexive(h, c), reflexivity_failure(h, c) or "")

# Random surjections, sorted by how reflexive they are.
tally = {}
for i in range(200):
    kind, g = random_surjection(rng_for(7, i), sig)
    level = max(c for c in (1, 2, 3, 4) if is_c_reflexive(g, c))
    tally[(kind, level)] = tally.get((kind, level), 0) + 1
print("\n(kind, largest c tested) -> count")
for k in sorted(tally):
    print(" ", k, tally[k])

# Restriction along a subalgebra and products keep c-reflexivity.
kind, g = random_surjection(rng_for(7, 3), sig)
sub = generated_subalgebra(g.target, [g.target.carrier[0]])
r = pullback_restriction(g, sub)
p = product_of_homomorphisms([g, g])
print(f"\n{kind}: restriction {len(r.source.carrier)} -> {len(r.target.carrier)}, product {len(p.source.carrier)} -> {len(p.target.carrier)}")
for c in (1, 2, 3):
    print(f"  c={c}: map {is_c_reflexive(g, c)}  restriction {is_c_reflexive(r, c)}  product {is_c_reflexive(p, c)}")
