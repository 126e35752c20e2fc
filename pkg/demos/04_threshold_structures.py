"""Metrics as families of relations: thresholds, open flags, reduced products."""

from fractions import Fraction

from quantalg import FilterSpec, QuantitativeAlgebra, Signature, Threshold, ThresholdStructure, check_qfo_axioms, reduced_product, to_algebra, to_qfo
from quantalg.constructions import direct_product
from quantalg.dsl import parse_horn, print_structure
from quantalg.qfo import QFOAxiomError, eval_horn, horn_counterexample, is_isomorphic

empty = Signature.of({})
A = QuantitativeAlgebra.build(empty, "ab", {}, {("a", "b"): 1}, name="A")
B = QuantitativeAlgebra.build(empty, "pq", {}, {("p", "q"): Fraction(1, 2)}, name="B")

M = to_qfo(A)
print(print_structure(M, "M"))
print("back to an algebra unchanged:", to_algebra(M) == A)

# a =_e b for every e > 1 but not at 1 itself: an infimum that is not attained.
rel = {("a", "a"): Threshold(0), ("b", "b"): Threshold(0), ("a", "b"): Threshold(1, False), ("b", "a"): Threshold(1, False)}
O = ThresholdStructure(empty, "ab", {}, rel)
print("\nfailing axioms of the open structure:", [k for k, v in check_qfo_axioms(O).items() if v])
try:
    to_algebra(O)
except QFOAxiomError as e:
    print("to_algebra refuses:", e)

# Principal filters: agreeing on J is what counts.
full = reduced_product([to_qfo(A), to_qfo(B)], FilterSpec.full(2))
print("\nJ = {0, 1} equals the product:", full == to_qfo(direct_product([A, B])))
second = reduced_product([to_qfo(A), to_qfo(B)], FilterSpec(2, [1]))
print("J = {1} is B again:", is_isomorphic(second, to_qfo(B)), "with", len(second.carrier), "classes")

# Horn sentences read off the structure.
for text in ["forall x y . (x =[1] y)", "forall x y . (x =[1/2] y)", "forall x y . (x =[1] y) -> (x =[2] y)"]:
    phi = parse_horn(text, empty)
    print(f"{text:<40} {eval_horn(M, phi)!s:<6} {horn_counterexample(M, phi) or ''}")
