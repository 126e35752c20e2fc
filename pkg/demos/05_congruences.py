"""Classical congruences inside the quantitative setting.

Z4 with f(a) = a + 2 and g = addition, under the 0/1 metric.  Collapsing
modulo 2 is a congruence; the quotient is Z2 with f the identity.
"""

import itertools

from quantalg import QuantitativeAlgebra, Signature, congruence_to_pseudometric, satisfies, var, app
from quantalg.constructions import pseudometric_from_distances, quotient_by_pseudometric
from quantalg.equations import unconditional

sig = Signature.of({"f": 1, "g": 2})
Z4 = QuantitativeAlgebra.discrete(sig, range(4), {"f": lambda a: (a + 2) % 4, "g": lambda a, b: (a + b) % 4})
classes = [(0, 2), (1, 3)]

p = congruence_to_pseudometric(Z4, classes)
Q = quotient_by_pseudometric(pseudometric_from_distances(Z4.carrier, p), algebra=Z4)
print("quotient carrier:", Q.algebra.carrier, " classes:", Q.classes)
print("quotient metric:", {k: str(v) for k, v in Q.algebra.distance.items() if k[0] != k[1]})

x, y = var("x"), var("y")
f = lambda t: app("f", t)
g = lambda s, t: app("g", s, t)
candidates = [x, f(x), f(f(x)), g(x, x), g(y, y), g(x, y), g(y, x)]
print()
for s, t in itertools.combinations(candidates, 2):
    ce = unconditional(s, t, 0)
    a, q = satisfies(Z4, ce), satisfies(Q.algebra, ce)
    if a or q:
        print(f"  {str(ce):<26} Z4: {a!s:<6} quotient: {q}")
