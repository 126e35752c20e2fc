"""Extended non-negative rationals: exact ``Fraction`` values plus ``INF``.

``INF`` is ``math.inf``.  It only ever appears as a sentinel: ``Fraction + INF``
is ``INF``, comparisons against it are total, and no finite value is ever
converted to float.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

INF = math.inf

Bound = Union[Fraction, float]

_RATIONAL = re.compile(r"^(\d+)(?:/(\d+))?$")


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x) and x > 0


def as_bound(x, *, allow_inf: bool = True) -> Bound:
    """Coerce ``x`` to an exact non-negative rational (or ``INF``).

    Accepts ``int``, ``Fraction``, the strings ``"3/2"``/``"2"``/``"inf"`` and
    ``INF`` itself.  Floats other than ``INF`` are rejected.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not bounds")
    if isinstance(x, Fraction):
        value = x
    elif isinstance(x, int):
        value = Fraction(x)
    elif isinstance(x, float):
        if is_inf(x):
            if not allow_inf:
                raise ValueError("infinite bound not allowed here")
            return INF
        raise TypeError(f"floating point value {x!r} is not an exact bound")
    elif isinstance(x, str):
        s = x.strip()
        if s in ("inf", "infinite", "∞"):
            if not allow_inf:
                raise ValueError("infinite bound not allowed here")
            return INF
        m = _RATIONAL.match(s)
        if not m:
            raise ValueError(f"not a non-negative rational: {x!r}")
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ValueError(f"zero denominator in {x!r}")
        value = Fraction(int(m.group(1)), den)
    else:
        raise TypeError(f"cannot interpret {x!r} as a bound")
    if value < 0:
        raise ValueError(f"negative bound {x!r}")
    return value


def fmt_bound(x: Bound) -> str:
    if is_inf(x):
        return "inf"
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def bound_lcm(values) -> int:
    """Least common multiple of the denominators of the finite values."""
    den = 1
    for v in values:
        if not is_inf(v):
            den = math.lcm(den, Fraction(v).denominator)
    return den
