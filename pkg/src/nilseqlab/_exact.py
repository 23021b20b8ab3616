"""Exact mod-1 arithmetic on dyadic floats.

A float is an exact rational; reducing ``c * q`` mod 1 for an integer ``q``
can therefore be done without rounding even when the product is far beyond
2^53.  Every phase evaluation in the package goes through these helpers so
that ``exp(2*pi*i * phase)`` only sees the rounding of the final fractional
part, never the loss of the high bits of ``c * n^k``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

_FAST_DENOMINATOR = 1 << 20


def frac_part(value: Fraction) -> float:
    """Fractional part of an exact rational, rounded once to float."""
    return float(value % 1)


def _frac_multiples_big(num: int, den: int, multipliers: Iterable[int]) -> np.ndarray:
    return np.array([((num * int(q)) % den) / den for q in multipliers], dtype=float)


def frac_multiples(c: float, multipliers) -> np.ndarray:
    """``frac(c * q)`` for each integer ``q`` in ``multipliers``, exactly.

    Fast vectorized path when the denominator of ``c`` is small (grid
    frequencies such as j/64); exact big-integer path otherwise.
    """
    fr = Fraction(c)
    num, den = fr.numerator, fr.denominator
    if den == 1:
        n = len(multipliers)
        return np.zeros(n, dtype=float)
    if (
        den <= _FAST_DENOMINATOR
        and isinstance(multipliers, np.ndarray)
        and multipliers.dtype == np.int64
    ):
        rem = ((num % den) * (multipliers % den)) % den
        return rem.astype(float) / den
    return _frac_multiples_big(num, den, multipliers)


def _power_multipliers(ns: np.ndarray, k: int):
    """``n^k`` as an int64 array when safe, else a list of Python ints."""
    if k == 0:
        return np.ones(len(ns), dtype=np.int64)
    if k == 1:
        return ns
    max_abs = int(np.max(np.abs(ns))) if len(ns) else 0
    if max_abs ** k < 2**62:
        out = ns.copy()
        for _ in range(k - 1):
            out = out * ns
        return out
    return [int(n) ** k for n in ns]


def poly_phase_fracs(coefficients: Sequence[float], ns: np.ndarray) -> np.ndarray:
    """Fractional parts of ``p(n) = sum_k c_k n^k``, each term reduced exactly.

    ``coefficients[k]`` multiplies ``n^k``.  Terms are reduced mod 1
    individually and summed in float; the sum of at most a handful of values
    in [0, 1) loses nothing that matters at 1e-12 tolerances.
    """
    ns = np.asarray(ns, dtype=np.int64)
    total = np.zeros(len(ns), dtype=float)
    for k, c in enumerate(coefficients):
        if c == 0.0:
            continue
        total += frac_multiples(c, _power_multipliers(ns, k))
    return np.mod(total, 1.0)


def unit_phases(fracs: np.ndarray) -> np.ndarray:
    """``exp(2*pi*i*t)`` for fractional parts ``t``."""
    return np.exp(2j * np.pi * fracs)


def floor_multiples(c: float, ns: np.ndarray) -> list:
    """``floor(c * n)`` for each integer n, exact (Python ints)."""
    fr = Fraction(c)
    num, den = fr.numerator, fr.denominator
    return [(num * int(n)) // den for n in ns]
