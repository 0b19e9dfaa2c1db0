"""Small helpers for exact rational data carried next to float arrays."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def parse_number(text):
    """Parse a number-string.

    ``"3/7"`` and integer strings give a :class:`Fraction`; anything with a
    decimal point or exponent gives a float.  Plain JSON numbers are accepted
    too (ints exact, floats inexact).
    """
    if isinstance(text, bool):
        raise ValueError(f"not a number: {text!r}")
    if isinstance(text, Rational):
        return Fraction(text)
    if isinstance(text, float):
        return text
    if not isinstance(text, str):
        raise ValueError(f"not a number: {text!r}")
    s = text.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    try:
        return Fraction(int(s))
    except ValueError:
        pass
    return float(s)


def format_number(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int, np.integer)) and not isinstance(x, bool)


def all_exact(arr) -> bool:
    arr = np.asarray(arr, dtype=object)
    return all(is_exact(v) for v in arr.flat)


def fraction_array(arr) -> np.ndarray:
    """Object array of Fractions; raises if an entry is not exact."""
    src = np.asarray(arr, dtype=object)
    out = np.empty(src.shape, dtype=object)
    for idx, v in np.ndenumerate(src):
        if not is_exact(v):
            raise TypeError(f"entry {idx} is not exact: {v!r}")
        out[idx] = Fraction(v)
    return out


def to_float(arr) -> np.ndarray:
    return np.asarray(np.asarray(arr, dtype=object).astype(float), dtype=float)


def common_denominator(arr) -> int:
    den = 1
    for v in np.asarray(arr, dtype=object).flat:
        den = math.lcm(den, Fraction(v).denominator)
    return den


def integer_array(arr, den: int) -> np.ndarray:
    """``den * arr`` as an object array of Python ints (``den`` must clear all denominators)."""
    src = np.asarray(arr, dtype=object)
    out = np.empty(src.shape, dtype=object)
    for idx, v in np.ndenumerate(src):
        w = Fraction(v) * den
        if w.denominator != 1:
            raise ValueError("denominator not cleared")
        out[idx] = w.numerator
    return out


def _domain_matrix(rows) -> DomainMatrix:
    rows = [[QQ(Fraction(v).numerator, Fraction(v).denominator) for v in row] for row in rows]
    ncols = len(rows[0]) if rows else 0
    return DomainMatrix(rows, (len(rows), ncols), QQ)


def rank(rows) -> int:
    rows = np.asarray(rows, dtype=object)
    if rows.size == 0:
        return 0
    return _domain_matrix(rows.tolist()).rank()


def nullspace(rows, ncols: int | None = None) -> np.ndarray:
    """Rational basis (as rows) of ``{x : rows @ x = 0}``."""
    rows = np.asarray(rows, dtype=object)
    if rows.size == 0:
        n = ncols if ncols is not None else rows.shape[-1]
        return fraction_array(np.eye(n, dtype=int).astype(object))
    ns = _domain_matrix(rows.tolist()).nullspace().to_Matrix()
    out = np.empty(ns.shape, dtype=object)
    for i in range(ns.shape[0]):
        for j in range(ns.shape[1]):
            v = ns[i, j]
            out[i, j] = Fraction(int(v.p), int(v.q))
    return out


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    x = Fraction(x)
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None
