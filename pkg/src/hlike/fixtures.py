"""Named example algebras with exact rational J-matrices.

Matrices are written in the orthonormal bases used to define each family:

* ``h3``: Heisenberg algebra, ``[X, Y] = Z``.
* ``h5(a, b)``: ``J(Z) = diag-blocks([[0, -a], [a, 0]], [[0, -b], [b, 0]])``.
* ``gornet_mast(a, b, variant)``: type (2, 4); ``(c, d)`` is one of
  ``(-b, a), (b, -a), (-a, b), (a, -b)`` for ``variant = 0..3``.
* ``f32``: free two-step nilpotent on three generators,
  ``[E1, E2] = F1, [E2, E3] = F2, [E1, E3] = F3``.
* ``star(m)``: almost abelian, ``[E0, Ek] = Fk`` for ``k = 1..m``.
* ``quaternionic``: extra H-type fixture of type (3, 4) given by left
  multiplication by ``i, j, k`` on the quaternions.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from hlike._rational import parse_number
from hlike.algebra import MetricAlgebra


def _exact(x) -> Fraction:
    v = parse_number(x) if isinstance(x, str) else x
    if isinstance(v, float):
        v = Fraction(v)
    return Fraction(v)


def _zeros(*shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def rotation(a=1) -> np.ndarray:
    """The 2x2 generator ``[[0, -a], [a, 0]]``."""
    a = _exact(a)
    R = _zeros(2, 2)
    R[0, 1], R[1, 0] = -a, a
    return R


def h3() -> MetricAlgebra:
    return MetricAlgebra.from_exact([rotation(1)], label="h3")


def h5(a=1, b=1) -> MetricAlgebra:
    a, b = _exact(a), _exact(b)
    if a == 0 and b == 0:
        raise ValueError("h5 needs at least one nonzero parameter")
    J = _zeros(1, 4, 4)
    J[0, :2, :2] = rotation(a)
    J[0, 2:, 2:] = rotation(b)
    return MetricAlgebra.from_exact(J, label=f"h5({a},{b})")


GORNET_MAST_VARIANTS = ("(-b,a)", "(b,-a)", "(-a,b)", "(a,-b)")


def gornet_mast(a=1, b=2, variant: int = 0) -> MetricAlgebra:
    a, b = _exact(a), _exact(b)
    if a == 0 and b == 0:
        raise ValueError("gornet_mast needs (a, b) != (0, 0)")
    choices = [(-b, a), (b, -a), (-a, b), (a, -b)]
    if variant not in range(4):
        raise ValueError("variant must be 0, 1, 2 or 3")
    c, d = choices[variant]
    J = _zeros(2, 4, 4)
    J[0, 0, 1], J[0, 1, 0] = a, -a
    J[0, 2, 3], J[0, 3, 2] = b, -b
    J[1, 0, 2], J[1, 2, 0] = c, -c
    J[1, 1, 3], J[1, 3, 1] = d, -d
    return MetricAlgebra.from_exact(J, label=f"gornet_mast({a},{b},{GORNET_MAST_VARIANTS[variant]})")


def f32() -> MetricAlgebra:
    J = _zeros(3, 3, 3)
    # J(a1 F1 + a2 F2 + a3 F3) = [[0, -a1, -a3], [a1, 0, -a2], [a3, a2, 0]]
    J[0, 1, 0], J[0, 0, 1] = 1, -1
    J[1, 2, 1], J[1, 1, 2] = 1, -1
    J[2, 2, 0], J[2, 0, 2] = 1, -1
    return MetricAlgebra.from_exact(J, label="f32")


def star(m: int) -> MetricAlgebra:
    m = int(m)
    if m < 1:
        raise ValueError("star(m) needs m >= 1")
    J = _zeros(m, m + 1, m + 1)
    for k in range(1, m + 1):
        J[k - 1, k, 0], J[k - 1, 0, k] = 1, -1
    return MetricAlgebra.from_exact(J, label=f"star({m})")


def quaternionic() -> MetricAlgebra:
    # left multiplication by i, j, k in the basis 1, i, j, k
    units = {
        "i": [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
        "j": [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
        "k": [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
    }
    J = np.array([units[u] for u in "ijk"], dtype=object)
    return MetricAlgebra.from_exact(J, label="quaternionic H-type (3,4)")


FIXTURES = {
    "h3": h3,
    "h5": h5,
    "gornet_mast": gornet_mast,
    "f32": f32,
    "star": star,
    "quaternionic": quaternionic,
}


def fixture(name: str, **params) -> MetricAlgebra:
    """Look up a named example; ``params`` go to the family constructor."""
    key = name.replace("-", "_").lower()
    if key not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    return FIXTURES[key](**params)
