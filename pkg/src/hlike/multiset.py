"""Admissible multisets of purely imaginary eigenvalues.

A skew-symmetric real matrix has eigenvalues ``±b i`` (``b > 0``) with equal
multiplicities, plus zeros.  :class:`AdmissibleMultiset` stores only the
pairs ``(b, mult)`` so that admissibility can never be violated.  For
``b > 0`` the entry stands for ``mult`` copies of ``+bi`` *and* ``mult`` copies
of ``-bi``; for ``b == 0`` it stands for ``mult`` zeros.

Values built from exact input stay :class:`~fractions.Fraction`; values read
off an eigensolve are floats.  :meth:`AdmissibleMultiset.equals_approx`
compares either kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import Poly, QQ, Symbol

from hlike._rational import format_number, is_exact, parse_number, rational_sqrt

DEFAULT_TOL = 1e-8


def _coerce(b):
    if isinstance(b, bool):
        raise TypeError("b must be a number")
    if is_exact(b):
        return Fraction(b)
    return float(b)


@dataclass(frozen=True)
class AdmissibleMultiset:
    entries: tuple = ()

    def __post_init__(self):
        merged: dict = {}
        exact = all(is_exact(b) for b, _ in self.entries)
        for b, mult in self.entries:
            b = _coerce(b) if exact else float(b)
            if b < 0:
                b = -b
            mult = int(mult)
            if mult < 1:
                raise ValueError(f"multiplicity must be positive, got {mult}")
            merged[b] = merged.get(b, 0) + mult
        object.__setattr__(self, "entries", tuple(sorted(merged.items())))

    @classmethod
    def from_dict(cls, mults: dict) -> "AdmissibleMultiset":
        return cls(tuple(mults.items()))

    @classmethod
    def zeros(cls, n: int) -> "AdmissibleMultiset":
        return cls(((Fraction(0), n),)) if n > 0 else cls()

    @classmethod
    def parse(cls, text: str) -> "AdmissibleMultiset":
        """Parse ``"b:mult,b:mult,..."``, e.g. ``"1:1,0:1"`` for ``{±i, 0}``."""
        entries = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ":" in chunk:
                b, m = chunk.split(":", 1)
            else:
                b, m = chunk, "1"
            try:
                mult = int(m)
            except ValueError:
                raise ValueError(f"bad multiplicity in {chunk!r}") from None
            entries.append((parse_number(b), mult))
        if not entries:
            raise ValueError(f"empty spectrum string {text!r}")
        return cls(tuple(entries))

    # -- basic quantities -------------------------------------------------

    @property
    def size(self) -> int:
        return sum(2 * m if b > 0 else m for b, m in self.entries)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(b, Fraction) for b, _ in self.entries)

    @property
    def zero_mult(self) -> int:
        return sum(m for b, m in self.entries if b == 0)

    @property
    def nonzero(self) -> tuple:
        return tuple((b, m) for b, m in self.entries if b > 0)

    def is_zero(self) -> bool:
        return not self.nonzero

    def max_b(self):
        return self.entries[-1][0] if self.entries else 0

    def norm_squared(self):
        """``N(S)**2 = sum |a|^2 m(a)``; exact for exact multisets."""
        return sum((2 * b * b * m for b, m in self.entries), Fraction(0) if self.is_exact else 0.0)

    def norm(self) -> float:
        return math.sqrt(float(self.norm_squared()))

    def power_sum(self, k: int):
        """``trace(A^(2k))`` for any skew ``A`` with this spectrum."""
        total = sum(2 * m * b ** (2 * k) for b, m in self.entries)
        return total if k % 2 == 0 else -total

    def power_sums(self, kmax: int) -> list:
        return [self.power_sum(k) for k in range(1, kmax + 1)]

    def magnitudes(self) -> np.ndarray:
        """Sorted ``|lambda|`` over all ``size`` eigenvalues, as floats."""
        out = []
        for b, m in self.entries:
            out.extend([float(b)] * (2 * m if b > 0 else m))
        return np.sort(np.array(out, dtype=float))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "AdmissibleMultiset") -> "AdmissibleMultiset":
        if not isinstance(other, AdmissibleMultiset):
            return NotImplemented
        return AdmissibleMultiset(self.entries + other.entries)

    union = __add__

    def scale(self, k) -> "AdmissibleMultiset":
        """The multiset ``kS``; ``k < 0`` folds into the ± pairing, ``k == 0`` gives zeros."""
        if k == 0:
            return AdmissibleMultiset.zeros(self.size)
        k = _coerce(k)
        k = -k if k < 0 else k
        if not isinstance(k, Fraction):
            return AdmissibleMultiset(tuple((float(b) * k, m) for b, m in self.entries))
        return AdmissibleMultiset(tuple((b * k, m) for b, m in self.entries))

    def __rmul__(self, k):
        return self.scale(k)

    def equals_approx(self, other: "AdmissibleMultiset", tol: float = DEFAULT_TOL) -> bool:
        """Tolerant equality.

        Eigenvalue magnitudes are compared position by position after
        sorting, so near-equal values merge automatically.  ``tol`` is relative
        to the largest ``b`` when that exceeds one, absolute otherwise.
        """
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.size != other.size:
            return False
        x, y = self.magnitudes(), other.magnitudes()
        if x.size == 0:
            return True
        scale = max(1.0, float(x[-1]), float(y[-1]))
        return bool(np.all(np.abs(x - y) <= tol * scale))

    def proportional_to(self, other: "AdmissibleMultiset", tol: float = DEFAULT_TOL) -> bool:
        """True iff ``self = c * other`` for some ``c > 0`` (same conjugacy-class ray)."""
        if self.size != other.size or self.is_zero() or other.is_zero():
            return False
        if self.is_exact and other.is_exact:
            n1, n2 = self.norm_squared(), other.norm_squared()
            r1 = sorted((b * b / n1, m) for b, m in self.entries)
            r2 = sorted((b * b / n2, m) for b, m in other.entries)
            return r1 == r2
        return self.scale(1.0 / self.norm()).equals_approx(other.scale(1.0 / other.norm()), tol)

    def to_float(self) -> "AdmissibleMultiset":
        return AdmissibleMultiset(tuple((float(b), m) for b, m in self.entries))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> list:
        return [{"b": format_number(b), "mult": int(m)} for b, m in self.entries]

    @classmethod
    def from_json(cls, data) -> "AdmissibleMultiset":
        return cls(tuple((parse_number(e["b"]), int(e["mult"])) for e in data))

    def __str__(self) -> str:
        parts = []
        for b, m in self.entries:
            tag = "0" if b == 0 else f"±{format_number(b)}i"
            parts.append(tag if m == 1 else f"{tag}×{m}")
        return "{" + ", ".join(parts) + "}"


def elementary_from_power_sums(power_sums: list) -> list:
    """Newton's identities: ``e_0..e_n`` from ``p_1..p_n``."""
    e = [Fraction(1) if all(is_exact(p) for p in power_sums) else 1.0]
    for k in range(1, len(power_sums) + 1):
        acc = sum((-1) ** (i - 1) * e[k - i] * power_sums[i - 1] for i in range(1, k + 1))
        e.append(acc / k)
    return e


def from_power_sums(q: int, traces: list, tol: float = DEFAULT_TOL) -> AdmissibleMultiset:
    """Recover the spectrum of a skew ``q x q`` matrix from ``trace(A^(2k))``, ``k = 1..q//2``.

    The squared magnitudes ``x_j = b_j**2`` (one per ± pair, zeros padded to
    ``q//2`` slots) have power sums ``(-1)^k trace(A^(2k)) / 2``; Newton's
    identities give the polynomial with roots ``x_j``.  With exact traces the
    roots are found exactly when they are squares of rationals; otherwise the
    result is float-valued.
    """
    n = q // 2
    if len(traces) < n:
        raise ValueError(f"need {n} trace powers, got {len(traces)}")
    if n == 0:
        return AdmissibleMultiset.zeros(q)
    traces = [Fraction(t) if is_exact(t) else float(t) for t in traces[:n]]
    sums = [(-1) ** k * traces[k - 1] / 2 for k in range(1, n + 1)]
    e = elementary_from_power_sums(sums)
    coeffs = [(-1) ** k * e[k] for k in range(n + 1)]

    if all(isinstance(c, Fraction) for c in coeffs):
        y = Symbol("y")
        poly = Poly([QQ(c.numerator, c.denominator) for c in coeffs], y, domain=QQ)
        roots = poly.ground_roots()
        if sum(roots.values()) == n:
            entries = []
            ok = True
            for r, m in roots.items():
                x = Fraction(int(r.p), int(r.q))
                b = rational_sqrt(x)
                if b is None:
                    ok = False
                    break
                entries.append((b, m))
            if ok:
                return _pairs_to_multiset(q, entries)

    roots = np.roots([float(c) for c in coeffs])
    xs = np.sort(np.clip(roots.real, 0.0, None))
    scale = max(1.0, float(xs[-1]))
    bs = np.sqrt(xs)
    entries = [(0.0 if x <= tol * scale else float(b), 1) for x, b in zip(xs, bs)]
    return _pairs_to_multiset(q, entries)


def _pairs_to_multiset(q: int, entries) -> AdmissibleMultiset:
    nonzero = [(b, m) for b, m in entries if b > 0]
    used = 2 * sum(m for _, m in nonzero)
    zero = Fraction(0) if all(isinstance(b, Fraction) for b, _ in entries) else 0.0
    tail = ((zero, q - used),) if q > used else ()
    return AdmissibleMultiset(tuple(nonzero) + tail)


def cluster_values(values, tol: float) -> list:
    """Group sorted floats whose neighbours differ by at most ``tol``; returns ``(mean, count)``."""
    values = np.sort(np.asarray(values, dtype=float))
    groups: list = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            chunk = values[start:i]
            groups.append((float(chunk.mean()), i - start))
            start = i
    return groups
