"""Two-step metric nilpotent Lie algebras stored through their J-map.

An algebra of type ``(p, q)`` is ``n = v ⊕ z`` with ``dim z = p`` and
``dim v = q``.  With orthonormal coordinates on both factors it is determined
by the ``p`` skew matrices ``J(Z_1), ..., J(Z_p)`` through

    <J(Z) X, Y> = <Z, [X, Y]>.

Algebras built from rational data also carry an :class:`ExactData` record:
rational generators ``M_a`` of ``J(z)`` plus the rational Gram matrix ``H`` of
the inner product on ``z`` in those coordinates.  The float ``j_basis`` is
derived from it, and the exact record is what exact verification works on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from hlike import _rational as rat
from hlike.linalg import DEFAULT_TOL, Subspace, as_skew, common_kernel


@dataclass(frozen=True, eq=False)
class ExactData:
    """Rational generators ``M`` (shape ``(p, q, q)``) and Gram matrix ``H`` (``p x p``)."""

    generators: np.ndarray
    gram: np.ndarray

    @property
    def orthonormal(self) -> bool:
        p = self.gram.shape[0]
        return all(self.gram[i, j] == (1 if i == j else 0) for i in range(p) for j in range(p))

    def coordinates(self) -> np.ndarray:
        """Matrix ``C`` whose columns are an orthonormal basis of z in generator coordinates."""
        p = self.gram.shape[0]
        if p == 0:
            return np.zeros((0, 0))
        L = np.linalg.cholesky(rat.to_float(self.gram))
        return np.linalg.inv(L).T

    def float_basis(self) -> np.ndarray:
        M = rat.to_float(self.generators)
        if self.orthonormal:
            return M
        return np.einsum("ai,ajk->ijk", self.coordinates(), M)


def _identity_gram(p: int) -> np.ndarray:
    return rat.fraction_array(np.eye(p, dtype=int).astype(object))


@dataclass(frozen=True, eq=False)
class MetricAlgebra:
    j_basis: np.ndarray
    q: int
    label: str = ""
    exact: ExactData | None = None
    record: object = field(default=None, repr=False)

    def __post_init__(self):
        J = np.asarray(self.j_basis, dtype=float)
        J = J.reshape(-1, self.q, self.q) if J.size else J.reshape(0, self.q, self.q)
        for i, A in enumerate(J):
            if np.max(np.abs(A + A.T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(A))):
                raise ValueError(f"j_basis[{i}] is not skew-symmetric")
        J = 0.5 * (J - J.transpose(0, 2, 1))
        J.setflags(write=False)
        object.__setattr__(self, "j_basis", J)

    @classmethod
    def from_matrices(cls, mats, label: str = "", q: int | None = None) -> "MetricAlgebra":
        """Algebra whose ``j_basis`` is ``mats`` (orthonormal basis of z assumed).

        Exact entries (ints, Fractions) are kept as an exact record.
        """
        arr = np.asarray(mats, dtype=object)
        if arr.size == 0:
            if q is None:
                raise ValueError("q is required for an algebra with p = 0")
            return cls(np.zeros((0, q, q)), q, label)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"expected shape (p, q, q), got {arr.shape}")
        for A in arr:
            as_skew(A)
        if rat.all_exact(arr):
            return cls.from_exact(arr, label=label)
        return cls(rat.to_float(arr), arr.shape[1], label)

    @classmethod
    def from_exact(cls, generators, gram=None, label: str = "", record=None) -> "MetricAlgebra":
        M = rat.fraction_array(generators)
        p, q = M.shape[0], M.shape[1]
        H = _identity_gram(p) if gram is None else rat.fraction_array(gram)
        for i in range(p):
            if np.any(M[i] + M[i].T != 0):
                raise ValueError(f"generator {i} is not skew-symmetric")
        ex = ExactData(M, H)
        return cls(ex.float_basis(), q, label, ex, record)

    @classmethod
    def abelian(cls, q: int) -> "MetricAlgebra":
        """Abelian algebra R^q, the only legal p = 0 algebra; ``q = 0`` is the zero algebra."""
        if q < 0:
            raise ValueError("q must be nonnegative")
        return cls.from_exact(np.zeros((0, q, q), dtype=object), label=f"R^{q}")

    @property
    def p(self) -> int:
        return self.j_basis.shape[0]

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def __repr__(self) -> str:
        kind = "exact" if self.is_exact else "float"
        return f"MetricAlgebra(type=({self.p},{self.q}), {kind}, label={self.label!r})"


def j_of(alg: MetricAlgebra, Z) -> np.ndarray:
    """``J(Z) = sum_i Z_i J(Z_i)``."""
    Z = np.asarray(Z, dtype=float)
    if Z.shape != (alg.p,):
        raise ValueError(f"Z must have length {alg.p}")
    return np.tensordot(Z, alg.j_basis, axes=1) if alg.p else np.zeros((alg.q, alg.q))


def bracket(alg: MetricAlgebra, X, Y) -> np.ndarray:
    """``[X, Y]`` in z: component i is ``<J(Z_i) X, Y>``."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != (alg.q,) or Y.shape != (alg.q,):
        raise ValueError(f"X and Y must have length {alg.q}")
    return np.einsum("ijk,k,j->i", alg.j_basis, X, Y)


def _modified_gram_schmidt(F: np.ndarray, tol: float) -> np.ndarray:
    out = []
    for i, f in enumerate(F):
        v = f.copy()
        for _ in range(2):
            for u in out:
                v -= (u @ v) * u
        nv = np.linalg.norm(v)
        if nv <= tol * max(1.0, np.linalg.norm(f)):
            raise ValueError(f"basis element {i} is linearly dependent on the previous ones")
        out.append(v / nv)
    return np.array(out)


def standard_from_subspace(basis, tol: float = DEFAULT_TOL, label: str = "") -> MetricAlgebra:
    """Standard algebra of ``W = span(basis)`` with the Frobenius inner product on W."""
    arr = np.asarray(basis, dtype=object)
    if arr.ndim != 3 or arr.shape[0] == 0:
        raise ValueError("need a nonempty list of square matrices")
    p, q = arr.shape[0], arr.shape[1]
    label = label or f"standard(W, dim {p})"
    if rat.all_exact(arr):
        M = rat.fraction_array(arr)
        flat = M.reshape(p, q * q)
        if rat.rank(flat) < p:
            raise ValueError("basis is linearly dependent")
        gram = flat @ flat.T
        return MetricAlgebra.from_exact(M, gram, label=label)
    F = np.stack([as_skew(rat.to_float(A)) for A in arr]).reshape(p, q * q)
    Q = _modified_gram_schmidt(F, tol)
    return MetricAlgebra(Q.reshape(p, q, q), q, label)


def commutator_margin(alg: MetricAlgebra) -> float:
    """Smallest singular value of the ``p x q^2`` flattening of ``j_basis``."""
    if alg.p == 0:
        return float("inf")
    return float(np.linalg.svd(alg.j_basis.reshape(alg.p, -1), compute_uv=False)[-1])


def check_commutator_exact(alg: MetricAlgebra, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``j_basis`` is linearly independent, i.e. ``z = [n, n]``."""
    if alg.p == 0:
        return True
    if alg.exact is not None:
        return rat.rank(alg.exact.generators.reshape(alg.p, -1)) == alg.p
    s = np.linalg.svd(alg.j_basis.reshape(alg.p, -1), compute_uv=False)
    return bool(s[-1] > tol * max(1.0, s[0]))


def abelian_factor_dim(alg: MetricAlgebra, tol: float = DEFAULT_TOL) -> int:
    """Dimension of the common kernel of all ``J(Z)`` (the abelian factor inside v)."""
    if alg.p == 0:
        return alg.q
    if alg.exact is not None:
        stacked = np.concatenate(list(alg.exact.generators), axis=0)
        return int(rat.nullspace(stacked).shape[0])
    return common_kernel(list(alg.j_basis), tol).dim


def abelian_factor(alg: MetricAlgebra, tol: float = DEFAULT_TOL) -> Subspace:
    if alg.p == 0:
        return Subspace(np.eye(alg.q), alg.q)
    return common_kernel(list(alg.j_basis), tol)


def transform(alg: MetricAlgebra, P=None, B=None, scale=1, label: str | None = None) -> MetricAlgebra:
    """Image under the ``O(q) x O(p)`` action and a positive rescaling.

    The new algebra satisfies ``J'(B Z) = scale * P J(Z) P^T``.
    """
    P = np.eye(alg.q, dtype=int).astype(object) if P is None else P
    B = np.eye(alg.p, dtype=int).astype(object) if B is None else B
    label = label if label is not None else f"transform({alg.label})"
    exact_inputs = (
        alg.exact is not None
        and alg.exact.orthonormal
        and rat.is_exact(scale)
        and rat.all_exact(np.asarray(P, dtype=object))
        and rat.all_exact(np.asarray(B, dtype=object))
    )
    if exact_inputs:
        Pf, Bf = rat.fraction_array(P), rat.fraction_array(B)
        M = alg.exact.generators
        out = np.empty_like(M)
        for i in range(alg.p):
            acc = sum((Bf[i, j] * M[j] for j in range(alg.p)), np.zeros_like(M[0]))
            out[i] = Fraction(scale) * (Pf @ acc @ Pf.T)
        return MetricAlgebra.from_exact(out, label=label)
    P, B = np.asarray(P, dtype=float), np.asarray(B, dtype=float)
    J = np.einsum("ij,jkl->ikl", B, alg.j_basis)
    J = float(scale) * np.einsum("ab,ibc,dc->iad", P, J, P)
    return MetricAlgebra(J, alg.q, label)
