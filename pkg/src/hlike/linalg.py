"""Dense linear algebra for skew-symmetric matrices.

Everything here is real arithmetic on small matrices (q up to a few dozen).
Spectra are read off singular values: for skew ``A`` the singular values are
the magnitudes ``|lambda|``, each nonzero one appearing an even number of
times, which is exactly the paired structure of an admissible multiset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hlike._rational import all_exact, to_float
from hlike.multiset import AdmissibleMultiset, cluster_values

DEFAULT_TOL = 1e-9
COMPUTED_SKEW_TOL = 1e-12


def as_skew(matrix, tol: float | None = None) -> np.ndarray:
    """Validate skew-symmetry and return a symmetrized float copy.

    Exact (integer/Fraction) input must be exactly skew; float input within
    ``tol`` (default ``1e-12`` relative to the largest entry).
    """
    raw = np.asarray(matrix)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {raw.shape}")
    if raw.dtype == object and all_exact(raw):
        if np.any(raw + raw.T != 0):
            raise ValueError("matrix is not skew-symmetric")
        return to_float(raw)
    A = np.asarray(raw, dtype=float)
    if tol is None:
        tol = COMPUTED_SKEW_TOL
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if A.size and np.max(np.abs(A + A.T)) > tol * scale:
        raise ValueError(f"matrix is not skew-symmetric (defect {np.max(np.abs(A + A.T)):.3g})")
    return 0.5 * (A - A.T)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of R^n given by an orthonormal basis stored as rows."""

    basis: np.ndarray
    ambient_dim: int

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float).reshape(-1, self.ambient_dim)
        if B.shape[0]:
            Q, R = np.linalg.qr(B.T)
            signs = np.sign(np.diag(R))
            signs[signs == 0] = 1.0
            B = (Q * signs).T
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None, tol: float = DEFAULT_TOL) -> "Subspace":
        """Orthonormal basis of the span of (possibly dependent) vectors."""
        V = np.atleast_2d(np.asarray(vectors, dtype=float))
        n = ambient_dim if ambient_dim is not None else V.shape[1]
        if V.size == 0:
            return cls(np.zeros((0, n)), n)
        U, s, _ = np.linalg.svd(V.T, full_matrices=False)
        keep = s > tol * max(1.0, s[0])
        return cls(U[:, keep].T, n)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((0, ambient_dim)), ambient_dim)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def contains(self, v, tol: float = DEFAULT_TOL) -> bool:
        v = np.asarray(v, dtype=float)
        return bool(np.linalg.norm(v - self.projector() @ v) <= tol * max(1.0, np.linalg.norm(v)))

    def complement(self) -> "Subspace":
        if self.dim == 0:
            return Subspace(np.eye(self.ambient_dim), self.ambient_dim)
        _, _, Vt = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(Vt[self.dim:], self.ambient_dim)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def frobenius_inner(A, B) -> float:
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return float(np.sum(A * B))


def _zero_cut(s: np.ndarray, tol: float) -> float:
    return tol * max(1.0, float(s[0]) if s.size else 0.0)


def skew_spectrum(A, tol: float = DEFAULT_TOL) -> AdmissibleMultiset:
    """Spectrum of a skew matrix as an admissible multiset (float valued).

    Singular values at or below ``tol * max(1, sigma_max)`` count as zero;
    the others are clustered with the same width, and every nonzero cluster
    must have even size.
    """
    A = np.asarray(A, dtype=float)
    q = A.shape[0]
    if q == 0:
        return AdmissibleMultiset()
    s = np.linalg.svd(A, compute_uv=False)
    cut = _zero_cut(s, tol)
    zeros = int(np.sum(s <= cut))
    entries = [(0.0, zeros)] if zeros else []
    for value, count in cluster_values(s[s > cut], cut):
        if count % 2:
            raise ValueError(
                f"singular value {value:.6g} has odd multiplicity {count}; input is not skew within tolerance"
            )
        entries.append((value, count // 2))
    return AdmissibleMultiset(tuple(entries))


def rank(A, tol: float = DEFAULT_TOL) -> int:
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > _zero_cut(s, tol)))


def singular_margin(s: np.ndarray, tol: float) -> dict:
    """Smallest accepted and largest rejected singular value around the cut."""
    cut = _zero_cut(s, tol)
    kept, dropped = s[s > cut], s[s <= cut]
    return {
        "cut": cut,
        "smallest_kept": float(kept.min()) if kept.size else None,
        "largest_dropped": float(dropped.max()) if dropped.size else None,
    }


def nonzero_eigenspace(A, tol: float = DEFAULT_TOL) -> Subspace:
    """Eigenspace of ``-A^2`` for its largest eigenvalue.

    Requires a single distinct nonzero ``b`` in the spectrum of ``A``.
    """
    A = np.asarray(A, dtype=float)
    q = A.shape[0]
    U, s, _ = np.linalg.svd(A)
    cut = _zero_cut(s, tol)
    if s[0] <= cut:
        raise ValueError("matrix is zero; it has no nonzero eigenspace")
    top = s >= s[0] - cut
    rest = s[~top]
    if rest.size and rest.max() > cut:
        raise ValueError(
            f"spectrum has more than one nonzero value ({s[0]:.6g} and {rest.max():.6g})"
        )
    return Subspace(U[:, top].T, q)


def intersect(U: Subspace, V: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    """``U ∩ V`` via principal angles: keep directions with cosine above ``1 - tol``."""
    if U.ambient_dim != V.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if U.dim == 0 or V.dim == 0:
        return Subspace.zero(U.ambient_dim)
    Y, cos, _ = np.linalg.svd(U.basis @ V.basis.T, full_matrices=False)
    keep = cos > 1.0 - tol
    return Subspace((U.basis.T @ Y[:, keep]).T, U.ambient_dim)


def principal_cosines(U: Subspace, V: Subspace) -> np.ndarray:
    if U.dim == 0 or V.dim == 0:
        return np.zeros(0)
    return np.linalg.svd(U.basis @ V.basis.T, compute_uv=False)


def common_kernel(mats, tol: float = DEFAULT_TOL) -> Subspace:
    """Kernel of the vertically stacked matrices."""
    mats = [np.asarray(M, dtype=float) for M in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    q = mats[0].shape[1]
    if any(M.shape[1] != q for M in mats):
        raise ValueError("matrices have different dimensions")
    stacked = np.vstack(mats)
    _, s, Vt = np.linalg.svd(stacked, full_matrices=True)
    r = int(np.sum(s > _zero_cut(s, tol))) if s.size else 0
    return Subspace(Vt[r:], q)


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def trace_powers(J, kmax: int) -> np.ndarray:
    """``trace(J^(2k))`` for ``k = 1..kmax``; ``J`` may be a stack ``(..., q, q)``."""
    J = np.asarray(J, dtype=float)
    J2 = J @ J
    P = J2
    out = []
    for k in range(1, kmax + 1):
        if k > 1:
            P = P @ J2
        out.append(np.trace(P, axis1=-2, axis2=-1))
    return np.stack(out, axis=-1) if out else np.zeros(J.shape[:-2] + (0,))
