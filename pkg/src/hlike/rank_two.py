"""Homothety classification of H-like algebras of J-rank two.

Such an algebra is either an almost abelian star algebra (the nonzero
eigenspaces ``E(Z)`` of all ``J(Z)`` share a common line) or the free
two-step algebra on three generators.  Along with the verdict we build an
explicit witness ``(A, B, lam)`` with

    J_canon(B Z) = lam * A J(Z) A^T   for all Z,

where ``J_canon`` is the fixture ``star(p)`` or ``f32``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hlike.algebra import MetricAlgebra, j_of
from hlike.fixtures import f32, star
from hlike.linalg import DEFAULT_TOL, Subspace, intersect, nonzero_eigenspace
from hlike.verify import DEFAULT_SEED, Verdict, classify, sample_directions

STAR = "AlmostAbelianStar"
FREE = "FreeF32"
NOT_APPLICABLE = "NotApplicable"


@dataclass
class Witness:
    A: np.ndarray
    B: np.ndarray
    lam: float

    def defect(self, alg: MetricAlgebra, canon: MetricAlgebra, Z) -> float:
        """``max |J_canon(B Z) - lam A J(Z) A^T|`` over the rows of ``Z``."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        worst = 0.0
        for z in Z:
            lhs = j_of(canon, self.B @ z)
            rhs = self.lam * self.A @ j_of(alg, z) @ self.A.T
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    def to_json(self) -> dict:
        return {"A": self.A.tolist(), "B": self.B.tolist(), "lambda": float(self.lam)}


@dataclass
class RankTwoVerdict:
    kind: str
    p: int | None = None
    reason: str = ""
    witness: Witness | None = None
    margins: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        if self.kind == STAR:
            return f"{STAR}({self.p})"
        if self.kind == NOT_APPLICABLE:
            return f"{NOT_APPLICABLE}({self.reason})"
        return self.kind

    @property
    def applicable(self) -> bool:
        return self.kind != NOT_APPLICABLE

    def canonical(self) -> MetricAlgebra | None:
        if self.kind == STAR:
            return star(self.p)
        if self.kind == FREE:
            return f32()
        return None

    def to_json(self) -> dict:
        return {
            "class": self.kind,
            "name": self.name,
            "p": self.p,
            "reason": self.reason or None,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "margins": {k: self.margins[k] for k in sorted(self.margins)},
        }


@dataclass
class PairIntersection:
    pair: tuple
    dim: int
    basis: np.ndarray
    orthogonality_defect: float


def _rank_two_scale(alg: MetricAlgebra, tol: float, mode) -> tuple:
    """``(c, None)`` with spectrum ``{±ci, 0, ...}``, or ``(None, reason)``."""
    if alg.p == 0:
        return None, "abelian algebra"
    report = classify(alg, mode, tol)
    if report.verdict not in (Verdict.HLIKE, Verdict.HTYPE):
        return None, f"not H-like ({report.verdict.value})"
    if report.j_rank != 2:
        return None, f"j_rank={report.j_rank}"
    return float(report.spectrum.nonzero[0][0]), None


def _canonical_sign(v: np.ndarray, tol: float) -> np.ndarray:
    idx = np.flatnonzero(np.abs(v) > tol)
    return -v if idx.size and v[idx[0]] < 0 else v


def pair_intersection(alg: MetricAlgebra, Z1, Z2, tol: float = DEFAULT_TOL) -> PairIntersection:
    """``E(Z1) ∩ E(Z2)`` and, for a spanning unit ``X``, the cosine between ``J(Z1)X`` and ``J(Z2)X``."""
    Z1, Z2 = np.asarray(Z1, dtype=float), np.asarray(Z2, dtype=float)
    J1, J2 = j_of(alg, Z1), j_of(alg, Z2)
    X = intersect(nonzero_eigenspace(J1, tol), nonzero_eigenspace(J2, tol), tol)
    defect = 0.0
    for x in X.basis:
        u, v = J1 @ x, J2 @ x
        defect = max(defect, abs(float(u @ v)) / (np.linalg.norm(u) * np.linalg.norm(v)))
    return PairIntersection((Z1.tolist(), Z2.tolist()), X.dim, X.basis, defect)


def eigenspace_intersection_profile(alg: MetricAlgebra, tol: float = DEFAULT_TOL, mode="exact") -> list:
    """``E(Z_i) ∩ E(Z_j)`` for all pairs of basis directions ``i < j``.

    Raises ``ValueError`` unless the algebra is H-like of J-rank two.
    """
    _, reason = _rank_two_scale(alg, tol, mode)
    if reason is not None:
        raise ValueError(f"intersection profile needs an H-like algebra of J-rank 2: {reason}")
    eye = np.eye(alg.p)
    out = []
    for i in range(alg.p):
        for j in range(i + 1, alg.p):
            res = pair_intersection(alg, eye[i], eye[j], tol)
            basis = np.array([_canonical_sign(x, tol) for x in res.basis]).reshape(res.dim, alg.q)
            out.append(PairIntersection((i, j), res.dim, basis, res.orthogonality_defect))
    return out


def _probe_directions(p: int, seed: int) -> np.ndarray:
    return np.vstack([np.eye(p), sample_directions(p, p, seed)])


def classify_rank_two(
    alg: MetricAlgebra, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED, mode="exact"
) -> RankTwoVerdict:
    """Decide star vs free for an H-like algebra of J-rank two and build the witness.

    The common intersection of all ``E(Z)`` is probed with the ``p`` basis
    directions and ``p`` seeded random unit directions.
    """
    c, reason = _rank_two_scale(alg, tol, mode)
    if reason is not None:
        return RankTwoVerdict(NOT_APPLICABLE, reason=reason)
    p, q = alg.p, alg.q
    lam = 1.0 / c
    J = alg.j_basis * lam
    margins: dict = {"spectrum_scale": c}

    if p == 1:
        E = nonzero_eigenspace(J[0], tol)
        X = Subspace(E.basis[:1], q)
    else:
        X = Subspace(np.eye(q), q)
        for Z in _probe_directions(p, seed):
            X = intersect(X, nonzero_eigenspace(np.tensordot(Z, J, axes=1), tol), tol)
    margins["common_intersection_dim"] = X.dim

    if X.dim == 1:
        if q != p + 1:
            raise ValueError(
                f"common eigenspace line found but q = {q} != p + 1 = {p + 1}; "
                "input is not rank-2 H-like at this tolerance"
            )
        x1 = _canonical_sign(X.basis[0], tol)
        A = np.vstack([x1] + [J[k] @ x1 for k in range(p)])
        witness = Witness(A, np.eye(p), lam)
        verdict = RankTwoVerdict(STAR, p, witness=witness, margins=margins)
    elif X.dim == 0:
        if not p == q == 3:
            raise ValueError(
                f"eigenspaces have trivial common intersection but (p, q) = ({p}, {q}) != (3, 3)"
            )
        E = [nonzero_eigenspace(J[i], tol) for i in range(3)]
        lines = []
        for a, b in ((0, 1), (1, 2), (2, 0)):
            L = intersect(E[a], E[b], tol)
            if L.dim != 1:
                raise ValueError(f"E(Z{a + 1}) ∩ E(Z{b + 1}) has dimension {L.dim}, expected 1")
            lines.append(_canonical_sign(L.basis[0], tol))
        A = np.vstack([lines[2], lines[0], lines[1]])
        # canonical f32: J(a) = [[0, -a1, -a3], [a1, 0, -a2], [a3, a2, 0]]
        cols = []
        for i in range(3):
            M = A @ J[i] @ A.T
            cols.append([M[1, 0], M[2, 1], M[2, 0]])
        B = np.array(cols).T
        witness = Witness(A, B, lam)
        verdict = RankTwoVerdict(FREE, 3, witness=witness, margins=margins)
    else:
        raise ValueError(f"common eigenspace intersection has dimension {X.dim} > 1")

    canon = verdict.canonical()
    margins["A_orthogonality_defect"] = float(np.max(np.abs(A @ A.T - np.eye(q))))
    margins["B_orthogonality_defect"] = float(np.max(np.abs(witness.B @ witness.B.T - np.eye(p))))
    margins["basis_identity_defect"] = witness.defect(alg, canon, np.eye(p))
    return verdict
