"""Constructions of new metric algebras from old ones.

Each builder returns a :class:`~hlike.algebra.MetricAlgebra` whose ``label``
records the construction and whose ``record`` is a
:class:`ConstructionRecord` carrying the spectrum the construction predicts.
Rational inputs give exact outputs whenever the construction stays rational.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from hlike import _rational as rat
from hlike.algebra import (
    MetricAlgebra,
    abelian_factor_dim,
    check_commutator_exact,
    standard_from_subspace,
)
from hlike.linalg import DEFAULT_TOL, Subspace, as_skew, skew_spectrum
from hlike.multiset import AdmissibleMultiset
from hlike.verify import Mode, constant_spectrum, subspace_in_cone


class Kind(str, enum.Enum):
    DIRECT_SUM = "DirectSum"
    TENSOR_PRODUCT = "TensorProduct"
    CENTRAL_SUM = "CentralSum"
    SUBMERSION = "Submersion"
    SUBSPACE_SUM = "SubspaceSum"


@dataclass(frozen=True)
class ConstructionRecord:
    kind: Kind
    inputs: tuple
    predicted_spectrum: AdmissibleMultiset | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "inputs": list(self.inputs),
            "predicted_spectrum": (
                self.predicted_spectrum.to_json() if self.predicted_spectrum is not None else "none"
            ),
        }


class HypothesisError(ValueError):
    """A numbered hypothesis of :func:`subspace_sum` fails."""

    def __init__(self, number: int, message: str, indices=()):
        super().__init__(f"hypothesis ({number}) violated: {message}")
        self.number = number
        self.indices = tuple(indices)


def unit_spectrum(alg: MetricAlgebra, tol: float = DEFAULT_TOL) -> AdmissibleMultiset | None:
    """Constant unit-sphere spectrum of ``alg`` or None when it is not constant."""
    if alg.p == 0:
        return AdmissibleMultiset.zeros(alg.q)
    if not check_commutator_exact(alg, tol):
        return None
    check = constant_spectrum(alg, Mode.EXACT, tol)
    return check.spectrum if check.constant else None


def _block_diag(blocks, exact: bool) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    if exact:
        out = np.empty((n, n), dtype=object)
        out.fill(Fraction(0))
    else:
        out = np.zeros((n, n))
    pos = 0
    for b in blocks:
        k = b.shape[0]
        out[pos:pos + k, pos:pos + k] = b
        pos += k
    return out


def _exact_pair(a1: MetricAlgebra, a2: MetricAlgebra) -> bool:
    return a1.exact is not None and a2.exact is not None


def direct_sum(a1: MetricAlgebra, a2: MetricAlgebra, tol: float = DEFAULT_TOL) -> MetricAlgebra:
    """Orthogonal direct sum of two metric algebras.

    The result has constant spectrum only when one summand is abelian; then
    the prediction is the other spectrum plus zeros.
    """
    label = f"({a1.label} ⊕ {a2.label})"
    p, q = a1.p + a2.p, a1.q + a2.q
    if a1.p == 0 and a2.p == 0:
        predicted = None
    elif a2.p == 0:
        S = unit_spectrum(a1, tol)
        predicted = S + AdmissibleMultiset.zeros(a2.q) if S is not None else None
    elif a1.p == 0:
        S = unit_spectrum(a2, tol)
        predicted = S + AdmissibleMultiset.zeros(a1.q) if S is not None else None
    else:
        predicted = None
    record = ConstructionRecord(Kind.DIRECT_SUM, (a1.label, a2.label), predicted)

    if _exact_pair(a1, a2):
        z1 = np.zeros((a1.q, a1.q), dtype=object)
        z2 = np.zeros((a2.q, a2.q), dtype=object)
        z1.fill(Fraction(0))
        z2.fill(Fraction(0))
        gens = [_block_diag([M, z2], True) for M in a1.exact.generators]
        gens += [_block_diag([z1, M], True) for M in a2.exact.generators]
        gens = np.array(gens, dtype=object).reshape(p, q, q)
        gram = np.empty((p, p), dtype=object)
        gram.fill(Fraction(0))
        gram[:a1.p, :a1.p] = a1.exact.gram
        gram[a1.p:, a1.p:] = a2.exact.gram
        return MetricAlgebra.from_exact(gens, gram, label=label, record=record)

    mats = [_block_diag([J, np.zeros((a2.q, a2.q))], False) for J in a1.j_basis]
    mats += [_block_diag([np.zeros((a1.q, a1.q)), J], False) for J in a2.j_basis]
    J = np.array(mats).reshape(p, q, q)
    return MetricAlgebra(J, q, label, None, record)


def _symmetric_eigenvalues(S_mat, exact: bool) -> list:
    """Eigenvalues with multiplicity; rational ones stay exact."""
    if exact:
        ev = sympy.Matrix(S_mat.tolist()).eigenvals()
        if all(v.is_Rational for v in ev):
            out = []
            for v, m in ev.items():
                out.extend([Fraction(int(v.p), int(v.q))] * m)
            return out
    return [float(x) for x in np.linalg.eigvalsh(rat.to_float(S_mat))]


def tensor_product(alg: MetricAlgebra, S_mat, tol: float = DEFAULT_TOL) -> MetricAlgebra:
    """``J'(Z) = J(Z) ⊗ S_mat`` for a nonsingular symmetric ``m x m`` matrix, ``m > 1``."""
    raw = np.asarray(S_mat, dtype=object)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise ValueError(f"S_mat must be square, got shape {raw.shape}")
    m = raw.shape[0]
    if m <= 1:
        raise ValueError("tensor product needs m > 1")
    exact = rat.all_exact(raw)
    if exact:
        S_ex = rat.fraction_array(raw)
        if np.any(S_ex != S_ex.T):
            raise ValueError("S_mat is not symmetric")
        if rat.rank(S_ex) < m:
            raise ValueError("S_mat is singular")
    else:
        Sf = rat.to_float(raw)
        if np.max(np.abs(Sf - Sf.T)) > 1e-12 * max(1.0, np.max(np.abs(Sf))):
            raise ValueError("S_mat is not symmetric")
        s = np.linalg.svd(Sf, compute_uv=False)
        if s[-1] <= tol * max(1.0, s[0]):
            raise ValueError("S_mat is singular")

    S_alg = unit_spectrum(alg, tol) if alg.p else None
    predicted = None
    if S_alg is not None:
        mus = _symmetric_eigenvalues(S_ex if exact else raw, exact and S_alg.is_exact)
        entries = []
        for b, mult in S_alg.entries:
            for mu in mus:
                entries.append((b * abs(mu), mult))
        predicted = AdmissibleMultiset(tuple(entries))
    label = f"({alg.label} ⊗ S)"
    record = ConstructionRecord(Kind.TENSOR_PRODUCT, (alg.label,), predicted)

    if alg.exact is not None and exact:
        gens = np.array([np.kron(M, S_ex) for M in alg.exact.generators], dtype=object)
        gens = gens.reshape(alg.p, alg.q * m, alg.q * m)
        return MetricAlgebra.from_exact(gens, alg.exact.gram, label=label, record=record)
    Sf = rat.to_float(raw)
    Sf = 0.5 * (Sf + Sf.T)
    J = np.array([np.kron(A, Sf) for A in alg.j_basis]).reshape(alg.p, alg.q * m, alg.q * m)
    return MetricAlgebra(J, alg.q * m, label, None, record)


def _require_center_is_commutator(alg: MetricAlgebra, which: str, tol: float):
    if not check_commutator_exact(alg, tol):
        raise ValueError(f"{which}: z is not the commutator [n, n]")
    if abelian_factor_dim(alg, tol) > 0:
        raise ValueError(f"{which}: algebra has an abelian factor")


def central_sum(a1: MetricAlgebra, a2: MetricAlgebra, B=None, tol: float = DEFAULT_TOL) -> MetricAlgebra:
    """Glue two algebras along their centers: ``J(Z) = J1(Z) ⊕ J2(B Z)`` with ``B`` orthogonal."""
    if a1.p != a2.p:
        raise ValueError(f"centers differ in dimension: {a1.p} vs {a2.p}")
    p = a1.p
    if p == 0:
        raise ValueError("central sum needs nontrivial centers")
    B_raw = np.asarray(np.eye(p, dtype=int) if B is None else B, dtype=object)
    if B_raw.shape != (p, p):
        raise ValueError(f"B must be {p} x {p}")
    B_exact = rat.all_exact(B_raw)
    if B_exact:
        Bx = rat.fraction_array(B_raw)
        ident = rat.fraction_array(np.eye(p, dtype=int).astype(object))
        if np.any(Bx.T.dot(Bx) != ident):
            raise ValueError("B is not orthogonal")
    Bf = rat.to_float(B_raw)
    if np.max(np.abs(Bf.T @ Bf - np.eye(p))) > 1e-10:
        raise ValueError("B is not orthogonal")
    _require_center_is_commutator(a1, "first algebra", tol)
    _require_center_is_commutator(a2, "second algebra", tol)

    S1, S2 = unit_spectrum(a1, tol), unit_spectrum(a2, tol)
    predicted = S1 + S2 if S1 is not None and S2 is not None else None
    label = f"({a1.label} +_B {a2.label})"
    record = ConstructionRecord(Kind.CENTRAL_SUM, (a1.label, a2.label), predicted)

    if B_exact and _exact_pair(a1, a2) and a1.exact.orthonormal and a2.exact.orthonormal:
        M1, M2 = a1.exact.generators, a2.exact.generators
        gens = []
        for i in range(p):
            image = sum((Bx[j, i] * M2[j] for j in range(p)), np.zeros_like(M2[0]))
            gens.append(_block_diag([M1[i], image], True))
        gens = np.array(gens, dtype=object).reshape(p, a1.q + a2.q, a1.q + a2.q)
        return MetricAlgebra.from_exact(gens, label=label, record=record)

    images = np.einsum("ji,jkl->ikl", Bf, a2.j_basis)
    J = np.array([_block_diag([a1.j_basis[i], images[i]], False) for i in range(p)])
    return MetricAlgebra(J, a1.q + a2.q, label, None, record)


def submersion_quotient(alg: MetricAlgebra, K, tol: float = DEFAULT_TOL) -> MetricAlgebra:
    """Quotient by a central ideal ``K ⊂ z``; the new center is ``K^⊥`` with the restricted metric.

    ``K`` is a :class:`~hlike.linalg.Subspace` of ``R^p`` or an array of
    spanning vectors (rows).
    """
    p = alg.p
    if isinstance(K, Subspace):
        if K.ambient_dim != p:
            raise ValueError(f"K lives in R^{K.ambient_dim}, expected R^{p}")
        rows = K.basis
        exact_rows = None
    else:
        raw = np.atleast_2d(np.asarray(K, dtype=object)) if np.size(K) else np.zeros((0, p), dtype=object)
        if raw.shape[1] != p:
            raise ValueError(f"kernel vectors must have length {p}")
        exact_rows = rat.fraction_array(raw) if rat.all_exact(raw) else None
        rows = rat.to_float(raw)
    sub = Subspace.span(rows, p, tol) if rows.size else Subspace.zero(p)
    if sub.dim >= p:
        raise ValueError("K must be a proper subspace of the center")

    S = unit_spectrum(alg, tol)
    label = f"({alg.label} / K, dim K = {sub.dim})"
    record = ConstructionRecord(Kind.SUBMERSION, (alg.label,), S)
    if sub.dim == 0:
        if alg.exact is not None:
            return MetricAlgebra.from_exact(alg.exact.generators, alg.exact.gram, label=label, record=record)
        return MetricAlgebra(alg.j_basis, alg.q, label, None, record)

    if alg.exact is not None and alg.exact.orthonormal and exact_rows is not None:
        N = rat.nullspace(exact_rows, p)
        gens = np.array(
            [sum((N[j, a] * alg.exact.generators[a] for a in range(p)), np.zeros_like(alg.exact.generators[0]))
             for j in range(N.shape[0])],
            dtype=object,
        ).reshape(N.shape[0], alg.q, alg.q)
        return MetricAlgebra.from_exact(gens, N.dot(N.T), label=label, record=record)

    W = sub.complement().basis
    J = np.einsum("ja,akl->jkl", W, alg.j_basis)
    return MetricAlgebra(J, alg.q, label, None, record)


def subspace_sum(blocks, spectra, tol: float = DEFAULT_TOL, mode: Mode | str = Mode.EXACT) -> MetricAlgebra:
    """Block sum ``A^j = ⊕_i A_i^j`` of subspaces lying in cones.

    ``blocks[i][j]`` is ``A_i^j`` (``k`` slots, ``p`` matrices each) and
    ``spectra[i]`` its spectrum.  Hypotheses checked in order:

    1. every ``A_i^j`` is skew of size at least 2, with one size per slot;
    2. every ``A_i^j`` has spectrum ``spectra[i]``;
    3. each ``span_j A_i^j`` lies in the cone over ``spectra[i]``;
    4. within each slot the ``A_i^j`` are pairwise Frobenius-orthogonal.

    (4) is tested before (3) because the cone test needs an independent
    spanning set, which orthogonality guarantees.

    The result is the standard algebra of ``span_j A^j`` with its Frobenius
    metric divided by ``N(S)^2``, so unit vectors have spectrum
    ``S = ⊎ spectra[i]``.
    """
    k = len(blocks)
    if k == 0 or len(spectra) != k:
        raise ValueError("need one spectrum per block slot and at least one slot")
    p = len(blocks[0])
    if p == 0 or any(len(row) != p for row in blocks):
        raise HypothesisError(1, "every slot needs the same positive number of matrices")
    raw = [[np.asarray(A, dtype=object) for A in row] for row in blocks]
    exact = all(rat.all_exact(A) for row in raw for A in row)

    sizes = []
    for i, row in enumerate(raw):
        for j, A in enumerate(row):
            if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 2:
                raise HypothesisError(1, f"block ({i},{j}) is not a square matrix of size >= 2", [(i, j)])
            if A.shape[0] != row[0].shape[0]:
                raise HypothesisError(1, f"block ({i},{j}) has a different size from slot {i}", [(i, j)])
            try:
                as_skew(A)
            except ValueError:
                raise HypothesisError(1, f"block ({i},{j}) is not skew-symmetric", [(i, j)]) from None
        sizes.append(row[0].shape[0])
        if spectra[i].size != sizes[-1]:
            raise HypothesisError(2, f"spectrum {i} has size {spectra[i].size}, blocks have size {sizes[-1]}", [(i,)])

    for i, row in enumerate(raw):
        for j, A in enumerate(row):
            if not skew_spectrum(rat.to_float(A), tol).equals_approx(spectra[i], tol):
                raise HypothesisError(2, f"block ({i},{j}) does not have spectrum {spectra[i]}", [(i, j)])

    for i, row in enumerate(raw):
        for j in range(p):
            for l in range(j + 1, p):
                if exact:
                    ip = sum(row[j].flat[t] * row[l].flat[t] for t in range(row[j].size))
                    bad = ip != 0
                else:
                    a, b = rat.to_float(row[j]), rat.to_float(row[l])
                    bad = abs(np.sum(a * b)) > tol * np.linalg.norm(a) * np.linalg.norm(b)
                if bad:
                    raise HypothesisError(4, f"blocks ({i},{j}) and ({i},{l}) are not orthogonal", [(i, j), (i, l)])

    for i, row in enumerate(raw):
        check = subspace_in_cone(row, spectra[i], mode, tol)
        if not check.in_cone:
            raise HypothesisError(3, f"span of slot {i} is not inside the cone over {spectra[i]}", [(i,)])

    S = spectra[0]
    for extra in spectra[1:]:
        S = S + extra
    label = "(" + " ⊕ ".join(f"slot{i}" for i in range(k)) + ")"
    record = ConstructionRecord(Kind.SUBSPACE_SUM, tuple(f"slot{i}" for i in range(k)), S)
    q = sum(sizes)

    if exact and S.is_exact:
        gens = np.array(
            [_block_diag([rat.fraction_array(raw[i][j]) for i in range(k)], True) for j in range(p)],
            dtype=object,
        ).reshape(p, q, q)
        flat = gens.reshape(p, q * q)
        gram = flat.dot(flat.T) / S.norm_squared()
        return MetricAlgebra.from_exact(gens, gram, label=label, record=record)

    mats = np.array([_block_diag([rat.to_float(raw[i][j]) for i in range(k)], False) for j in range(p)])
    std = standard_from_subspace(mats, tol)
    return MetricAlgebra(std.j_basis * S.norm(), q, label, None, record)
