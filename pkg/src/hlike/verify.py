"""Where an algebra sits in the chain H-type => H-like => constant J-spectrum.

Constancy of the spectrum of ``J(Z)`` on the unit sphere is tested through
the trace power sums ``t_k(Z) = trace(J(Z)^(2k))``, ``k = 1..q//2``.  They
determine the spectrum, and constancy is equivalent to the polynomial
identities ``t_k(Z) = c_k |Z|^(2k)``.

Exact mode proves those identities.  Both sides are homogeneous of degree
``2k``; a homogeneous polynomial of degree ``d`` in ``p`` variables that
vanishes on the lattice ``{W in N^p : sum(W) = d}`` is zero (dehomogenise
and use unisolvence of the principal lattice), and multiplying by powers of
``sum(W)`` reduces every ``k`` to the single lattice ``sum(W) = 2 * (q//2)``.
The evaluation is done in integers after clearing denominators.

Sampled mode compares the same quantities at seeded random unit directions.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from hlike import _rational as rat
from hlike.algebra import (
    MetricAlgebra,
    abelian_factor_dim,
    check_commutator_exact,
    commutator_margin,
    j_of,
    standard_from_subspace,
)
from hlike.linalg import DEFAULT_TOL, rank, skew_spectrum, trace_powers
from hlike.multiset import AdmissibleMultiset, from_power_sums

DEFAULT_SEED = 1729
MAX_LATTICE_POINTS = 50_000


class Verdict(str, enum.Enum):
    HTYPE = "HType"
    HLIKE = "HLike"
    ABELIAN_FACTOR = "ConstantSpectrumWithAbelianFactor"
    NOT_CONSTANT = "NotConstantSpectrum"


class Mode(str, enum.Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


@dataclass
class SpectrumCheck:
    constant: bool
    mode: Mode
    spectrum: AdmissibleMultiset | None = None
    witness: dict | None = None
    margins: dict = field(default_factory=dict)


@dataclass
class ClassReport:
    verdict: Verdict
    mode: Mode
    spectrum: AdmissibleMultiset | None = None
    j_rank: int | None = None
    witness: dict | None = None
    margins: dict = field(default_factory=dict)

    @property
    def constant(self) -> bool:
        return self.verdict is not Verdict.NOT_CONSTANT

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "spectrum": self.spectrum.to_json() if self.spectrum is not None else None,
            "j_rank": self.j_rank,
            "mode": self.mode.value,
            "margins": _jsonable(self.margins),
            "witness": _jsonable(self.witness),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, Fraction):
        return rat.format_number(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, AdmissibleMultiset):
        return obj.to_json()
    return obj


def lattice(p: int, degree: int):
    """All ``W in N^p`` with ``sum(W) == degree`` (stars and bars)."""
    if p == 1:
        yield (degree,)
        return
    for bars in itertools.combinations(range(degree + p - 1), p - 1):
        prev, point = -1, []
        for b in bars:
            point.append(b - prev - 1)
            prev = b
        point.append(degree + p - 2 - prev)
        yield tuple(point)


def lattice_size(p: int, degree: int) -> int:
    return math.comb(degree + p - 1, p - 1)


def _int_trace_powers(J: np.ndarray, kmax: int) -> list:
    J2 = J.dot(J)
    P, out = J2, []
    for k in range(1, kmax + 1):
        if k > 1:
            P = P.dot(J2)
        out.append(int(sum(P[i, i] for i in range(P.shape[0]))))
    return out


def _witness_from_generator_coords(alg: MetricAlgebra, w) -> np.ndarray:
    """Unit vector in orthonormal z-coordinates for generator coordinates ``w``."""
    w = np.asarray(w, dtype=float)
    H = rat.to_float(alg.exact.gram)
    z = np.linalg.cholesky(H).T @ w
    return z / np.linalg.norm(z)


def _witness_info(alg, Z, k, t_value, c_value, tol) -> dict:
    Z = np.asarray(Z, dtype=float)
    return {
        "direction": Z.tolist(),
        "k": int(k),
        "trace_power_at_direction": float(t_value),
        "trace_power_reference": float(c_value),
        "rank_at_direction": rank(j_of(alg, Z), tol),
        "rank_at_e1": rank(alg.j_basis[0], tol),
    }


def _exact_spectrum(alg: MetricAlgebra, tol: float) -> AdmissibleMultiset:
    """Spectrum at the first orthonormal direction; exact when the eigenvalues are rational."""
    kmax = alg.q // 2
    if alg.exact is not None:
        M0 = alg.exact.generators[0]
        h = alg.exact.gram[0, 0]
        M2 = M0.dot(M0)
        P, traces = M2, []
        for k in range(1, kmax + 1):
            if k > 1:
                P = P.dot(M2)
            traces.append(Fraction(sum(P[i, i] for i in range(alg.q))) / h**k)
        S = from_power_sums(alg.q, traces, tol)
        if S.is_exact:
            return S
    return skew_spectrum(alg.j_basis[0], tol)


def _constant_exact(alg: MetricAlgebra, tol: float) -> SpectrumCheck:
    p, q = alg.p, alg.q
    kmax = q // 2
    M, H = alg.exact.generators, alg.exact.gram
    D = rat.common_denominator(M)
    E = rat.common_denominator(H)
    Mi = rat.integer_array(M, D)
    Hi = rat.integer_array(H, E)
    ref = _int_trace_powers(Mi[0], kmax)
    h11 = Hi[0, 0]
    # c_k in true units: ref_k * E^k / (D^(2k) * h11^k)
    c_true = [Fraction(ref[k - 1] * E**k, D ** (2 * k) * h11**k) for k in range(1, kmax + 1)]

    n_points = 0
    worst = None
    for W in lattice(p, 2 * kmax):
        n_points += 1
        J = sum((W[a] * Mi[a] for a in range(p) if W[a]), np.zeros((q, q), dtype=object))
        t = _int_trace_powers(J, kmax)
        nrm = int(sum(W[a] * Hi[a, b] * W[b] for a in range(p) for b in range(p)))
        for k in range(1, kmax + 1):
            if t[k - 1] * h11**k != ref[k - 1] * nrm**k:
                t_true = Fraction(t[k - 1] * E**k, D ** (2 * k) * nrm**k)
                gap = float(abs(t_true - c_true[k - 1])) / (1 + abs(float(c_true[k - 1])))
                if worst is None or gap > worst[0]:
                    worst = (gap, W, k, t_true, c_true[k - 1])
    margins = {"lattice_points": n_points, "lattice_degree": 2 * kmax}
    if worst is not None:
        gap, W, k, t_true, c = worst
        Z = _witness_from_generator_coords(alg, W)
        margins["max_relative_gap"] = gap
        return SpectrumCheck(False, Mode.EXACT, None, _witness_info(alg, Z, k, t_true, c, tol), margins)
    margins["max_relative_gap"] = 0.0
    return SpectrumCheck(True, Mode.EXACT, _exact_spectrum(alg, tol), None, margins)


def sample_directions(p: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, p))
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def _constant_sampled(alg: MetricAlgebra, tol: float, seed: int, n_dirs: int | None) -> SpectrumCheck:
    p, q = alg.p, alg.q
    kmax = q // 2
    n_dirs = n_dirs or 64 * p
    Z = sample_directions(p, n_dirs, seed)
    Z = np.vstack([np.eye(p), Z])
    J = np.einsum("ni,ijk->njk", Z, alg.j_basis)
    t = trace_powers(J, kmax)
    c = t[0]
    gaps = np.abs(t - c) / (1.0 + np.abs(c))
    worst = np.unravel_index(np.argmax(gaps), gaps.shape) if gaps.size else None
    max_gap = float(gaps.max()) if gaps.size else 0.0
    margins = {"directions": int(Z.shape[0]), "seed": seed, "max_relative_gap": max_gap, "tol": tol}
    if max_gap > tol:
        n, k = worst
        return SpectrumCheck(
            False, Mode.SAMPLED, None, _witness_info(alg, Z[n], k + 1, t[n, k], c[k], tol), margins
        )
    return SpectrumCheck(True, Mode.SAMPLED, skew_spectrum(alg.j_basis[0], tol), None, margins)


def constant_spectrum(
    alg: MetricAlgebra,
    mode: Mode | str = Mode.EXACT,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    n_dirs: int | None = None,
) -> SpectrumCheck:
    """Decide whether ``J(Z)`` has the same spectrum for every unit ``Z``.

    Exact mode needs rational data; otherwise (or when the lattice would be
    too large) it falls back to sampling and says so in ``margins``.
    """
    mode = Mode(mode)
    if alg.p == 0:
        raise ValueError("an abelian algebra has no J-spectrum")
    if not check_commutator_exact(alg, tol):
        raise ValueError("j_basis is linearly dependent; z is not the commutator")
    if mode is Mode.EXACT:
        if alg.exact is None:
            check = _constant_sampled(alg, tol, seed, n_dirs)
            check.margins["exact_fallback"] = "algebra has no exact rational data"
            return check
        size = lattice_size(alg.p, 2 * (alg.q // 2))
        if size > MAX_LATTICE_POINTS:
            check = _constant_sampled(alg, tol, seed, n_dirs)
            check.margins["exact_fallback"] = f"lattice of {size} points exceeds {MAX_LATTICE_POINTS}"
            return check
        return _constant_exact(alg, tol)
    return _constant_sampled(alg, tol, seed, n_dirs)


def _kernel_witness(alg: MetricAlgebra) -> dict:
    U, s, _ = np.linalg.svd(alg.j_basis.reshape(alg.p, -1), full_matrices=True)
    Z = U[:, -1]
    return {"direction": Z.tolist(), "reason": "J(Z) vanishes for this unit Z", "singular_value": float(s[-1])}


def classify(
    alg: MetricAlgebra,
    mode: Mode | str = Mode.EXACT,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> ClassReport:
    """Verdict in the hierarchy with the unit-sphere spectrum and J-rank as evidence.

    H-type is recognised up to homothety: a single value ``±ci`` with no
    zeros.  ``margins["htype_scale"]`` records ``c``; the literal normalisation
    ``c = 1`` is ``margins["htype_normalized"]``.
    """
    mode = Mode(mode)
    if alg.p == 0:
        raise ValueError("an abelian algebra has no J-spectrum")
    margins: dict = {"commutator_min_singular_value": commutator_margin(alg)}
    if not check_commutator_exact(alg, tol):
        if np.all(alg.j_basis == 0):
            raise ValueError("J map is identically zero")
        margins["commutator_exact"] = False
        return ClassReport(Verdict.NOT_CONSTANT, mode, witness=_kernel_witness(alg), margins=margins)
    check = constant_spectrum(alg, mode, tol, seed)
    margins.update(check.margins)
    if not check.constant:
        return ClassReport(Verdict.NOT_CONSTANT, check.mode, witness=check.witness, margins=margins)

    S = check.spectrum
    if alg.exact is not None:
        j_rank = rat.rank(alg.exact.generators[0])
    else:
        j_rank = rank(alg.j_basis[0], tol)
    fdim = abelian_factor_dim(alg, tol)
    margins["abelian_factor_dim"] = fdim
    if fdim == 0 and S.zero_mult == 0 and len(S.nonzero) == 1:
        c = S.nonzero[0][0]
        margins["htype_scale"] = c
        margins["htype_normalized"] = bool(c == 1) if isinstance(c, Fraction) else bool(abs(c - 1) <= tol)
        verdict = Verdict.HTYPE
    elif fdim == 0:
        verdict = Verdict.HLIKE
    else:
        verdict = Verdict.ABELIAN_FACTOR
    return ClassReport(verdict, check.mode, S, j_rank, None, margins)


class ConeMembership(NamedTuple):
    in_cone: bool
    scale: float


def cone_membership(A, S: AdmissibleMultiset, tol: float = DEFAULT_TOL) -> ConeMembership:
    """Is ``A`` in the cone over the conjugacy class of ``S``?  Returns the scale ``|A| / N(S)``."""
    A = np.asarray(A, dtype=float)
    if S.size != A.shape[0]:
        raise ValueError(f"multiset size {S.size} does not match q = {A.shape[0]}")
    if S.is_zero():
        raise ValueError("S must not be all zeros")
    lam = float(np.linalg.norm(A)) / S.norm()
    spec = skew_spectrum(A, tol)
    return ConeMembership(spec.equals_approx(S.scale(lam), tol), lam)


class ConeCheck(NamedTuple):
    in_cone: bool
    witness: dict | None
    spectrum: AdmissibleMultiset | None
    mode: Mode


def subspace_in_cone(
    basis,
    S: AdmissibleMultiset,
    mode: Mode | str = Mode.EXACT,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> ConeCheck:
    """Is ``span(basis)`` contained in the cone over the conjugacy class of ``S``?

    The standard algebra of the span must have constant spectrum, and that
    spectrum must be a positive multiple of ``S``.
    """
    alg = standard_from_subspace(basis, tol)
    if S.size != alg.q:
        raise ValueError(f"multiset size {S.size} does not match q = {alg.q}")
    check = constant_spectrum(alg, mode, tol, seed)
    if not check.constant:
        return ConeCheck(False, check.witness, None, check.mode)
    if not check.spectrum.proportional_to(S, tol):
        witness = {
            "direction": [1.0] + [0.0] * (alg.p - 1),
            "reason": f"spectrum {check.spectrum} is not a positive multiple of {S}",
        }
        return ConeCheck(False, witness, check.spectrum, check.mode)
    return ConeCheck(True, None, check.spectrum, check.mode)


def j_unitary_defect(alg: MetricAlgebra, spectrum: AdmissibleMultiset | None = None) -> float:
    """``max_ij |<J_i, J_j>_F / N(S)^2 - delta_ij|``.

    ``spectrum`` defaults to the spectrum of ``J`` at the first basis
    direction.
    """
    if alg.p == 0:
        return 0.0
    S = spectrum if spectrum is not None else skew_spectrum(alg.j_basis[0])
    n2 = float(S.norm_squared())
    if n2 == 0:
        raise ValueError("spectrum is all zeros")
    F = alg.j_basis.reshape(alg.p, -1)
    G = F @ F.T / n2
    return float(np.max(np.abs(G - np.eye(alg.p))))
