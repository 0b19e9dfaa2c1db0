"""Numerical search for p-dimensional subspaces of a cone over a conjugacy class.

A candidate is a frame of ``p`` skew matrices, Frobenius-orthogonal with norm
``N(S)`` each; a unit ``Z`` then gives ``J(Z)`` of norm ``N(S)``.  The
objective is

    sum over sample directions Z, sum over k of (trace(J(Z)^(2k)) - c_k)^2

with ``c_k`` the power sums of the target.  It vanishes exactly when every
sampled ``J(Z)`` has the target spectrum.  Frames are optimised on the
Stiefel manifold in the coordinates ``E_ij = (e_i e_j^T - e_j e_i^T)/sqrt(2)``
of so(q), which make the Frobenius inner product Euclidean.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import norm as normal_dist
from scipy.stats import qmc

from hlike import _rational as rat
from hlike.algebra import standard_from_subspace
from hlike.multiset import AdmissibleMultiset
from hlike.verify import Mode, subspace_in_cone

VERIFY_TOL = 1e-9
FRAME_TOL = 1e-8
START_CHUNK = 4
RATIONAL_DENOMINATOR = 1000
POLISH_THRESHOLD = 1e-6


@dataclass
class SearchProblem:
    q: int
    p: int
    target: AdmissibleMultiset
    n_samples: int | None = None
    seed: int = 0
    max_iters: int = 2000
    tol_objective: float = 1e-20
    n_starts: int = 20

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if self.q < 1:
            raise ValueError("q must be at least 1")
        if self.target.size != self.q:
            raise ValueError(f"target has size {self.target.size}, expected q = {self.q}")
        if self.target.is_zero():
            raise ValueError("target must not be all zeros")
        if self.n_starts < 1 or self.max_iters < 0:
            raise ValueError("n_starts must be positive and max_iters nonnegative")
        if self.n_samples is None:
            K = self.q // 2
            self.n_samples = 3 * math.comb(2 * K + self.p - 1, self.p - 1)

    @property
    def kmax(self) -> int:
        return self.q // 2

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "p": self.p,
            "target": self.target.to_json(),
            "n_samples": self.n_samples,
            "seed": self.seed,
            "max_iters": self.max_iters,
            "tol_objective": self.tol_objective,
            "n_starts": self.n_starts,
        }


@dataclass
class SearchResult:
    basis: np.ndarray
    objective: float
    verified: bool
    trace: list = field(default_factory=list)
    verification: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        obj = self.objective if math.isfinite(self.objective) else None
        return {
            "basis": self.basis.tolist(),
            "objective": obj,
            "verified": self.verified,
            "verification": self.verification,
            "trace": self.trace,
        }


# -- coordinates on so(q) -----------------------------------------------------


def so_dim(q: int) -> int:
    return q * (q - 1) // 2


def _upper(q: int):
    return np.triu_indices(q, k=1)


def from_coords(V, q: int) -> np.ndarray:
    """Skew matrices from so(q) coordinates; ``V`` has shape ``(..., q(q-1)/2)``."""
    V = np.asarray(V, dtype=float)
    out = np.zeros(V.shape[:-1] + (q, q))
    i, j = _upper(q)
    out[..., i, j] = V / math.sqrt(2.0)
    out[..., j, i] = -V / math.sqrt(2.0)
    return out


def to_coords(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    q = A.shape[-1]
    i, j = _upper(q)
    return (A[..., i, j] - A[..., j, i]) / math.sqrt(2.0)


# -- sample directions ----------------------------------------------------------


def sphere_directions(p: int, n: int, seed: int) -> np.ndarray:
    """``n`` unit vectors in R^p from a scrambled Sobol sequence pushed through the normal quantile."""
    m = max(1, math.ceil(math.log2(max(n, 2))))
    U = qmc.Sobol(d=p, scramble=True, seed=seed).random_base2(m)[:n]
    G = normal_dist.ppf(np.clip(U, 1e-12, 1.0 - 1e-12))
    lengths = np.linalg.norm(G, axis=1, keepdims=True)
    lengths[lengths == 0] = 1.0
    return G / lengths


# -- objective and gradient ------------------------------------------------------


def target_power_sums(target: AdmissibleMultiset, kmax: int) -> np.ndarray:
    return np.array([float(c) for c in target.power_sums(kmax)])


def _odd_powers(J: np.ndarray, kmax: int):
    """``J^(2k-1)`` and ``trace(J^(2k))`` for ``k = 1..kmax`` on a stack of matrices."""
    J2 = J @ J
    odd, traces = [], []
    P = J
    for k in range(1, kmax + 1):
        if k > 1:
            P = P @ J2
        odd.append(P)
        traces.append(np.einsum("nij,nji->n", P, J))
    return odd, np.stack(traces, axis=-1)


def objective_raw(basis, c: np.ndarray, directions) -> float:
    """Objective without constraint checks; ``basis`` has shape ``(p, q, q)``."""
    B = np.asarray(basis, dtype=float)
    Z = np.asarray(directions, dtype=float)
    J = np.einsum("na,aij->nij", Z, B)
    _, t = _odd_powers(J, len(c))
    return float(np.sum((t - c) ** 2))


def gradient_raw(basis, c: np.ndarray, directions) -> np.ndarray:
    """Frobenius gradient of :func:`objective_raw` in so(q), shape ``(p, q, q)``.

    Uses ``d trace(J^(2k)) / dJ = 2k (J^(2k-1))^T``, projected onto skew
    matrices and pulled back through ``J(Z) = sum_a Z_a basis_a``.
    """
    B = np.asarray(basis, dtype=float)
    Z = np.asarray(directions, dtype=float)
    J = np.einsum("na,aij->nij", Z, B)
    odd, t = _odd_powers(J, len(c))
    G = np.zeros_like(J)
    for k in range(1, len(c) + 1):
        w = 2.0 * (t[:, k - 1] - c[k - 1]) * 2.0 * k
        G += w[:, None, None] * np.swapaxes(odd[k - 1], 1, 2)
    G = 0.5 * (G - np.swapaxes(G, 1, 2))
    return np.einsum("na,nij->aij", Z, G)


def frame_defect(basis, n_target: float) -> float:
    """``max |<B_a, B_b>_F / N^2 - delta_ab|``."""
    B = np.asarray(basis, dtype=float)
    F = B.reshape(B.shape[0], -1)
    return float(np.max(np.abs(F @ F.T / n_target**2 - np.eye(B.shape[0]))))


def objective(basis, target: AdmissibleMultiset, directions) -> float:
    """Search objective for a frame Frobenius-orthogonal with norm ``N(target)`` each."""
    B = np.asarray(basis, dtype=float)
    if B.ndim != 3 or B.shape[1] != B.shape[2] or B.shape[1] != target.size:
        raise ValueError(f"basis must have shape (p, {target.size}, {target.size})")
    if np.max(np.abs(B + np.swapaxes(B, 1, 2))) > FRAME_TOL * max(1.0, np.max(np.abs(B))):
        raise ValueError("basis matrices must be skew-symmetric")
    defect = frame_defect(B, target.norm())
    if defect > FRAME_TOL:
        raise ValueError(f"basis is not Frobenius-orthonormal times N(S) (defect {defect:.3g})")
    return objective_raw(B, target_power_sums(target, target.size // 2), directions)


def gradient(basis, target: AdmissibleMultiset, directions) -> np.ndarray:
    return gradient_raw(basis, target_power_sums(target, target.size // 2), directions)


# -- optimisation on the Stiefel manifold -----------------------------------------


def _retract(Y: np.ndarray) -> np.ndarray:
    Q, R = np.linalg.qr(Y.T)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return (Q * signs).T


def _tangent(Y: np.ndarray, xi: np.ndarray) -> np.ndarray:
    S = xi @ Y.T
    return xi - 0.5 * (S + S.T) @ Y


class _Frame:
    """Objective and Riemannian gradient on orthonormal frames ``Y`` (rows) in so(q) coordinates."""

    def __init__(self, problem: SearchProblem, directions: np.ndarray):
        self.q = problem.q
        self.scale = problem.target.norm()
        self.c = target_power_sums(problem.target, problem.kmax)
        self.Z = directions
        self.magnitudes = problem.target.magnitudes()[::-1].copy()

    def basis(self, Y):
        return self.scale * from_coords(Y, self.q)

    def value(self, Y) -> float:
        return objective_raw(self.basis(Y), self.c, self.Z)

    def rgrad(self, Y) -> np.ndarray:
        G = gradient_raw(self.basis(Y), self.c, self.Z)
        return _tangent(Y, self.scale * to_coords(G))


def _optimise(frame: _Frame, Y: np.ndarray, problem: SearchProblem):
    f = frame.value(Y)
    g = frame.rgrad(Y)
    step = 1.0 / max(1.0, float(np.linalg.norm(g)))
    history = [f]
    it = 0
    for it in range(1, problem.max_iters + 1):
        if f <= problem.tol_objective:
            break
        gg = float(np.sum(g * g))
        if gg == 0.0:
            break
        t = step
        while True:
            Y_new = _retract(Y - t * g)
            f_new = frame.value(Y_new)
            if f_new <= f - 1e-4 * t * gg or t < 1e-20:
                break
            t *= 0.5
        if f_new >= f:
            break
        g_new = frame.rgrad(Y_new)
        s = (Y_new - Y).ravel()
        yv = (g_new - g).ravel()
        sy = float(s @ yv)
        step = float(s @ s) / sy if sy > 0 else 2.0 * t
        step = min(max(step, 1e-12), 1e6)
        Y, f, g = Y_new, f_new, g_new
        history.append(f)
    return Y, f, it, history


def _singular_residuals(frame: _Frame, Y: np.ndarray, with_jacobian: bool):
    """Residuals ``sigma_i(J(Z_n)) - s_i`` against the sorted target magnitudes, and their Jacobian in ``Y``."""
    J = np.einsum("na,aij->nij", frame.Z, frame.basis(Y))
    s_target = frame.magnitudes
    if not with_jacobian:
        sv = np.linalg.svd(J, compute_uv=False)
        return (sv - s_target).ravel(), None
    U, sv, Vt = np.linalg.svd(J)
    r = (sv - s_target).ravel()
    q = frame.q
    i, j = _upper(q)
    # d sigma_m = u_m^T dJ v_m; in so(q) coordinates that is (u_i v_j - u_j v_i) / sqrt(2)
    outer = np.einsum("nkm,nml->nmkl", U, Vt)
    coord = (outer[..., i, j] - outer[..., j, i]) / math.sqrt(2.0)
    jac = frame.scale * np.einsum("na,nmd->nmad", frame.Z, coord)
    return r, jac.reshape(r.size, -1)


def _polish(frame: _Frame, Y: np.ndarray, iters: int = 60):
    """Gauss-Newton on singular-value residuals.

    Power sums fix repeated eigenvalues only to the square root of their
    residual; singular values are Lipschitz in the matrix, so this stage
    drives the frame itself to machine precision.
    """
    r, jac = _singular_residuals(frame, Y, True)
    cost = float(r @ r)
    for _ in range(iters):
        step = np.linalg.lstsq(jac, -r, rcond=None)[0].reshape(Y.shape)
        step = _tangent(Y, step)
        t, improved = 1.0, False
        while t > 1e-6:
            Y_new = _retract(Y + t * step)
            r_new, _ = _singular_residuals(frame, Y_new, False)
            c_new = float(r_new @ r_new)
            if c_new < cost:
                improved = True
                break
            t *= 0.5
        if not improved:
            break
        Y = Y_new
        r, jac = _singular_residuals(frame, Y, True)
        cost = float(r @ r)
    return Y


def _start_frame(problem: SearchProblem, index: int) -> np.ndarray:
    rng = np.random.default_rng([problem.seed, index])
    return _retract(rng.standard_normal((problem.p, so_dim(problem.q))))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HLIE_THREADS", "1")))
    except ValueError:
        return 1


def _rational_candidate(basis: np.ndarray):
    """Round to small-denominator rationals; None unless the rounding is exact to machine precision."""
    out = np.empty(basis.shape, dtype=object)
    for idx, v in np.ndenumerate(basis):
        r = Fraction(float(v)).limit_denominator(RATIONAL_DENOMINATOR)
        if abs(float(r) - v) > 1e-12 * max(1.0, abs(v)):
            return None
        out[idx] = r
    return out


def verify_basis(basis: np.ndarray, target: AdmissibleMultiset, seed: int = 0) -> dict:
    """Independent check of a candidate: sampled cone test, escalated to exact when rational."""
    info = {"mode": None, "in_cone": False}
    try:
        check = subspace_in_cone(basis, target, Mode.SAMPLED, VERIFY_TOL, seed=seed + 1)
    except ValueError as exc:
        info["error"] = str(exc)
        return info
    info.update(mode=Mode.SAMPLED.value, in_cone=bool(check.in_cone))
    if check.spectrum is not None:
        info["spectrum"] = check.spectrum.to_json()
    if check.in_cone:
        exact = _rational_candidate(basis)
        if exact is not None and rat.all_exact(exact):
            try:
                ex = subspace_in_cone(exact, target, Mode.EXACT, VERIFY_TOL)
            except ValueError as exc:
                info["exact_error"] = str(exc)
            else:
                info.update(mode=ex.mode.value, in_cone=bool(ex.in_cone))
    return info


def run_search(problem: SearchProblem) -> SearchResult:
    """Multi-start Riemannian descent; the best start is handed to an independent verifier.

    Starts run in chunks of fixed size and the search stops after the first
    chunk that reaches ``tol_objective``, so the result does not depend on
    ``HLIE_THREADS``.
    """
    q, p = problem.q, problem.p
    d = so_dim(q)
    if d < p:
        return SearchResult(
            np.zeros((0, q, q)),
            math.inf,
            False,
            [{"reason": f"so({q}) has dimension {d} < p = {p}"}],
        )
    directions = sphere_directions(p, problem.n_samples, problem.seed)
    frame = _Frame(problem, directions)

    def run(index):
        Y, f, iters, history = _optimise(frame, _start_frame(problem, index), problem)
        return index, Y, f, iters, history

    results = []
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        for begin in range(0, problem.n_starts, START_CHUNK):
            chunk = range(begin, min(begin + START_CHUNK, problem.n_starts))
            results.extend(pool.map(run, chunk))
            if any(r[2] <= problem.tol_objective for r in results):
                break

    best = min(results, key=lambda r: (r[2], r[0]))
    trace = [{"start": r[0], "iterations": r[3], "objective": r[2]} for r in results]
    Y = best[1]
    f = best[2]
    if f <= POLISH_THRESHOLD:
        Y_polished = _polish(frame, Y)
        f_polished = frame.value(Y_polished)
        if f_polished <= f:
            Y, f = Y_polished, f_polished
    trace.append(
        {
            "best_start": best[0],
            "history": best[4][:: max(1, len(best[4]) // 50)],
            "after_polish": f,
        }
    )
    basis = frame.basis(Y)
    info = verify_basis(basis, problem.target, problem.seed)
    verified = bool(f <= problem.tol_objective and info["in_cone"])
    return SearchResult(basis, float(f), verified, trace, info)


def standard_algebra(result: SearchResult):
    """Standard algebra of the span of a search result."""
    if result.basis.shape[0] == 0:
        raise ValueError("search result has no basis")
    return standard_from_subspace(result.basis)
