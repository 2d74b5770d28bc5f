"""
Existential coordinate conditions on subalgebras h ⊆ 𝔫 of 𝔰𝔬(2,n)

For v ∈ h write r₁(v) = (φ, x) and r₂(v) = (0, y), the two rows of a 2×(n−1) matrix.

Key responsibilities:
- E1: some v with φ ≠ 0 and y ≠ 0
- E2: some v ≠ 0 with r₁, r₂ spanning exactly a line (matrix pencil φ = 0, x = λy)
- E3: some v with r₁, r₂ independent (polarization of the 2×2 minors)
- E4: some v ≠ 0 in h ∩ {y = 0} isotropic for Q = ‖x‖² + 2φη (Gram signature)

Every witness is returned as a flat coordinate vector and has been re-verified.
"""

import logging
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg

from models.group import GroupSpec
from models.shapes import Certainty
from services.linalg import null_rows, orthonormal_rows
from services.liealg import as_rows, root_vector, span_residual

logger = logging.getLogger(__name__)

WITNESS_TOL = 1e-9


class E2Result(NamedTuple):
    witness: Optional[np.ndarray]
    certainty: Certainty


def _require_so2n(spec: GroupSpec) -> None:
    if spec.kind != "SO2n":
        raise ValueError("Existential conditions are defined for SO(2,n) only")


def pair_rows(spec: GroupSpec, v: np.ndarray) -> np.ndarray:
    """The 2×(n−1) matrix [[φ, x], [0, y]] of v"""
    m = spec.n - 2
    top = np.concatenate([[v[2]], v[3:3 + m]])
    bottom = np.concatenate([[0.0], v[3 + m:3 + 2 * m]])
    return np.vstack([top, bottom])


def pair_rank(spec: GroupSpec, v: np.ndarray, tol: float = WITNESS_TOL) -> int:
    pair = pair_rows(spec, v)
    scale = max(1.0, float(np.abs(pair).max()))
    sigma = scipy.linalg.svdvals(pair)
    return int(np.sum(sigma > tol * scale))


def quadric_value(spec: GroupSpec, v: np.ndarray) -> float:
    """Q(v) = ‖x‖² + 2φη"""
    m = spec.n - 2
    x = v[3:3 + m]
    return float(x @ x + 2.0 * v[2] * v[-1])


def _pencil(spec: GroupSpec, rows: np.ndarray):
    """A = [φ; xᵀ], B = [0; yᵀ] as (n−1)×dim matrices acting on coefficient vectors"""
    m = spec.n - 2
    A = np.vstack([rows[:, 2][None, :], rows[:, 3:3 + m].T])
    B = np.vstack([np.zeros((1, rows.shape[0])), rows[:, 3 + m:3 + 2 * m].T])
    return A, B


# === E1, Eta ===

def phi_y_element(spec: GroupSpec, basis: np.ndarray, tol: float = WITNESS_TOL) -> Optional[np.ndarray]:
    """E1 witness: v with φ ≠ 0 and y ≠ 0"""
    _require_so2n(spec)
    rows = as_rows(spec, basis)
    m = spec.n - 2
    phi, y = rows[:, 2], rows[:, 3 + m:3 + 2 * m]
    scale = max(1.0, float(np.abs(rows).max()))
    i_candidates = np.flatnonzero(np.abs(phi) > tol * scale)
    j_candidates = np.flatnonzero(np.abs(y).max(axis=1) > tol * scale)
    if not len(i_candidates) or not len(j_candidates):
        return None
    i, j = int(i_candidates[0]), int(j_candidates[0])
    for t in (0.0, 1.0, 2.0, 3.0):
        v = rows[i] + t * rows[j]
        if abs(v[2]) > tol * scale and np.abs(v[3 + m:3 + 2 * m]).max() > tol * scale:
            return v
    return None


def contains_eta_axis(spec: GroupSpec, basis: np.ndarray, tol: float = WITNESS_TOL) -> bool:
    _require_so2n(spec)
    span = orthonormal_rows(as_rows(spec, basis))
    return span_residual(root_vector(spec, "alpha+2beta"), span) <= tol


# === E2 ===

def _verified_parallel(spec: GroupSpec, v: np.ndarray) -> bool:
    return np.linalg.norm(v) > 0.0 and pair_rank(spec, v) == 1


def parallel_pair_exists(
    spec: GroupSpec, basis: np.ndarray, seed: int = 0, tol: float = 1e-9
) -> E2Result:
    """E2: ∃ v ≠ 0 in h with [[φ, x], [0, y]] of rank exactly 1

    Rank one means (φ, x) = λ(0, y) with y ≠ 0, or y = 0 with (φ, x) ≠ 0 (λ = ∞). After
    removing the η-only directions this is a kernel of the pencil A − λB.
    """
    _require_so2n(spec)
    rows = as_rows(spec, basis)
    A, B = _pencil(spec, rows)

    # drop coefficient directions with (φ, x, y) = 0
    common = null_rows(np.vstack([A, B]).T)
    Q = null_rows(common.T).T  # columns spanning the complement of the η-only kernel
    if Q.shape[1] == 0:
        return E2Result(None, "exact")
    A_r, B_r = A @ Q, B @ Q
    scale = max(1.0, float(np.abs(A_r).max(initial=0.0)), float(np.abs(B_r).max(initial=0.0)))

    def witness_at(matrix: np.ndarray) -> Optional[np.ndarray]:
        kernel = null_rows(matrix.T, tol=tol)
        for a in kernel:
            v = (Q @ a) @ rows
            if _verified_parallel(spec, v):
                return v
        return None

    # λ = ∞: y = 0, (φ, x) ≠ 0
    found = witness_at(B_r)
    if found is not None:
        logger.debug("E2 witness with y = 0")
        return E2Result(found, "exact")

    rng = np.random.default_rng(seed)
    k = Q.shape[1]
    probe = A_r - rng.normal() * B_r
    if np.linalg.matrix_rank(probe, tol=tol * scale) < k:
        # singular pencil: every λ has a kernel
        found = witness_at(probe)
        if found is not None:
            return E2Result(found, "exact")

    R = rng.normal(size=(k, A_r.shape[0]))
    with np.errstate(all="ignore"):
        eigenvalues = scipy.linalg.eig(R @ A_r, R @ B_r, right=False)
    finite = eigenvalues[np.isfinite(eigenvalues)]
    logger.debug(f"E2 pencil candidates: {finite}")
    for lam in finite:
        if abs(lam.imag) > 1e-6 * max(1.0, abs(lam.real)):
            continue
        found = witness_at(A_r - lam.real * B_r)
        if found is not None:
            return E2Result(found, "exact")

    if np.any(np.isnan(eigenvalues)):
        # the projected pencil degenerated; fall back to sampling λ
        for lam in rng.normal(scale=10.0, size=200):
            found = witness_at(A_r - lam * B_r)
            if found is not None:
                return E2Result(found, "exact")
        logger.warning("E2 undecided by the pencil, randomized search found no witness")
        return E2Result(None, "probabilistic")
    return E2Result(None, "exact")


# === E3 ===

def minor_forms(spec: GroupSpec, basis: np.ndarray) -> np.ndarray:
    """Symmetric matrices S_kl with minor_kl(Σaᵢbᵢ) = aᵀ S_kl a, stacked"""
    rows = as_rows(spec, basis)
    A, B = _pencil(spec, rows)
    forms = []
    cols = A.shape[0]
    for k in range(cols):
        for l in range(k + 1, cols):
            bilinear = np.outer(A[k], B[l]) - np.outer(A[l], B[k])
            forms.append(0.5 * (bilinear + bilinear.T))
    return np.array(forms)


def independent_pair_exists(spec: GroupSpec, basis: np.ndarray, tol: float = WITNESS_TOL) -> Optional[np.ndarray]:
    """E3: ∃ v with (φ, x) and (0, y) independent"""
    _require_so2n(spec)
    rows = as_rows(spec, basis)
    forms = minor_forms(spec, rows)
    scale = max(1.0, float(np.abs(rows).max()) ** 2)
    if forms.size == 0 or np.abs(forms).max() <= tol * scale:
        return None
    dim = rows.shape[0]
    candidates = [np.eye(dim)[i] for i in range(dim)]
    candidates += [np.eye(dim)[i] + np.eye(dim)[j] for i in range(dim) for j in range(i + 1, dim)]
    for a in candidates:
        v = a @ rows
        if pair_rank(spec, v) == 2:
            return v
    return None


def wedge_vanishes_identically(spec: GroupSpec, basis: np.ndarray) -> bool:
    """(φ, x) ∥ (0, y) for every element"""
    return independent_pair_exists(spec, basis) is None


# === E4 ===

def quadric_gram(spec: GroupSpec, basis: np.ndarray) -> np.ndarray:
    """Gram matrix of Q = ‖x‖² + 2φη on the basis"""
    rows = as_rows(spec, basis)
    m = spec.n - 2
    phi, x, eta = rows[:, 2], rows[:, 3:3 + m], rows[:, -1]
    return x @ x.T + np.outer(phi, eta) + np.outer(eta, phi)


def y_free_part(spec: GroupSpec, basis: np.ndarray) -> np.ndarray:
    """Rows of h₀ = h ∩ {y = 0}"""
    rows = as_rows(spec, basis)
    m = spec.n - 2
    return null_rows(rows[:, 3 + m:3 + 2 * m]) @ rows


def quadric_isotropy(spec: GroupSpec, h0: np.ndarray, tol: float = WITNESS_TOL) -> Optional[np.ndarray]:
    """Nonzero v ∈ h₀ with Q(v) = 0, or None when Q is definite on h₀"""
    _require_so2n(spec)
    h0 = np.atleast_2d(np.asarray(h0, dtype=float))
    if h0.shape[0] == 0 or h0.shape[1] == 0:
        return None
    gram = quadric_gram(spec, h0)
    eigenvalues, vectors = np.linalg.eigh(gram)
    scale = max(1.0, float(np.abs(gram).max()))
    if np.all(eigenvalues > tol * scale) or np.all(eigenvalues < -tol * scale):
        return None
    small = np.flatnonzero(np.abs(eigenvalues) <= tol * scale)
    if len(small):
        a = vectors[:, small[0]]
    else:
        lo, hi = int(np.argmin(eigenvalues)), int(np.argmax(eigenvalues))
        a = np.sqrt(-eigenvalues[lo]) * vectors[:, hi] + np.sqrt(eigenvalues[hi]) * vectors[:, lo]
    v = a @ h0
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or abs(quadric_value(spec, v)) > 1e-9 * max(1.0, norm ** 2):
        return None
    return v


def quadric_vanishes(spec: GroupSpec, basis: np.ndarray, tol: float = WITNESS_TOL) -> bool:
    """Q ≡ 0 on h, i.e. ‖x‖² = −2φη for every element"""
    gram = quadric_gram(spec, basis)
    return bool(np.abs(gram).max(initial=0.0) <= tol * max(1.0, float(np.abs(as_rows(spec, basis)).max()) ** 2))
