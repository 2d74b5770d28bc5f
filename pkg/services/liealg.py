"""
Coordinate model of 𝔞+𝔫

Key responsibilities:
- Flat coordinates <-> named CoordVec models <-> matrices
- Brackets, subalgebra validation and Lie closure
- Closed-form exponential on 𝔫 for SO(2,n)
- Group elements of H as products of basis exponentials (with their ∧² images)
- h∩𝔞, h∩𝔫, toral projection, weight projections and the compatibility test
- Ad(g) on subalgebras
"""

import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from models.algebra import CoordVec, SL3Coord, SO2nCoord, Subalgebra, SubalgebraCheck
from models.group import GroupSpec
from services.errors import NotASubalgebraError, ScaleOverflowError
from services.linalg import (
    expm,
    max_abs_norm,
    null_rows,
    orthonormal_rows,
    project_onto_rows,
    rank,
    wedge_derivation,
)

logger = logging.getLogger(__name__)

VectorLike = Union[np.ndarray, Sequence[float], SL3Coord, SO2nCoord]


# === Coordinates ===

def as_array(spec: GroupSpec, v: VectorLike) -> np.ndarray:
    """Flat coordinate vector of length spec.coord_dim"""
    if isinstance(v, (SL3Coord, SO2nCoord)):
        arr = v.to_array()
    else:
        arr = np.asarray(v, dtype=float)
    if arr.shape != (spec.coord_dim,):
        raise ValueError(f"Expected {spec.coord_dim} coordinates for {spec.label}, got shape {arr.shape}")
    return arr


def as_rows(spec: GroupSpec, vectors: Union[Subalgebra, Sequence[VectorLike], np.ndarray]) -> np.ndarray:
    """Basis as an (m, coord_dim) array"""
    if isinstance(vectors, Subalgebra):
        return vectors.matrix()
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        if vectors.shape[1] != spec.coord_dim:
            raise ValueError(f"Expected rows of length {spec.coord_dim}, got {vectors.shape}")
        return vectors.astype(float)
    rows = [as_array(spec, v) for v in vectors]
    return np.array(rows).reshape(len(rows), spec.coord_dim)


def array_to_coord(spec: GroupSpec, arr: np.ndarray) -> CoordVec:
    arr = as_array(spec, arr)
    if spec.kind == "SL3":
        d = [float(v) for v in arr[:3]]
        # drop round-off in the trace
        shift = sum(d) / 3.0
        return SL3Coord(d=[v - shift for v in d], u=[float(v) for v in arr[3:]])
    m = spec.n - 2
    return SO2nCoord(
        t1=float(arr[0]), t2=float(arr[1]), phi=float(arr[2]),
        x=[float(v) for v in arr[3:3 + m]],
        y=[float(v) for v in arr[3 + m:3 + 2 * m]],
        eta=float(arr[-1]),
    )


def to_subalgebra(spec: GroupSpec, rows: np.ndarray) -> Subalgebra:
    return Subalgebra(spec=spec, basis=[array_to_coord(spec, r) for r in np.atleast_2d(rows)])


def toral_part(spec: GroupSpec, v: np.ndarray) -> np.ndarray:
    return np.asarray(v)[..., :spec.toral_width]


def nilpotent_part(spec: GroupSpec, v: np.ndarray) -> np.ndarray:
    """Copy of v with the toral coordinates zeroed"""
    out = np.array(v, dtype=float)
    out[..., :spec.toral_width] = 0.0
    return out


def root_vector(spec: GroupSpec, root: str, index: int = 0, scale: float = 1.0) -> np.ndarray:
    """Unit generator of 𝔲_root (the index-th coordinate of the root space)"""
    r = spec.roots.by_name(root)
    if not 0 <= index < r.width:
        raise ValueError(f"Root space {root} has dimension {r.width}, index {index} out of range")
    v = np.zeros(spec.coord_dim)
    v[r.start + index] = scale
    return v


def toral_vector(spec: GroupSpec, toral: Sequence[float]) -> np.ndarray:
    toral = np.asarray(toral, dtype=float)
    if toral.shape != (spec.toral_width,):
        raise ValueError(f"Expected {spec.toral_width} toral coordinates, got {toral.shape}")
    if spec.kind == "SL3" and abs(toral.sum()) > 1e-12 * max(1.0, float(np.abs(toral).max())):
        raise ValueError("SL3 toral part must be traceless")
    v = np.zeros(spec.coord_dim)
    v[:spec.toral_width] = toral
    return v


# === Matrices ===

def coord_to_matrix(spec: GroupSpec, v: VectorLike) -> np.ndarray:
    """The matrix of a coordinate vector in 𝔰𝔩(3,ℝ) or 𝔰𝔬(2,n)"""
    v = as_array(spec, v)
    if spec.kind == "SL3":
        M = np.diag(v[:3])
        M[0, 1], M[1, 2], M[0, 2] = v[3], v[4], v[5]
        return M

    n, m = spec.n, spec.n - 2
    t1, t2, phi = v[0], v[1], v[2]
    x, y, eta = v[3:3 + m], v[3 + m:3 + 2 * m], v[-1]
    M = np.zeros((n + 2, n + 2))
    M[0, 0], M[1, 1], M[n, n], M[n + 1, n + 1] = t1, t2, -t2, -t1
    M[0, 1], M[n, n + 1] = phi, -phi
    M[0, 2:n], M[2:n, n + 1] = x, -x
    M[1, 2:n], M[2:n, n] = y, -y
    M[0, n], M[1, n + 1] = eta, -eta
    return M


def matrix_to_coord(spec: GroupSpec, M: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Inverse of coord_to_matrix; rejects matrices outside 𝔞+𝔫"""
    M = np.asarray(M, dtype=float)
    if M.shape != (spec.d, spec.d):
        raise ValueError(f"Expected a {spec.d}x{spec.d} matrix, got {M.shape}")
    if spec.kind == "SL3":
        d = np.diag(M).copy()
        v = np.array([*d, M[0, 1], M[1, 2], M[0, 2]])
    else:
        n = spec.n
        v = np.concatenate([[M[0, 0], M[1, 1], M[0, 1]], M[0, 2:n], M[1, 2:n], [M[0, n]]])
    residual = max_abs_norm(M - coord_to_matrix(spec, v))
    if residual > tol * max(1.0, max_abs_norm(M)):
        raise ValueError(f"Matrix is not in 𝔞+𝔫 of {spec.label} (residual {residual:.3e})")
    return v


def bracket(spec: GroupSpec, u: VectorLike, v: VectorLike) -> np.ndarray:
    """Coordinates of [U, V] = UV − VU"""
    U, V = coord_to_matrix(spec, u), coord_to_matrix(spec, v)
    return matrix_to_coord(spec, U @ V - V @ U)


def exp_n_closed(spec: GroupSpec, phi: float, x: Sequence[float], y: Sequence[float], eta: float) -> np.ndarray:
    """exp of the nilpotent element (φ, x, y, η) of 𝔰𝔬(2,n), entry by entry"""
    if spec.kind != "SO2n":
        raise ValueError("exp_n_closed is defined for SO(2,n) only")
    n = spec.n
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != (n - 2,) or y.shape != (n - 2,):
        raise ValueError(f"x and y must have length {n - 2}")
    xy, xx, yy = float(x @ y), float(x @ x), float(y @ y)

    g = np.eye(n + 2)
    g[0, 1] = phi
    g[0, 2:n] = x + 0.5 * phi * y
    g[0, n] = eta - 0.5 * xy - phi * yy / 6.0
    g[0, n + 1] = -phi * eta - 0.5 * xx + phi * phi * yy / 24.0
    g[1, 2:n] = y
    g[1, n] = -0.5 * yy
    g[1, n + 1] = -eta - 0.5 * xy + phi * yy / 6.0
    g[2:n, n] = -y
    g[2:n, n + 1] = -x + 0.5 * phi * y
    g[n, n + 1] = -phi
    return g


class SampledElement(NamedTuple):
    """h and ∧²h, each with the entrywise product of the absolute values of its factors"""
    g: np.ndarray
    wedge: np.ndarray
    g_bound: np.ndarray
    wedge_bound: np.ndarray


def group_sample_bounded(spec: GroupSpec, basis: np.ndarray, coefficients: Sequence[float]) -> SampledElement:
    """(h, ∧²h) for h = exp(c₁b₁)·…·exp(c_m b_m), with the majorants |F₁|·…·|F_m|

    ∧²h is built from exponentials of derivations, so no minors of large entries are formed.
    The majorants bound every partial sum formed in the products; log max(majorant) − log σ
    is the number of digits (base e) lost to cancellation.
    """
    basis = as_rows(spec, basis)
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape != (basis.shape[0],):
        raise ValueError(f"Expected {basis.shape[0]} coefficients, got {coefficients.shape}")
    g, g_bound = np.eye(spec.d), np.eye(spec.d)
    wedge, wedge_bound = np.eye(spec.wedge_dim), np.eye(spec.wedge_dim)
    for c, b in zip(coefficients, basis):
        if c == 0.0:
            continue
        M = coord_to_matrix(spec, b)
        factor = expm(c * M)
        wedge_factor = expm(c * wedge_derivation(M))
        g, g_bound = g @ factor, g_bound @ np.abs(factor)
        wedge, wedge_bound = wedge @ wedge_factor, wedge_bound @ np.abs(wedge_factor)
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(wedge))):
        raise ScaleOverflowError("Group element overflowed", {"coefficients": coefficients.tolist()})
    return SampledElement(g, wedge, g_bound, wedge_bound)


def group_sample_pair(
    spec: GroupSpec, basis: np.ndarray, coefficients: Sequence[float]
) -> Tuple[np.ndarray, np.ndarray]:
    """(h, ∧²h) for h = exp(c₁b₁)·…·exp(c_m b_m)"""
    element = group_sample_bounded(spec, basis, coefficients)
    return element.g, element.wedge


def group_sample_element(spec: GroupSpec, basis: np.ndarray, coefficients: Sequence[float]) -> np.ndarray:
    """exp(c₁b₁)·…·exp(c_m b_m); a member of both G and H"""
    basis = as_rows(spec, basis)
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape != (basis.shape[0],):
        raise ValueError(f"Expected {basis.shape[0]} coefficients, got {coefficients.shape}")
    g = np.eye(spec.d)
    for c, b in zip(coefficients, basis):
        if c != 0.0:
            g = g @ expm(c * coord_to_matrix(spec, b))
    if not np.all(np.isfinite(g)):
        raise ScaleOverflowError("Group element overflowed", {"coefficients": coefficients.tolist()})
    return g


# === Subalgebras ===

def span_residual(vector: np.ndarray, basis_rows: np.ndarray) -> float:
    """Distance from vector to the span of orthonormal rows"""
    return float(np.linalg.norm(vector - project_onto_rows(vector, basis_rows)))


def check_subalgebra(spec: GroupSpec, basis: Union[Subalgebra, Sequence[VectorLike], np.ndarray]) -> SubalgebraCheck:
    rows = as_rows(spec, basis)
    if rows.shape[0] == 0:
        raise ValueError("Subalgebra basis must be nonempty")
    if rank(rows) < rows.shape[0]:
        return SubalgebraCheck(ok=False, reason="dependent")

    span = orthonormal_rows(rows)
    worst = 0.0
    for i in range(rows.shape[0]):
        for j in range(i + 1, rows.shape[0]):
            br = bracket(spec, rows[i], rows[j])
            scale = max(1.0, float(np.linalg.norm(rows[i]) * np.linalg.norm(rows[j])))
            residual = span_residual(br, span) / scale
            if residual > 1e-9:
                return SubalgebraCheck(ok=False, reason="not_closed", pair=(i, j), residual=residual)
            worst = max(worst, residual)
    return SubalgebraCheck(ok=True, residual=worst)


def require_subalgebra(spec: GroupSpec, basis: Union[Subalgebra, Sequence[VectorLike], np.ndarray]) -> np.ndarray:
    """Basis rows, or NotASubalgebraError carrying the failure witness"""
    rows = as_rows(spec, basis)
    check = check_subalgebra(spec, rows)
    if not check.ok:
        raise NotASubalgebraError(
            f"Basis is not a subalgebra of {spec.label}: {check.reason}",
            check.model_dump(),
        )
    return rows


def is_abelian(spec: GroupSpec, rows: np.ndarray, tol: float = 1e-9) -> bool:
    for i in range(rows.shape[0]):
        for j in range(i + 1, rows.shape[0]):
            scale = max(1.0, float(np.linalg.norm(rows[i]) * np.linalg.norm(rows[j])))
            if np.linalg.norm(bracket(spec, rows[i], rows[j])) > tol * scale:
                return False
    return True


def subalgebra_closure(spec: GroupSpec, vectors: Union[Sequence[VectorLike], np.ndarray]) -> np.ndarray:
    """Orthonormal basis of the Lie subalgebra generated by `vectors`"""
    span = orthonormal_rows(as_rows(spec, vectors))
    if span.shape[0] == 0:
        raise ValueError("Cannot close an empty generating set")
    for _ in range(spec.coord_dim):
        new = [
            bracket(spec, span[i], span[j])
            for i in range(span.shape[0]) for j in range(i + 1, span.shape[0])
        ]
        new = [b for b in new if span_residual(b, span) > 1e-10 * max(1.0, float(np.linalg.norm(b)))]
        if not new:
            return span
        span = orthonormal_rows(np.vstack([span, *new]))
    return span


def adjoint_conjugate(spec: GroupSpec, basis: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Rows of Ad(g)h = {gXg⁻¹}; g must keep h inside 𝔞+𝔫"""
    rows = as_rows(spec, basis)
    g = np.asarray(g, dtype=float)
    out = []
    for r in rows:
        gM = g @ coord_to_matrix(spec, r)
        # gMg⁻¹ = (g⁻ᵀ (gM)ᵀ)ᵀ
        conj = np.linalg.solve(g.T, gM.T).T
        out.append(matrix_to_coord(spec, conj, tol=1e-8))
    return np.array(out)


# === Parts, weights, compatibility ===

class Parts(NamedTuple):
    """h∩𝔞, h∩𝔫 (orthonormal rows, full coordinates) and T (orthonormal rows, toral coordinates)"""
    cap_a: np.ndarray
    cap_n: np.ndarray
    torus: np.ndarray


def decompose_parts(spec: GroupSpec, basis: np.ndarray) -> Parts:
    rows = as_rows(spec, basis)
    tw = spec.toral_width
    toral, nil = rows[:, :tw], rows[:, tw:]
    cap_a = orthonormal_rows(null_rows(nil) @ rows)
    cap_n = orthonormal_rows(null_rows(toral) @ rows)
    return Parts(cap_a, cap_n, orthonormal_rows(toral))


def weight_project(spec: GroupSpec, basis: np.ndarray, root: Optional[str]) -> np.ndarray:
    """Orthonormal rows of π_ω(h); root=None projects onto 𝔞"""
    rows = as_rows(spec, basis)
    projected = np.zeros_like(rows)
    if root is None:
        projected[:, :spec.toral_width] = rows[:, :spec.toral_width]
    else:
        r = spec.roots.by_name(root)
        projected[:, r.start:r.stop] = rows[:, r.start:r.stop]
    return orthonormal_rows(projected)


def is_a_normalized(spec: GroupSpec, basis: np.ndarray, tol: float = 1e-9) -> bool:
    """π_ω(h) ⊆ h for every weight ω (0 and each positive root)"""
    rows = as_rows(spec, basis)
    span = orthonormal_rows(rows)
    for root in [None, *[r.name for r in spec.roots.positive]]:
        for v in weight_project(spec, rows, root):
            if span_residual(v, span) > tol:
                return False
    return True


def centralized_roots(spec: GroupSpec, torus: np.ndarray, tol: float = 1e-10) -> List[str]:
    """Positive roots vanishing on every row of T, i.e. the weights of 𝔠_𝔫(T)"""
    return [
        r.name for r in spec.roots.positive
        if all(abs(r.evaluate(t)) <= tol * max(1.0, float(np.linalg.norm(t))) for t in torus)
    ]


def root_space_rows(spec: GroupSpec, roots: Sequence[str]) -> np.ndarray:
    """Coordinate basis of ⊕ 𝔲_ω over the given roots"""
    rows = []
    for name in roots:
        r = spec.roots.by_name(name)
        for k in range(r.width):
            rows.append(root_vector(spec, name, k))
    return np.array(rows).reshape(len(rows), spec.coord_dim)


class CompatibilityCheck(NamedTuple):
    ok: bool
    defect: float  # largest distance of a nilpotent part from U + 𝔠_𝔫(T)
    residuals: np.ndarray  # per basis vector
    span: np.ndarray  # basis of U + 𝔠_𝔫(T): orthonormal rows of U, then root vectors of 𝔠_𝔫(T) outside U
    coefficients: np.ndarray  # nilpotent part of basis vector i ≈ coefficients[i] @ span


def is_compatible(spec: GroupSpec, basis: np.ndarray, tol: float = 1e-9) -> CompatibilityCheck:
    """h ⊆ T + U + 𝔠_𝔫(T): every nilpotent part lies in U + 𝔠_𝔫(T)

    The certificate is the decomposition of each nilpotent part in a basis of U + 𝔠_𝔫(T).
    """
    rows = as_rows(spec, basis)
    parts = decompose_parts(spec, rows)
    span_rows = list(parts.cap_n)
    for v in root_space_rows(spec, centralized_roots(spec, parts.torus)):
        if not span_rows or span_residual(v, orthonormal_rows(np.array(span_rows))) > tol:
            span_rows.append(v)
    span = np.array(span_rows).reshape(len(span_rows), spec.coord_dim)

    nil = np.array([nilpotent_part(spec, r) for r in rows])
    if span.shape[0]:
        coefficients = np.linalg.lstsq(span.T, nil.T, rcond=None)[0].T
    else:
        coefficients = np.zeros((rows.shape[0], 0))
    residuals = np.linalg.norm(nil - coefficients @ span, axis=1)
    defect = float(residuals.max()) if residuals.size else 0.0
    scale = max(1.0, float(np.abs(rows).max()))
    return CompatibilityCheck(defect <= tol * scale, defect, residuals, span, coefficients)
