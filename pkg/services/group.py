"""
Group realizations - SL(3,ℝ) and SO(2,n)

Key responsibilities:
- Build GroupSpec with the invariant form J, wall exponents and root data
- Membership tests
- Exact Cartan projection from singular values, approximate one from norms
- Weyl-chamber geometry: folding, opposition involution, slopes, wall distances
- Random elements of the maximal compact subgroup K
"""

import logging
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from models.group import ChamberPoint, GroupKind, GroupSpec, Root, RootData
from services.errors import NotInGroupError
from services.linalg import expm, max_abs_norm, singular_values, wedge_square

logger = logging.getLogger(__name__)


def _sl3_roots() -> RootData:
    return RootData(positive=[
        Root(name="alpha", simple_coeffs=(1, 0), functional=(1.0, -1.0, 0.0), start=3, stop=4),
        Root(name="beta", simple_coeffs=(0, 1), functional=(0.0, 1.0, -1.0), start=4, stop=5),
        Root(name="alpha+beta", simple_coeffs=(1, 1), functional=(1.0, 0.0, -1.0), start=5, stop=6),
    ])


def _so2n_roots(n: int) -> RootData:
    m = n - 2
    return RootData(positive=[
        Root(name="alpha", simple_coeffs=(1, 0), functional=(1.0, -1.0), start=2, stop=3),
        Root(name="beta", simple_coeffs=(0, 1), functional=(0.0, 1.0), start=3 + m, stop=3 + 2 * m),
        Root(name="alpha+beta", simple_coeffs=(1, 1), functional=(1.0, 0.0), start=3, stop=3 + m),
        Root(name="alpha+2beta", simple_coeffs=(1, 2), functional=(1.0, 1.0), start=3 + 2 * m, stop=4 + 2 * m),
    ])


def so2n_form(n: int) -> np.ndarray:
    """J with vᵀJv = v₁v_{n+2} + v₂v_{n+1} + ½Σ vᵢ²

    The middle weight matches the cross weight so that every element of 𝔞+𝔫 in the
    standard coordinates is J-skew.
    """
    d = n + 2
    J = np.zeros((d, d))
    J[0, d - 1] = J[d - 1, 0] = 0.5
    J[1, d - 2] = J[d - 2, 1] = 0.5
    for i in range(2, n):
        J[i, i] = 0.5
    return J


def make_group(kind: GroupKind, n: Optional[int] = None) -> GroupSpec:
    """Construct the GroupSpec for SL(3,ℝ) or SO(2,n), n >= 3"""
    if kind == "SL3":
        return GroupSpec(
            kind="SL3", n=None, d=3, form=None,
            k1=Fraction(1, 2), k2=Fraction(2), roots=_sl3_roots(),
        )
    if kind == "SO2n":
        if n is None or n < 3:
            raise ValueError(f"SO(2,n) requires n >= 3, got {n}")
        return GroupSpec(
            kind="SO2n", n=n, d=n + 2, form=so2n_form(n).tolist(),
            k1=Fraction(1), k2=Fraction(2), roots=_so2n_roots(n),
        )
    raise ValueError(f"Unknown group kind: {kind}")


def _check_shape(spec: GroupSpec, g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.shape != (spec.d, spec.d):
        raise ValueError(f"Expected a {spec.d}x{spec.d} matrix for {spec.label}, got {g.shape}")
    return g


def form_residual(spec: GroupSpec, g: np.ndarray) -> float:
    """max |gᵀJg − J| (SO2n) or |det g − 1| (SL3)"""
    g = _check_shape(spec, g)
    if spec.kind == "SL3":
        return abs(float(np.linalg.det(g)) - 1.0)
    J = spec.J
    return max_abs_norm(g.T @ J @ g - J)


def is_member(spec: GroupSpec, g: np.ndarray, tol: float = 1e-9) -> bool:
    g = _check_shape(spec, g)
    if spec.kind == "SL3":
        return abs(float(np.linalg.det(g)) - 1.0) <= tol
    scale = max(1.0, max_abs_norm(g)) ** 2
    if form_residual(spec, g) > tol * scale:
        return False
    return abs(float(np.linalg.det(g)) - 1.0) <= tol * scale


def weyl_fold(spec: GroupSpec, coords: np.ndarray) -> Tuple[np.ndarray, bool]:
    """Weyl representative in the closed chamber, and whether a reflection was needed"""
    coords = np.asarray(coords, dtype=float)
    if spec.kind == "SL3":
        folded = np.sort(coords)[::-1]
    else:
        folded = np.sort(np.abs(coords))[::-1]
    moved = not np.allclose(folded, coords, atol=1e-12)
    return folded, moved


def chamber_point(spec: GroupSpec, coords: np.ndarray) -> ChamberPoint:
    folded, _ = weyl_fold(spec, coords)
    return ChamberPoint(kind=spec.kind, coords=[float(c) for c in folded])


def cartan_projection_exact(spec: GroupSpec, g: np.ndarray, pair_tol: float = 1e-6) -> ChamberPoint:
    """μ(g) from singular values (K is orthogonal in both realizations)"""
    g = _check_shape(spec, g)
    sigma = singular_values(g)
    if sigma[-1] <= 0.0:
        raise NotInGroupError("Singular matrix is not a group element", {"sigma_min": float(sigma[-1])})
    logs = np.log(sigma)

    if spec.kind == "SL3":
        if abs(logs.sum()) > pair_tol * max(1.0, float(np.abs(logs).max())):
            raise NotInGroupError("Singular values do not multiply to 1", {"log_det": float(logs.sum())})
        return ChamberPoint(kind="SL3", coords=[float(v) for v in logs])

    # reciprocal pairing is resolvable only while σ_d is above σ₁·eps
    resolvable = logs[0] - logs[-1] < 30.0
    if resolvable:
        defect = float(np.max(np.abs(logs + logs[::-1])))
        if defect > pair_tol * max(1.0, float(logs[0])):
            raise NotInGroupError(
                "Singular values are not reciprocally paired",
                {"pairing_defect": defect, "form_residual": form_residual(spec, g)},
            )
    else:
        logger.debug(f"Skipping reciprocal-pairing check, log condition {logs[0] - logs[-1]:.1f}")
    return ChamberPoint(kind="SO2n", coords=[float(logs[0]), float(max(logs[1], 0.0))])


def cartan_projection_approx(spec: GroupSpec, g: np.ndarray) -> Tuple[float, float]:
    """(N₁, N₂) = (‖g‖, ‖∧²g‖) in the max-entry norm"""
    g = _check_shape(spec, g)
    return max_abs_norm(g), max_abs_norm(wedge_square(g))


def opposition_involution(spec: GroupSpec, point: ChamberPoint) -> ChamberPoint:
    """i(μ(g)) = μ(g⁻¹): reversal and negation for SL3, identity for SO2n"""
    if spec.kind == "SL3":
        l1, l2, l3 = point.coords
        return ChamberPoint(kind="SL3", coords=[-l3, -l2, -l1])
    return ChamberPoint(kind=point.kind, coords=list(point.coords))


def chamber_slope(spec: GroupSpec, coords: np.ndarray) -> float:
    """χ₂/χ₁ of a chamber vector (folded first); lies in [k₁, k₂]"""
    folded, _ = weyl_fold(spec, coords)
    chi1 = folded[0]
    if chi1 <= 0.0:
        raise ValueError("Slope is undefined at the origin of the chamber")
    return float((folded[0] + folded[1]) / chi1)


def wall_distances(spec: GroupSpec, point: ChamberPoint) -> Tuple[float, float]:
    """Euclidean distance to the wall χ₂ = k₁χ₁ and to the wall χ₂ = k₂χ₁"""
    c = point.coords
    if spec.kind == "SL3":
        # walls λ2 = λ3 and λ1 = λ2
        return abs(c[1] - c[2]) / np.sqrt(2.0), abs(c[0] - c[1]) / np.sqrt(2.0)
    # walls λ2 = 0 and λ1 = λ2
    return abs(c[1]), abs(c[0] - c[1]) / np.sqrt(2.0)


def compact_algebra_basis(spec: GroupSpec) -> np.ndarray:
    """Basis of 𝔨 as an array of shape (dim 𝔨, d, d)"""
    d = spec.d
    skew = []
    for i in range(d):
        for j in range(i + 1, d):
            E = np.zeros((d, d))
            E[i, j], E[j, i] = 1.0, -1.0
            skew.append(E)
    skew = np.array(skew)
    if spec.kind == "SL3":
        return skew

    # skew matrices X with XᵀJ + JX = 0
    J = spec.J
    constraints = np.array([(X.T @ J + J @ X).ravel() for X in skew]).T
    coeffs = scipy.linalg.null_space(constraints)
    return np.einsum("kc,kij->cij", coeffs, skew)


def sample_compact(spec: GroupSpec, seed: Optional[int] = None, scale: float = np.pi) -> np.ndarray:
    """exp(X) for a random X in 𝔨; orthogonal and a group member"""
    rng = np.random.default_rng(seed)
    basis = compact_algebra_basis(spec)
    coeffs = rng.uniform(-scale, scale, size=basis.shape[0])
    X = np.einsum("c,cij->ij", coeffs, basis)
    return expm(X)


def standard_anchor(spec: GroupSpec) -> np.ndarray:
    """The vector (0,1,0,…,0,−1,0) whose stabilizer is SO(1,n)"""
    if spec.kind != "SO2n":
        raise ValueError("The SO(1,n) anchor exists only for SO(2,n)")
    w = np.zeros(spec.d)
    w[1], w[spec.d - 2] = 1.0, -1.0
    return w


def diagonal_element(spec: GroupSpec, log_coords: List[float]) -> np.ndarray:
    """exp of a toral element given in chamber log coordinates"""
    if spec.kind == "SL3":
        return np.diag(np.exp(log_coords))
    l1, l2 = log_coords
    diag = np.ones(spec.d)
    diag[0], diag[1], diag[-2], diag[-1] = np.exp(l1), np.exp(l2), np.exp(-l2), np.exp(-l1)
    return np.diag(diag)
