"""
Cone test for root semidirect products h = 𝔱 ⊕ 𝔲 with 𝔲 ⊆ 𝔲_ω

H is a Cartan-decomposition subgroup iff the ray 𝔱⁺ is not inside the open cone 𝒞
cut out by the roots that do not vanish on 𝔞_ω⁺ (the chamber of 𝔞_ω⁺, doubled across
any wall containing it). Rays on ∂𝒞 count as CDS and are flagged.
"""

import logging
from typing import NamedTuple, Optional

import numpy as np

from models.group import GroupSpec
from models.shapes import ConeRegion
from services.group import chamber_slope, weyl_fold
from services.liealg import as_rows

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-10


class ConeResult(NamedTuple):
    is_cds: bool
    region: ConeRegion
    boundary: bool


def coroot_direction(spec: GroupSpec, root: str) -> np.ndarray:
    """𝔞_ω⁺ = [𝔲_ω, 𝔲_{−ω}] ∩ 𝔞, oriented so that ω is positive on it"""
    return np.array(spec.roots.by_name(root).functional, dtype=float)


def single_root_space(spec: GroupSpec, u_rows: np.ndarray, tol: float = 1e-10) -> Optional[str]:
    """The root ω with 0 ≠ 𝔲 ⊆ 𝔲_ω, if any"""
    u_rows = np.atleast_2d(np.asarray(u_rows, dtype=float))
    if u_rows.shape[0] == 0 or not np.abs(u_rows).max() > 0.0:
        return None
    scale = float(np.abs(u_rows).max())
    for root in spec.roots.positive:
        outside = np.abs(u_rows).copy()
        outside[:, root.start:root.stop] = 0.0
        if outside.max() <= tol * scale:
            return root.name
    return None


def _cone_region(spec: GroupSpec, t: np.ndarray, a: np.ndarray) -> ConeRegion:
    """Cone spanned by t and its mirror across the 𝔞_ω line, folded into A⁺"""
    a_hat = a / np.linalg.norm(a)
    mirror = 2.0 * float(t @ a_hat) * a_hat - t
    slopes, reflected = [], False
    for ray in (t, mirror):
        folded, moved = weyl_fold(spec, ray)
        reflected = reflected or moved
        slopes.append(chamber_slope(spec, folded))
    return ConeRegion(slope_low=min(slopes), slope_high=max(slopes), reflected=reflected)


def cone_test(spec: GroupSpec, t_rows: np.ndarray, u_rows: np.ndarray) -> ConeResult:
    """Decide CDS for 𝔱 ⊕ 𝔲, 𝔱 ⊆ 𝔞 one-dimensional and 0 ≠ 𝔲 ⊆ 𝔲_ω"""
    t_rows = np.atleast_2d(np.asarray(t_rows, dtype=float))
    if t_rows.shape[0] != 1:
        raise ValueError(f"Cone test needs a one-dimensional 𝔱, got dimension {t_rows.shape[0]}")
    t = t_rows[0, :spec.toral_width] if t_rows.shape[1] != spec.toral_width else t_rows[0]
    if not np.linalg.norm(t) > 0.0:
        raise ValueError("Cone test needs a nonzero toral generator")
    root = single_root_space(spec, as_rows(spec, u_rows))
    if root is None:
        raise ValueError("Cone test needs 𝔲 inside a single root space")

    a = coroot_direction(spec, root)
    # trace-form pairing is a positive multiple of the dot product on 𝔞
    if float(t @ a) < 0.0:
        t = -t
    t_unit = t / np.linalg.norm(t)

    interior, closed, touching = True, True, False
    for gamma in spec.roots.positive:
        ga = gamma.evaluate(a)
        if ga == 0.0:
            continue
        gt = gamma.evaluate(t_unit) * np.sign(ga)
        if gt <= BOUNDARY_TOL:
            interior = False
        if gt < -BOUNDARY_TOL:
            closed = False
        if abs(gt) <= BOUNDARY_TOL:
            touching = True

    boundary = (not interior) and closed and touching
    region = _cone_region(spec, t_unit, a)
    logger.debug(f"Cone test over {root}: interior={interior}, boundary={boundary}")
    return ConeResult(is_cds=not interior, region=region, boundary=boundary)


def sl3_rootsemi_condition(p: float, q: float) -> bool:
    """CDS test for ℝ·diag(p, q, −p−q) ⊕ 𝔲_α in SL(3,ℝ)"""
    if p == 0.0 and q == 0.0:
        raise ValueError("(p, q) must be nonzero")
    return p + q <= -max(p, q) or p + q >= -min(p, q)
