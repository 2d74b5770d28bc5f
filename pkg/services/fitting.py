"""
Growth-exponent fitting on μ-clouds

Key responsibilities:
- Two-wall test: do the top rungs of the rays reach χ₂ = k₁χ₁ and χ₂ = k₂χ₁?
- Band check of a cloud against a predicted μ-shape: band constant C, envelope tracking
  and the margin to every missed wall
- Conjugation stability (bounded offset of μ under conjugation)
- Heuristic properness probe between two clouds
- Agreement report between a verdict and the empirical tests

All fits use exact χ coordinates (log σ₁, log σ₁σ₂); the max-entry norms in the cloud
only serve the norm-sandwich invariant.
"""

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np
import scipy.stats
from scipy.spatial import cKDTree

from models.empirical import FitReport, MuCloud, ProperProbeReport, StabilityReport, VerifyResult, WallHits
from models.group import GroupSpec
from models.shapes import Band, ConeRegion, Curve, FullChamber, GrowthFn, LogCurve, MuShape, Ray, RayPair, Verdict
from services.errors import InsufficientSpanError, ScaleOverflowError
from services.group import chamber_slope
from services.linalg import log_norms, wedge_square
from services.liealg import as_rows, group_sample_pair
from services.sampling import REFINE_CHI, sample_cloud

logger = logging.getLogger(__name__)

MIN_SPAN = 4.0
TOP_FRACTION = 0.1
TOP_FLOOR = 0.4
MISSING_WALL_MARGIN = 0.1
BAND_MIN_CHI = 2.0
FIT_MIN_CHI = 5.0
NEAR_DISTANCE = 1.5


def shape_envelope(spec: GroupSpec, shape: MuShape) -> Tuple[GrowthFn, GrowthFn]:
    """Lower and upper growth functions bounding ρ₂ against ρ₁ for a μ-shape"""
    if isinstance(shape, FullChamber):
        return GrowthFn(p=spec.k1), GrowthFn(p=spec.k2)
    if isinstance(shape, Curve):
        return shape.growth, shape.growth
    if isinstance(shape, Band):
        return shape.lower, shape.upper
    if isinstance(shape, Ray):
        slope = chamber_slope(spec, np.array(shape.direction))
        return GrowthFn(p=slope), GrowthFn(p=slope)
    if isinstance(shape, RayPair):
        slopes = sorted(chamber_slope(spec, np.array(d)) for d in (shape.direction, shape.opposite))
        return GrowthFn(p=slopes[0]), GrowthFn(p=slopes[1])
    if isinstance(shape, LogCurve):
        slope = chamber_slope(spec, np.array(shape.direction))
        return GrowthFn(p=slope, q=-shape.k), GrowthFn(p=slope, q=shape.k)
    if isinstance(shape, ConeRegion):
        return GrowthFn(p=shape.slope_low), GrowthFn(p=shape.slope_high)
    raise ValueError(f"Unknown shape {shape!r}")


def _require_span(cloud: MuCloud) -> None:
    if cloud.span < MIN_SPAN:
        raise InsufficientSpanError(
            f"Cloud spans {cloud.span:.2f} units of log-radius, need {MIN_SPAN}",
            {"span": cloud.span, "samples": len(cloud.samples)},
        )


def top_rungs(cloud: MuCloud) -> Tuple[np.ndarray, np.ndarray]:
    """(χ₁, χ₂) over the top tenth of every ray's samples, kept where χ₁ ≥ TOP_FLOOR·max χ₁

    Rays grow at different rates in χ₁; each ray contributes its own top rungs.
    """
    chi1, chi2 = cloud.chi
    if chi1.size == 0:
        return chi1, chi2
    rays = cloud.column("direction").astype(int)
    keep = np.zeros(chi1.size, dtype=bool)
    for ray in np.unique(rays):
        idx = np.flatnonzero(rays == ray)
        count = int(np.ceil(TOP_FRACTION * idx.size))
        keep[idx[np.argsort(chi1[idx], kind="stable")[-count:]]] = True
    keep &= (chi1 >= TOP_FLOOR * float(chi1.max())) & (chi1 > 0.0)
    return chi1[keep], chi2[keep]


def two_wall_test(cloud: MuCloud, k1: float, k2: float, tol: float = 0.05) -> WallHits:
    """Hit flags for the walls χ₂ = k₁χ₁ and χ₂ = k₂χ₁ over the top rungs of every ray"""
    _require_span(cloud)
    chi1, chi2 = top_rungs(cloud)
    if chi1.size == 0:
        raise InsufficientSpanError("No top rungs in the cloud", {"samples": len(cloud.samples)})
    ratios = chi2 / chi1
    margin1 = float(np.min(np.abs(ratios - float(k1))))
    margin2 = float(np.min(np.abs(ratios - float(k2))))
    hits = WallHits(
        hit_wall1=margin1 <= tol, hit_wall2=margin2 <= tol,
        ratio_min=float(ratios.min()), ratio_max=float(ratios.max()),
        margin1=margin1, margin2=margin2, top_count=int(ratios.size), tol=tol,
    )
    logger.info(f"Two-wall test: ratios in [{hits.ratio_min:.3f}, {hits.ratio_max:.3f}], "
                f"hits ({hits.hit_wall1}, {hits.hit_wall2})")
    return hits


def envelope_slope(x: np.ndarray, y: np.ndarray, growth: GrowthFn, upper: bool) -> Optional[float]:
    """Slope against log χ₁ of the binned max (upper) or min of χ₂ − p·χ₁; None below 3 bins

    A cloud tracking sᵖ(log s)^q along that side of the band gives slope q.
    """
    bins = np.floor(x).astype(int)
    keys = np.unique(bins)
    if keys.size < 3:
        return None
    residual = y - float(growth.p) * x
    pick = np.max if upper else np.min
    centers = np.array([x[bins == k].mean() for k in keys])
    extremes = np.array([pick(residual[bins == k]) for k in keys])
    return float(scipy.stats.linregress(np.log(centers), extremes).slope)


def band_check(
    spec: GroupSpec,
    cloud: MuCloud,
    shape: MuShape,
    c_max: float = 1e3,
    q_tol: float = 0.3,
    wall_tol: float = 0.05,
) -> FitReport:
    """Check the cloud against C⁻¹f₁(‖h‖) ≤ ‖ρ₂(h)‖ ≤ C f₂(‖h‖)

    Passing needs all of: C ≤ c_max; for bands and curves, binned maxima following the
    upper (p, q) and binned minima the lower one within q_tol; and every wall the shape
    misses avoided by the top rungs with slope margin min(0.1, half the envelope's gap).
    """
    _require_span(cloud)
    lower, upper = shape_envelope(spec, shape)
    chi1, chi2 = cloud.chi
    mask = chi1 >= BAND_MIN_CHI
    x, y = chi1[mask], chi2[mask]
    if x.size < 3:
        raise InsufficientSpanError("Too few samples beyond the band threshold", {"samples": int(x.size)})

    below = lower.log_value(x) - y  # log(f₁/ρ₂)
    above = y - upper.log_value(x)  # log(ρ₂/f₂)
    log_c = max(0.0, float(below.max()), float(above.max()))
    c_estimate = float(np.exp(min(log_c, 700.0)))
    diagnostics: Dict[str, Any] = {
        "worst_below": float(below.max()), "worst_above": float(above.max()), "samples": int(x.size),
    }

    fit_mask = x >= FIT_MIN_CHI if np.count_nonzero(x >= FIT_MIN_CHI) >= 3 else np.ones_like(x, dtype=bool)
    fitted_p = float(scipy.stats.linregress(x[fit_mask], y[fit_mask]).slope)

    passed = c_estimate <= c_max
    fitted_q: Optional[float] = None
    if isinstance(shape, (Band, Curve)):
        # refined rays stop at REFINE_CHI; beyond it the extremes come from coarse rays only
        track = (x >= FIT_MIN_CHI) & (x <= REFINE_CHI)
        q_upper = envelope_slope(x[track], y[track], upper, upper=True)
        q_lower = envelope_slope(x[track], y[track], lower, upper=False)
        if q_upper is not None and q_lower is not None:
            fitted_q = q_upper
            tracks = abs(q_upper - float(upper.q)) <= q_tol and abs(q_lower - float(lower.q)) <= q_tol
            diagnostics.update(q_upper=q_upper, q_lower=q_lower, tracks=tracks)
            passed = passed and tracks
        else:
            diagnostics["tracks"] = None

    walls = two_wall_test(cloud, float(spec.k1), float(spec.k2), wall_tol)
    missing, too_close = [], []
    for index, (k, margin) in enumerate(((spec.k1, walls.margin1), (spec.k2, walls.margin2)), start=1):
        gap = min(abs(float(lower.p) - float(k)), abs(float(upper.p) - float(k)))
        if gap <= 1e-9:
            continue
        missing.append(index)
        if margin < min(MISSING_WALL_MARGIN, 0.5 * gap):
            too_close.append(index)
    diagnostics.update(missing_walls=missing, walls_too_close=too_close)
    passed = passed and not too_close

    top1, top2 = top_rungs(cloud)
    envelope = (float((top2 / top1).min()), float((top2 / top1).max()))
    logger.info(f"Band check vs {shape.shape}: C = {c_estimate:.3g}, p = {fitted_p:.3f}, "
                f"q = {fitted_q}, walls too close {too_close}, passed={passed}")
    return FitReport(
        passed=passed, c_estimate=c_estimate, c_max=c_max, envelope=envelope,
        fitted_p=fitted_p, fitted_q=fitted_q, walls=walls, diagnostics=diagnostics,
    )


def conjugation_stability(
    spec: GroupSpec,
    basis: np.ndarray,
    g: np.ndarray,
    budget: int = 400,
    max_log_radius: float = 20.0,
    seed: int = 0,
    threads: int = 1,
    slope_tol: float = 0.02,
) -> StabilityReport:
    """sup |μ(g h g⁻¹) − μ(h)| over matched samples, and its trend in χ₁"""
    rows = as_rows(spec, basis)
    g = np.asarray(g, dtype=float)
    g_inv = np.linalg.inv(g)
    w, w_inv = wedge_square(g), wedge_square(g_inv)
    cloud = sample_cloud(spec, rows, budget, max_log_radius, seed, threads)

    offsets, chis = [], []
    for s in cloud.samples:
        if s.inverse:
            continue
        try:
            h, wedge = group_sample_pair(spec, rows, s.coefficients)
            _, _, c1, c12 = log_norms(g @ h @ g_inv, w @ wedge @ w_inv)
        except ScaleOverflowError:
            continue
        offsets.append(float(np.hypot(c1 - s.log_s1, c12 - s.log_s12)))
        chis.append(s.log_s1)
    if len(offsets) < 3:
        raise InsufficientSpanError("Too few matched samples", {"samples": len(offsets)})

    offsets_arr, chis_arr = np.array(offsets), np.array(chis)
    if np.ptp(chis_arr) > 0.0 and np.ptp(offsets_arr) > 0.0:
        slope = float(scipy.stats.linregress(chis_arr, offsets_arr).slope)
    else:
        slope = 0.0
    report = StabilityReport(
        sup_offset=float(offsets_arr.max()), offset_slope=slope,
        bounded=abs(slope) <= slope_tol, samples=len(offsets),
    )
    logger.info(f"Conjugation offset sup {report.sup_offset:.3g}, slope {slope:.3g}")
    return report


def properness_probe(
    spec: GroupSpec,
    basis1: np.ndarray,
    basis2: np.ndarray,
    budget: int = 800,
    max_log_radius: float = 20.0,
    seed: int = 0,
    threads: int = 1,
) -> ProperProbeReport:
    """Heuristic: do the μ-clouds of H₁ and H₂ stay close at growing radius?"""
    cloud1 = sample_cloud(spec, basis1, budget, max_log_radius, seed, threads)
    cloud2 = sample_cloud(spec, basis2, budget, max_log_radius, seed + 1, threads)
    p1 = np.column_stack(cloud1.chi)
    p2 = np.column_stack(cloud2.chi)
    if len(p1) == 0 or len(p2) == 0:
        return ProperProbeReport(verdict="inconclusive")

    distances, nearest = cKDTree(p2).query(p1)
    bins = np.floor(p1[:, 0]).astype(int)
    per_bin = []
    for b in np.unique(bins):
        if b < 2:
            continue
        idx = np.flatnonzero(bins == b)
        best = idx[np.argmin(distances[idx])]
        per_bin.append((int(b), float(distances[best]), int(best)))
    if len(per_bin) < 3:
        return ProperProbeReport(verdict="inconclusive")

    xs = np.array([b for b, _, _ in per_bin], dtype=float)
    ds = np.array([d for _, d, _ in per_bin])
    slope = float(scipy.stats.linregress(xs, ds).slope) if np.ptp(ds) > 0.0 else 0.0
    upper_half = [entry for entry in per_bin if entry[0] >= np.median(xs)]

    if all(d <= NEAR_DISTANCE for _, d, _ in upper_half):
        verdict = "not-proper"
    elif slope > 0.1:
        verdict = "likely-proper"
    else:
        verdict = "inconclusive"
    witnesses = [
        (cloud1.samples[i].sample_id, cloud2.samples[int(nearest[i])].sample_id)
        for _, d, i in upper_half if d <= NEAR_DISTANCE
    ][:10]
    logger.info(f"Properness probe: {verdict} (distance slope {slope:.3f})")
    return ProperProbeReport(
        verdict=verdict, distance_slope=slope,
        distances=[(b, d) for b, d, _ in per_bin], witnesses=witnesses,
    )


def agreement_report(
    verdict: Verdict,
    walls: WallHits,
    fit: Optional[FitReport] = None,
    expected_shape: Optional[MuShape] = None,
) -> VerifyResult:
    """Compare the predicted shape (or an override) with the two-wall test and the band fit"""
    shape = expected_shape if expected_shape is not None else verdict.shape
    predicted_cds = isinstance(shape, FullChamber)
    empirical_cds = walls.both
    notes = []
    if expected_shape is not None:
        notes.append(f"expected shape overridden to {expected_shape.shape}")
    agreement = empirical_cds == predicted_cds
    if not agreement:
        notes.append(f"predicted CDS={predicted_cds}, walls hit ({walls.hit_wall1}, {walls.hit_wall2})")
    if fit is not None and not fit.passed:
        agreement = False
        notes.append(f"band check failed (C = {fit.c_estimate:.3g}, p = {fit.fitted_p:.3f}, q = {fit.fitted_q})")
    mismatch = not agreement and verdict.certainty == "exact"
    if not agreement and not mismatch:
        notes.append("disagreement on a probabilistic verdict is not a mismatch")
    return VerifyResult(
        verdict=verdict, walls=walls, fit=fit, empirical_cds=empirical_cds,
        agreement=agreement, mismatch=mismatch, notes=notes,
    )
