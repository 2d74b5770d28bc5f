"""
μ-cloud sampling

Key responsibilities:
- Coefficient directions: exact toral wall directions, ±basis, pairwise angular sweeps
  in a rate family and a root-height graded family, random mixtures
- Per-ray calibration so the rungs of every ray land on the same χ₁ ladder
- Refinement of the pairwise sweeps toward the walls χ₂ = kᵢχ₁
- Threaded evaluation of (h, ∧²h), scale-guarded log-norms and a cancellation guard
- SL3 mirror samples μ(h⁻¹) = ι(μ(h))
- Unit-bin accounting and the partial-cloud flag

In the rate family a nilpotent factor has log-size ≈ radius·weight/k. In the graded family
its coefficient is weight·e^{radius·height}, so the relative-size regimes (s, s², s³) in
which wall-approaching sequences cancel are reachable at a fixed angle.
"""

import concurrent.futures
import logging
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.optimize

from models.empirical import MuCloud, MuSample
from models.group import GroupSpec
from services.errors import ScaleOverflowError
from services.linalg import LOG_FLOAT_MAX, LogNorms, log_norms, log_top_singular, max_abs_norm, nilpotency_degree, null_rows
from services.liealg import (
    SampledElement,
    as_rows,
    coord_to_matrix,
    group_sample_bounded,
    group_sample_element,
    toral_part,
)

logger = logging.getLogger(__name__)

MIN_PER_BIN = 20
MAX_ANGLES = 360
# samples whose products lost more than e^30 in magnitude to cancellation are dropped
MAX_PRECISION_LOSS = 30.0
# refined rays stop at this χ₁
REFINE_CHI = 28.0
REFINE_SHARE = 5  # one ray slot in five goes to wall refinement
REFINE_ROUNDS = 6
REFINE_SHRINK = 1e-4
MAX_BRACKET_STEPS = 16
GAP_CAP = 1e6
PENALTY = 10.0


class Scaling(NamedTuple):
    kind: str  # "toral" or "nil"
    scale: float  # largest |toral eigenvalue| τ, or nilpotency degree k
    grade: int  # least root height present in a nilpotent vector; 0 for toral vectors


class Direction(NamedTuple):
    signs: np.ndarray
    weights: np.ndarray  # nonnegative
    graded: bool = False
    pair: Optional[Tuple[int, int]] = None  # set on pairwise sweeps
    angle: Optional[float] = None


class _Ray(NamedTuple):
    direction: Direction
    samples: List[Tuple[List[float], LogNorms, float]]  # (coefficients, norms, target χ₁)
    skipped: int
    unreliable: int


# === Directions ===

def _grade(spec: GroupSpec, b: np.ndarray) -> int:
    size = float(np.abs(b).max())
    heights = [r.height for r in spec.roots.positive if np.abs(b[r.start:r.stop]).max() > 1e-12 * size]
    return min(heights) if heights else 1


def basis_scalings(spec: GroupSpec, basis: np.ndarray) -> List[Scaling]:
    """Per basis vector: toral with its largest |eigenvalue|, or nilpotent with degree and grade"""
    scalings = []
    for b in as_rows(spec, basis):
        M = coord_to_matrix(spec, b)
        tau = float(np.abs(np.diag(M)).max())
        if tau > 0.0:
            scalings.append(Scaling("toral", tau, 0))
        else:
            scalings.append(Scaling("nil", float(max(1, nilpotency_degree(M))), _grade(spec, b)))
    return scalings


def coefficient_for(scaling: Scaling, radius: float, weight: float, sign: float, graded: bool = False) -> float:
    """Coefficient of one basis factor at the given radius"""
    if weight <= 0.0:
        return 0.0
    if scaling.kind == "toral":
        return sign * radius * weight / scaling.scale
    exponent = radius * scaling.grade if graded else radius * weight / scaling.scale
    if exponent > LOG_FLOAT_MAX:
        raise ScaleOverflowError("Coefficient would overflow", {"exponent": exponent})
    if graded:
        return sign * weight * float(np.exp(exponent))
    return sign * float(np.expm1(exponent))


def direction_coefficients(scalings: Sequence[Scaling], direction: Direction, radius: float) -> List[float]:
    return [
        coefficient_for(scaling, radius, w, s, direction.graded)
        for scaling, w, s in zip(scalings, direction.weights, direction.signs)
    ]


def pair_direction(dim: int, pair: Tuple[int, int], theta: float, graded: bool) -> Direction:
    """Angle θ in the (i, j) plane; weights (cos²θ, sin²θ), or (|cos θ|, |sin θ|) when graded"""
    i, j = pair
    c, s = np.cos(theta), np.sin(theta)
    weights = np.zeros(dim)
    weights[i], weights[j] = (abs(c), abs(s)) if graded else (c * c, s * s)
    signs = np.ones(dim)
    signs[i], signs[j] = np.sign(c) or 1.0, np.sign(s) or 1.0
    return Direction(signs, weights, graded, pair, float(theta))


def toral_wall_directions(spec: GroupSpec, basis: np.ndarray, scalings: Sequence[Scaling]) -> List[Direction]:
    """±(toral combinations killed by a positive root); their exponentials run along a wall"""
    rows = as_rows(spec, basis)
    toral = [i for i, s in enumerate(scalings) if s.kind == "toral"]
    if not toral:
        return []
    dim = len(scalings)
    directions: List[Direction] = []
    for root in spec.roots.positive:
        values = np.array([[root.evaluate(toral_part(spec, rows[i]))] for i in toral])
        for combo in null_rows(values):
            weights, signs = np.zeros(dim), np.ones(dim)
            for i, c in zip(toral, combo):
                weights[i] = abs(c) * scalings[i].scale
                signs[i] = np.sign(c) or 1.0
            if weights.sum() <= 0.0:
                continue
            weights /= weights.sum()
            for sign in (1.0, -1.0):
                candidate = Direction(sign * signs, weights)
                if not any(np.allclose(candidate.signs * candidate.weights, d.signs * d.weights) for d in directions):
                    directions.append(candidate)
    return directions


def sweep_directions(
    dim: int, rng: np.random.Generator, limit: int, leading: Sequence[Direction] = ()
) -> List[Direction]:
    """Directions in priority order: leading, ±basis, pairwise angles in both families, random mixtures"""
    directions: List[Direction] = list(leading)
    eye = np.eye(dim)
    for i in range(dim):
        for sign in (1.0, -1.0):
            directions.append(Direction(sign * np.ones(dim), eye[i]))

    pairs = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
    if pairs:
        per_pair = max(4, min(MAX_ANGLES, (limit - len(directions)) // (2 * len(pairs))))
        for theta in np.linspace(0.0, 2.0 * np.pi, per_pair, endpoint=False):
            for graded in (False, True):
                for pair in pairs:
                    directions.append(pair_direction(dim, pair, float(theta), graded))

    while len(directions) < limit:
        weights = rng.dirichlet(np.ones(dim))
        signs = rng.choice([-1.0, 1.0], size=dim)
        directions.append(Direction(signs, weights))
    return directions[:limit]


def radius_ladder(max_log_radius: float) -> np.ndarray:
    """Target χ₁ values of the rungs of every ray"""
    rungs = max(1, int(np.ceil(max_log_radius)))
    return np.linspace(1.0, max_log_radius, rungs)


# === Rays ===

def _chi1_at(
    spec: GroupSpec, rows: np.ndarray, scalings: Sequence[Scaling], direction: Direction
) -> Callable[[float], float]:
    def chi1(radius: float) -> float:
        try:
            coefficients = direction_coefficients(scalings, direction, radius)
            return log_top_singular(group_sample_element(spec, rows, coefficients))
        except ScaleOverflowError:
            return np.inf
    return chi1


def _solve_radius(chi1: Callable[[float], float], target: float, lo: float = 0.0) -> Optional[float]:
    """Radius above lo at which χ₁ first crosses target; None if it starts above or never gets there"""
    def gap(radius: float) -> float:
        return min(chi1(radius) - target, GAP_CAP)

    if gap(lo) >= 0.0:
        return None
    step = max(target, 1.0)
    hi = lo + step
    for _ in range(MAX_BRACKET_STEPS):
        if gap(hi) >= 0.0:
            return float(scipy.optimize.brentq(gap, lo, hi, xtol=1e-9))
        lo, step = hi, 2.0 * step
        hi = lo + step
    return None


def calibrate(chi1: Callable[[float], float], targets: np.ndarray) -> Optional[np.ndarray]:
    """Radii for the targets, affine through the radii solving χ₁ = top/2 and χ₁ = top"""
    top = float(targets[-1])
    half = 0.5 * top
    r_half = _solve_radius(chi1, half)
    if r_half is None:
        return None
    r_top = _solve_radius(chi1, top, r_half)
    if r_top is None:
        return None
    return r_half + (np.asarray(targets, dtype=float) - half) * (r_top - r_half) / (top - half)


def precision_loss(element: SampledElement, norms: LogNorms) -> float:
    """Log-magnitude lost to cancellation while forming h and ∧²h"""
    return max(
        float(np.log(max_abs_norm(element.g_bound))) - norms.log_s1,
        float(np.log(max_abs_norm(element.wedge_bound))) - norms.log_s12,
    )


def _measure(
    spec: GroupSpec, rows: np.ndarray, scalings: Sequence[Scaling], direction: Direction, radius: float
) -> Tuple[List[float], LogNorms, float]:
    coefficients = direction_coefficients(scalings, direction, radius)
    element = group_sample_bounded(spec, rows, coefficients)
    norms = log_norms(element.g, element.wedge)
    return coefficients, norms, precision_loss(element, norms)


def _trace_ray(
    spec: GroupSpec, rows: np.ndarray, scalings: Sequence[Scaling], direction: Direction, targets: np.ndarray
) -> _Ray:
    radii = calibrate(_chi1_at(spec, rows, scalings, direction), targets)
    if radii is None:
        logger.debug(f"Ray with weights {np.round(direction.weights, 3).tolist()} does not reach χ₁ = {targets[-1]:.1f}")
        return _Ray(direction, [], 0, 0)
    samples, skipped, unreliable = [], 0, 0
    for radius, target in zip(radii, targets):
        if radius < 0.0:
            continue
        try:
            coefficients, norms, loss = _measure(spec, rows, scalings, direction, float(radius))
        except ScaleOverflowError as e:
            logger.debug(f"Skipping sample at radius {radius:.2f}: {e}")
            skipped += 1
            continue
        if not loss <= MAX_PRECISION_LOSS:
            unreliable += 1
            continue
        samples.append((coefficients, norms, float(target)))
    return _Ray(direction, samples, skipped, unreliable)


def _trace_all(
    spec: GroupSpec,
    rows: np.ndarray,
    scalings: Sequence[Scaling],
    directions: Sequence[Direction],
    targets: np.ndarray,
    threads: int,
) -> List[_Ray]:
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        return list(executor.map(lambda d: _trace_ray(spec, rows, scalings, d, targets), directions))


# === Wall refinement ===

def _wall_distance(
    spec: GroupSpec, rows: np.ndarray, scalings: Sequence[Scaling], direction: Direction, radius: float, wall: float
) -> float:
    try:
        _, norms, loss = _measure(spec, rows, scalings, direction, radius)
    except ScaleOverflowError:
        return PENALTY
    if not loss <= MAX_PRECISION_LOSS or norms.log_s1 <= 0.0:
        return PENALTY
    return abs(norms.log_s12 / norms.log_s1 - wall)


def wall_candidates(
    rays: Sequence[_Ray], walls: Sequence[float], reference: float, per_wall: int
) -> List[Tuple[Direction, float, Tuple[float, float]]]:
    """Pairwise-sweep rays at local minima of |χ₂/χ₁ − k| near χ₁ = reference, best first per wall

    Each candidate carries its wall and the angles of its two neighbors in the sweep.
    """
    sweeps: Dict[Tuple[Tuple[int, int], bool], List[Tuple[float, float, Direction]]] = {}
    for ray in rays:
        d = ray.direction
        if d.pair is None or not ray.samples:
            continue
        _, norms, _ = min(ray.samples, key=lambda sample: abs(sample[2] - reference))
        if norms.log_s1 > 0.0:
            sweeps.setdefault((d.pair, d.graded), []).append((d.angle, norms.log_s12 / norms.log_s1, d))

    candidates = []
    for wall in walls:
        found = []
        for entries in sweeps.values():
            entries.sort(key=lambda e: e[0])
            n = len(entries)
            if n < 3:
                continue
            dist = [abs(ratio - wall) for _, ratio, _ in entries]
            for i in range(n):
                prev, nxt = (i - 1) % n, (i + 1) % n
                if dist[i] <= dist[prev] and dist[i] <= dist[nxt]:
                    lo = entries[prev][0] - (2.0 * np.pi if prev > i else 0.0)
                    hi = entries[nxt][0] + (2.0 * np.pi if nxt < i else 0.0)
                    found.append((dist[i], entries[i][2], (lo, hi)))
        found.sort(key=lambda f: f[0])
        candidates.extend((d, float(wall), bracket) for _, d, bracket in found[:per_wall])
    return candidates


def refine_toward_wall(
    spec: GroupSpec,
    rows: np.ndarray,
    scalings: Sequence[Scaling],
    direction: Direction,
    wall: float,
    bracket: Tuple[float, float],
    reference: float,
) -> Optional[Direction]:
    """Angle in the bracket minimizing |χ₂/χ₁ − wall| at χ₁ ≈ reference

    The radius is recalibrated after every round; cancellation lowers χ₁ at a fixed radius,
    so the rounds walk the radius up to the reference while the bracket narrows.
    """
    dim = len(scalings)
    pair, graded = direction.pair, direction.graded
    center = float(direction.angle)
    lo, hi = bracket[0] - center, bracket[1] - center
    width = hi - lo
    radius: Optional[float] = None
    for _ in range(REFINE_ROUNDS):
        current = pair_direction(dim, pair, center, graded)
        new_radius = _solve_radius(_chi1_at(spec, rows, scalings, current), reference)
        if new_radius is None or (radius is not None and abs(new_radius - radius) < 0.25):
            break
        radius = new_radius

        def objective(offset: float, c: float = center, r: float = new_radius) -> float:
            return _wall_distance(spec, rows, scalings, pair_direction(dim, pair, c + offset, graded), r, wall)

        # offsets stay small, so the optimizer's relative tolerance does not cap the resolution
        result = scipy.optimize.minimize_scalar(
            objective, bounds=(lo, hi), method="bounded", options={"xatol": max((hi - lo) * 1e-9, 1e-16)}
        )
        center += float(result.x)
        lo, hi = -0.5 * width * REFINE_SHRINK, 0.5 * width * REFINE_SHRINK
    if radius is None:
        return None
    return pair_direction(dim, pair, center, graded)


# === Clouds ===

def _mirrored(sample: MuSample, offset: int, sample_id: int) -> MuSample:
    # h⁻¹ is the adjugate of h, so the max-entry norms swap along with χ₁ and χ₂
    return MuSample(
        sample_id=sample_id, bin=max(0, int(np.floor(sample.log_n2))),
        log_n1=sample.log_n2, log_n2=sample.log_n1, log_s1=sample.log_s12, log_s12=sample.log_s1,
        coefficients=sample.coefficients, direction=sample.direction + offset, inverse=True,
    )


def sample_cloud(
    spec: GroupSpec,
    basis: np.ndarray,
    budget: int,
    max_log_radius: float,
    seed: int,
    threads: int = 1,
    directions: Optional[List[Direction]] = None,
) -> MuCloud:
    """Sample H on calibrated rays over a χ₁ ladder; deterministic in seed

    Explicit directions are traced as given, without wall refinement.
    """
    rows = as_rows(spec, basis)
    if max_log_radius < 1.0:
        raise ValueError(f"max_log_radius must be >= 1, got {max_log_radius}")
    ladder = radius_ladder(max_log_radius)
    rng = np.random.default_rng(seed)
    limit = budget // len(ladder)
    dim = rows.shape[0]
    scalings = basis_scalings(spec, rows)

    reserve = max(2, limit // REFINE_SHARE) if directions is None and dim >= 2 and limit >= 4 else 0
    if directions is None:
        leading = toral_wall_directions(spec, rows, scalings)
        directions = sweep_directions(dim, rng, limit - reserve, leading) if limit > reserve else []
    rays = _trace_all(spec, rows, scalings, directions, ladder, threads)

    refined: List[Direction] = []
    if reserve:
        reference = min(float(max_log_radius), REFINE_CHI)
        candidates = wall_candidates(rays, (float(spec.k1), float(spec.k2)), reference, reserve // 2)
        with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
            found = executor.map(
                lambda c: refine_toward_wall(spec, rows, scalings, c[0], c[1], c[2], reference), candidates
            )
            refined = [d for d in found if d is not None]
        rays += _trace_all(spec, rows, scalings, refined, ladder[ladder <= reference + 1e-9], threads)

    samples: List[MuSample] = []
    skipped = unreliable = 0
    for index, ray in enumerate(rays):
        skipped += ray.skipped
        unreliable += ray.unreliable
        for coefficients, (n1, n2, s1, s12), _ in ray.samples:
            samples.append(MuSample(
                sample_id=len(samples), bin=max(0, int(np.floor(n1))),
                log_n1=n1, log_n2=n2, log_s1=s1, log_s12=s12, coefficients=coefficients, direction=index,
            ))
    if spec.kind == "SL3":
        samples += [_mirrored(s, len(rays), len(samples) + i) for i, s in enumerate(list(samples))]

    counts = np.bincount([s.bin for s in samples], minlength=int(np.ceil(max_log_radius)) + 1)
    thin = [b for b in range(1, int(np.ceil(max_log_radius))) if counts[b] < MIN_PER_BIN]
    partial = not samples or bool(thin)
    if partial:
        logger.warning(f"Partial cloud: {len(thin)} unit bins below {MIN_PER_BIN} samples")
    if skipped:
        logger.warning(f"Skipped {skipped} samples on overflow")
    if unreliable:
        logger.info(f"Dropped {unreliable} samples past the cancellation guard")
    logger.info(f"Sampled {len(samples)} points over {len(rays)} rays ({len(refined)} refined), seed {seed}")

    return MuCloud(
        kind=spec.kind, samples=samples, seed=seed, budget=budget, max_log_radius=max_log_radius,
        schedule={
            "directions": len(directions),
            "refined": len(refined),
            "ladder": [float(r) for r in ladder],
            "scalings": [list(s) for s in scalings],
            "thin_bins": thin,
            "mirrored": spec.kind == "SL3",
        },
        skipped=skipped, unreliable=unreliable, partial=partial,
    )
