"""
ClassificationCapability - Cartan-decomposition subgroups of SL(3,ℝ) and SO(2,n)

Decides whether the closed connected subgroup H = exp(h), h ⊆ 𝔞+𝔫, is a
Cartan-decomposition subgroup and predicts the shape of μ(H) when it is not.

Key responsibilities:
- Dispatcher: dimension shortcuts, then routing by standard form
- SL(3,ℝ) rules and shapes
- SO(2,n) rules for h ⊆ 𝔫, semidirect h = 𝔱 ⊕ 𝔲 and graph forms
- One-parameter subgroups (rays, ray pairs, log-curves)
- Human-readable explanations
"""

import logging
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from capabilities.base import BaseCapability, CapabilityDescription
from models.algebra import GraphForm, InsideNForm, SemidirectForm, StandardForm, Subalgebra
from models.capabilities import ClassificationInputs, ClassificationResult
from models.group import GroupSpec
from models.shapes import (
    Band,
    Certainty,
    ConeRegion,
    Curve,
    FullChamber,
    GrowthFn,
    LogCurve,
    MuShape,
    Ray,
    RayPair,
    Verdict,
    Witness,
)
from services.cone import cone_test, single_root_space
from services.errors import ClassificationDefectError
from services.existential import (
    contains_eta_axis,
    independent_pair_exists,
    parallel_pair_exists,
    phi_y_element,
    quadric_isotropy,
    quadric_vanishes,
    y_free_part,
)
from services.fitting import shape_envelope
from services.group import chamber_point, opposition_involution, weyl_fold
from services.linalg import nilpotency_degree, null_rows, wedge_derivation
from services.liealg import (
    array_to_coord,
    as_rows,
    coord_to_matrix,
    decompose_parts,
    is_abelian,
    require_subalgebra,
)
from services.normal_forms import so1n_normal_form, standard_rows, to_standard_form

logger = logging.getLogger(__name__)

TOL = 1e-9

Basis = Union[Subalgebra, np.ndarray, Sequence]


# === Shape and verdict helpers ===

def _curve(p, q=0) -> Curve:
    return Curve(growth=GrowthFn(p=Fraction(p), q=Fraction(q)))


def _band(p1, q1, p2, q2) -> Band:
    return Band(
        lower=GrowthFn(p=Fraction(p1), q=Fraction(q1)),
        upper=GrowthFn(p=Fraction(p2), q=Fraction(q2)),
    )


def _cds(rule: str, witnesses: Optional[List[Witness]] = None, certainty: Certainty = "exact",
         boundary: bool = False) -> Verdict:
    return Verdict(is_cds=True, rule=rule, shape=FullChamber(), witnesses=witnesses or [],
                   certainty=certainty, boundary=boundary)


def _not_cds(rule: str, shape: MuShape, witnesses: Optional[List[Witness]] = None,
             certainty: Certainty = "exact") -> Verdict:
    return Verdict(is_cds=False, rule=rule, shape=shape, witnesses=witnesses or [], certainty=certainty)


def _witness(spec: GroupSpec, condition: str, v: np.ndarray, note: Optional[str] = None) -> Witness:
    return Witness(condition=condition, vector=array_to_coord(spec, v), note=note)


def _zero(values: np.ndarray, scale: float = 1.0) -> bool:
    return bool(np.abs(values).max(initial=0.0) <= TOL * max(1.0, scale))


def _parallel(t: np.ndarray, target: Sequence[float]) -> bool:
    t, target = np.asarray(t, dtype=float), np.asarray(target, dtype=float)
    cross = np.linalg.norm(np.outer(t, target) - np.outer(target, t))
    return bool(cross <= 1e-9 * np.linalg.norm(t) * np.linalg.norm(target))


def _columns(spec: GroupSpec, rows: np.ndarray):
    """(φ, x, y, η) columns of SO(2,n) rows"""
    m = spec.n - 2
    return rows[:, 2], rows[:, 3:3 + m], rows[:, 3 + m:3 + 2 * m], rows[:, -1]


def _root_columns(spec: GroupSpec, roots: Iterable[str]) -> List[int]:
    cols: List[int] = []
    for name in roots:
        r = spec.roots.by_name(name)
        cols.extend(range(r.start, r.stop))
    return cols


def _inside(spec: GroupSpec, rows: np.ndarray, roots: Iterable[str]) -> bool:
    """Nilpotent parts of all rows lie in ⊕ 𝔲_ω over the given roots"""
    keep = set(range(spec.toral_width)) | set(_root_columns(spec, roots))
    outside = [i for i in range(spec.coord_dim) if i not in keep]
    return _zero(rows[:, outside], float(np.abs(rows).max(initial=0.0)))


def _meets(spec: GroupSpec, rows: np.ndarray, root: str) -> bool:
    """span(rows) ∩ 𝔲_root ≠ 0"""
    if rows.shape[0] == 0:
        return False
    keep = set(_root_columns(spec, [root]))
    outside = [i for i in range(spec.coord_dim) if i not in keep]
    return null_rows(rows[:, outside]).shape[0] > 0


def _is_root_space(spec: GroupSpec, rows: np.ndarray, root: str) -> bool:
    return rows.shape[0] == spec.roots.by_name(root).width and _inside(spec, rows, [root])


def _toral_direction(spec: GroupSpec, t: np.ndarray) -> np.ndarray:
    return np.asarray(t, dtype=float)[:spec.toral_width]


# === One-parameter subgroups ===

def _degree_direction(spec: GroupSpec, v: np.ndarray) -> List[float]:
    """Chamber direction of μ(exp(sv)) for nilpotent v, from growth degrees in ρ₁ and ρ₂"""
    M = coord_to_matrix(spec, v)
    k1 = nilpotency_degree(M)
    k2 = nilpotency_degree(wedge_derivation(M))
    if spec.kind == "SL3":
        return [float(k1), float(k2 - k1), float(-k2)]
    return [float(k1), float(k2 - k1)]


def _perpendicular(spec: GroupSpec, direction: np.ndarray) -> List[float]:
    if spec.kind == "SL3":
        perp = np.cross(direction, np.ones(3))
    else:
        perp = np.array([-direction[1], direction[0]])
    return [float(v) for v in perp / np.linalg.norm(perp)]


def dim1_shape(spec: GroupSpec, h: Basis) -> MuShape:
    """μ-shape of a one-parameter subgroup"""
    rows = as_rows(spec, h)
    if rows.shape[0] != 1:
        raise ValueError(f"dim1_shape needs a one-dimensional subalgebra, got dimension {rows.shape[0]}")
    v = rows[0]
    if _zero(v[:spec.toral_width]):
        return Ray(direction=_degree_direction(spec, v))

    form = to_standard_form(spec, rows)
    t = _toral_direction(spec, form.basis[0].to_array())
    point = chamber_point(spec, t)
    if isinstance(form, SemidirectForm):
        opposite = opposition_involution(spec, point)
        return RayPair(direction=point.coords, opposite=opposite.coords)
    if isinstance(form, GraphForm):
        psi = np.zeros(spec.coord_dim)
        root = spec.roots.by_name(form.root)
        psi[root.start:root.stop] = form.psi
        k = max(1, nilpotency_degree(coord_to_matrix(spec, psi)))
        direction = np.array(point.coords)
        return LogCurve(direction=point.coords, perpendicular=_perpendicular(spec, direction), k=k)
    raise ClassificationDefectError(f"Unexpected one-dimensional form {form.form}")


def _dim1_rule(spec: GroupSpec, rows: np.ndarray) -> str:
    if spec.kind == "SL3":
        return "SL3notCDS(1)"
    v = rows[0]
    if _zero(v[:spec.toral_width]):
        return "HinN-notCDS(1)"
    if _zero(v[spec.toral_width:]):
        return "SO2n-semi-notCDS(1)"
    return "dim>Rrank"


# === Dispatcher ===

def classify(spec: GroupSpec, h: Basis, seed: int = 0) -> Verdict:
    """Decide whether exp(h) is a Cartan-decomposition subgroup"""
    rows = require_subalgebra(spec, h)
    dim = rows.shape[0]
    parts = decompose_parts(spec, rows)
    r_t = parts.torus.shape[0]
    logger.debug(f"Classifying dim {dim} subalgebra of {spec.label}, toral rank {r_t}")

    if spec.kind == "SL3" and dim >= 3:
        verdict = _cds("SL3-CDS(1)")
    elif r_t == 2:
        if parts.cap_a.shape[0] == 2:
            verdict = _cds("SL3-CDS(2)" if spec.kind == "SL3" else "SO2n-semiprod(1)")
        else:
            verdict = _cds("HN=AN")
    elif dim <= 1:
        verdict = _not_cds(_dim1_rule(spec, rows), dim1_shape(spec, rows))
    elif spec.kind == "SL3":
        verdict = classify_sl3(spec, rows)
    else:
        form = to_standard_form(spec, rows)
        std = standard_rows(spec, form)
        if isinstance(form, InsideNForm):
            verdict = classify_so2n_in_n(spec, std, seed)
        elif isinstance(form, SemidirectForm):
            verdict = classify_so2n_semidirect(spec, form, seed)
        elif isinstance(form, GraphForm):
            verdict = classify_so2n_graph(spec, form, seed)
        else:
            raise ClassificationDefectError(f"Unexpected standard form {form.form} with toral rank {r_t}")

    logger.info(f"Verdict for {spec.label}: {explain(verdict)}")
    return verdict


# === SL(3,ℝ) ===

def classify_sl3(spec: GroupSpec, h: Basis, form: Optional[StandardForm] = None) -> Verdict:
    rows = as_rows(spec, h)
    dim = rows.shape[0]
    if dim >= 3:
        return _cds("SL3-CDS(1)")
    if dim <= 1:
        return _not_cds("SL3notCDS(1)", dim1_shape(spec, rows))
    form = form or to_standard_form(spec, rows)

    if isinstance(form, InsideNForm):
        if _meets(spec, rows, "alpha") or _meets(spec, rows, "beta"):
            return _not_cds("SL3notCDS(2)", mu_shape_sl3(spec, rows, "SL3notCDS(2)"))
        return _cds("SL3-CDS(3)")

    if isinstance(form, SemidirectForm):
        t_rows = np.array([v.to_array() for v in form.t_basis])
        u_rows = np.array([v.to_array() for v in form.u_basis]).reshape(len(form.u_basis), spec.coord_dim)
        if t_rows.shape[0] == 2:
            return _cds("SL3-CDS(2)")
        if single_root_space(spec, u_rows) is not None:
            result = cone_test(spec, t_rows, u_rows)
            if result.is_cds:
                return _cds("SL3-CDS(6)", boundary=result.boundary)
            return _not_cds("SL3notCDS(5)", result.region)
        t = _toral_direction(spec, t_rows[0])
        alpha, beta = spec.roots.simple
        if abs(alpha.evaluate(t)) <= TOL * np.linalg.norm(t):
            return _cds("SL3-CDS(4)")
        if abs(beta.evaluate(t)) <= TOL * np.linalg.norm(t):
            return _cds("SL3-CDS(5)")
        if abs(alpha.evaluate(t) - beta.evaluate(t)) <= TOL * np.linalg.norm(t):
            return _not_cds("SL3notCDS(3)", mu_shape_sl3(spec, rows, "SL3notCDS(3)"))
        raise ClassificationDefectError("SL3 semidirect product matched no rule", {"t": t.tolist()})

    if isinstance(form, GraphForm):
        return _not_cds("SL3notCDS(4)", mu_shape_sl3(spec, rows, "SL3notCDS(4)"))
    raise ClassificationDefectError(f"Unexpected SL3 form {form.form}")


def mu_shape_sl3(spec: GroupSpec, h: Basis, rule: str) -> MuShape:
    rows = as_rows(spec, h)
    if rule == "SL3notCDS(1)":
        return dim1_shape(spec, rows)
    if rule in ("SL3notCDS(2)", "SL3notCDS(3)"):
        return _curve(1)
    if rule == "SL3notCDS(4)":
        return _band(Fraction(1, 2), Fraction(1, 2), 2, -1)
    if rule == "SL3notCDS(5)":
        form = to_standard_form(spec, rows)
        if not isinstance(form, SemidirectForm):
            raise ClassificationDefectError("Root semidirect shape requested for a non-semidirect algebra")
        t_rows = np.array([v.to_array() for v in form.t_basis])
        u_rows = np.array([v.to_array() for v in form.u_basis])
        return cone_test(spec, t_rows, u_rows).region
    raise ValueError(f"No SL3 shape for rule {rule}")


# === SO(2,n), h ⊆ 𝔫 ===

def classify_so2n_in_n(spec: GroupSpec, h: Basis, seed: int = 0) -> Verdict:
    rows = as_rows(spec, h)
    if rows.shape[0] < 2:
        raise ValueError("classify_so2n_in_n needs dimension >= 2")
    if not _zero(rows[:, :2]):
        raise ValueError("classify_so2n_in_n needs h inside 𝔫")
    dim = rows.shape[0]

    e1 = phi_y_element(spec, rows)
    eta = contains_eta_axis(spec, rows)
    if dim == 2 and eta and e1 is not None:
        return _cds("SO2n-HinN-CDS(1)", [
            _witness(spec, "E1", e1),
            Witness(condition="Eta", vector=array_to_coord(spec, _eta_vector(spec))),
        ])

    e2 = parallel_pair_exists(spec, rows, seed=seed)
    e3 = independent_pair_exists(spec, rows)
    e4 = quadric_isotropy(spec, y_free_part(spec, rows))
    if e2.witness is not None and (e3 is not None or e4 is not None):
        witnesses = [_witness(spec, "E2", e2.witness)]
        witnesses.append(_witness(spec, "E3", e3) if e3 is not None else _witness(spec, "E4", e4))
        return _cds("SO2n-HinN-CDS(2)", witnesses)

    certainty: Certainty = e2.certainty if e2.witness is None else "exact"
    rule = _in_n_not_cds_rule(spec, rows, e2.witness is not None, e3 is not None)
    return _not_cds(rule, mu_shape_so2n_in_n(spec, rows, rule), certainty=certainty)


def _eta_vector(spec: GroupSpec) -> np.ndarray:
    v = np.zeros(spec.coord_dim)
    v[-1] = 1.0
    return v


def _in_n_not_cds_rule(spec: GroupSpec, rows: np.ndarray, has_e2: bool, has_e3: bool) -> str:
    phi, _, y, _ = _columns(spec, rows)
    if _zero(phi) and not has_e2:
        return "HinN-notCDS(2)"
    if _zero(phi) and not has_e3:
        return "HinN-notCDS(3)"
    if _zero(y) and not contains_eta_axis(spec, rows) and so1n_normal_form(spec, rows).delta < 0.0:
        return "HinN-notCDS(4)"
    raise ClassificationDefectError(
        "Subalgebra of 𝔫 is neither CDS nor of a known non-CDS type",
        {"basis": rows.tolist()},
    )


def mu_shape_so2n_in_n(spec: GroupSpec, h: Basis, rule: str) -> MuShape:
    rows = as_rows(spec, h)
    if rule == "HinN-notCDS(1)":
        direction = _degree_direction(spec, rows[0])
        return _curve(Fraction(direction[0] + direction[1]) / Fraction(direction[0]))
    if rule == "HinN-notCDS(2)":
        return _curve(2)
    if rule in ("HinN-notCDS(3)", "HinN-notCDS(4)"):
        return _curve(1)
    raise ValueError(f"No in-N shape for rule {rule}")


# === SO(2,n), semidirect ===

def _form_rows(spec: GroupSpec, vectors) -> np.ndarray:
    return np.array([v.to_array() for v in vectors]).reshape(len(vectors), spec.coord_dim)


def _u_is_cds(spec: GroupSpec, u_rows: np.ndarray, seed: int) -> bool:
    return u_rows.shape[0] >= 2 and classify_so2n_in_n(spec, u_rows, seed).is_cds


def classify_so2n_semidirect(spec: GroupSpec, form: SemidirectForm, seed: int = 0) -> Verdict:
    t_rows = _form_rows(spec, form.t_basis)
    u_rows = _form_rows(spec, form.u_basis)
    if t_rows.shape[0] == 2:
        return _cds("SO2n-semiprod(1)")
    if u_rows.shape[0] == 0:
        return _not_cds("SO2n-semi-notCDS(1)", dim1_shape(spec, t_rows))

    t = _toral_direction(spec, t_rows[0])
    phi, x, y, eta = _columns(spec, u_rows)
    ker_alpha, ker_beta = _parallel(t, (1.0, 1.0)), _parallel(t, (1.0, 0.0))
    ker_alpha_beta, ker_alpha_minus_beta = _parallel(t, (0.0, 1.0)), _parallel(t, (2.0, 1.0))

    if _u_is_cds(spec, u_rows, seed):
        return _cds("SO2n-semiprod(2)")
    if ker_alpha and _zero(phi) and _zero(eta) and independent_pair_exists(spec, u_rows) is None:
        return _cds("SO2n-semiprod(3)")
    if ker_beta and _zero(y) and quadric_vanishes(spec, u_rows):
        return _cds("SO2n-semiprod(4)")

    root = single_root_space(spec, u_rows)
    cone = cone_test(spec, t_rows, u_rows) if root is not None else None
    if cone is not None and cone.is_cds:
        return _cds("SO2n-semiprod(5)", boundary=cone.boundary)

    if ker_alpha and _zero(phi) and parallel_pair_exists(spec, u_rows, seed=seed).witness is None:
        return _not_cds("SO2n-semi-notCDS(2)", _curve(2))
    if ker_beta and _zero(phi) and _zero(y) and np.linalg.matrix_rank(x) == u_rows.shape[0]:
        return _not_cds("SO2n-semi-notCDS(3)", _curve(1))
    if ker_alpha_beta and _zero(phi) and _zero(x) and np.linalg.matrix_rank(y) == u_rows.shape[0]:
        return _not_cds("SO2n-semi-notCDS(4)", _curve(1))
    if ker_beta and _zero(y) and not contains_eta_axis(spec, u_rows) \
            and so1n_normal_form(spec, u_rows).delta < 0.0:
        return _not_cds("SO2n-semi-notCDS(5)", _curve(1))
    if ker_alpha_minus_beta and u_rows.shape[0] == 1 and _zero(x) and _zero(eta) \
            and not _zero(phi) and not _zero(y):
        return _not_cds("SO2n-semi-notCDS(6)", _curve(Fraction(3, 2)))
    if ker_beta and u_rows.shape[0] == 1 and _zero(y) and not quadric_vanishes(spec, u_rows):
        return _not_cds("SO2n-semi-notCDS(7)", _curve(1))
    if cone is not None:
        return _not_cds("SO2n-semi-notCDS(8)", cone.region)
    raise ClassificationDefectError(
        "Semidirect product matched no rule",
        {"t": t.tolist(), "u": u_rows.tolist()},
    )


# === SO(2,n), graph ===

def classify_so2n_graph(spec: GroupSpec, form: GraphForm, seed: int = 0) -> Verdict:
    omega = form.root
    rows = standard_rows(spec, form)
    u_rows = _form_rows(spec, form.u_basis)

    if _u_is_cds(spec, u_rows, seed):
        return _cds("SO2n-notsemi-CDS")
    if (
        omega in ("beta", "alpha+beta")
        and is_abelian(spec, rows)
        and _meets(spec, u_rows, omega)
        and _inside(spec, rows, [omega, "alpha+2beta"])
    ):
        return _cds("SO2n-notsemi-CDS")

    def inside(*roots: str) -> bool:
        return u_rows.shape[0] > 0 and _inside(spec, u_rows, roots)

    eta_line = _is_root_space(spec, u_rows, "alpha+2beta")
    if omega in ("beta", "alpha+beta") and eta_line:
        return _not_cds("SO2n-notsemi-notCDS(7)", _band(1, 1, 2, 0))
    if omega == "alpha+beta" and _is_root_space(spec, u_rows, "alpha"):
        return _not_cds("SO2n-notsemi-notCDS(8)", _band(1, 1, 2, 0))
    if omega == "alpha" and inside("alpha+beta"):
        return _not_cds("SO2n-notsemi-notCDS(1)", _band(1, 0, 2, -1))
    if omega == "alpha" and inside("alpha+2beta"):
        return _not_cds("SO2n-notsemi-notCDS(2)", _band(2, -2, 2, 0))
    if omega == "alpha+2beta" and inside("alpha"):
        return _not_cds("SO2n-notsemi-notCDS(3)", _band(2, -2, 2, 0))
    if omega == "alpha+2beta" and (inside("beta") or inside("alpha+beta")):
        return _not_cds("SO2n-notsemi-notCDS(4)", _band(1, 0, 2, -1))
    if omega in ("beta", "alpha+beta"):
        other = "alpha+beta" if omega == "beta" else "beta"
        if inside(omega, "alpha+2beta") and not _meets(spec, u_rows, omega) \
                and not _meets(spec, u_rows, "alpha+2beta"):
            return _not_cds("SO2n-notsemi-notCDS(5)", _band(1, 0, Fraction(3, 2), 0))
        if inside(other, "alpha+2beta") and not _meets(spec, u_rows, "alpha+2beta"):
            return _not_cds("SO2n-notsemi-notCDS(6)", _band(1, 0, 1, 2))
    raise ClassificationDefectError(
        "Graph form matched no rule",
        {"root": omega, "u": u_rows.tolist()},
    )


# === Explanations ===

def describe_shape(shape: MuShape) -> str:
    if isinstance(shape, FullChamber):
        return "the whole chamber"
    if isinstance(shape, Curve):
        return f"the curve ρ₂ ≍ {shape.growth}"
    if isinstance(shape, Band):
        return f"the band between {shape.lower} and {shape.upper}"
    if isinstance(shape, ConeRegion):
        return f"a cone with slopes [{shape.slope_low:.4g}, {shape.slope_high:.4g}]"
    if isinstance(shape, Ray):
        return f"the ray through {shape.direction}"
    if isinstance(shape, RayPair):
        return f"the rays through {shape.direction} and {shape.opposite}"
    if isinstance(shape, LogCurve):
        return f"a log^{shape.k} curve along {shape.direction}"
    return shape.shape


def explain(verdict: Verdict) -> str:
    head = "CDS" if verdict.is_cds else "not CDS"
    text = f"{head} by {verdict.rule}; μ(H) fills {describe_shape(verdict.shape)}"
    if verdict.boundary:
        text += " (cone boundary)"
    if verdict.certainty != "exact":
        text += f" [{verdict.certainty}]"
    return text


class ClassificationCapability(BaseCapability):
    """Classify a subalgebra of 𝔞+𝔫 and predict the shape of μ(H)"""

    def describe(self) -> CapabilityDescription:
        return CapabilityDescription(
            name="classification",
            purpose="Decide whether exp(h) is a Cartan-decomposition subgroup and predict μ(H)",
            inputs={
                "group": "Group kind (SL3 or SO2n) and n",
                "basis": "Basis of h in named coordinates",
                "seed": "Seed for randomized sub-tests",
            },
            outputs={
                "verdict": "is_cds, rule, shape, witnesses, certainty",
                "standard_form": "Standard form of h when dim h >= 2",
                "explanation": "One-line summary",
            },
            examples=[
                "SL3 𝔞 -> CDS by SL3-CDS(2)",
                "SL3 𝔲_α ⊕ 𝔲_{α+β} -> not CDS, curve s^1",
                "SO(2,5) span{φ + y₁, η} -> CDS by SO2n-HinN-CDS(1)",
            ],
            errors={"NotASubalgebraError": 3, "NonstandardFormError": 5, "ClassificationDefectError": 1},
        )

    def execute(self, inputs: ClassificationInputs) -> ClassificationResult:
        spec = self.group_spec(inputs)
        h = Subalgebra(spec=spec, basis=inputs.basis)
        verdict = classify(spec, h, seed=inputs.seed)
        form = None
        if h.dim >= 2:
            rows = h.matrix()
            if decompose_parts(spec, rows).torus.shape[0] < 2:
                form = to_standard_form(spec, rows)
        lower, upper = shape_envelope(spec, verdict.shape)
        return ClassificationResult(
            verdict=verdict,
            standard_form=form,
            explanation=explain(verdict),
            metadata={"group": spec.label, "dim": h.dim, "envelope": [str(lower), str(upper)]},
        )
