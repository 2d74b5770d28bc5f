"""
Standard forms of subalgebras of 𝔞+𝔫

Key responsibilities:
- Put h into one of InsideN / ContainsA / Semidirect / Graph, conjugating by exp(𝔫)
  when h is not compatible with A
- SO(1,n) normal form {y = 0, x ∈ φc + X₀, η = pφ + b·x} and its conjugator
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from models.algebra import (
    ContainsAForm,
    GraphForm,
    InsideNForm,
    SemidirectForm,
    So1nNormalForm,
    StandardForm,
)
from models.group import GroupSpec
from services.errors import NonstandardFormError
from services.group import diagonal_element
from services.linalg import expm, null_rows, orthonormal_rows, project_onto_rows
from services.liealg import (
    adjoint_conjugate,
    array_to_coord,
    as_rows,
    centralized_roots,
    coord_to_matrix,
    decompose_parts,
    exp_n_closed,
    nilpotent_part,
    root_space_rows,
    span_residual,
    toral_vector,
)

logger = logging.getLogger(__name__)

STANDARD_TOL = 1e-9


def _coords(spec: GroupSpec, rows: np.ndarray) -> list:
    return [array_to_coord(spec, r) for r in rows]


def _conjugator_field(g: np.ndarray) -> Optional[List[List[float]]]:
    return None if np.allclose(g, np.eye(g.shape[0]), atol=1e-14) else g.tolist()


def _mixed_element(spec: GroupSpec, rows: np.ndarray, t0: np.ndarray) -> np.ndarray:
    """An element of h whose toral part is t0"""
    toral = rows[:, :spec.toral_width]
    coeffs, *_ = np.linalg.lstsq(toral.T, t0, rcond=None)
    return coeffs @ rows


def _compatibility_residual(
    spec: GroupSpec, t0: np.ndarray, mixed: np.ndarray, cap_n: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """(r*, W): the part of the mixed nilpotent component outside U + 𝔠_𝔫(T), and 𝔠_𝔫(T) rows"""
    centralizer = root_space_rows(spec, centralized_roots(spec, t0[None, :]))
    target = orthonormal_rows(np.vstack([cap_n, centralizer]))
    n0 = nilpotent_part(spec, mixed)
    return n0 - project_onto_rows(n0, target), centralizer


def _newton_conjugator(spec: GroupSpec, t0: np.ndarray, residual: np.ndarray) -> np.ndarray:
    """exp(Z) with [Z, t0] cancelling the residual in every weight space ω(t0) ≠ 0"""
    z = np.zeros(spec.coord_dim)
    for root in spec.roots.positive:
        value = root.evaluate(t0)
        if abs(value) > 1e-12:
            z[root.start:root.stop] = residual[root.start:root.stop] / value
    return expm(coord_to_matrix(spec, z))


def to_standard_form(spec: GroupSpec, basis: np.ndarray, tol: float = STANDARD_TOL) -> StandardForm:
    """Classify h as InsideN / ContainsA / Semidirect / Graph, conjugating if needed"""
    rows = as_rows(spec, basis)
    dim = rows.shape[0]
    parts = decompose_parts(spec, rows)
    r_t = parts.torus.shape[0]
    identity = np.eye(spec.d)

    if r_t == 0:
        return InsideNForm(basis=_coords(spec, rows))
    if parts.cap_a.shape[0] > 0 and parts.cap_a.shape[0] + parts.cap_n.shape[0] == dim:
        return SemidirectForm(
            basis=_coords(spec, rows),
            t_basis=_coords(spec, parts.cap_a),
            u_basis=_coords(spec, parts.cap_n),
        )
    if r_t == 2:
        return ContainsAForm(basis=_coords(spec, rows))

    t0 = parts.torus[0]
    conjugator = identity
    current = rows
    passes = spec.roots.max_height + 1
    for attempt in range(passes + 1):
        parts = decompose_parts(spec, current)
        mixed = _mixed_element(spec, current, t0)
        residual, centralizer = _compatibility_residual(spec, t0, mixed, parts.cap_n)
        defect = float(np.linalg.norm(residual))
        logger.debug(f"Compatibility pass {attempt}: defect {defect:.3e}")
        if defect <= tol * max(1.0, float(np.abs(current).max())):
            break
        if attempt == passes:
            raise NonstandardFormError(
                "Subalgebra could not be conjugated into a compatible form",
                {"defect": defect, "passes": passes},
            )
        step = _newton_conjugator(spec, t0, residual)
        current = adjoint_conjugate(spec, current, step)
        conjugator = step @ conjugator

    u_rows = parts.cap_n
    n0 = nilpotent_part(spec, mixed)
    # split n0 = u + c with u ∈ U and c ∈ 𝔠_𝔫(T), dropping the part of c inside U
    stacked = np.vstack([u_rows, centralizer])
    coeffs, *_ = np.linalg.lstsq(stacked.T, n0, rcond=None)
    c = coeffs[u_rows.shape[0]:] @ centralizer if centralizer.shape[0] else np.zeros(spec.coord_dim)
    if centralizer.shape[0] and u_rows.shape[0]:
        outside = [i for i in range(spec.coord_dim) if not np.any(centralizer[:, i])]
        overlap = orthonormal_rows(null_rows(u_rows[:, outside]) @ u_rows)
        c = c - project_onto_rows(c, overlap)

    generator = toral_vector(spec, t0)
    conj_field = _conjugator_field(conjugator)
    if np.linalg.norm(c) <= tol * max(1.0, float(np.linalg.norm(n0))):
        return SemidirectForm(
            basis=_coords(spec, np.vstack([generator, u_rows])),
            t_basis=_coords(spec, generator[None, :]),
            u_basis=_coords(spec, u_rows),
            conjugator=conj_field,
        )

    roots = centralized_roots(spec, t0[None, :])
    if len(roots) != 1:
        raise NonstandardFormError("Graph part lies in no single root space", {"roots": roots})
    root = spec.roots.by_name(roots[0])
    logger.debug(f"Graph form over {root.name}, |ψ| = {np.linalg.norm(c):.3e}")
    return GraphForm(
        basis=_coords(spec, np.vstack([generator + c, u_rows])),
        root=root.name,
        generator=array_to_coord(spec, generator),
        psi=[float(v) for v in c[root.start:root.stop]],
        u_basis=_coords(spec, u_rows),
        conjugator=conj_field,
    )


def standard_rows(spec: GroupSpec, form: StandardForm) -> np.ndarray:
    return np.array([v.to_array() for v in form.basis])


# === SO(1,n) ===

def _so2n_slices(spec: GroupSpec, rows: np.ndarray):
    m = spec.n - 2
    return rows[:, 2], rows[:, 3:3 + m], rows[:, 3 + m:3 + 2 * m], rows[:, -1]


def so1n_normal_form(spec: GroupSpec, basis: np.ndarray, tol: float = 1e-9) -> So1nNormalForm:
    """(X₀, b, c, p) for h ⊆ 𝔫 with y ≡ 0 and h ∩ 𝔲_{α+2β} = 0"""
    if spec.kind != "SO2n":
        raise ValueError("The SO(1,n) normal form exists only for SO(2,n)")
    rows = as_rows(spec, basis)
    scale = max(1.0, float(np.abs(rows).max()))
    if np.abs(rows[:, :2]).max() > tol * scale:
        raise ValueError("SO(1,n) normal form needs h inside 𝔫")
    phi, x, y, eta = _so2n_slices(spec, rows)
    if np.abs(y).max() > tol * scale:
        raise ValueError("SO(1,n) normal form needs y ≡ 0 on h")
    phi_x = np.column_stack([phi, x])
    if np.linalg.matrix_rank(phi_x, tol=tol * scale) < rows.shape[0]:
        raise ValueError("SO(1,n) normal form needs h ∩ 𝔲_{α+2β} = 0")

    x0 = orthonormal_rows(null_rows(phi[:, None]) @ x)
    has_phi = bool(np.abs(phi).max() > tol * scale)
    if has_phi:
        unit_phi, *_ = np.linalg.lstsq(phi[None, :], np.array([1.0]), rcond=None)
        x_at_phi = unit_phi @ x
        c = x_at_phi - project_onto_rows(x_at_phi, x0)
    else:
        c = np.zeros(spec.n - 2)

    # η = p·φ + b·x with b = β·X₀
    columns = [phi[:, None]] if has_phi else []
    if x0.shape[0]:
        columns.append(x @ x0.T)
    if columns:
        design = np.hstack(columns)
        solution, *_ = np.linalg.lstsq(design, eta, rcond=None)
        residual = float(np.abs(design @ solution - eta).max())
    else:
        solution, residual = np.zeros(0), float(np.abs(eta).max())
    if residual > tol * scale:
        raise ValueError(f"η is not a linear function of (φ, x) on h (residual {residual:.3e})")

    p = float(solution[0]) if has_phi else 0.0
    beta = solution[1:] if has_phi else solution
    b = beta @ x0 if x0.shape[0] else np.zeros(spec.n - 2)
    return So1nNormalForm(
        x0_basis=x0.tolist(), b=[float(v) for v in b], c=[float(v) for v in c], p=p,
    )


def so1n_fixed_vector(spec: GroupSpec, nf: So1nNormalForm) -> np.ndarray:
    """(0, −‖c‖² − p, c − b, 1, 0), fixed by every element of H"""
    b, c = np.array(nf.b), np.array(nf.c)
    v = np.zeros(spec.d)
    v[1] = -float(c @ c) - nf.p
    v[2:spec.n] = c - b
    v[spec.n] = 1.0
    return v


def so1n_conjugator(spec: GroupSpec, nf: So1nNormalForm) -> np.ndarray:
    """g = a·exp(Y) carrying the H-fixed vector onto the anchor line, so gHg⁻¹ ⊆ SO(1,n)"""
    delta = nf.delta
    if delta >= 0.0:
        raise ValueError(f"SO(1,n) conjugation needs δ < 0, got {delta}")
    s = float(np.sqrt(-2.0 / delta))
    m = spec.n - 2
    shift = exp_n_closed(spec, 0.0, np.zeros(m), np.array(nf.c) - np.array(nf.b), 0.0)
    a = diagonal_element(spec, [0.0, float(np.log(s))])
    g = a @ shift
    logger.debug(f"SO(1,n) conjugator with δ = {delta:.6g}, s = {s:.6g}")
    return g
