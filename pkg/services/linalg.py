"""
Dense real-matrix kernel

Key responsibilities:
- Max-absolute-entry norm (the matrix norm used everywhere outside exact μ)
- Singular values (LAPACK via scipy), descending
- Exterior square ∧²m and its derivation, in lexicographic pair order
- Matrix exponential with an exact terminating series on nilpotent input
- Scale-guarded logarithms of ‖ρ₁(g)‖, ‖ρ₂(g)‖, σ₁ and σ₁σ₂

All functions are pure; matrices are float64 numpy arrays.
"""

import logging
from functools import lru_cache
from typing import NamedTuple, Optional, Tuple

import numpy as np
import scipy.linalg

from services.errors import ScaleOverflowError

logger = logging.getLogger(__name__)

# exp(709) is the largest finite double exponential
LOG_FLOAT_MAX = 709.0


class LogNorms(NamedTuple):
    """Logarithms of the fundamental-representation sizes of one group element"""
    log_n1: float  # log max_abs_norm(g)
    log_n2: float  # log max_abs_norm(∧²g)
    log_s1: float  # log σ₁(g)
    log_s12: float  # log σ₁(g) + log σ₂(g) = log σ₁(∧²g)


def _require_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {m.shape}")


def max_abs_norm(m: np.ndarray) -> float:
    """Largest absolute entry"""
    return float(np.max(np.abs(m))) if m.size else 0.0


def singular_values(m: np.ndarray) -> np.ndarray:
    """Singular values of a square matrix, descending"""
    m = np.asarray(m, dtype=float)
    _require_square(m)
    return scipy.linalg.svdvals(m)


@lru_cache(maxsize=None)
def wedge_pairs(d: int) -> Tuple[Tuple[int, int], ...]:
    """Ordered pairs (i, j), i < j, in lexicographic order (0-based)"""
    if d < 2:
        raise ValueError(f"Exterior square needs dimension >= 2, got {d}")
    return tuple((i, j) for i in range(d) for j in range(i + 1, d))


def wedge_index(d: int, i: int, j: int) -> int:
    """Flat index of the pair (i, j) with 0 <= i < j < d"""
    if not 0 <= i < j < d:
        raise ValueError(f"Invalid wedge pair ({i}, {j}) for dimension {d}")
    # pairs starting with rows 0..i-1 come first
    return i * d - i * (i + 1) // 2 + (j - i - 1)


def _pair_arrays(d: int) -> Tuple[np.ndarray, np.ndarray]:
    pairs = np.array(wedge_pairs(d))
    return pairs[:, 0], pairs[:, 1]


def wedge_square(m: np.ndarray) -> np.ndarray:
    """∧²m: entry ((i,j),(k,l)) is the 2×2 minor on rows i,j and columns k,l"""
    m = np.asarray(m, dtype=float)
    _require_square(m)
    rows_i, rows_j = _pair_arrays(m.shape[0])
    return (
        m[np.ix_(rows_i, rows_i)] * m[np.ix_(rows_j, rows_j)]
        - m[np.ix_(rows_i, rows_j)] * m[np.ix_(rows_j, rows_i)]
    )


def wedge_derivation(m: np.ndarray) -> np.ndarray:
    """Derivative of wedge_square at the identity, so ∧²exp(m) = exp(wedge_derivation(m))"""
    m = np.asarray(m, dtype=float)
    _require_square(m)
    d = m.shape[0]
    rows_i, rows_j = _pair_arrays(d)
    eye = np.eye(d)
    return (
        m[np.ix_(rows_i, rows_i)] * eye[np.ix_(rows_j, rows_j)]
        - m[np.ix_(rows_i, rows_j)] * eye[np.ix_(rows_j, rows_i)]
        + eye[np.ix_(rows_i, rows_i)] * m[np.ix_(rows_j, rows_j)]
        - eye[np.ix_(rows_i, rows_j)] * m[np.ix_(rows_j, rows_i)]
    )


def is_strictly_upper(m: np.ndarray) -> bool:
    return bool(np.all(np.tril(m) == 0.0))


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential; exact finite series for strictly upper-triangular input"""
    m = np.asarray(m, dtype=float)
    _require_square(m)
    d = m.shape[0]

    if is_strictly_upper(m):
        result = np.eye(d)
        term = np.eye(d)
        for k in range(1, d):
            term = term @ m / k
            if not term.any():
                break
            result = result + term
    else:
        # ‖exp(m)‖ <= exp(‖m‖₁), and overflow is certain well past LOG_FLOAT_MAX
        if np.abs(m).sum(axis=0).max() > 4 * LOG_FLOAT_MAX:
            raise ScaleOverflowError(
                "Matrix exponential would overflow",
                {"norm1": float(np.abs(m).sum(axis=0).max())},
            )
        result = scipy.linalg.expm(m)

    if not np.all(np.isfinite(result)):
        raise ScaleOverflowError("Matrix exponential overflowed", {"dimension": d})
    return result


def nilpotency_degree(m: np.ndarray, tol: float = 1e-9) -> int:
    """Largest k with m^k != 0 (relative to ‖m‖^k); 0 for the zero matrix"""
    m = np.asarray(m, dtype=float)
    _require_square(m)
    scale = max_abs_norm(m)
    if scale == 0.0:
        return 0
    unit = m / scale
    power = unit.copy()
    degree = 0
    for _ in range(m.shape[0]):
        if max_abs_norm(power) <= tol:
            break
        degree += 1
        power = power @ unit
    return degree


def log_norms(g: np.ndarray, wedge: Optional[np.ndarray] = None) -> LogNorms:
    """Scale-guarded logs of ‖g‖, ‖∧²g‖, σ₁(g) and σ₁σ₂(g)

    If ∧²g was built separately (e.g. as a product of exponentials of derivations),
    pass it as `wedge` so no minors are formed from large entries.
    """
    g = np.asarray(g, dtype=float)
    _require_square(g)
    scale = max_abs_norm(g)
    if scale == 0.0 or not np.isfinite(scale):
        raise ScaleOverflowError("Cannot take log-norms of a zero or non-finite matrix")
    log_scale = float(np.log(scale))
    unit = g / scale

    if wedge is None:
        wedge_unit = wedge_square(unit)
        log_wedge_scale = 2.0 * log_scale
    else:
        wedge = np.asarray(wedge, dtype=float)
        wscale = max_abs_norm(wedge)
        if wscale == 0.0 or not np.isfinite(wscale):
            raise ScaleOverflowError("Cannot take log-norms of a zero or non-finite ∧² matrix")
        wedge_unit = wedge / wscale
        log_wedge_scale = float(np.log(wscale))

    log_n2 = log_wedge_scale + float(np.log(max_abs_norm(wedge_unit)))
    log_s1 = log_scale + float(np.log(singular_values(unit)[0]))
    log_s12 = log_wedge_scale + float(np.log(singular_values(wedge_unit)[0]))
    return LogNorms(log_scale, log_n2, log_s1, log_s12)


def log_top_singular(g: np.ndarray) -> float:
    """Scale-guarded log σ₁(g)"""
    g = np.asarray(g, dtype=float)
    scale = max_abs_norm(g)
    if scale == 0.0 or not np.isfinite(scale):
        raise ScaleOverflowError("Cannot take the log of σ₁ of a zero or non-finite matrix")
    return float(np.log(scale) + np.log(singular_values(g / scale)[0]))


def orthonormal_rows(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (as rows) of the row space of `vectors`"""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[-1]))
    basis = scipy.linalg.orth(vectors.T, rcond=tol)
    return basis.T


def null_rows(matrix: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (as rows) of {c : c · matrix = 0}"""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.shape[1] == 0:
        return np.eye(matrix.shape[0])
    return scipy.linalg.null_space(matrix.T, rcond=tol).T


def rank(matrix: np.ndarray, tol: float = 1e-10) -> int:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return 0
    return int(np.linalg.matrix_rank(matrix, tol=tol * max(1.0, max_abs_norm(matrix))))


def project_onto_rows(vector: np.ndarray, basis_rows: np.ndarray) -> np.ndarray:
    """Orthogonal projection of `vector` onto the span of orthonormal `basis_rows`"""
    if basis_rows.shape[0] == 0:
        return np.zeros_like(vector)
    return basis_rows.T @ (basis_rows @ vector)
