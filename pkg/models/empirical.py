"""
Empirical models - μ-clouds and the reports built from them
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from models.group import GroupKind
from models.shapes import Verdict

CLOUD_COLUMNS = ("sample_id", "bin", "logN1", "logN2", "logS1", "logS12")


class MuSample(BaseModel):
    sample_id: int
    bin: int
    log_n1: float
    log_n2: float
    log_s1: float
    log_s12: float
    coefficients: List[float] = Field(default_factory=list)
    direction: int = -1  # index of the sampled ray; -1 when unknown
    inverse: bool = False  # mirrored from h to h⁻¹

    def csv_row(self) -> Tuple[Any, ...]:
        return (self.sample_id, self.bin, self.log_n1, self.log_n2, self.log_s1, self.log_s12)


class MuCloud(BaseModel):
    """Sampled log-sizes of ρ₁(h), ρ₂(h) over a subgroup H"""
    kind: GroupKind
    samples: List[MuSample] = Field(default_factory=list)
    seed: int
    budget: int
    max_log_radius: float
    schedule: Dict[str, Any] = Field(default_factory=dict)  # directions, radius ladder, scalings
    skipped: int = 0  # samples dropped on overflow
    unreliable: int = 0  # samples dropped for cancellation beyond the precision guard
    partial: bool = False  # some unit bin below the per-bin minimum

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples], dtype=float)

    @property
    def chi(self) -> Tuple[np.ndarray, np.ndarray]:
        """Exact (χ₁, χ₂) = (log σ₁, log σ₁σ₂)"""
        return self.column("log_s1"), self.column("log_s12")

    @property
    def span(self) -> float:
        log_n1 = self.column("log_n1")
        return float(log_n1.max() - log_n1.min()) if log_n1.size else 0.0


class WallHits(BaseModel):
    hit_wall1: bool
    hit_wall2: bool
    ratio_min: float  # inf of χ₂/χ₁ over the top rungs of every ray
    ratio_max: float
    margin1: float  # min |χ₂/χ₁ − k₁| over the top rungs
    margin2: float
    top_count: int
    tol: float

    @property
    def both(self) -> bool:
        return self.hit_wall1 and self.hit_wall2


class FitReport(BaseModel):
    passed: bool
    c_estimate: float  # smallest C with C⁻¹f₁ ≤ ρ₂ ≤ C f₂ on the samples
    c_max: float
    envelope: Tuple[float, float]  # (inf, sup) of χ₂/χ₁ over the top rungs
    fitted_p: Optional[float] = None
    fitted_q: Optional[float] = None
    walls: Optional[WallHits] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)


class StabilityReport(BaseModel):
    sup_offset: float  # sup chamber distance between matched samples
    offset_slope: float  # regression slope of offset on χ₁
    bounded: bool
    samples: int


class ProperProbeReport(BaseModel):
    verdict: Literal["likely-proper", "not-proper", "inconclusive"]
    distance_slope: Optional[float] = None
    distances: List[Tuple[int, float]] = Field(default_factory=list)  # (bin, min distance)
    witnesses: List[Tuple[int, int]] = Field(default_factory=list)  # matched (sample, sample) ids


class VerifyResult(BaseModel):
    """Classifier verdict against the empirical two-wall test (and band check when not CDS)"""
    verdict: Verdict
    walls: WallHits
    fit: Optional[FitReport] = None
    empirical_cds: bool
    agreement: bool
    mismatch: bool  # disagreement on an exact verdict
    notes: List[str] = Field(default_factory=list)
