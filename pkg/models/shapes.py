"""
Classification outcome models - growth functions, μ-shapes and verdicts
"""

from fractions import Fraction
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from models.algebra import CoordVec
from models.group import Rational


class GrowthFn(BaseModel):
    """s ↦ sᵖ (log s)^q"""
    p: Rational
    q: Rational = Fraction(0)

    @field_validator("p")
    @classmethod
    def _nonnegative(cls, value):
        if value < 0:
            raise ValueError(f"Growth power must be nonnegative, got {value}")
        return value

    def key(self) -> Tuple[float, float]:
        return (float(self.p), float(self.q))

    def log_value(self, log_s: np.ndarray) -> np.ndarray:
        """log f(s) = p·log s + q·log log s (log s > 1)"""
        log_s = np.asarray(log_s, dtype=float)
        return float(self.p) * log_s + float(self.q) * np.log(log_s)

    def __str__(self) -> str:
        if self.q == 0:
            return f"s^{self.p}"
        return f"s^{self.p}(log s)^{self.q}"


class FullChamber(BaseModel):
    shape: Literal["FullChamber"] = "FullChamber"


class Curve(BaseModel):
    """Band(f, f)"""
    shape: Literal["Curve"] = "Curve"
    growth: GrowthFn


class Band(BaseModel):
    shape: Literal["Band"] = "Band"
    lower: GrowthFn
    upper: GrowthFn

    @model_validator(mode="after")
    def _ordered(self) -> "Band":
        if self.lower.key() > self.upper.key():
            raise ValueError(f"Band lower {self.lower} exceeds upper {self.upper}")
        return self


class ConeRegion(BaseModel):
    """Closed convex cone in the (λ₁, λ₂) plane, given by its χ₂/χ₁ slope range"""
    shape: Literal["ConeRegion"] = "ConeRegion"
    slope_low: float
    slope_high: float
    reflected: bool = False  # a Weyl element was needed to bring the cone into A⁺

    @model_validator(mode="after")
    def _ordered(self) -> "ConeRegion":
        if self.slope_low > self.slope_high + 1e-12:
            raise ValueError("Cone slope range is reversed")
        return self


class Ray(BaseModel):
    shape: Literal["Ray"] = "Ray"
    direction: List[float]  # chamber coordinates


class RayPair(BaseModel):
    shape: Literal["RayPair"] = "RayPair"
    direction: List[float]
    opposite: List[float]  # image under the opposition involution


class LogCurve(BaseModel):
    """Points a + s with a on a ray and ‖s‖ ≈ (log‖a‖)^k along a perpendicular ray"""
    shape: Literal["LogCurve"] = "LogCurve"
    direction: List[float]
    perpendicular: List[float]
    k: int = Field(ge=1)


MuShape = Annotated[
    Union[FullChamber, Curve, Band, ConeRegion, Ray, RayPair, LogCurve],
    Field(discriminator="shape"),
]

Certainty = Literal["exact", "probabilistic"]


class Witness(BaseModel):
    """Element backing an existential condition"""
    condition: str  # "E1", "E2", "E3", "E4", "Eta", "cone-boundary", ...
    vector: Optional[CoordVec] = None
    matrix: Optional[List[List[float]]] = None
    note: Optional[str] = None


class Verdict(BaseModel):
    is_cds: bool
    rule: str
    shape: MuShape
    witnesses: List[Witness] = Field(default_factory=list)
    certainty: Certainty = "exact"
    boundary: bool = False  # cone test landed on the cone boundary

    @model_validator(mode="after")
    def _cds_iff_full(self) -> "Verdict":
        if self.is_cds != isinstance(self.shape, FullChamber):
            raise ValueError(f"Verdict {self.rule}: is_cds={self.is_cds} but shape is {self.shape.shape}")
        return self
