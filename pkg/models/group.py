"""
Group models - SL(3,ℝ) and SO(2,n) with their restricted root data

Coordinates on 𝔞+𝔫 are flat float vectors. Layouts:
- SL3:  [d1, d2, d3, u1, u2, u3]                      (toral slice 0:3)
- SO2n: [t1, t2, phi, x(n-2), y(n-2), eta]            (toral slice 0:2)
"""

from fractions import Fraction
from typing import Annotated, Any, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, field_validator

GroupKind = Literal["SL3", "SO2n"]


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**6)
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise ValueError(f"Cannot read a rational from {value!r}")


# Reduced fraction, serialized as "p/q"
Rational = Annotated[
    Fraction,
    PlainValidator(_to_fraction),
    PlainSerializer(lambda f: str(f), return_type=str),
]


class Root(BaseModel):
    """A positive restricted root and the slice of its root space in flat coordinates"""
    model_config = ConfigDict(frozen=True)

    name: str  # "alpha", "beta", "alpha+beta", "alpha+2beta"
    simple_coeffs: Tuple[int, int]  # (a, b) for a·α + b·β
    functional: Tuple[float, ...]  # linear functional on toral coordinates
    start: int
    stop: int

    @property
    def height(self) -> int:
        return self.simple_coeffs[0] + self.simple_coeffs[1]

    @property
    def width(self) -> int:
        return self.stop - self.start

    def evaluate(self, toral: np.ndarray) -> float:
        return float(np.dot(self.functional, toral))


class RootData(BaseModel):
    """Simple roots, positive roots and root-space masks"""
    model_config = ConfigDict(frozen=True)

    positive: List[Root]

    def by_name(self, name: str) -> Root:
        for root in self.positive:
            if root.name == name:
                return root
        raise KeyError(f"Unknown root: {name}")

    @property
    def simple(self) -> Tuple[Root, Root]:
        return self.by_name("alpha"), self.by_name("beta")

    @property
    def max_height(self) -> int:
        return max(root.height for root in self.positive)


class GroupSpec(BaseModel):
    """Which group, its ambient dimension, invariant form and wall exponents"""
    model_config = ConfigDict(frozen=True)

    kind: GroupKind
    n: Optional[int] = None
    d: int
    form: Optional[List[List[float]]] = None  # J (SO2n only)
    k1: Rational
    k2: Rational
    roots: RootData
    toral_rank: int = 2

    @property
    def wedge_dim(self) -> int:
        return self.d * (self.d - 1) // 2

    @property
    def J(self) -> Optional[np.ndarray]:
        return None if self.form is None else np.array(self.form, dtype=float)

    @property
    def toral_width(self) -> int:
        """Number of toral coordinates (3 for SL3, with d1+d2+d3 = 0; 2 for SO2n)"""
        return 3 if self.kind == "SL3" else 2

    @property
    def coord_dim(self) -> int:
        return self.roots.positive[-1].stop if self.kind == "SL3" else 2 * self.n

    @property
    def label(self) -> str:
        return "SL(3,R)" if self.kind == "SL3" else f"SO(2,{self.n})"


class ChamberPoint(BaseModel):
    """Cartan projection in log coordinates of A⁺

    SO2n: (λ1, λ2) with λ1 >= λ2 >= 0.
    SL3:  (λ1, λ2, λ3) with λ1 >= λ2 >= λ3 and λ1+λ2+λ3 = 0.
    """
    kind: GroupKind
    coords: List[float] = Field(min_length=2, max_length=3)

    @field_validator("coords")
    @classmethod
    def _finite(cls, value: List[float]) -> List[float]:
        if not all(np.isfinite(value)):
            raise ValueError("Chamber coordinates must be finite")
        return value

    @property
    def chi1(self) -> float:
        return self.coords[0]

    @property
    def chi2(self) -> float:
        return self.coords[0] + self.coords[1]

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)
