"""
Lie algebra models - elements of 𝔞+𝔫, subalgebras and their standard forms

Named coordinates are the wire format:
- SO2n: t1, t2, phi, x[], y[], eta
- SL3:  d[] (summing to 0), u[]
"""

from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from models.group import GroupSpec


class SO2nCoord(BaseModel):
    """Element of 𝔞+𝔫 in 𝔰𝔬(2,n)"""
    kind: Literal["SO2n"] = "SO2n"
    t1: float = 0.0
    t2: float = 0.0
    phi: float = 0.0
    x: List[float]
    y: List[float]
    eta: float = 0.0

    @model_validator(mode="after")
    def _check_lengths(self) -> "SO2nCoord":
        if len(self.x) != len(self.y) or len(self.x) < 1:
            raise ValueError(f"x and y must have equal length n-2 >= 1, got {len(self.x)} and {len(self.y)}")
        values = [self.t1, self.t2, self.phi, self.eta, *self.x, *self.y]
        if not all(np.isfinite(values)):
            raise ValueError("Coordinates must be finite")
        return self

    @property
    def n(self) -> int:
        return len(self.x) + 2

    def to_array(self) -> np.ndarray:
        return np.array([self.t1, self.t2, self.phi, *self.x, *self.y, self.eta], dtype=float)


class SL3Coord(BaseModel):
    """Element of 𝔞+𝔫 in 𝔰𝔩(3,ℝ)"""
    kind: Literal["SL3"] = "SL3"
    d: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0], min_length=3, max_length=3)
    u: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0], min_length=3, max_length=3)

    @field_validator("d")
    @classmethod
    def _traceless(cls, value: List[float]) -> List[float]:
        if abs(sum(value)) > 1e-12 * max(1.0, max(abs(v) for v in value)):
            raise ValueError(f"Diagonal part must be traceless, got sum {sum(value)}")
        return value

    def to_array(self) -> np.ndarray:
        return np.array([*self.d, *self.u], dtype=float)


CoordVec = Annotated[Union[SL3Coord, SO2nCoord], Field(discriminator="kind")]


class Subalgebra(BaseModel):
    """Basis of a subalgebra 𝔥 ⊆ 𝔞+𝔫"""
    spec: GroupSpec
    basis: List[CoordVec] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_kinds(self) -> "Subalgebra":
        for v in self.basis:
            if v.kind != self.spec.kind:
                raise ValueError(f"Basis vector of kind {v.kind} in a {self.spec.kind} subalgebra")
            if isinstance(v, SO2nCoord) and v.n != self.spec.n:
                raise ValueError(f"Basis vector for n={v.n} in SO(2,{self.spec.n})")
        return self

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> np.ndarray:
        """Basis as rows of flat coordinates"""
        return np.array([v.to_array() for v in self.basis])


class SubalgebraCheck(BaseModel):
    """Outcome of check_subalgebra: ok, or the witness of failure"""
    ok: bool
    reason: Optional[Literal["dependent", "not_closed"]] = None
    pair: Optional[Tuple[int, int]] = None
    residual: float = 0.0


class _FormBase(BaseModel):
    basis: List[CoordVec]  # standardized basis of Ad(g)𝔥
    conjugator: Optional[List[List[float]]] = None  # g; None means identity

    def conjugator_matrix(self, d: int) -> np.ndarray:
        return np.eye(d) if self.conjugator is None else np.array(self.conjugator)


class InsideNForm(_FormBase):
    form: Literal["InsideN"] = "InsideN"


class ContainsAForm(_FormBase):
    form: Literal["ContainsA"] = "ContainsA"


class SemidirectForm(_FormBase):
    """𝔥 = 𝔱 ⊕ 𝔲 with 𝔱 ⊆ 𝔞 and 𝔲 ⊆ 𝔫"""
    form: Literal["Semidirect"] = "Semidirect"
    t_basis: List[CoordVec]
    u_basis: List[CoordVec] = Field(default_factory=list)


class GraphForm(_FormBase):
    """𝔥 = ℝ(t + ψ(t)) ⊕ 𝔲 with t spanning ker ω and ψ(t) ∈ 𝔲_ω"""
    form: Literal["Graph"] = "Graph"
    root: str
    generator: CoordVec  # spans ker ω in 𝔞
    psi: List[float]  # ψ(generator) in 𝔲_ω coordinates
    u_basis: List[CoordVec] = Field(default_factory=list)

    @field_validator("psi")
    @classmethod
    def _nonzero(cls, value: List[float]) -> List[float]:
        if not any(abs(v) > 0.0 for v in value):
            raise ValueError("Graph map ψ must be nonzero")
        return value


StandardForm = Annotated[
    Union[InsideNForm, ContainsAForm, SemidirectForm, GraphForm],
    Field(discriminator="form"),
]


class So1nNormalForm(BaseModel):
    """h = {y = 0, x ∈ φc + X₀, η = pφ + b·x} with b ∈ X₀, c ⊥ X₀"""
    x0_basis: List[List[float]] = Field(default_factory=list)  # orthonormal rows
    b: List[float]
    c: List[float]
    p: float

    @model_validator(mode="after")
    def _orthogonality(self) -> "So1nNormalForm":
        c = np.array(self.c)
        if abs(float(np.dot(self.b, c))) > 1e-10 * max(1.0, float(np.linalg.norm(c)) ** 2):
            raise ValueError("b and c must be orthogonal")
        for row in self.x0_basis:
            if abs(float(np.dot(row, c))) > 1e-10 * max(1.0, float(np.linalg.norm(c))):
                raise ValueError("c must be orthogonal to X0")
        return self

    @property
    def delta(self) -> float:
        """‖b‖² − ‖c‖² − 2p"""
        return float(np.dot(self.b, self.b) - np.dot(self.c, self.c) - 2.0 * self.p)
