"""
Configuration models

- Settings: process-level defaults from CARTANKIT_* environment variables (and .env)
- JobConfig: the JSON job schema read by the CLI
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from models.algebra import CoordVec, SO2nCoord, Subalgebra
from models.group import GroupKind, GroupSpec
from models.shapes import MuShape

Task = Literal["classify", "verify", "project", "sample", "catalog"]
SUBALGEBRA_TASKS = ("classify", "verify", "sample")


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="CARTANKIT_", env_file=".env", extra="ignore")

    threads: int = Field(default=1, ge=1)
    seed: int = 0
    budget: int = Field(default=4000, ge=0)
    max_log_radius: float = Field(default=40.0, ge=1.0)
    log_level: str = "INFO"
    out: str = "out"


class GroupConfig(BaseModel):
    kind: GroupKind
    n: Optional[int] = None

    @model_validator(mode="after")
    def _n_for_so2n(self) -> "GroupConfig":
        if self.kind == "SO2n" and (self.n is None or self.n < 3):
            raise ValueError(f"SO(2,n) needs n >= 3, got {self.n}")
        if self.kind == "SL3" and self.n is not None:
            raise ValueError("SL3 takes no n")
        return self


class SubalgebraConfig(BaseModel):
    basis: List[CoordVec] = Field(min_length=1)


class Tolerances(BaseModel):
    wall: float = Field(default=0.05, gt=0.0)
    q_fit: float = Field(default=0.3, gt=0.0)
    c_max: float = Field(default=1e3, gt=1.0)
    membership: float = Field(default=1e-9, gt=0.0)


class OutputConfig(BaseModel):
    dir: Optional[str] = None


class JobConfig(BaseModel):
    group: GroupConfig
    subalgebra: Optional[SubalgebraConfig] = None
    tasks: List[Task] = Field(default_factory=lambda: ["classify"])
    seed: Optional[int] = None
    budget: Optional[int] = Field(default=None, ge=0)
    max_log_radius: Optional[float] = Field(default=None, ge=1.0)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output: OutputConfig = Field(default_factory=OutputConfig)
    matrix: Optional[List[List[float]]] = None  # group element for the project task
    expected_shape: Optional[MuShape] = None  # overrides the predicted shape in verify

    @model_validator(mode="after")
    def _basis_matches_group(self) -> "JobConfig":
        if self.subalgebra is None:
            return self
        for v in self.subalgebra.basis:
            if v.kind != self.group.kind:
                raise ValueError(f"Basis vector of kind {v.kind} for group {self.group.kind}")
            if isinstance(v, SO2nCoord) and v.n != self.group.n:
                raise ValueError(f"Basis vector with x, y of length {len(v.x)}; SO(2,{self.group.n}) needs {self.group.n - 2}")
        return self

    def needs_subalgebra(self, command: Optional[str] = None) -> bool:
        """Whether the command (or, without one, any listed task) reads the subalgebra basis"""
        tasks = self.tasks if command is None else [command]
        return any(t in SUBALGEBRA_TASKS for t in tasks)

    def subalgebra_for(self, spec: GroupSpec) -> Subalgebra:
        if self.subalgebra is None:
            raise ValueError("Job has no subalgebra")
        return Subalgebra(spec=spec, basis=self.subalgebra.basis)
