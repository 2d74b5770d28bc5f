"""
Capability input/output models for type-safe capability execution
Each capability has specific input and output models for validation
"""

from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from models.algebra import CoordVec, StandardForm
from models.config import GroupConfig, Tolerances
from models.empirical import MuCloud, VerifyResult
from models.shapes import MuShape, Verdict


class CapabilityInputs(BaseModel):
    """Base class for all capability inputs"""
    group: GroupConfig
    seed: int = 0


class CapabilityResult(BaseModel):
    """Base class for all capability results"""
    success: bool = True
    timestamp: datetime = Field(default_factory=datetime.now)
    metadata: Dict[str, Any] = Field(default_factory=dict)


# === Classification Capability Models ===

class ClassificationInputs(CapabilityInputs):
    basis: List[CoordVec] = Field(min_length=1)


class ClassificationResult(CapabilityResult):
    verdict: Verdict
    standard_form: Optional[StandardForm] = None
    explanation: str


# === Catalog Capability Models ===

class CatalogEntry(BaseModel):
    name: str
    basis: List[CoordVec]
    expected: Verdict
    note: Optional[str] = None


class CatalogInputs(CapabilityInputs):
    pass


class CatalogResult(CapabilityResult):
    entries: List[CatalogEntry] = Field(default_factory=list)


# === Verification Capability Models ===

class VerificationInputs(CapabilityInputs):
    basis: List[CoordVec] = Field(min_length=1)
    budget: int = Field(default=4000, ge=0)
    max_log_radius: float = Field(default=40.0, ge=1.0)
    threads: int = Field(default=1, ge=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    expected_shape: Optional[MuShape] = None  # overrides the predicted shape


class VerificationResult(CapabilityResult):
    result: Optional[VerifyResult] = None
    cloud: Optional[MuCloud] = None
    error: Optional[str] = None
    exit_code: int = 0
