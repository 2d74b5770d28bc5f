"""
State models for the verify workflow - Grouped architecture
Each state group handles related functionality for clarity
"""

from datetime import datetime
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from models.algebra import CoordVec, StandardForm
from models.config import Tolerances
from models.empirical import FitReport, MuCloud, VerifyResult, WallHits
from models.group import GroupSpec
from models.shapes import MuShape, Verdict


class CoreState(BaseModel):
    """Job inputs and processing status"""
    spec: GroupSpec
    basis: List[CoordVec] = Field(min_length=1)
    seed: int = 0
    budget: int = 4000
    max_log_radius: float = 40.0
    threads: int = 1
    tolerances: Tolerances = Field(default_factory=Tolerances)
    expected_shape: Optional[MuShape] = None
    status: Literal["processing", "complete", "error"] = "processing"
    current_node: Optional[str] = None
    error: Optional[str] = None
    error_type: Optional[str] = None
    exit_code: int = 0


class ArtifactState(BaseModel):
    """Intermediate results, filled stage by stage"""
    standard_form: Optional[StandardForm] = None
    verdict: Optional[Verdict] = None
    cloud: Optional[MuCloud] = None
    walls: Optional[WallHits] = None
    fit: Optional[FitReport] = None
    result: Optional[VerifyResult] = None


class RoutingState(BaseModel):
    """Next node decisions"""
    next_node: str = "validate"


class DebugState(BaseModel):
    """Optional debug information"""
    trace_enabled: bool = False
    trace_events: List[Dict[str, Any]] = Field(default_factory=list)

    def add_trace_event(self, event: str, data: Dict[str, Any]) -> None:
        if self.trace_enabled:
            self.trace_events.append({
                "timestamp": datetime.now().isoformat(),
                "event": event,
                "data": data,
            })


class VerifyState(BaseModel):
    """Main state - passed between nodes"""
    core: CoreState
    routing: RoutingState = Field(default_factory=RoutingState)
    artifacts: ArtifactState = Field(default_factory=ArtifactState)
    debug: Optional[DebugState] = None

    def fail(self, error: Exception, exit_code: int) -> None:
        self.core.status = "error"
        self.core.error = str(error)
        self.core.error_type = type(error).__name__
        self.core.exit_code = exit_code
        self.routing.next_node = "report"

    def is_complete(self) -> bool:
        return self.core.status in ("complete", "error")
