"""
Base Capability Interface

Every capability resolves its group from the typed inputs, runs synchronously
and reports the exit code its failure modes map to.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List

from pydantic import BaseModel, Field

from models.capabilities import CapabilityInputs, CapabilityResult
from models.group import GroupSpec
from services.group import make_group

logger = logging.getLogger(__name__)


class CapabilityDescription(BaseModel):
    """What a capability takes, returns and how it fails"""
    name: str
    purpose: str
    inputs: Dict[str, Any]
    outputs: Dict[str, Any]
    examples: List[str]
    errors: Dict[str, int] = Field(default_factory=dict)  # error type -> exit code


class BaseCapability(ABC):
    """Base interface for all capabilities"""

    @abstractmethod
    def describe(self) -> CapabilityDescription:
        pass

    @abstractmethod
    def execute(self, inputs: CapabilityInputs) -> CapabilityResult:
        pass

    def group_spec(self, inputs: CapabilityInputs) -> GroupSpec:
        spec = make_group(inputs.group.kind, inputs.group.n)
        logger.debug(f"{self.describe().name}: resolved {spec.label}")
        return spec
