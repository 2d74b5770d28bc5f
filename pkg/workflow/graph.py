"""
LangGraph Workflow Definition

Defines the verify pipeline with state-based routing:
validate -> standardize -> classify -> sample -> two_wall -> band -> report.
"""

from typing import List, Optional

from langgraph.graph import END, StateGraph

from models.algebra import CoordVec
from models.config import Tolerances
from models.group import GroupSpec
from models.shapes import MuShape
from models.state import CoreState, DebugState, VerifyState
from workflow.nodes import WorkflowNodes

STAGES = ("validate", "standardize", "classify", "sample", "two_wall", "band", "report")


def create_workflow():
    """Create the LangGraph workflow"""
    nodes = WorkflowNodes()
    workflow = StateGraph(VerifyState)

    for stage in STAGES:
        workflow.add_node(stage, getattr(nodes, f"{stage}_node"))

    def route_by_next_node(state: VerifyState) -> str:
        """Route based on next_node in state"""
        next_node = state.routing.next_node
        if next_node == "end":
            return END
        return next_node

    for stage in STAGES:
        workflow.add_conditional_edges(stage, route_by_next_node)

    workflow.set_entry_point("validate")
    return workflow.compile()


def run_verify(
    spec: GroupSpec,
    basis: List[CoordVec],
    seed: int = 0,
    budget: int = 4000,
    max_log_radius: float = 40.0,
    threads: int = 1,
    tolerances: Optional[Tolerances] = None,
    expected_shape: Optional[MuShape] = None,
    debug: bool = False,
) -> VerifyState:
    """Run the verify pipeline to completion and return the final state"""
    initial_state = VerifyState(
        core=CoreState(
            spec=spec, basis=basis, seed=seed, budget=budget, max_log_radius=max_log_radius,
            threads=threads, tolerances=tolerances or Tolerances(), expected_shape=expected_shape,
        )
    )
    if debug:
        initial_state.debug = DebugState(trace_enabled=True)

    final_state = create_workflow().invoke(initial_state)
    if isinstance(final_state, VerifyState):
        return final_state
    return VerifyState(**final_state)
