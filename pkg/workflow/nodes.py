"""
LangGraph Workflow Nodes

Each node is one stage of the verify pipeline.
Nodes operate on VerifyState and return the updated state.
"""

import logging

from capabilities.classification import classify
from models.algebra import Subalgebra
from models.shapes import FullChamber
from models.state import VerifyState
from services.errors import CartanKitError
from services.fitting import agreement_report, band_check, two_wall_test
from services.liealg import decompose_parts, require_subalgebra
from services.normal_forms import to_standard_form
from services.sampling import sample_cloud

logger = logging.getLogger(__name__)


class WorkflowNodes:
    """Container for all workflow nodes"""

    def _enter(self, state: VerifyState, node: str) -> None:
        state.core.current_node = node
        logger.debug(f"Entering {node}")

    def _rows(self, state: VerifyState):
        return Subalgebra(spec=state.core.spec, basis=state.core.basis).matrix()

    def validate_node(self, state: VerifyState) -> VerifyState:
        """Check that the basis spans a subalgebra of 𝔞+𝔫"""
        self._enter(state, "validate")
        try:
            require_subalgebra(state.core.spec, self._rows(state))
        except CartanKitError as e:
            state.fail(e, e.exit_code)
            return state
        state.routing.next_node = "standardize"
        return state

    def standardize_node(self, state: VerifyState) -> VerifyState:
        """Record the standard form when one applies"""
        self._enter(state, "standardize")
        spec, rows = state.core.spec, self._rows(state)
        try:
            if rows.shape[0] >= 2 and decompose_parts(spec, rows).torus.shape[0] < 2:
                state.artifacts.standard_form = to_standard_form(spec, rows)
        except CartanKitError as e:
            state.fail(e, e.exit_code)
            return state
        if state.debug and state.artifacts.standard_form is not None:
            state.debug.add_trace_event("standard_form", {"form": state.artifacts.standard_form.form})
        state.routing.next_node = "classify"
        return state

    def classify_node(self, state: VerifyState) -> VerifyState:
        self._enter(state, "classify")
        try:
            state.artifacts.verdict = classify(state.core.spec, self._rows(state), seed=state.core.seed)
        except CartanKitError as e:
            state.fail(e, e.exit_code)
            return state
        state.routing.next_node = "sample"
        return state

    def sample_node(self, state: VerifyState) -> VerifyState:
        self._enter(state, "sample")
        core = state.core
        try:
            state.artifacts.cloud = sample_cloud(
                core.spec, self._rows(state), core.budget, core.max_log_radius, core.seed, core.threads,
            )
        except CartanKitError as e:
            state.fail(e, e.exit_code)
            return state
        if state.debug:
            state.debug.add_trace_event("cloud", {
                "samples": len(state.artifacts.cloud.samples),
                "partial": state.artifacts.cloud.partial,
            })
        state.routing.next_node = "two_wall"
        return state

    def two_wall_node(self, state: VerifyState) -> VerifyState:
        self._enter(state, "two_wall")
        spec = state.core.spec
        try:
            state.artifacts.walls = two_wall_test(
                state.artifacts.cloud, float(spec.k1), float(spec.k2), state.core.tolerances.wall,
            )
        except CartanKitError as e:
            state.fail(e, e.exit_code)
            return state
        shape = state.core.expected_shape or state.artifacts.verdict.shape
        # FullChamber has no band
        state.routing.next_node = "report" if isinstance(shape, FullChamber) else "band"
        return state

    def band_node(self, state: VerifyState) -> VerifyState:
        self._enter(state, "band")
        core = state.core
        shape = core.expected_shape or state.artifacts.verdict.shape
        try:
            state.artifacts.fit = band_check(
                core.spec, state.artifacts.cloud, shape,
                c_max=core.tolerances.c_max, q_tol=core.tolerances.q_fit, wall_tol=core.tolerances.wall,
            )
        except CartanKitError as e:
            state.fail(e, e.exit_code)
            return state
        state.routing.next_node = "report"
        return state

    def report_node(self, state: VerifyState) -> VerifyState:
        """Assemble the verify result and the exit code"""
        self._enter(state, "report")
        state.routing.next_node = "end"
        if state.core.status == "error":
            logger.error(f"Verify pipeline failed: {state.core.error_type}: {state.core.error}")
            return state

        result = agreement_report(
            state.artifacts.verdict, state.artifacts.walls, state.artifacts.fit, state.core.expected_shape,
        )
        state.artifacts.result = result
        state.core.status = "complete"
        state.core.exit_code = 4 if result.mismatch else 0
        if result.mismatch:
            logger.warning(f"Classifier/empirical mismatch: {'; '.join(result.notes)}")
        else:
            logger.info(f"Verify agreement={result.agreement} for rule {result.verdict.rule}")
        return state
