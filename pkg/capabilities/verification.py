"""
VerificationCapability - empirical cross-checks of the classifier

Key responsibilities:
- cross_validate: verdict vs. μ-cloud two-wall test and band fit
- fuzz_corpus: random closed subalgebras for consistency sweeps
- Capability wrapper running the verify workflow
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from capabilities.base import BaseCapability, CapabilityDescription
from capabilities.classification import classify
from models.algebra import Subalgebra
from models.capabilities import VerificationInputs, VerificationResult
from models.config import Tolerances
from models.empirical import MuCloud, VerifyResult
from models.group import GroupSpec
from models.shapes import FullChamber, MuShape
from services.errors import NonstandardFormError
from services.fitting import agreement_report, band_check, two_wall_test
from services.liealg import (
    as_rows,
    decompose_parts,
    root_vector,
    subalgebra_closure,
    to_subalgebra,
    toral_vector,
)
from services.normal_forms import to_standard_form
from services.sampling import sample_cloud
from workflow.graph import run_verify

logger = logging.getLogger(__name__)


def cross_validate(
    spec: GroupSpec,
    h,
    budget: int = 4000,
    max_log_radius: float = 40.0,
    seed: int = 0,
    threads: int = 1,
    tolerances: Optional[Tolerances] = None,
    expected_shape: Optional[MuShape] = None,
) -> Tuple[VerifyResult, MuCloud]:
    """classify + sample_cloud + two_wall_test (+ band_check for non-CDS shapes)"""
    tolerances = tolerances or Tolerances()
    rows = as_rows(spec, h)
    verdict = classify(spec, rows, seed=seed)
    cloud = sample_cloud(spec, rows, budget, max_log_radius, seed, threads)
    walls = two_wall_test(cloud, float(spec.k1), float(spec.k2), tolerances.wall)
    shape = expected_shape if expected_shape is not None else verdict.shape
    fit = None
    if not isinstance(shape, FullChamber):
        fit = band_check(spec, cloud, shape, c_max=tolerances.c_max, q_tol=tolerances.q_fit, wall_tol=tolerances.wall)
    return agreement_report(verdict, walls, fit, expected_shape), cloud


def _random_generator(spec: GroupSpec, rng: np.random.Generator) -> np.ndarray:
    """A root vector, a toral direction, or a toral direction in ker ω plus a root vector of ω"""
    choice = rng.integers(3)
    root = spec.roots.positive[rng.integers(len(spec.roots.positive))]
    nil = root_vector(spec, root.name, int(rng.integers(root.width)), float(rng.choice([-1.0, 1.0])))
    if choice == 0:
        return nil
    if spec.kind == "SL3":
        toral = rng.normal(size=3)
        toral -= toral.mean()
    else:
        toral = rng.normal(size=2)
    if choice == 1:
        return toral_vector(spec, toral)
    # project onto ker ω
    a = np.array(root.functional)
    toral = toral - (toral @ a) / (a @ a) * a
    if spec.kind == "SL3":
        toral -= toral.mean()
    return toral_vector(spec, toral) + nil


def fuzz_corpus(spec: GroupSpec, count: int, seed: int = 0, max_generators: int = 3) -> List[Subalgebra]:
    """Random closed subalgebras of 𝔞+𝔫 in standard-form reach; deterministic in seed"""
    rng = np.random.default_rng(seed)
    corpus: List[Subalgebra] = []
    dropped = 0
    for _ in range(count):
        k = int(rng.integers(1, max_generators + 1))
        generators = np.array([_random_generator(spec, rng) for _ in range(k)])
        if not np.abs(generators).max() > 0.0:
            continue
        rows = subalgebra_closure(spec, generators)
        try:
            if rows.shape[0] >= 2 and decompose_parts(spec, rows).torus.shape[0] < 2:
                to_standard_form(spec, rows)
        except NonstandardFormError as e:
            dropped += 1
            logger.info(f"Dropping fuzz input of dimension {rows.shape[0]}: {e}")
            continue
        corpus.append(to_subalgebra(spec, rows))
    logger.info(f"Fuzz corpus for {spec.label}: {len(corpus)} subalgebras, {dropped} dropped")
    return corpus


class VerificationCapability(BaseCapability):
    """Cross-validate a classification against sampled Cartan projections"""

    def describe(self) -> CapabilityDescription:
        return CapabilityDescription(
            name="verification",
            purpose="Check a verdict against the two-wall test and a band fit of the μ-cloud",
            inputs={
                "group": "Group kind (SL3 or SO2n) and n",
                "basis": "Basis of h in named coordinates",
                "seed": "Sampling seed",
                "budget": "Sample budget",
                "max_log_radius": "Largest log-radius of the ladder",
                "threads": "Worker threads for sampling",
                "tolerances": "Wall, q-fit and band-constant tolerances",
                "expected_shape": "Optional shape overriding the prediction",
            },
            outputs={
                "result": "Verdict, wall hits, band fit, agreement and mismatch flags",
                "cloud": "The sampled μ-cloud",
                "exit_code": "0 agreement, 4 mismatch, error codes otherwise",
            },
            examples=[
                "SO(2,5) catalog entry (1) -> agreement, exit 0",
                "SL3 𝔲_α ⊕ 𝔲_{α+β} with expected FullChamber -> mismatch, exit 4",
            ],
            errors={"NotASubalgebraError": 3, "NonstandardFormError": 5, "InsufficientSpanError": 1},
        )

    def execute(self, inputs: VerificationInputs) -> VerificationResult:
        spec = self.group_spec(inputs)
        logger.info(f"Executing verification for a {len(inputs.basis)}-dimensional subalgebra of {spec.label}")
        state = run_verify(
            spec, inputs.basis, seed=inputs.seed, budget=inputs.budget,
            max_log_radius=inputs.max_log_radius, threads=inputs.threads,
            tolerances=inputs.tolerances, expected_shape=inputs.expected_shape,
        )
        return VerificationResult(
            success=state.core.status == "complete" and state.core.exit_code == 0,
            result=state.artifacts.result,
            cloud=state.artifacts.cloud,
            error=state.core.error,
            exit_code=state.core.exit_code,
            metadata={
                "group": spec.label,
                "error_type": state.core.error_type,
                "standard_form": state.artifacts.standard_form.form if state.artifacts.standard_form else None,
            },
        )
