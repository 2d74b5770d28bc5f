"""
CatalogCapability - built-in minimal Cartan-decomposition subgroups

Key responsibilities:
- The minimal CDS of SL(3,ℝ) inside AN
- The minimal CDS of SO(2,n) inside N, with the restrictions for n = 3 and n = 4
- Expected verdicts for consistency checks against the classifier
"""

import logging
from typing import List

from capabilities.base import BaseCapability, CapabilityDescription
from models.algebra import SL3Coord, SO2nCoord
from models.capabilities import CatalogEntry, CatalogInputs, CatalogResult
from models.group import GroupSpec
from models.shapes import FullChamber, Verdict

logger = logging.getLogger(__name__)

ROTATION_FAMILY_NOTE = (
    "SL(3,R) also has the minimal family exp(t·diag(1,1,-2) + t·(E12 - E21)) · U_{alpha+beta} "
    "and its relatives; they leave AN and are not listed"
)


def _sl3(d=(0.0, 0.0, 0.0), u=(0.0, 0.0, 0.0)) -> SL3Coord:
    return SL3Coord(d=list(d), u=list(u))


def _so2n(m: int, phi=0.0, x=None, y=None, eta=0.0) -> SO2nCoord:
    def slot(entries):
        vec = [0.0] * m
        for i, value in (entries or {}).items():
            vec[i] = value
        return vec

    return SO2nCoord(phi=phi, x=slot(x), y=slot(y), eta=eta)


def _expected(rule: str, boundary: bool = False) -> Verdict:
    return Verdict(is_cds=True, rule=rule, shape=FullChamber(), boundary=boundary)


def _sl3_entries() -> List[CatalogEntry]:
    return [
        CatalogEntry(
            name="A",
            basis=[_sl3(d=(1, -1, 0)), _sl3(d=(0, 1, -1))],
            expected=_expected("SL3-CDS(2)"),
        ),
        CatalogEntry(
            name="N-plane p=1",
            basis=[_sl3(u=(1, 1, 0)), _sl3(u=(0, 0, 1))],
            expected=_expected("SL3-CDS(3)"),
        ),
        CatalogEntry(
            name="graph family",
            basis=[_sl3(d=(1, 1, -2), u=(1, 0, 0)), _sl3(u=(0, 1, 0)), _sl3(u=(0, 0, 1))],
            expected=_expected("SL3-CDS(1)"),
            note="h(e^t, e^t, e^-2t, t e^t, r, s)",
        ),
        CatalogEntry(
            name="root semidirect (1,1)",
            basis=[_sl3(d=(1, 1, -2)), _sl3(u=(1, 0, 0))],
            expected=_expected("SL3-CDS(6)"),
        ),
        CatalogEntry(
            name="root semidirect (1,-1/2)",
            basis=[_sl3(d=(1, -0.5, -0.5)), _sl3(u=(1, 0, 0))],
            expected=_expected("SL3-CDS(6)", boundary=True),
            note="boundary of the (p, q) family",
        ),
    ]


def _so2n_entries(n: int) -> List[CatalogEntry]:
    m = n - 2
    entries: List[CatalogEntry] = []
    for eps in (1, 0):
        entries.append(CatalogEntry(
            name=f"(1) eps={eps}",
            basis=[_so2n(m, phi=1.0, y={0: float(eps)}), _so2n(m, eta=1.0)],
            expected=_expected("SO2n-HinN-CDS(1)" if eps else "SO2n-HinN-CDS(2)"),
        ))
    for eps in (1, 0):
        if eps and m < 2:
            continue
        entries.append(CatalogEntry(
            name=f"(2) eps={eps}",
            basis=[_so2n(m, x={0: 1.0}), _so2n(m, phi=1.0, y={1: float(eps)} if eps else None)],
            expected=_expected("SO2n-HinN-CDS(2)"),
        ))
    for eps in (1, 0):
        if m < 2 or (eps and m < 3):
            continue
        entries.append(CatalogEntry(
            name=f"(3) eps={eps}",
            basis=[_so2n(m, x={0: 1.0}, y={2: 1.0} if eps else None), _so2n(m, y={1: 1.0})],
            expected=_expected("SO2n-HinN-CDS(2)"),
        ))
    return entries


def catalog_minimal(spec: GroupSpec) -> List[CatalogEntry]:
    """Minimal Cartan-decomposition subgroups inside AN (SL3) or N (SO2n)"""
    entries = _sl3_entries() if spec.kind == "SL3" else _so2n_entries(spec.n)
    logger.debug(f"Catalog for {spec.label}: {len(entries)} entries")
    return entries


class CatalogCapability(BaseCapability):
    """List the minimal Cartan-decomposition subgroups with their expected verdicts"""

    def describe(self) -> CapabilityDescription:
        return CapabilityDescription(
            name="catalog",
            purpose="Built-in catalog of minimal Cartan-decomposition subgroups",
            inputs={"group": "Group kind (SL3 or SO2n) and n"},
            outputs={"entries": "List of (name, basis, expected verdict)"},
            examples=[
                "SO(2,5) -> 6 entries, all CDS",
                "SO(2,3) -> 3 entries",
                "SL3 -> A, the N-plane, the graph family and the (p, q) family",
            ],
            errors={"InvalidConfigError": 2},
        )

    def execute(self, inputs: CatalogInputs) -> CatalogResult:
        spec = self.group_spec(inputs)
        logger.info(f"Executing catalog for {spec.label}")
        entries = catalog_minimal(spec)
        metadata = {"group": spec.label, "count": len(entries)}
        if spec.kind == "SL3":
            metadata["rotation_family"] = ROTATION_FAMILY_NOTE
        return CatalogResult(entries=entries, metadata=metadata)
