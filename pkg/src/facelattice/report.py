"""
Chain reports: every face of a built chain with its dimension, polyhedrality
and verification verdicts, plus the side's counterexample replays.
"""
import json
from pathlib import Path
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple

import attr

from facelattice import constants
from facelattice.chains import build_chain_cop
from facelattice.chains import build_chain_cp
from facelattice.chains import Chain
from facelattice.chains import COLLAPSE_KINDS
from facelattice.chains import COP_ORDERING_KINDS
from facelattice.chains import equality_collapse_check
from facelattice.chains import Face
from facelattice.chains import face_axiom_test
from facelattice.chains import FaceAxiomReport
from facelattice.chains import Ordering
from facelattice.chains import replay_remark_cop_order
from facelattice.chains import replay_remark_dual_ddplus
from facelattice.chains import step_verdicts
from facelattice.cones import ConeId
from facelattice.cones import ConeKind
from facelattice.cones import Side
from facelattice.core import triangular
from facelattice.geometry import classify_polyhedral
from facelattice.geometry import compute_bounds
from facelattice.geometry import DimensionResult
from facelattice.geometry import face_dimension
from facelattice.geometry import PolyhedralityResult
from facelattice.patterns import build_J
from facelattice.utils import debug_echo
from facelattice.utils import UnsupportedFace

SCHEMA_PATH = (Path(__file__).parent / "schemas" / "chain_report.schema.json").resolve()

# cones with l_poly = T_n - 2 along the standard chains:
# CP ⊆ K ⊆ DNN and SPN ⊆ K ⊆ COP
L_POLY_KNOWN_KINDS = frozenset({ConeKind.CP, ConeKind.DNN, ConeKind.SPN, ConeKind.COP})


def load_schema() -> Dict[str, Any]:
    with SCHEMA_PATH.open() as fd:
        schema: Dict[str, Any] = json.load(fd)
    return schema


def expected_l_poly(n: int) -> int:
    return 0 if n == 1 else triangular(n) - 2


@attr.s(auto_attribs=True)
class FaceEntry:
    index: int
    face: Face
    dimension: DimensionResult
    polyhedrality: Optional[PolyhedralityResult]
    certificate: str
    witness_ok: Optional[bool] = None
    face_axiom: Optional[FaceAxiomReport] = None

    @property
    def polyhedral(self) -> Optional[bool]:
        return None if self.polyhedrality is None else self.polyhedrality.polyhedral

    def to_dict(self) -> Dict[str, Any]:
        pattern = self.face.pattern
        block = None if self.polyhedrality is None else self.polyhedrality.block
        return {
            "index": self.index,
            "label": pattern.label,
            "pattern": [list(p) for p in pattern],
            "cardinality": len(pattern),
            "dimension": self.dimension.to_dict(),
            "polyhedral": self.polyhedral,
            "certificate": self.certificate,
            "embedded_block": None if block is None else list(block),
            "witness_ok": self.witness_ok,
            "face_axiom": None if self.face_axiom is None else self.face_axiom.to_dict(),
        }


@attr.s(auto_attribs=True)
class ChainReport:
    side: Side
    n: int
    cone: str
    ordering: Ordering
    length: int
    faces: List[FaceEntry]
    l_poly: Optional[int]
    l_poly_expected: Optional[int]
    l_poly_realized_by: Optional[str]
    counterexamples: List[Dict[str, Any]] = attr.ib(factory=list)
    flags: List[str] = attr.ib(factory=list)
    # raised by construction for this ordering; they do not fail the report
    expected_flags: List[str] = attr.ib(factory=list)

    @property
    def l_k_bound(self) -> int:
        return triangular(self.n) + 1

    @property
    def ok(self) -> bool:
        return all(flag in self.expected_flags for flag in self.flags)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": constants.REPORT_SCHEMA_VERSION,
            "side": self.side.value,
            "n": self.n,
            "cone": self.cone,
            "ordering": self.ordering.value,
            "length": self.length,
            "l_k_bound": self.l_k_bound,
            "l_poly": self.l_poly,
            "l_poly_expected": self.l_poly_expected,
            "l_poly_realized_by": self.l_poly_realized_by,
            "faces": [entry.to_dict() for entry in self.faces],
            "counterexamples": self.counterexamples,
            "flags": self.flags,
            "expected_flags": self.expected_flags,
        }


def _classify(face: Face, rays: int) -> FaceEntry:
    dimension = face_dimension(face)
    try:
        result: Optional[PolyhedralityResult] = classify_polyhedral(face, rays)
    except UnsupportedFace as ex:
        return FaceEntry(0, face, dimension, None, f"unclassified: {ex.message}")
    assert result is not None
    return FaceEntry(0, face, dimension, result, result.certificate)


def _leading_non_polyhedral(entries: List[FaceEntry]) -> Optional[int]:
    count = 0
    for entry in entries:
        if entry.polyhedral is None:
            return None
        if entry.polyhedral:
            return count
        count += 1
    return count


def _flags(
    chain: Chain, entries: List[FaceEntry], l_poly: Optional[int]
) -> Tuple[List[str], List[str]]:
    n = chain.n
    flags = []
    expected = []
    if chain.length != triangular(n) + 1:
        flags.append(f"length {chain.length} differs from T_n + 1 = {triangular(n) + 1}")
    uppers = [e.dimension.upper for e in entries]
    if uppers != list(range(triangular(n), -1, -1)):
        flags.append("face dimensions do not step down by one from T_n to 0")
    for e in entries:
        if not e.dimension.exact:
            flags.append(
                f"F_{e.index}: dimension bounds {e.dimension.lower} < {e.dimension.upper}"
            )
    seen_polyhedral: Optional[FaceEntry] = None
    for e in entries:
        if e.polyhedral and seen_polyhedral is None:
            seen_polyhedral = e
        elif e.polyhedral is False and seen_polyhedral is not None:
            flags.append(
                f"F_{e.index} is non-polyhedral below the polyhedral F_{seen_polyhedral.index}"
            )
    if seen_polyhedral is not None and seen_polyhedral.dimension.upper > 2 and l_poly:
        cut = (
            f"polyhedral face F_{seen_polyhedral.index} of dimension "
            f"{seen_polyhedral.dimension.upper} cuts the non-polyhedral run at {l_poly}"
        )
        flags.append(cut)
        if chain.ordering is Ordering.LEGACY:
            expected.append(cut)
    for e in entries:
        if e.polyhedrality is not None and e.polyhedrality.independence is not None:
            if not e.polyhedrality.independence.independent:
                flags.append(f"F_{e.index}: ray family is not conically independent")
    if l_poly is not None and n >= 2 and l_poly > triangular(n) - 2:
        flags.append(f"l_poly {l_poly} exceeds the upper bound T_n - 2 = {triangular(n) - 2}")
    return flags, expected


def _counterexamples(
    chain: Chain, samples: int, seed: int
) -> List[Dict[str, Any]]:
    n, cone = chain.n, chain.cone
    found: List[Dict[str, Any]] = []
    if not isinstance(cone, ConeId):
        return found
    if chain.side is Side.CP and cone.kind in COLLAPSE_KINDS:
        collapse = equality_collapse_check(n, cone, samples, seed)
        collapse_entry: Dict[str, Any] = {"name": "equality-collapse", "confirmed": collapse.ok}
        collapse_entry.update(collapse.to_dict())
        found.append(collapse_entry)
    if chain.side is Side.COP and n >= 2:
        if cone.kind in COP_ORDERING_KINDS:
            found.append(replay_remark_cop_order(n, cone).to_dict())
        replay = replay_remark_dual_ddplus(n)
        dual_face = Face(ConeId(ConeKind.DUAL_DD_PLUS, n), build_J(n, 1, 2))
        detection = face_axiom_test(dual_face, samples, seed, extra_pairs=[replay.pair])
        replay_entry = replay.to_dict()
        replay_entry["face_axiom"] = detection.to_dict()
        # the sampled face test must notice that J_12 does not cut a face here
        replay_entry["confirmed"] = replay.confirmed and not detection.ok
        found.append(replay_entry)
    return found


def chain_report(
    chain: Chain,
    verify: bool = False,
    samples: int = constants.DEFAULT_CLI_SAMPLES,
    seed: int = constants.DEFAULT_SEED,
    rays: int = constants.DEFAULT_RAY_COUNT,
) -> ChainReport:
    faces = chain.descending()
    entries = []
    for index, face in enumerate(faces, start=1):
        entry = _classify(face, rays)
        entry.index = index
        entries.append(entry)

    l_poly = _leading_non_polyhedral(entries)
    kind = chain.cone.kind if isinstance(chain.cone, ConeId) else None
    expected = (
        expected_l_poly(chain.n)
        if kind in L_POLY_KNOWN_KINDS and chain.ordering is Ordering.PAPER
        else None
    )
    realized_by = None
    if l_poly is not None:
        realized_by = (
            f"{chain.side.value}-side {chain.ordering.value} chain of {chain.cone.name}, "
            f"faces F_1 ... F_{l_poly + 1}"
        )
    flags, expected_flags = _flags(chain, entries, l_poly)
    if expected is not None and l_poly != expected:
        flags.append(f"l_poly {l_poly} differs from the expected {expected}")

    counterexamples: List[Dict[str, Any]] = []
    if verify:
        for entry, failure in zip(entries, step_verdicts(chain)):
            entry.witness_ok = failure is None
            if failure is not None:
                flags.append(failure)
        for entry in entries:
            entry.face_axiom = face_axiom_test(entry.face, samples, seed)
            if not entry.face_axiom.ok:
                flags.append(f"F_{entry.index}: face axiom violated")
        counterexamples = _counterexamples(chain, samples, seed)
        for example in counterexamples:
            if not example["confirmed"]:
                flags.append(f"counterexample {example['name']} not confirmed")

    report = ChainReport(
        side=chain.side,
        n=chain.n,
        cone=chain.cone.name,
        ordering=chain.ordering,
        length=chain.length,
        faces=entries,
        l_poly=l_poly,
        l_poly_expected=expected,
        l_poly_realized_by=realized_by,
        counterexamples=counterexamples,
        flags=flags,
        expected_flags=expected_flags,
    )
    debug_echo(f"chain report {report.cone}: l_poly={l_poly}, {len(flags)} flags")
    return report


def full_report(
    n: int,
    cp_cone: ConeId,
    cop_cone: ConeId,
    samples: int = constants.DEFAULT_CLI_SAMPLES,
    seed: int = constants.DEFAULT_SEED,
    rays: int = constants.DEFAULT_RAY_COUNT,
) -> Dict[str, Any]:
    chains = [
        build_chain_cp(n, cp_cone),
        build_chain_cp(n, cp_cone, Ordering.LEGACY),
        build_chain_cop(n, cop_cone),
    ]
    reports = [chain_report(c, True, samples, seed, rays) for c in chains]
    return {
        "schema_version": constants.REPORT_SCHEMA_VERSION,
        "n": n,
        "samples": samples,
        "seed": seed,
        "rays": rays,
        "chains": [r.to_dict() for r in reports],
        "bounds": [compute_bounds(n, side).to_dict() for side in (Side.CP, Side.COP)],
        "ok": all(r.ok for r in reports),
    }
