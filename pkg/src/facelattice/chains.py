"""
Longest chains of faces K[I_nn] ⊊ ... ⊊ K[I_00] = K (CP side) and
K[J_nn] ⊊ ... ⊊ K[J_0n] = K (COP side), their strictness witnesses, a sampled
test of the face property, and replays of the two patterns that are not faces.
"""
from enum import Enum
from typing import Any
from typing import Dict
from typing import Iterator
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import attr
from boltons.iterutils import pairwise

from facelattice import constants
from facelattice.cones import AnyCone
from facelattice.cones import ConeId
from facelattice.cones import ConeKind
from facelattice.cones import member
from facelattice.cones import member_dd_plus
from facelattice.cones import member_dual_dd_plus
from facelattice.cones import member_dual_sdd_plus
from facelattice.cones import member_nonneg
from facelattice.cones import member_psd
from facelattice.cones import PluginCone
from facelattice.cones import Side
from facelattice.core import Pair
from facelattice.core import SymMatrix
from facelattice.core import triangular
from facelattice.patterns import build_I
from facelattice.patterns import build_J
from facelattice.patterns import chain_order_cop
from facelattice.patterns import chain_order_cp
from facelattice.patterns import generator_E
from facelattice.patterns import IndexSet
from facelattice.patterns import legacy_patterns
from facelattice.patterns import pattern_matrix_E
from facelattice.patterns import vanishes_on
from facelattice.sampling import check_plugin_sandwich
from facelattice.sampling import make_rng
from facelattice.sampling import sample_member
from facelattice.utils import debug_echo
from facelattice.utils import DimensionMismatch
from facelattice.utils import IndexOutOfRange
from facelattice.utils import SandwichViolation
from facelattice.utils import WitnessFailure


class Ordering(Enum):
    PAPER = "paper"
    LEGACY = "legacy"


@attr.s(frozen=True, auto_attribs=True)
class Face:
    """K[I] = {A ∈ K : A_ij = 0 for all (i,j) ∈ I}."""

    cone: AnyCone
    pattern: IndexSet

    def __attrs_post_init__(self) -> None:
        if self.cone.n != self.pattern.n:
            raise DimensionMismatch(
                f"pattern of order {self.pattern.n} on {self.cone.name}"
            )

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def label(self) -> str:
        return f"{self.cone.name}[{self.pattern.label}]"

    def contains(self, a: SymMatrix) -> bool:
        return vanishes_on(a, self.pattern) and self.cone.contains(a)


@attr.s(frozen=True, auto_attribs=True)
class ChainStep:
    """`witness` lies in `larger` but not in `smaller`; the patterns differ by `added`."""

    larger: Face
    smaller: Face
    added: Pair
    witness: SymMatrix


@attr.s(frozen=True, auto_attribs=True)
class Chain:
    """
    N.B.: faces run from the smallest face up to K itself; witnesses[t]
    separates faces[t + 1] from faces[t]
    """

    side: Side
    cone: AnyCone
    ordering: Ordering
    faces: Tuple[Face, ...]
    added: Tuple[Pair, ...]
    witnesses: Tuple[SymMatrix, ...]

    @property
    def n(self) -> int:
        return self.cone.n

    @property
    def length(self) -> int:
        return len(self.faces)

    def descending(self) -> List[Face]:
        """Faces from K down, the order F_1 = K, F_2, ... used in reports."""
        return list(reversed(self.faces))

    def steps(self) -> Iterator[ChainStep]:
        for t, (smaller, larger) in enumerate(pairwise(self.faces)):
            yield ChainStep(larger, smaller, self.added[t], self.witnesses[t])


def _check_sandwich(cone: AnyCone, n: int, side: Side) -> None:
    if cone.n != n:
        raise DimensionMismatch(f"{cone.name} is not a cone of order {n}")
    if isinstance(cone, PluginCone):
        if cone.side is not side:
            raise SandwichViolation(f"{cone.name} is declared on the {cone.side.value} side")
        report = check_plugin_sandwich(cone, constants.DEFAULT_CLI_SAMPLES)
        if not report.ok:
            raise SandwichViolation(
                f"{cone.name} failed the sampled sandwich check: "
                f"{report.violations[0].note}"
            )
        return
    if side not in cone.sides:
        bounds = "DD+ ⊆ K ⊆ N" if side is Side.CP else "N ⊆ K ⊆ (SDD+)*"
        raise SandwichViolation(f"{cone.name} does not satisfy {bounds}")


def _descending_to_chain(
    side: Side,
    cone: AnyCone,
    ordering: Ordering,
    patterns: Sequence[IndexSet],
    witnesses: Sequence[SymMatrix],
) -> Chain:
    added = []
    for larger, smaller in pairwise(patterns):
        (pair,) = smaller.pairs - larger.pairs
        added.append(pair)
    faces = tuple(Face(cone, p) for p in reversed(patterns))
    chain = Chain(
        side, cone, ordering, faces, tuple(reversed(added)), tuple(reversed(witnesses))
    )
    debug_echo(
        f"built {side.value}-side chain of {cone.name} ({ordering.value}): "
        f"{chain.length} faces"
    )
    return chain


def build_chain_cp(
    n: int, cone: AnyCone, ordering: Ordering = Ordering.PAPER
) -> Chain:
    _check_sandwich(cone, n, Side.CP)
    if ordering is Ordering.LEGACY:
        patterns = legacy_patterns(n)
    else:
        patterns = [build_I(n, i, j) for i, j in chain_order_cp(n)]
    # a step that adds (k,l) is witnessed by E_kl
    witnesses = []
    for larger, smaller in pairwise(patterns):
        (k, l) = next(iter(smaller.pairs - larger.pairs))
        witnesses.append(generator_E(n, k, l))
    return _descending_to_chain(Side.CP, cone, ordering, patterns, witnesses)


def build_chain_cop(n: int, cone: AnyCone) -> Chain:
    _check_sandwich(cone, n, Side.COP)
    patterns = [build_J(n, i, j) for i, j in chain_order_cop(n)]
    witnesses = [pattern_matrix_E(larger) for larger, _ in pairwise(patterns)]
    return _descending_to_chain(Side.COP, cone, Ordering.PAPER, patterns, witnesses)


@attr.s(frozen=True, auto_attribs=True)
class WitnessVerdict:
    step: str
    clauses: Tuple[Tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.clauses)

    def to_dict(self) -> Dict[str, Any]:
        return {"step": self.step, "clauses": dict(self.clauses), "ok": self.ok}


def _verify_step(
    side: Side,
    cone: AnyCone,
    witness: SymMatrix,
    larger: IndexSet,
    smaller: IndexSet,
    added: Pair,
) -> WitnessVerdict:
    if side not in cone.sides:
        raise SandwichViolation(f"{cone.name} is not sandwiched on the {side.value} side")
    if side is Side.CP:
        in_cone = member_dd_plus(witness).is_member
        zeros = vanishes_on(witness, larger)
    else:
        in_cone = member_nonneg(witness).is_member
        # zeros exactly on the larger pattern
        zeros = vanishes_on(witness, larger) and all(
            witness[p] != 0 for p in larger.free()
        )
    step = f"{larger.label} ⊋ {smaller.label}"
    clauses = (
        ("a", in_cone, "witness outside the inner sandwich cone"),
        ("b", zeros, f"witness does not vanish on {larger.label}"),
        ("c", witness[added] != 0 and added in smaller, f"entry {added} does not separate"),
    )
    for clause, passed, message in clauses:
        if not passed:
            raise WitnessFailure(clause, f"{step}: {message}")
    return WitnessVerdict(step, tuple((clause, passed) for clause, passed, _ in clauses))


def verify_witness_cp(n: int, i: int, j: int, cone: AnyCone) -> WitnessVerdict:
    """E_ij ∈ K[I_{i,j+1}] \\ K[I_ij]."""
    if not 1 <= i <= j <= n:
        raise IndexOutOfRange(f"no CP-side step ({i},{j}) for order {n}")
    return _verify_step(
        Side.CP, cone, generator_E(n, i, j), build_I(n, i, j + 1), build_I(n, i, j), (i, j)
    )


def verify_witness_cop(n: int, i: int, j: int, cone: AnyCone) -> WitnessVerdict:
    """E[J_{i,j-1}] ∈ K[J_{i,j-1}] \\ K[J_ij]."""
    if not 1 <= i <= j <= n:
        raise IndexOutOfRange(f"no COP-side step ({i},{j}) for order {n}")
    larger = build_J(n, i, j - 1)
    return _verify_step(
        Side.COP, cone, pattern_matrix_E(larger), larger, build_J(n, i, j), (i, j)
    )


def verify_step(chain: Chain, step: ChainStep) -> WitnessVerdict:
    return _verify_step(
        chain.side,
        chain.cone,
        step.witness,
        step.larger.pattern,
        step.smaller.pattern,
        step.added,
    )


def verify_chain(chain: Chain) -> List[WitnessVerdict]:
    return [verify_step(chain, step) for step in chain.steps()]


def step_verdicts(chain: Chain) -> List[Optional[str]]:
    """
    One entry per step from K downward: None when the witness checks out,
    otherwise the failure message.
    """
    verdicts: List[Optional[str]] = []
    for step in reversed(list(chain.steps())):
        try:
            verify_step(chain, step)
            verdicts.append(None)
        except WitnessFailure as ex:
            verdicts.append(ex.message)
    return verdicts


@attr.s(frozen=True, auto_attribs=True)
class FaceAxiomViolation:
    a: SymMatrix
    b: SymMatrix

    def to_dict(self) -> Dict[str, Any]:
        return {"A": self.a.to_dict(), "B": self.b.to_dict(), "A+B": (self.a + self.b).to_dict()}


@attr.s(auto_attribs=True)
class FaceAxiomReport:
    face: str
    samples: int
    seed: int
    probes: int = 0
    skipped: Optional[str] = None
    violations: List[FaceAxiomViolation] = attr.ib(factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "face": self.face,
            "samples": self.samples,
            "seed": self.seed,
            "probes": self.probes,
            "violations": len(self.violations),
        }
        if self.skipped is not None:
            d["skipped"] = self.skipped
        if self.violations:
            d["first_violation"] = self.violations[0].to_dict()
        return d


def _outer_filter(cone: AnyCone) -> Any:
    if Side.CP in cone.sides:
        return lambda m: member_nonneg(m).is_member
    if Side.COP in cone.sides:
        return lambda m: member_dual_sdd_plus(m).is_member
    return lambda m: True


def _sampling_cone(cone: AnyCone) -> ConeId:
    if isinstance(cone, PluginCone):
        # members of the lower sandwich cone are members of K
        kind = ConeKind.DD_PLUS if cone.side is Side.CP else ConeKind.NONNEG
        return ConeId(kind, cone.n)
    return cone


MAX_DRAWS = 50


def face_axiom_test(
    face: Face,
    samples: int,
    seed: int = constants.DEFAULT_SEED,
    extra_pairs: Sequence[Tuple[SymMatrix, SymMatrix]] = (),
) -> FaceAxiomReport:
    """
    Contrapositive test of the face property: for A ∈ K \\ F and B ∈ K, A + B
    must not lie in F. Every sampled A is probed with a random B ∈ K and with
    its reflection (A with the pattern entries negated), which makes A + B
    vanish on the pattern whenever the reflection stays in K.
    """
    report = FaceAxiomReport(face.label, samples, seed)
    cone = face.cone
    outer = _outer_filter(cone)

    def in_cone(m: SymMatrix) -> bool:
        return outer(m) and cone.contains(m)

    def probe(a: SymMatrix, b: SymMatrix) -> None:
        report.probes += 1
        total = a + b
        if vanishes_on(total, face.pattern) and in_cone(b) and in_cone(total):
            report.violations.append(FaceAxiomViolation(a, b))

    for a, b in extra_pairs:
        if in_cone(a) and not vanishes_on(a, face.pattern):
            probe(a, b)

    if not face.pattern.pairs:
        report.skipped = "face is the whole cone; K \\ F is empty"
        return report

    rng = make_rng(seed)
    sampler_cone = _sampling_cone(cone)
    for _ in range(samples):
        a = None
        for _ in range(MAX_DRAWS):
            candidate = sample_member(sampler_cone, rng)
            if not vanishes_on(candidate, face.pattern):
                a = candidate
                break
        if a is None:
            report.skipped = f"no member outside the face in {MAX_DRAWS} draws"
            break
        probe(a, sample_member(sampler_cone, rng))
        reflected = a.replace({p: -a[p] for p in face.pattern.pairs})
        probe(a, reflected)
    debug_echo(
        f"face axiom {face.label}: {report.probes} probes, {len(report.violations)} violations"
    )
    return report


@attr.s(frozen=True, auto_attribs=True)
class Replay:
    """A replayed non-face instance: A, B ∈ K, A + B ∈ K[I], A ∉ K[I]."""

    name: str
    n: int
    cone: str
    pattern: IndexSet
    matrices: Tuple[Tuple[str, SymMatrix], ...]
    checks: Tuple[Tuple[str, bool], ...]
    certificates: Tuple[Tuple[str, Dict[str, Any]], ...] = ()

    @property
    def confirmed(self) -> bool:
        return all(passed for _, passed in self.checks)

    @property
    def pair(self) -> Tuple[SymMatrix, SymMatrix]:
        found = dict(self.matrices)
        return found["A"], found["B"]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "cone": self.cone,
            "pattern": self.pattern.to_dict(),
            "matrices": {label: m.to_dict() for label, m in self.matrices},
            "checks": [{"claim": claim, "holds": passed} for claim, passed in self.checks],
            "certificates": dict(self.certificates),
            "confirmed": self.confirmed,
        }


def _require_pair_order(n: int) -> None:
    if n < 2:
        raise IndexOutOfRange(f"the replay needs n >= 2, got {n}")


def replay_remark_dual_ddplus(n: int) -> Replay:
    """(DD_+)^*[J_12] is not a face of (DD_+)^*, although it is one of (SDD_+)^*."""
    _require_pair_order(n)
    a = SymMatrix.from_rows([[0, 1], [1, 2]]).padded(n)
    b = SymMatrix.from_rows([[0, -1], [-1, 2]]).padded(n)
    total = a + b
    pattern = build_J(n, 1, 2)
    certs = {
        "A": member_dual_dd_plus(a),
        "B": member_dual_dd_plus(b),
        "A+B": member_dual_dd_plus(total),
        "B in (SDD+)*": member_dual_sdd_plus(b),
    }
    checks = (
        ("A ∈ (DD+)*", certs["A"].is_member),
        ("B ∈ (DD+)*", certs["B"].is_member),
        ("A+B ∈ (DD+)*", certs["A+B"].is_member),
        ("A_11 + B_11 = 0", a[1, 1] + b[1, 1] == 0),
        ("A_12 + B_12 = 0", a[1, 2] + b[1, 2] == 0),
        ("A+B ∈ (DD+)*[J_12]", vanishes_on(total, pattern) and certs["A+B"].is_member),
        ("A ∉ (DD+)*[J_12]", not vanishes_on(a, pattern)),
        ("B ∉ (DD+)*[J_12]", not vanishes_on(b, pattern)),
        ("B ∉ (SDD+)*", not certs["B in (SDD+)*"].is_member),
    )
    return Replay(
        "dual-ddp-face",
        n,
        ConeId(ConeKind.DUAL_DD_PLUS, n).name,
        pattern,
        (("A", a), ("B", b), ("A+B", total)),
        checks,
        tuple((label, cert.to_dict()) for label, cert in certs.items()),
    )


COP_ORDERING_KINDS = frozenset(
    {ConeKind.SPN, ConeKind.COP, ConeKind.DUAL_SDD_PLUS, ConeKind.PSD}
)


def replay_remark_cop_order(n: int, cone: Optional[ConeId] = None) -> Replay:
    """K[I_1n] is not a face of any K with S_+ ⊆ K, so the CP-side order fails there."""
    _require_pair_order(n)
    if cone is None:
        cone = ConeId(ConeKind.SPN if n <= constants.SMALL_ORDER_LIMIT else ConeKind.DUAL_SDD_PLUS, n)
    if cone.kind not in COP_ORDERING_KINDS:
        raise SandwichViolation(f"{cone.name} is not known to contain S_+^{n}")
    if cone.n != n:
        raise DimensionMismatch(f"{cone.name} is not a cone of order {n}")
    a = SymMatrix.from_upper(n, {(1, 1): 1, (n, n): 1, (1, n): -1})
    b = SymMatrix.from_upper(n, {(1, 1): 1, (n, n): 1, (1, n): 1})
    total = a + b
    pattern = build_I(n, 1, n)
    certs = {
        "A psd": member_psd(a),
        "B psd": member_psd(b),
        "A": member(cone, a),
        "B": member(cone, b),
        "A+B": member(cone, total),
    }
    checks = (
        ("A ∈ S_+", certs["A psd"].is_member),
        ("B ∈ S_+", certs["B psd"].is_member),
        (f"A ∈ {cone.name}", certs["A"].is_member),
        (f"B ∈ {cone.name}", certs["B"].is_member),
        ("A_1n + B_1n = 0", a[1, n] + b[1, n] == 0),
        ("A+B ∈ K[I_1n]", vanishes_on(total, pattern) and certs["A+B"].is_member),
        ("A ∉ K[I_1n]", not vanishes_on(a, pattern)),
    )
    return Replay(
        "cop-ordering",
        n,
        cone.name,
        pattern,
        (("A", a), ("B", b), ("A+B", total)),
        checks,
        tuple((label, cert.to_dict()) for label, cert in certs.items()),
    )


@attr.s(auto_attribs=True)
class CollapseReport:
    """
    K[J_ii] = K[J_in] for K ⊆ DNN: a zero diagonal entry forces a zero row.
    `zero_diagonals[i - 1]` counts the members seen with A_ii = 0.
    """

    n: int
    cone: str
    samples: int
    seed: int
    zero_diagonals: List[int]
    rejected_truncations: int = 0
    violations: List[Tuple[int, SymMatrix]] = attr.ib(factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "cone": self.cone,
            "samples": self.samples,
            "seed": self.seed,
            "zero_diagonals": list(self.zero_diagonals),
            "rejected_truncations": self.rejected_truncations,
            "violations": [
                {"row": i, "matrix": m.to_dict()} for i, m in self.violations
            ],
        }


COLLAPSE_KINDS = frozenset({ConeKind.CP, ConeKind.DNN})


def equality_collapse_check(
    n: int,
    cone: ConeId,
    samples: int,
    seed: int = constants.DEFAULT_SEED,
) -> CollapseReport:
    if cone.kind not in COLLAPSE_KINDS:
        raise SandwichViolation(f"{cone.name} is not a cone between CP and DNN")
    if cone.n != n:
        raise DimensionMismatch(f"{cone.name} is not a cone of order {n}")
    report = CollapseReport(n, cone.name, samples, seed, [0] * n)

    def check(a: SymMatrix) -> None:
        for i in range(1, n + 1):
            if a[i, i] != 0:
                continue
            report.zero_diagonals[i - 1] += 1
            if any(a[i, j] != 0 for j in range(1, n + 1)):
                report.violations.append((i, a))

    witnesses = [generator_E(n, k, l) for k in range(1, n + 1) for l in range(k, n + 1)]
    rng = make_rng(seed)
    for a in witnesses + [sample_member(cone, rng) for _ in range(samples)]:
        if not cone.contains(a):
            continue
        check(a)
        # zeroing a diagonal entry of a nonzero row must leave the cone
        for i in range(1, n + 1):
            if a[i, i] != 0 and any(a[i, j] != 0 for j in range(1, n + 1) if j != i):
                truncated = a.replace({(i, i): 0})
                if cone.contains(truncated):
                    report.violations.append((i, truncated))
                else:
                    report.rejected_truncations += 1
    return report


def longest_chain_upper_bound(n: int) -> int:
    """Strictly nested faces have strictly increasing pattern sizes, at most T_n."""
    return triangular(n) + 1
