"""
Exact membership oracles for the matrix cones sandwiched between DD_+ and N
(and dually between N and (DD_+)^*), each returning a re-verified certificate.
"""
from enum import Enum
from fractions import Fraction
from typing import Any
from typing import Callable
from typing import Dict
from typing import FrozenSet
from typing import Optional
from typing import Tuple
from typing import Union

import attr

from facelattice import constants
from facelattice.copositive import copositive_2x2
from facelattice.copositive import copositive_min
from facelattice.copositive import SimplexMinResult
from facelattice.core import inner_product
from facelattice.core import Pair
from facelattice.core import psd_check
from facelattice.core import PsdCertificate
from facelattice.core import render
from facelattice.core import SymMatrix
from facelattice.core import upper_pairs
from facelattice.core import verify_psd_certificate
from facelattice.core import ZERO
from facelattice.patterns import generator_E
from facelattice.utils import CertificateError
from facelattice.utils import debug_echo
from facelattice.utils import DimensionMismatch
from facelattice.utils import NotAMember
from facelattice.utils import UnsupportedOrder


class ConeKind(Enum):
    NONNEG = "n"
    DD_PLUS = "ddp"
    SDD_PLUS = "sddp"
    DUAL_DD_PLUS = "ddp-dual"
    DUAL_SDD_PLUS = "sddp-dual"
    PSD = "psd"
    DNN = "dnn"
    COP = "cop"
    SPN = "spn4"
    CP = "cp4"


class Side(Enum):
    CP = "cp"
    COP = "cop"


SYMBOLS = {
    ConeKind.NONNEG: "N",
    ConeKind.DD_PLUS: "DD+",
    ConeKind.SDD_PLUS: "SDD+",
    ConeKind.DUAL_DD_PLUS: "(DD+)*",
    ConeKind.DUAL_SDD_PLUS: "(SDD+)*",
    ConeKind.PSD: "PSD",
    ConeKind.DNN: "DNN",
    ConeKind.COP: "COP",
    ConeKind.SPN: "SPN",
    ConeKind.CP: "CP",
}

# DD_+ ⊆ K ⊆ N on the CP side, N ⊆ K ⊆ (SDD_+)^* on the COP side
SANDWICHED: Dict[Side, FrozenSet[ConeKind]] = {
    Side.CP: frozenset(
        {ConeKind.NONNEG, ConeKind.DD_PLUS, ConeKind.SDD_PLUS, ConeKind.CP, ConeKind.DNN}
    ),
    Side.COP: frozenset(
        {ConeKind.NONNEG, ConeKind.SPN, ConeKind.COP, ConeKind.DUAL_SDD_PLUS}
    ),
}

POLYHEDRAL_KINDS = frozenset(
    {ConeKind.NONNEG, ConeKind.DD_PLUS, ConeKind.DUAL_DD_PLUS}
)

SMALL_ORDER_KINDS = frozenset({ConeKind.CP, ConeKind.SPN})


@attr.s(frozen=True, auto_attribs=True)
class ConeId:
    kind: ConeKind = attr.ib()
    n: int = attr.ib()
    cop_limit: int = attr.ib(default=constants.DEFAULT_COP_LIMIT, eq=False)

    @n.validator
    def _check_order(self, _: Any, value: int) -> None:
        if value < 1:
            raise UnsupportedOrder(f"order must be positive, got {value}")
        if self.kind in SMALL_ORDER_KINDS and value > constants.SMALL_ORDER_LIMIT:
            raise UnsupportedOrder(
                f"{SYMBOLS[self.kind]} membership is only decidable here for "
                f"n <= {constants.SMALL_ORDER_LIMIT} (CP = DNN and SPN = COP); "
                f"for n = {value} it is NP-hard and no finite criterion is known"
            )

    @property
    def name(self) -> str:
        return f"{SYMBOLS[self.kind]}^{self.n}"

    @property
    def polyhedral(self) -> Optional[bool]:
        return self.kind in POLYHEDRAL_KINDS

    @property
    def sides(self) -> FrozenSet[Side]:
        return frozenset(side for side, kinds in SANDWICHED.items() if self.kind in kinds)

    def contains(self, a: SymMatrix) -> bool:
        return member(self, a).is_member

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "n": self.n, "name": self.name}


@attr.s(frozen=True)
class PluginCone:
    """
    A black-box cone supplied by the caller. Nothing about it is proved: the
    sandwich preconditions are only probed by sampling.
    """

    name = attr.ib(type=str)
    n = attr.ib(type=int)
    side = attr.ib(type=Side)
    contains = attr.ib(type=Callable[[SymMatrix], bool], eq=False, repr=False)

    polyhedral = None

    @property
    def sides(self) -> FrozenSet[Side]:
        return frozenset({self.side})

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "plugin", "n": self.n, "name": self.name}


AnyCone = Union[ConeId, PluginCone]


class Verdict(Enum):
    MEMBER = "member"
    NON_MEMBER = "non_member"


# Evidence types. Each knows which verdict it proves and re-checks itself
# against the matrix from scratch.


@attr.s(frozen=True, auto_attribs=True)
class EntrywiseEvidence:
    negative: Optional[Pair] = None

    @property
    def proves_member(self) -> bool:
        return self.negative is None

    def verify(self, a: SymMatrix) -> bool:
        if self.negative is None:
            return a.is_nonnegative()
        return a[self.negative] < 0

    def to_dict(self) -> Dict[str, Any]:
        if self.negative is None:
            return {"kind": "entrywise", "checked": "all entries >= 0"}
        return {"kind": "entrywise", "negative_entry": list(self.negative)}


@attr.s(frozen=True, auto_attribs=True)
class GeneratorWeights:
    """A = sum of weight * E_kl over the listed pairs, all weights >= 0."""

    weights: Tuple[Tuple[Pair, Fraction], ...]

    proves_member = True

    def verify(self, a: SymMatrix) -> bool:
        if any(w < 0 for _, w in self.weights):
            return False
        total = SymMatrix.zeros(a.n)
        for (k, l), w in self.weights:
            total = total + generator_E(a.n, k, l).scale(w)
        return total == a

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "generator_weights",
            "weights": [[k, l, render(w)] for (k, l), w in self.weights],
        }


@attr.s(frozen=True, auto_attribs=True)
class DominanceViolation:
    row: int
    diagonal: Fraction
    off_diagonal_sum: Fraction

    proves_member = False

    def verify(self, a: SymMatrix) -> bool:
        i = self.row
        off = sum((a[i, j] for j in range(1, a.n + 1) if j != i), ZERO)
        return (
            a[i, i] == self.diagonal
            and off == self.off_diagonal_sum
            and self.diagonal < self.off_diagonal_sum
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "dominance_violation",
            "row": self.row,
            "diagonal": render(self.diagonal),
            "off_diagonal_sum": render(self.off_diagonal_sum),
        }


@attr.s(frozen=True, auto_attribs=True)
class PsdEvidence:
    """
    A PSD certificate of A itself, or of its comparison matrix M(A) when
    `comparison` is set.
    """

    certificate: PsdCertificate
    comparison: bool = False

    @property
    def proves_member(self) -> bool:
        return self.certificate.is_psd

    def verify(self, a: SymMatrix) -> bool:
        target = a.comparison() if self.comparison else a
        return verify_psd_certificate(target, self.certificate)

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"kind": "comparison_psd" if self.comparison else "psd"}
        d.update(self.certificate.to_dict())
        return d


@attr.s(frozen=True, auto_attribs=True)
class DualGeneratorEvidence:
    """<A, E_kl> for every generator E_kl of DD_+; all must be >= 0."""

    values: Tuple[Tuple[Pair, Fraction], ...]

    proves_member = True

    def verify(self, a: SymMatrix) -> bool:
        listed = dict(self.values)
        if set(listed) != set(upper_pairs(a.n)):
            return False
        return all(
            inner_product(a, generator_E(a.n, k, l)) == v and v >= 0
            for (k, l), v in listed.items()
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "dual_generator_products",
            "values": [[k, l, render(v)] for (k, l), v in self.values],
        }


@attr.s(frozen=True, auto_attribs=True)
class PairwiseEvidence:
    """
    Every principal 2x2 block is copositive; `reasons` says which branch of the
    closed form applies ("nonnegative" or "determinant") per pair i < j.
    """

    reasons: Tuple[Tuple[Pair, str], ...]

    proves_member = True

    def verify(self, a: SymMatrix) -> bool:
        if any(a[i, i] < 0 for i in range(1, a.n + 1)):
            return False
        listed = dict(self.reasons)
        expected = {(i, j) for i, j in upper_pairs(a.n) if i < j}
        if set(listed) != expected:
            return False
        return all(
            copositive_2x2(a[i, i], a[i, j], a[j, j]) for i, j in expected
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "pairwise_2x2",
            "pairs": [[i, j, reason] for (i, j), reason in self.reasons],
        }


@attr.s(frozen=True, auto_attribs=True)
class SeparatingMatrix:
    """
    W in the predual cone with <A, W> < 0. `predual` names the cone W is
    re-checked against.
    """

    witness: SymMatrix
    value: Fraction
    predual: ConeKind
    pair: Optional[Pair] = None

    proves_member = False

    def verify(self, a: SymMatrix) -> bool:
        if inner_product(a, self.witness) != self.value or self.value >= 0:
            return False
        if self.predual is ConeKind.DD_PLUS:
            return member_dd_plus(self.witness).is_member
        return member_sdd_plus(self.witness).is_member

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "kind": "separating_matrix",
            "predual": self.predual.value,
            "inner_product": render(self.value),
            "witness": self.witness.to_dict(),
        }
        if self.pair is not None:
            d["pair"] = list(self.pair)
        return d


@attr.s(frozen=True, auto_attribs=True)
class SimplexEvidence:
    result: SimplexMinResult

    @property
    def proves_member(self) -> bool:
        return self.result.is_copositive

    def verify(self, a: SymMatrix) -> bool:
        return self.result.verify(a)

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"kind": "simplex_min"}
        d.update(self.result.to_dict())
        return d


@attr.s(frozen=True, auto_attribs=True)
class CompositeEvidence:
    """Membership in an intersection: every part proves membership."""

    parts: Tuple[Any, ...]

    proves_member = True

    def verify(self, a: SymMatrix) -> bool:
        return all(part.proves_member and part.verify(a) for part in self.parts)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "intersection", "parts": [p.to_dict() for p in self.parts]}


Evidence = Union[
    EntrywiseEvidence,
    GeneratorWeights,
    DominanceViolation,
    PsdEvidence,
    DualGeneratorEvidence,
    PairwiseEvidence,
    SeparatingMatrix,
    SimplexEvidence,
    CompositeEvidence,
]


@attr.s(frozen=True, auto_attribs=True)
class MembershipCertificate:
    cone: ConeId
    verdict: Verdict
    evidence: Evidence

    @property
    def is_member(self) -> bool:
        return self.verdict is Verdict.MEMBER

    def verify(self, a: SymMatrix) -> bool:
        return self.evidence.proves_member == self.is_member and self.evidence.verify(a)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cone": self.cone.name,
            "verdict": self.verdict.value,
            "evidence": self.evidence.to_dict(),
        }


def _certify(kind: ConeKind, a: SymMatrix, evidence: Evidence) -> MembershipCertificate:
    cone = ConeId(kind, a.n)
    verdict = Verdict.MEMBER if evidence.proves_member else Verdict.NON_MEMBER
    cert = MembershipCertificate(cone, verdict, evidence)
    if not cert.verify(a):
        raise CertificateError(f"{cone.name} certificate failed re-verification for {a!r}")
    debug_echo(f"{cone.name}: {verdict.value} ({evidence.to_dict()['kind']})")
    return cert


def _first_negative(a: SymMatrix) -> Optional[Pair]:
    return next((pair for pair, value in a.items() if value < 0), None)


def member_nonneg(a: SymMatrix) -> MembershipCertificate:
    return _certify(ConeKind.NONNEG, a, EntrywiseEvidence(_first_negative(a)))


def member_dd_plus(a: SymMatrix) -> MembershipCertificate:
    negative = _first_negative(a)
    if negative is not None:
        return _certify(ConeKind.DD_PLUS, a, EntrywiseEvidence(negative))
    n = a.n
    weights = []
    for k in range(1, n + 1):
        off = sum((a[k, j] for j in range(1, n + 1) if j != k), ZERO)
        if a[k, k] < off:
            return _certify(ConeKind.DD_PLUS, a, DominanceViolation(k, a[k, k], off))
        if a[k, k] > off:
            weights.append(((k, k), (a[k, k] - off) / 4))
        weights.extend(((k, l), a[k, l]) for l in range(k + 1, n + 1) if a[k, l] != 0)
    return _certify(ConeKind.DD_PLUS, a, GeneratorWeights(tuple(weights)))


def member_sdd_plus(a: SymMatrix) -> MembershipCertificate:
    negative = _first_negative(a)
    if negative is not None:
        return _certify(ConeKind.SDD_PLUS, a, EntrywiseEvidence(negative))
    return _certify(
        ConeKind.SDD_PLUS, a, PsdEvidence(psd_check(a.comparison()), comparison=True)
    )


def member_psd(a: SymMatrix) -> MembershipCertificate:
    return _certify(ConeKind.PSD, a, PsdEvidence(psd_check(a)))


def member_dual_dd_plus(a: SymMatrix) -> MembershipCertificate:
    values = []
    for k, l in upper_pairs(a.n):
        generator = generator_E(a.n, k, l)
        value = inner_product(a, generator)
        if value < 0:
            return _certify(
                ConeKind.DUAL_DD_PLUS,
                a,
                SeparatingMatrix(generator, value, ConeKind.DD_PLUS, (k, l)),
            )
        values.append(((k, l), value))
    return _certify(ConeKind.DUAL_DD_PLUS, a, DualGeneratorEvidence(tuple(values)))


def separating_sdd_plus(a: SymMatrix, i: int, j: int) -> SymMatrix:
    """
    An embedded rank-one W ∈ SDD_+ with <A, W> < 0 for a pair whose 2x2 block
    [[a, b], [b, c]] is not copositive.
    """
    n = a.n
    e_ij = generator_E(n, i, j)
    if inner_product(a, e_ij) < 0:
        return e_ij
    if a[i, i] < 0:
        return SymMatrix.from_upper(n, {(i, i): 1})
    if a[j, j] < 0:
        return SymMatrix.from_upper(n, {(j, j): 1})
    b = a[i, j]
    if a[j, j] > 0:
        p, q = a[j, j], -b
    else:
        p, q = -b, a[i, i]
    return SymMatrix.from_upper(n, {(i, i): p * p, (i, j): p * q, (j, j): q * q})


def member_dual_sdd_plus(a: SymMatrix) -> MembershipCertificate:
    n = a.n
    for i in range(1, n + 1):
        if a[i, i] < 0:
            witness = SymMatrix.from_upper(n, {(i, i): 1})
            return _certify(
                ConeKind.DUAL_SDD_PLUS,
                a,
                SeparatingMatrix(witness, a[i, i], ConeKind.SDD_PLUS, (i, i)),
            )
    reasons = []
    for i, j in upper_pairs(n):
        if i == j:
            continue
        if not copositive_2x2(a[i, i], a[i, j], a[j, j]):
            witness = separating_sdd_plus(a, i, j)
            return _certify(
                ConeKind.DUAL_SDD_PLUS,
                a,
                SeparatingMatrix(
                    witness, inner_product(a, witness), ConeKind.SDD_PLUS, (i, j)
                ),
            )
        reasons.append(((i, j), "nonnegative" if a[i, j] >= 0 else "determinant"))
    return _certify(ConeKind.DUAL_SDD_PLUS, a, PairwiseEvidence(tuple(reasons)))


def member_dnn(a: SymMatrix, kind: ConeKind = ConeKind.DNN) -> MembershipCertificate:
    entrywise = EntrywiseEvidence(_first_negative(a))
    if not entrywise.proves_member:
        return _certify(kind, a, entrywise)
    psd = PsdEvidence(psd_check(a))
    if not psd.proves_member:
        return _certify(kind, a, psd)
    return _certify(kind, a, CompositeEvidence((entrywise, psd)))


def member_cop(
    a: SymMatrix,
    limit: int = constants.DEFAULT_COP_LIMIT,
    kind: ConeKind = ConeKind.COP,
) -> MembershipCertificate:
    return _certify(kind, a, SimplexEvidence(copositive_min(a, limit)))


def member_cp_small(a: SymMatrix) -> MembershipCertificate:
    """CP^n = DNN^n for n <= 4."""
    ConeId(ConeKind.CP, a.n)
    return member_dnn(a, kind=ConeKind.CP)


def member_spn_small(
    a: SymMatrix, limit: int = constants.DEFAULT_COP_LIMIT
) -> MembershipCertificate:
    """SPN^n = COP^n for n <= 4."""
    ConeId(ConeKind.SPN, a.n)
    return member_cop(a, limit, kind=ConeKind.SPN)


def member(cone: ConeId, a: SymMatrix) -> MembershipCertificate:
    if cone.n != a.n:
        raise DimensionMismatch(f"{cone.name} cannot hold a matrix of order {a.n}")
    kind = cone.kind
    if kind is ConeKind.NONNEG:
        return member_nonneg(a)
    if kind is ConeKind.DD_PLUS:
        return member_dd_plus(a)
    if kind is ConeKind.SDD_PLUS:
        return member_sdd_plus(a)
    if kind is ConeKind.DUAL_DD_PLUS:
        return member_dual_dd_plus(a)
    if kind is ConeKind.DUAL_SDD_PLUS:
        return member_dual_sdd_plus(a)
    if kind is ConeKind.PSD:
        return member_psd(a)
    if kind is ConeKind.DNN:
        return member_dnn(a)
    if kind is ConeKind.COP:
        return member_cop(a, cone.cop_limit)
    if kind is ConeKind.SPN:
        return member_spn_small(a, cone.cop_limit)
    return member_cp_small(a)


@attr.s(frozen=True, auto_attribs=True)
class Decomposition:
    """A = B + N with B in the first Minkowski summand and N ≥ 0."""

    b: SymMatrix
    n: SymMatrix
    found: bool
    failed: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "found": self.found,
            "B": self.b.to_dict(),
            "N": self.n.to_dict(),
        }
        if self.failed is not None:
            d["failed"] = self.failed
        return d


def canonical_split(a: SymMatrix) -> Tuple[SymMatrix, SymMatrix]:
    """B keeps the diagonal and the negative off-diagonal entries; N = A - B."""
    b = SymMatrix.from_function(
        a.n, lambda i, j: a[i, j] if i == j else min(a[i, j], ZERO)
    )
    return b, a - b


def _dd_summand_failure(b: SymMatrix) -> Optional[str]:
    for i, j in upper_pairs(b.n):
        if i == j:
            if b[i, i] < 0:
                return f"B_{i}{i} < 0"
        elif b[i, i] + b[j, j] < 2 * abs(b[i, j]):
            return f"B_{i}{i} + B_{j}{j} ± 2B_{i}{j} < 0"
    return None


def _sdd_summand_failure(b: SymMatrix) -> Optional[str]:
    for i, j in upper_pairs(b.n):
        if i == j:
            if b[i, i] < 0:
                return f"B_{i}{i} < 0"
        elif b[i, i] * b[j, j] < b[i, j] * b[i, j]:
            return f"B_{i}{i} B_{j}{j} < B_{i}{j}^2"
    return None


def dual_decomposition_exists(a: SymMatrix, kind: ConeKind) -> Decomposition:
    """
    Decide whether A = B + N exists for the Minkowski-sum form of (DD_+)^* or
    (SDD_+)^*. The canonical split maximises the diagonal of B and minimises
    |B_ij|, so if it fails the summand conditions no other split can pass.
    """
    if kind is ConeKind.DUAL_DD_PLUS:
        check = _dd_summand_failure
    elif kind is ConeKind.DUAL_SDD_PLUS:
        check = _sdd_summand_failure
    else:
        raise ValueError(f"{kind.value} has no Minkowski-sum description")
    b, n_part = canonical_split(a)
    failed = check(b)
    if failed is None and not n_part.is_nonnegative():
        failed = "N has a negative entry"
    return Decomposition(b, n_part, failed is None, failed)


def _decompose(a: SymMatrix, kind: ConeKind) -> Tuple[SymMatrix, SymMatrix]:
    cert = member(ConeId(kind, a.n), a)
    if not cert.is_member:
        raise NotAMember(f"{cert.cone.name} decomposition requested for a non-member")
    result = dual_decomposition_exists(a, kind)
    if not result.found or result.b + result.n != a:
        raise CertificateError(
            f"{cert.cone.name} member has no canonical decomposition: {result.failed}"
        )
    return result.b, result.n


def decompose_dual_dd_plus(a: SymMatrix) -> Tuple[SymMatrix, SymMatrix]:
    return _decompose(a, ConeKind.DUAL_DD_PLUS)


def decompose_dual_sdd_plus(a: SymMatrix) -> Tuple[SymMatrix, SymMatrix]:
    return _decompose(a, ConeKind.DUAL_SDD_PLUS)
