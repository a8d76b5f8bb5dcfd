"""
Seeded samplers producing exact members of each cone from its generator
family, and the sampling checks built on them.

Randomness comes from numpy's Generator; every entry it produces is converted
to a Fraction before any matrix is formed, so samples are exact.
"""
from fractions import Fraction
from typing import Any
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional

import attr
import numpy as np

from facelattice import constants
from facelattice.cones import ConeId
from facelattice.cones import ConeKind
from facelattice.cones import member
from facelattice.cones import member_dual_sdd_plus
from facelattice.cones import member_nonneg
from facelattice.cones import MembershipCertificate
from facelattice.cones import PluginCone
from facelattice.cones import Side
from facelattice.core import SymMatrix
from facelattice.core import upper_pairs
from facelattice.core import ZERO
from facelattice.patterns import generator_E
from facelattice.utils import debug_echo

Sampler = Callable[[np.random.Generator, int], SymMatrix]


def make_rng(seed: int) -> np.random.Generator:
    debug_echo(f"sampling with seed {seed}")
    return np.random.default_rng(seed)


def small_rational(
    rng: np.random.Generator, low: int = 0, high: int = 4
) -> Fraction:
    """A rational p/q with low <= p <= high and 1 <= q <= 4."""
    return Fraction(int(rng.integers(low, high + 1)), int(rng.integers(1, 5)))


def _nonneg_diagonal(rng: np.random.Generator, n: int) -> List[Fraction]:
    # roughly one diagonal in five is zero, to reach the faces with A_ii = 0
    return [
        ZERO if rng.random() < 0.2 else small_rational(rng, 1, 4) for _ in range(n)
    ]


def sample_symmetric(rng: np.random.Generator, n: int) -> SymMatrix:
    """Unstructured symmetric matrix with entries of both signs."""
    return SymMatrix.from_function(n, lambda i, j: small_rational(rng, -4, 4))


def sample_nonneg(rng: np.random.Generator, n: int) -> SymMatrix:
    return SymMatrix.from_function(
        n, lambda i, j: ZERO if rng.random() < 0.3 else small_rational(rng, 1, 4)
    )


def sample_dd_plus(rng: np.random.Generator, n: int) -> SymMatrix:
    total = SymMatrix.zeros(n)
    for k, l in upper_pairs(n):
        if rng.random() < 0.5:
            total = total + generator_E(n, k, l).scale(small_rational(rng, 1, 3))
    return total


def sample_sdd_plus(rng: np.random.Generator, n: int) -> SymMatrix:
    """Sum of embedded nonnegative 2x2 rank-one blocks plus a diagonal."""
    values: Dict = {}
    total = SymMatrix.zeros(n)
    for k, l in upper_pairs(n):
        if k == l or rng.random() < 0.5:
            continue
        p, q = small_rational(rng, 1, 3), small_rational(rng, 1, 3)
        total = total + SymMatrix.from_upper(n, {(k, k): p * p, (k, l): p * q, (l, l): q * q})
    for i in range(1, n + 1):
        if rng.random() < 0.5:
            values[(i, i)] = small_rational(rng, 1, 3)
    return total + SymMatrix.from_upper(n, values)


def _gram(factor: List[List[Fraction]], n: int) -> SymMatrix:
    return SymMatrix.from_function(
        n,
        lambda i, j: sum(
            (a * b for a, b in zip(factor[i - 1], factor[j - 1])), ZERO
        ),
    )


def sample_psd(rng: np.random.Generator, n: int) -> SymMatrix:
    rank = int(rng.integers(1, n + 1))
    factor = [[small_rational(rng, -3, 3) for _ in range(rank)] for _ in range(n)]
    return _gram(factor, n)


def sample_dnn(rng: np.random.Generator, n: int) -> SymMatrix:
    """G G^T with G >= 0, which is completely positive; rows of G may vanish."""
    rank = int(rng.integers(1, n + 1))
    factor = [
        [ZERO] * rank
        if rng.random() < 0.2
        else [small_rational(rng, 0, 3) for _ in range(rank)]
        for _ in range(n)
    ]
    return _gram(factor, n)


def sample_spn(rng: np.random.Generator, n: int) -> SymMatrix:
    return sample_psd(rng, n) + sample_nonneg(rng, n)


def sample_dual_sdd_plus(rng: np.random.Generator, n: int) -> SymMatrix:
    """B + N with |B_ij| <= min(B_ii, B_jj), hence B_ii B_jj >= B_ij^2."""
    diagonal = _nonneg_diagonal(rng, n)

    def entry(i: int, j: int) -> Fraction:
        if i == j:
            return diagonal[i - 1]
        bound = min(diagonal[i - 1], diagonal[j - 1])
        return -bound * small_rational(rng, 0, 4) / 4

    return SymMatrix.from_function(n, entry) + sample_nonneg(rng, n)


def sample_dual_dd_plus(rng: np.random.Generator, n: int) -> SymMatrix:
    """B + N with |B_ij| <= (B_ii + B_jj) / 2, of either sign."""
    diagonal = _nonneg_diagonal(rng, n)

    def entry(i: int, j: int) -> Fraction:
        if i == j:
            return diagonal[i - 1]
        bound = (diagonal[i - 1] + diagonal[j - 1]) / 2
        return bound * small_rational(rng, -4, 4) / 4

    return SymMatrix.from_function(n, entry) + sample_nonneg(rng, n)


SAMPLERS: Dict[ConeKind, Sampler] = {
    ConeKind.NONNEG: sample_nonneg,
    ConeKind.DD_PLUS: sample_dd_plus,
    ConeKind.SDD_PLUS: sample_sdd_plus,
    ConeKind.DUAL_DD_PLUS: sample_dual_dd_plus,
    ConeKind.DUAL_SDD_PLUS: sample_dual_sdd_plus,
    ConeKind.PSD: sample_psd,
    ConeKind.DNN: sample_dnn,
    ConeKind.CP: sample_dnn,
    ConeKind.SPN: sample_spn,
    ConeKind.COP: sample_spn,
}


def sample_member(cone: ConeId, rng: np.random.Generator) -> SymMatrix:
    return SAMPLERS[cone.kind](rng, cone.n)


@attr.s(frozen=True, auto_attribs=True)
class SandwichViolationEntry:
    matrix: SymMatrix
    inner: Optional[MembershipCertificate]
    outer: Optional[MembershipCertificate]
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"matrix": self.matrix.to_dict(), "note": self.note}
        if self.inner is not None:
            d["inner"] = self.inner.to_dict()
        if self.outer is not None:
            d["outer"] = self.outer.to_dict()
        return d


@attr.s(frozen=True, auto_attribs=True)
class SandwichReport:
    inner: str
    outer: str
    samples: int
    seed: int
    violations: List[SandwichViolationEntry] = attr.ib(factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "inner": self.inner,
            "outer": self.outer,
            "samples": self.samples,
            "seed": self.seed,
            "violations": [v.to_dict() for v in self.violations],
        }


def sandwich_check(
    inner: ConeId,
    outer: ConeId,
    samples: int,
    seed: int = constants.DEFAULT_SEED,
) -> SandwichReport:
    """
    Sample members of `inner` and assert each lies in `outer`. A sample the
    inner oracle itself rejects is reported too, since it means the sampler
    and the oracle disagree.
    """
    rng = make_rng(seed)
    report = SandwichReport(inner.name, outer.name, samples, seed)
    for _ in range(samples):
        a = sample_member(inner, rng)
        inner_cert = member(inner, a)
        outer_cert = member(outer, a)
        if not inner_cert.is_member:
            report.violations.append(
                SandwichViolationEntry(a, inner_cert, outer_cert, "sampler left the inner cone")
            )
        elif not outer_cert.is_member:
            report.violations.append(
                SandwichViolationEntry(a, inner_cert, outer_cert, "inclusion violated")
            )
    return report


def check_plugin_sandwich(
    cone: PluginCone,
    samples: int,
    seed: int = constants.DEFAULT_SEED,
) -> SandwichReport:
    """
    Probe DD_+ ⊆ K ⊆ N (CP side) or N ⊆ K ⊆ (SDD_+)^* (COP side) for a black-box
    cone: sampled members of the lower cone must be accepted, and unstructured
    matrices rejected by the upper cone must be rejected.
    """
    n = cone.n
    if cone.side is Side.CP:
        lower, upper_member = ConeId(ConeKind.DD_PLUS, n), member_nonneg
    else:
        lower, upper_member = ConeId(ConeKind.NONNEG, n), member_dual_sdd_plus
    upper_name = "N" if cone.side is Side.CP else "(SDD+)*"
    rng = make_rng(seed)
    report = SandwichReport(lower.name, f"{cone.name} ⊆ {upper_name}^{n}", samples, seed)
    for _ in range(samples):
        a = sample_member(lower, rng)
        if not cone.contains(a):
            report.violations.append(
                SandwichViolationEntry(a, member(lower, a), None, "lower cone member rejected")
            )
        probe = sample_symmetric(rng, n)
        upper_cert = upper_member(probe)
        if not upper_cert.is_member and cone.contains(probe):
            report.violations.append(
                SandwichViolationEntry(probe, None, upper_cert, "accepted outside the upper cone")
            )
    return report
