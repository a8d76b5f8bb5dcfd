"""
Exact minimisation of x^T A x over the standard simplex.

The minimum is attained in the relative interior of some face of the simplex
where the KKT stationarity conditions hold with a unique multiplier, so it is
found by visiting every support S and solving A_S u = lambda 1, 1^T u = 1.
"""
import itertools
from enum import Enum
from fractions import Fraction
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple

import attr

from facelattice import constants
from facelattice.core import ONE
from facelattice.core import render
from facelattice.core import solve_linear
from facelattice.core import SymMatrix
from facelattice.core import Vector
from facelattice.core import ZERO
from facelattice.utils import debug_echo
from facelattice.utils import DeskScaleLimit


class SupportStatus(Enum):
    CANDIDATE = "candidate"
    NOT_INTERIOR = "not_interior"
    SINGULAR = "singular"


@attr.s(frozen=True, auto_attribs=True)
class SupportCase:
    support: Tuple[int, ...]
    status: SupportStatus
    value: Optional[Fraction] = None

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "support": list(self.support),
            "status": self.status.value,
        }
        if self.value is not None:
            d["value"] = render(self.value)
        return d


@attr.s(frozen=True, auto_attribs=True)
class SimplexMinResult:
    """
    N.B.: support indices are 1-based; minimizer has one coordinate per row of A
    """

    minimum: Fraction
    minimizer: Vector
    support: Tuple[int, ...]
    transcript: Tuple[SupportCase, ...] = attr.ib(repr=False)

    @property
    def is_copositive(self) -> bool:
        return self.minimum >= 0

    def counts(self) -> Dict[str, int]:
        result = {status.value: 0 for status in SupportStatus}
        for case in self.transcript:
            result[case.status.value] += 1
        return result

    def verify(self, a: SymMatrix) -> bool:
        x = self.minimizer
        if len(x) != a.n or any(v < 0 for v in x) or sum(x, ZERO) != ONE:
            return False
        if a.quadratic_form(x) != self.minimum:
            return False
        # no recorded candidate may undercut the reported minimum
        return all(
            case.value >= self.minimum
            for case in self.transcript
            if case.status is SupportStatus.CANDIDATE and case.value is not None
        )

    def to_dict(self, transcript: bool = False) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "minimum": render(self.minimum),
            "minimizer": [render(v) for v in self.minimizer],
            "support": list(self.support),
            "supports_visited": self.counts(),
        }
        if transcript:
            d["transcript"] = [case.to_dict() for case in self.transcript]
        return d


def copositive_2x2(a: Fraction, b: Fraction, c: Fraction) -> bool:
    """Closed form for [[a, b], [b, c]]: a, c >= 0 and (b >= 0 or b^2 <= ac)."""
    return a >= 0 and c >= 0 and (b >= 0 or b * b <= a * c)


def _solve_support(a: SymMatrix, support: Tuple[int, ...]) -> SupportCase:
    size = len(support)
    rows: List[List[Fraction]] = [
        [a[s, t] for t in support] + [-ONE] for s in support
    ]
    rows.append([ONE] * size + [ZERO])
    rhs = [ZERO] * size + [ONE]
    solution = solve_linear(rows, rhs)
    if solution is None:
        return SupportCase(support, SupportStatus.SINGULAR)
    u, lam = solution[:size], solution[size]
    if any(v <= 0 for v in u):
        return SupportCase(support, SupportStatus.NOT_INTERIOR)
    return SupportCase(support, SupportStatus.CANDIDATE, lam)


def copositive_min(
    a: SymMatrix, limit: int = constants.DEFAULT_COP_LIMIT
) -> SimplexMinResult:
    n = a.n
    if n > limit:
        raise DeskScaleLimit(
            f"copositivity of order {n} is undecidable at desk scale "
            f"(enumeration limit {limit}, {2 ** n - 1} supports)"
        )
    transcript: List[SupportCase] = []
    best: Optional[Tuple[Fraction, Tuple[int, ...]]] = None
    for size in range(1, n + 1):
        for support in itertools.combinations(range(1, n + 1), size):
            case = _solve_support(a, support)
            transcript.append(case)
            if case.status is SupportStatus.CANDIDATE:
                assert case.value is not None
                if best is None or case.value < best[0]:
                    best = (case.value, support)
    # singletons are always candidates
    assert best is not None
    minimum, support = best
    minimizer = _minimizer(a, support)
    result = SimplexMinResult(minimum, minimizer, support, tuple(transcript))
    debug_echo(
        f"copositive_min order {n}: minimum {minimum} on support {list(support)}"
    )
    return result


def _minimizer(a: SymMatrix, support: Tuple[int, ...]) -> Vector:
    size = len(support)
    rows = [[a[s, t] for t in support] + [-ONE] for s in support]
    rows.append([ONE] * size + [ZERO])
    solution = solve_linear(rows, [ZERO] * size + [ONE])
    assert solution is not None
    x = [ZERO] * a.n
    for s, value in zip(support, solution):
        x[s - 1] = value
    return tuple(x)
