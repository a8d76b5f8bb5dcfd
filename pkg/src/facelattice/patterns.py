"""
Zero patterns: the nested index sets I_ij (CP side) and J_ij (COP side), the
matrices that witness strictness between consecutive patterns, and the grid
diagrams that draw them.
"""
from enum import Enum
from typing import Any
from typing import Dict
from typing import FrozenSet
from typing import Iterable
from typing import Iterator
from typing import List
from typing import Optional
from typing import Tuple

import attr

from facelattice.core import Pair
from facelattice.core import SymMatrix
from facelattice.core import upper_pairs
from facelattice.utils import DimensionMismatch
from facelattice.utils import IndexOutOfRange


def _canonical_pairs(n: int, pairs: Iterable[Pair]) -> FrozenSet[Pair]:
    result = set()
    for i, j in pairs:
        if i > j:
            i, j = j, i
        if not 1 <= i <= j <= n:
            raise IndexOutOfRange(f"pair ({i},{j}) outside order {n}")
        result.add((i, j))
    return frozenset(result)


@attr.s(frozen=True)
class IndexSet:
    """
    A set of upper-triangle index pairs (i,j), 1 <= i <= j <= n.

    The label is for humans only and takes no part in equality.
    """

    n = attr.ib(type=int)
    pairs = attr.ib(type=FrozenSet[Pair])
    label = attr.ib(type=str, default="", eq=False)

    def __attrs_post_init__(self) -> None:
        object.__setattr__(self, "pairs", _canonical_pairs(self.n, self.pairs))

    def __iter__(self) -> Iterator[Pair]:
        return iter(sorted(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, item: object) -> bool:
        if not isinstance(item, tuple) or len(item) != 2:
            return False
        i, j = item
        return (min(i, j), max(i, j)) in self.pairs

    def union(self, extra: Iterable[Pair], label: str = "") -> "IndexSet":
        return IndexSet(self.n, self.pairs | _canonical_pairs(self.n, extra), label)

    def free(self) -> List[Pair]:
        """Upper-triangle pairs not constrained to zero."""
        return [pair for pair in upper_pairs(self.n) if pair not in self.pairs]

    def closure(self) -> FrozenSet[Pair]:
        """The pattern closed under transposition."""
        return self.pairs | frozenset((j, i) for i, j in self.pairs)

    def to_dict(self) -> Dict[str, Any]:
        return {"label": self.label, "pairs": [list(p) for p in self]}


def _I_key(n: int, i: int, j: int) -> Pair:
    if (i, j) == (0, 0):
        return (0, 0)
    if not 1 <= i <= n or not i <= j <= n + 1:
        raise IndexOutOfRange(f"I_{{{i},{j}}} is undefined for order {n}")
    if j == n + 1:
        # I_{i,n+1} := I_{i-1,i-1}
        return (i - 1, i - 1)
    return (i, j)


def _J_key(n: int, i: int, j: int) -> Pair:
    if (i, j) == (0, n):
        return (0, n)
    if not 1 <= i <= n or not i - 1 <= j <= n:
        raise IndexOutOfRange(f"J_{{{i},{j}}} is undefined for order {n}")
    if j == i - 1:
        # J_{i,i-1} := J_{i-1,n}
        return (i - 1, n)
    return (i, j)


def _full_rows(n: int, last: int) -> List[Pair]:
    return [(k, l) for k in range(1, last + 1) for l in range(k, n + 1)]


def build_I(n: int, i: int, j: int) -> IndexSet:
    """Rows 1..i-1 in full, plus (i,l) for l >= j."""
    i, j = _I_key(n, i, j)
    if i == 0:
        return IndexSet(n, frozenset(), "I_{0,0}")
    pairs = _full_rows(n, i - 1) + [(i, l) for l in range(j, n + 1)]
    return IndexSet(n, frozenset(pairs), f"I_{{{i},{j}}}")


def build_J(n: int, i: int, j: int) -> IndexSet:
    """Rows 1..i-1 in full, plus (i,l) for i <= l <= j."""
    i, j = _J_key(n, i, j)
    if i == 0:
        return IndexSet(n, frozenset(), f"J_{{0,{n}}}")
    pairs = _full_rows(n, i - 1) + [(i, l) for l in range(i, j + 1)]
    return IndexSet(n, frozenset(pairs), f"J_{{{i},{j}}}")


def full_pattern(n: int) -> IndexSet:
    return IndexSet(n, frozenset(upper_pairs(n)), "all")


def chain_order_cp(n: int) -> List[Pair]:
    """Labels of the CP-side chain, from K = K[I_00] down to K[I_nn]."""
    order = [(0, 0)]
    for i in range(1, n + 1):
        order.extend((i, j) for j in range(n, i - 1, -1))
    return order


def chain_order_cop(n: int) -> List[Pair]:
    """Labels of the COP-side chain, from K = K[J_0n] down to K[J_nn]."""
    order = [(0, n)]
    for i in range(1, n + 1):
        order.extend((i, j) for j in range(i, n + 1))
    return order


def legacy_patterns(n: int) -> List[IndexSet]:
    """
    The older ordering: zero the n(n-1)/2 off-diagonal entries row by row
    first, then the n diagonal entries. Returned from the full cone downward.
    """
    steps = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    steps += [(i, i) for i in range(1, n + 1)]
    patterns = [IndexSet(n, frozenset(), "L_0")]
    for m, pair in enumerate(steps, start=1):
        patterns.append(patterns[-1].union([pair], f"L_{m}"))
    return patterns


def generator_E(n: int, i: int, j: int) -> SymMatrix:
    """E_ij = (e_i + e_j)(e_i + e_j)^T; for i = j the single entry (i,i) is 4."""
    if not 1 <= i <= j <= n:
        raise IndexOutOfRange(f"E_{{{i},{j}}} is undefined for order {n}")
    vector = [0] * n
    vector[i - 1] += 1
    vector[j - 1] += 1
    return SymMatrix.outer(vector)


def unit_matrix(n: int, i: int, j: int) -> SymMatrix:
    """Symmetric unit matrix with ones at (i,j) and (j,i)."""
    if not (1 <= min(i, j) and max(i, j) <= n):
        raise IndexOutOfRange(f"unit matrix ({i},{j}) outside order {n}")
    return SymMatrix.from_upper(n, {(i, j): 1})


def pattern_matrix_E(pattern: IndexSet) -> SymMatrix:
    """E[I]: zero on I and its mirror, one elsewhere."""
    return SymMatrix.from_function(
        pattern.n, lambda i, j: 0 if (i, j) in pattern else 1
    )


def vanishes_on(matrix: SymMatrix, pattern: IndexSet) -> bool:
    if matrix.n != pattern.n:
        raise DimensionMismatch(f"matrix order {matrix.n} vs pattern order {pattern.n}")
    return all(matrix[i, j] == 0 for i, j in pattern.pairs)


class Cell(Enum):
    ZERO = "0"
    STAR = "*"


@attr.s(frozen=True, auto_attribs=True)
class ZeroPatternDiagram:
    n: int
    grid: Tuple[Tuple[Cell, ...], ...]
    gray: FrozenSet[Pair] = frozenset()
    title: str = ""

    @property
    def highlighted(self) -> bool:
        return bool(self.gray)

    def cell(self, i: int, j: int) -> Cell:
        return self.grid[i - 1][j - 1]

    def is_gray(self, i: int, j: int) -> bool:
        return (i, j) in self.gray


def render_diagram(
    pattern: IndexSet, highlight: Optional[SymMatrix] = None
) -> ZeroPatternDiagram:
    n = pattern.n
    if highlight is not None and highlight.n != n:
        raise DimensionMismatch(
            f"highlight of order {highlight.n} on a pattern of order {n}"
        )
    grid = tuple(
        tuple(
            Cell.ZERO if (i, j) in pattern else Cell.STAR for j in range(1, n + 1)
        )
        for i in range(1, n + 1)
    )
    gray: FrozenSet[Pair] = frozenset()
    if highlight is not None:
        gray = frozenset(
            (i, j)
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            if highlight[i, j] != 0
        )
    return ZeroPatternDiagram(n, grid, gray, pattern.label)
