"""
Exact feasibility of  G lambda = r, lambda >= 0  over the rationals.

Phase I of the simplex method with Bland's rule, on a dense Fraction tableau.
A feasible system yields the weights lambda; an infeasible one yields a Farkas
functional w with w.g >= 0 for every column g and w.r < 0. Both are checked
again before they are returned.
"""
from fractions import Fraction
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import attr

from facelattice.core import ONE
from facelattice.core import render
from facelattice.core import ZERO
from facelattice.utils import CertificateError
from facelattice.utils import debug_echo
from facelattice.utils import DimensionMismatch


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), ZERO)


@attr.s(frozen=True, auto_attribs=True)
class FeasibilityResult:
    feasible: bool
    weights: Tuple[Fraction, ...] = ()
    functional: Tuple[Fraction, ...] = ()
    pivots: int = 0

    def verify(
        self, columns: Sequence[Sequence[Fraction]], target: Sequence[Fraction]
    ) -> bool:
        if self.feasible:
            if len(self.weights) != len(columns) or any(w < 0 for w in self.weights):
                return False
            combined = [
                sum((w * col[i] for w, col in zip(self.weights, columns)), ZERO)
                for i in range(len(target))
            ]
            return combined == list(target)
        if len(self.functional) != len(target):
            return False
        return dot(self.functional, target) < 0 and all(
            dot(self.functional, col) >= 0 for col in columns
        )

    def to_dict(self) -> Dict[str, Any]:
        if self.feasible:
            return {"feasible": True, "weights": [render(w) for w in self.weights]}
        return {"feasible": False, "functional": [render(w) for w in self.functional]}


def _pivot(tableau: List[List[Fraction]], row: int, col: int) -> None:
    head = tableau[row][col]
    tableau[row] = [value / head for value in tableau[row]]
    for r, line in enumerate(tableau):
        if r != row and line[col] != 0:
            factor = line[col]
            tableau[r] = [a - factor * b for a, b in zip(line, tableau[row])]


def _entering(objective: List[Fraction], width: int) -> Optional[int]:
    return next((j for j in range(width) if objective[j] < 0), None)


def _leaving(
    tableau: List[List[Fraction]], basis: List[int], col: int
) -> Optional[int]:
    best: Optional[Tuple[Fraction, int, int]] = None
    for r in range(len(basis)):
        coefficient = tableau[r][col]
        if coefficient > 0:
            key = (tableau[r][-1] / coefficient, basis[r], r)
            if best is None or key[:2] < best[:2]:
                best = key
    return None if best is None else best[2]


def nonnegative_combination(
    columns: Sequence[Sequence[Fraction]], target: Sequence[Fraction]
) -> FeasibilityResult:
    m, k = len(target), len(columns)
    if any(len(col) != m for col in columns):
        raise DimensionMismatch("columns and target have different lengths")
    signs = [ONE if value >= 0 else -ONE for value in target]

    # rows: [ original columns | artificials | rhs ], signs flipped so rhs >= 0
    width = k + m
    tableau = [
        [signs[i] * columns[j][i] for j in range(k)]
        + [ONE if a == i else ZERO for a in range(m)]
        + [signs[i] * target[i]]
        for i in range(m)
    ]
    objective = [-sum((tableau[i][j] for i in range(m)), ZERO) for j in range(k)]
    objective += [ZERO] * m
    objective.append(-sum((tableau[i][-1] for i in range(m)), ZERO))
    tableau.append(objective)
    basis = [k + i for i in range(m)]

    pivots = 0
    while True:
        col = _entering(tableau[-1], width)
        if col is None:
            break
        row = _leaving(tableau, basis, col)
        # phase I is bounded below by zero
        assert row is not None
        _pivot(tableau, row, col)
        basis[row] = col
        pivots += 1

    objective_value = -tableau[-1][-1]
    if objective_value == 0:
        weights = [ZERO] * k
        for r, variable in enumerate(basis):
            if variable < k:
                weights[variable] = tableau[r][-1]
        result = FeasibilityResult(True, weights=tuple(weights), pivots=pivots)
    else:
        # reduced cost of artificial i is 1 - y_i
        y = [ONE - tableau[-1][k + i] for i in range(m)]
        functional = tuple(-signs[i] * y[i] for i in range(m))
        result = FeasibilityResult(False, functional=functional, pivots=pivots)
    if not result.verify(columns, target):
        raise CertificateError("simplex certificate failed re-verification")
    debug_echo(
        f"nonnegative_combination {m}x{k}: "
        f"{'feasible' if result.feasible else 'infeasible'} after {pivots} pivots"
    )
    return result
