"""
Exact rational matrix arithmetic.

Every scalar is a `fractions.Fraction`; nothing in this package touches floating
point when deciding a verdict. Matrices are symmetric and store only their upper
triangle; indices are 1-based throughout, matching the (i,j) labels used by the
zero patterns.
"""
import re
from enum import Enum
from fractions import Fraction
from typing import Any
from typing import Callable
from typing import Dict
from typing import FrozenSet
from typing import Iterable
from typing import Iterator
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import attr
from boltons.cacheutils import cachedproperty

from facelattice.utils import CertificateError
from facelattice.utils import debug_echo
from facelattice.utils import DimensionMismatch
from facelattice.utils import IndexOutOfRange
from facelattice.utils import ParseError

Scalar = Fraction
Pair = Tuple[int, int]
Vector = Tuple[Fraction, ...]
ScalarLike = Union[int, str, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)

RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def triangular(n: int) -> int:
    """T_n, the dimension of the space of n x n symmetric matrices."""
    return n * (n + 1) // 2


def scalar(value: ScalarLike) -> Fraction:
    # exact inputs only: ints, Fractions and rational literals
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact scalar {value!r}")
    if isinstance(value, str):
        token = value.strip()
        if not RATIONAL_RE.match(token):
            raise ParseError(f"not a rational literal: {value!r}")
        try:
            return Fraction(token)
        except ZeroDivisionError:
            raise ParseError(f"zero denominator in {value!r}")
    return Fraction(value)


def render(value: Fraction) -> str:
    return str(value)


def upper_pairs(n: int) -> List[Pair]:
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


def _offset(n: int, i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    if not 1 <= i <= n or not 1 <= j <= n:
        raise IndexOutOfRange(f"entry ({i},{j}) outside order {n}")
    return (i - 1) * n - (i - 1) * (i - 2) // 2 + (j - i)


def _to_entries(values: Iterable[ScalarLike]) -> Tuple[Fraction, ...]:
    return tuple(scalar(v) for v in values)


@attr.s(frozen=True, auto_attribs=True, repr=False)
class SymMatrix:
    """
    N.B.: indices are 1-based; (i,j) with i > j reads the mirrored upper entry
    """

    n: int = attr.ib()
    entries: Tuple[Fraction, ...] = attr.ib(converter=_to_entries)

    @n.validator
    def _check_order(self, _: Any, value: int) -> None:
        if value < 1:
            raise IndexOutOfRange(f"order must be positive, got {value}")

    @entries.validator
    def _check_length(self, _: Any, value: Tuple[Fraction, ...]) -> None:
        if len(value) != triangular(self.n):
            raise DimensionMismatch(
                f"order {self.n} needs {triangular(self.n)} upper-triangle entries, got {len(value)}"
            )

    @classmethod
    def from_function(cls, n: int, fn: Callable[[int, int], ScalarLike]) -> "SymMatrix":
        return cls(n, [fn(i, j) for i, j in upper_pairs(n)])

    @classmethod
    def from_upper(cls, n: int, values: Dict[Pair, ScalarLike]) -> "SymMatrix":
        entries = [ZERO] * triangular(n)
        for (i, j), value in values.items():
            entries[_offset(n, i, j)] = scalar(value)
        return cls(n, entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[ScalarLike]]) -> "SymMatrix":
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise DimensionMismatch("rows do not form a square matrix")
        for i in range(n):
            for j in range(i + 1, n):
                if scalar(rows[i][j]) != scalar(rows[j][i]):
                    raise DimensionMismatch(
                        f"matrix is not symmetric at ({i + 1},{j + 1})"
                    )
        return cls.from_function(n, lambda i, j: rows[i - 1][j - 1])

    @classmethod
    def zeros(cls, n: int) -> "SymMatrix":
        return cls(n, [ZERO] * triangular(n))

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls.from_function(n, lambda i, j: 1 if i == j else 0)

    @classmethod
    def outer(cls, vector: Sequence[ScalarLike]) -> "SymMatrix":
        """The rank-one Gram matrix v v^T."""
        v = _to_entries(vector)
        return cls.from_function(len(v), lambda i, j: v[i - 1] * v[j - 1])

    def __getitem__(self, key: Pair) -> Fraction:
        i, j = key
        return self.entries[_offset(self.n, i, j)]

    def __repr__(self) -> str:
        return f"SymMatrix({self.n}, {[[str(x) for x in row] for row in self.rows]})"

    @cachedproperty
    def rows(self) -> List[List[Fraction]]:
        return [[self[i, j] for j in range(1, self.n + 1)] for i in range(1, self.n + 1)]

    def items(self) -> Iterator[Tuple[Pair, Fraction]]:
        return zip(upper_pairs(self.n), self.entries)

    @cachedproperty
    def support(self) -> FrozenSet[Pair]:
        return frozenset(pair for pair, value in self.items() if value != 0)

    def _check_same_order(self, other: "SymMatrix") -> None:
        if self.n != other.n:
            raise DimensionMismatch(f"orders differ: {self.n} vs {other.n}")

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        self._check_same_order(other)
        return SymMatrix(self.n, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        self._check_same_order(other)
        return SymMatrix(self.n, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "SymMatrix":
        return SymMatrix(self.n, [-a for a in self.entries])

    def scale(self, factor: ScalarLike) -> "SymMatrix":
        c = scalar(factor)
        return SymMatrix(self.n, [c * a for a in self.entries])

    def replace(self, values: Dict[Pair, ScalarLike]) -> "SymMatrix":
        entries = list(self.entries)
        for (i, j), value in values.items():
            entries[_offset(self.n, i, j)] = scalar(value)
        return SymMatrix(self.n, entries)

    def padded(self, n: int) -> "SymMatrix":
        """Direct sum with a zero block, self ⊕ O, of total order n."""
        if n < self.n:
            raise DimensionMismatch(f"cannot pad order {self.n} down to {n}")
        return SymMatrix.from_function(
            n, lambda i, j: self[i, j] if j <= self.n else 0
        )

    def principal(self, indices: Sequence[int]) -> "SymMatrix":
        return SymMatrix.from_function(
            len(indices), lambda a, b: self[indices[a - 1], indices[b - 1]]
        )

    def comparison(self) -> "SymMatrix":
        """M(A): same diagonal, negated absolute off-diagonal."""
        return SymMatrix.from_function(
            self.n, lambda i, j: self[i, j] if i == j else -abs(self[i, j])
        )

    def quadratic_form(self, x: Sequence[ScalarLike]) -> Fraction:
        v = _to_entries(x)
        if len(v) != self.n:
            raise DimensionMismatch(f"vector of length {len(v)} for order {self.n}")
        total = ZERO
        for (i, j), value in self.items():
            if value:
                weight = 1 if i == j else 2
                total += weight * value * v[i - 1] * v[j - 1]
        return total

    def is_nonnegative(self) -> bool:
        return all(value >= 0 for value in self.entries)

    def to_dict(self) -> List[List[str]]:
        return [[render(x) for x in row] for row in self.rows]


def inner_product(a: SymMatrix, b: SymMatrix) -> Fraction:
    """<A, B> = sum_{i,j} A_ij B_ij, off-diagonal terms counted twice."""
    if a.n != b.n:
        raise DimensionMismatch(f"inner product of orders {a.n} and {b.n}")
    total = ZERO
    for (i, j), x, y in zip(upper_pairs(a.n), a.entries, b.entries):
        if x and y:
            total += (1 if i == j else 2) * x * y
    return total


def solve_linear(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> Optional[List[Fraction]]:
    """
    Solve a square system exactly.

    Returns None when the system is singular, whether it is inconsistent or has
    a continuum of solutions.
    """
    size = len(rows)
    work = [list(row) + [rhs[r]] for r, row in enumerate(rows)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if work[r][col] != 0), None)
        if pivot is None:
            return None
        work[col], work[pivot] = work[pivot], work[col]
        head = work[col][col]
        for r in range(size):
            if r != col and work[r][col] != 0:
                factor = work[r][col] / head
                work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
    return [work[r][size] / work[r][r] for r in range(size)]


def rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    work = [list(v) for v in vectors]
    if not work:
        return 0
    width = len(work[0])
    result = 0
    for col in range(width):
        pivot = next((r for r in range(result, len(work)) if work[r][col] != 0), None)
        if pivot is None:
            continue
        work[result], work[pivot] = work[pivot], work[result]
        head = work[result][col]
        for r in range(result + 1, len(work)):
            if work[r][col] != 0:
                factor = work[r][col] / head
                work[r] = [a - factor * b for a, b in zip(work[r], work[result])]
        result += 1
    return result


class PsdVerdict(Enum):
    PSD = "psd"
    NOT_PSD = "not_psd"


@attr.s(frozen=True, auto_attribs=True)
class PsdCertificate:
    """
    Either P A P^T = L D L^T with L unit lower triangular and D >= 0, or a
    vector x with x^T A x < 0.

    `order` lists the original (1-based) index placed at each position of P.
    """

    verdict: PsdVerdict
    order: Tuple[int, ...] = ()
    lower: Tuple[Vector, ...] = ()
    diagonal: Vector = ()
    witness: Vector = ()
    value: Optional[Fraction] = None

    @property
    def is_psd(self) -> bool:
        return self.verdict is PsdVerdict.PSD

    def to_dict(self) -> Dict[str, Any]:
        if self.is_psd:
            return {
                "verdict": self.verdict.value,
                "permutation": list(self.order),
                "L": [[render(x) for x in row] for row in self.lower],
                "D": [render(x) for x in self.diagonal],
            }
        return {
            "verdict": self.verdict.value,
            "witness": [render(x) for x in self.witness],
            "xAx": render(self.value) if self.value is not None else None,
        }


def verify_psd_certificate(a: SymMatrix, cert: PsdCertificate) -> bool:
    """Independent checker: recompute everything from the certificate."""
    n = a.n
    if not cert.is_psd:
        return len(cert.witness) == n and a.quadratic_form(cert.witness) < 0
    if sorted(cert.order) != list(range(1, n + 1)):
        return False
    if len(cert.lower) != n or len(cert.diagonal) != n:
        return False
    if any(d < 0 for d in cert.diagonal):
        return False
    for r in range(n):
        if cert.lower[r][r] != 1 or any(cert.lower[r][c] != 0 for c in range(r + 1, n)):
            return False
    for r in range(n):
        for c in range(r, n):
            ldl = sum(
                (cert.lower[r][k] * cert.diagonal[k] * cert.lower[c][k] for k in range(n)),
                ZERO,
            )
            if ldl != a[cert.order[r], cert.order[c]]:
                return False
    return True


def _lift_witness(
    lower: List[List[Fraction]], perm: List[int], z: Dict[int, Fraction]
) -> Vector:
    """Solve L^T y = z by back substitution and undo the permutation."""
    n = len(perm)
    y = [ZERO] * n
    for i in reversed(range(n)):
        y[i] = z.get(i, ZERO) - sum(
            (lower[r][i] * y[r] for r in range(i + 1, n)), ZERO
        )
    x = [ZERO] * n
    for position, original in enumerate(perm):
        x[original] = y[position]
    return tuple(x)


def _factor(a: SymMatrix) -> PsdCertificate:
    n = a.n
    work = [list(row) for row in a.rows]
    perm = list(range(n))
    lower = [[ZERO] * n for _ in range(n)]
    diagonal: List[Fraction] = []

    def refute(z: Dict[int, Fraction]) -> PsdCertificate:
        witness = _lift_witness(lower, perm, z)
        return PsdCertificate(
            PsdVerdict.NOT_PSD, witness=witness, value=a.quadratic_form(witness)
        )

    for k in range(n):
        rest = range(k, n)
        negative = next((p for p in rest if work[p][p] < 0), None)
        if negative is not None:
            return refute({negative: ONE})
        pivot = max(rest, key=lambda p: (work[p][p], -p))
        if work[pivot][pivot] == 0:
            # zero diagonal with a nonzero off-diagonal: the 2x2 block
            # [[0, s], [s, 0]] is indefinite
            off = next(
                ((p, q) for p in rest for q in rest if p < q and work[p][q] != 0),
                None,
            )
            if off is not None:
                p, q = off
                sign = ONE if work[p][q] > 0 else -ONE
                return refute({p: ONE, q: -sign})
            diagonal.extend(ZERO for _ in rest)
            break
        if pivot != k:
            work[k], work[pivot] = work[pivot], work[k]
            for row in work:
                row[k], row[pivot] = row[pivot], row[k]
            perm[k], perm[pivot] = perm[pivot], perm[k]
            lower[k][:k], lower[pivot][:k] = lower[pivot][:k], lower[k][:k]
        head = work[k][k]
        diagonal.append(head)
        for r in range(k + 1, n):
            lower[r][k] = work[r][k] / head
        for r in range(k + 1, n):
            if lower[r][k] == 0:
                continue
            for c in range(k + 1, n):
                work[r][c] -= lower[r][k] * work[k][c]

    for r in range(n):
        lower[r][r] = ONE
    return PsdCertificate(
        PsdVerdict.PSD,
        order=tuple(p + 1 for p in perm),
        lower=tuple(tuple(row) for row in lower),
        diagonal=tuple(diagonal),
    )


def psd_check(a: SymMatrix) -> PsdCertificate:
    """Decide A ∈ S_+^n by pivoted LDL^T; the certificate is re-verified."""
    cert = _factor(a)
    if not verify_psd_certificate(a, cert):
        raise CertificateError(f"PSD certificate failed re-verification for {a!r}")
    debug_echo(f"psd_check order {a.n}: {cert.verdict.value}")
    return cert


def parse_symmat(text: Union[str, bytes]) -> SymMatrix:
    """
    Parse the symmat v1 text format.

    Line 1 holds n, then row i holds the i entries A_i1 .. A_ii of the lower
    triangle. Blank lines and lines starting with '#' are ignored. Raw file
    bytes must be UTF-8.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as ex:
            raise ParseError(f"symmat input is not UTF-8: {ex.reason} at byte {ex.start}")
    lines = [
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
    if not lines:
        raise ParseError("empty symmat input")
    try:
        n = int(lines[0])
    except ValueError:
        raise ParseError(f"first line must be the order, got {lines[0]!r}")
    if n < 1:
        raise ParseError(f"order must be positive, got {n}")
    if len(lines) != n + 1:
        raise ParseError(f"expected {n} rows after the order line, got {len(lines) - 1}")
    values: Dict[Pair, Fraction] = {}
    for i, line in enumerate(lines[1:], start=1):
        tokens = line.split()
        if len(tokens) != i:
            raise ParseError(f"row {i} must hold {i} entries, got {len(tokens)}")
        for j, token in enumerate(tokens, start=1):
            values[(j, i)] = scalar(token)
    return SymMatrix.from_upper(n, values)


def format_symmat(a: SymMatrix) -> str:
    lines = [str(a.n)]
    for i in range(1, a.n + 1):
        lines.append(" ".join(render(a[i, j]) for j in range(1, i + 1)))
    return "\n".join(lines) + "\n"
