from fractions import Fraction

import numpy as np
import pytest

from facelattice.copositive import copositive_2x2
from facelattice.copositive import copositive_min
from facelattice.copositive import SupportStatus
from facelattice.core import SymMatrix
from facelattice.sampling import make_rng
from facelattice.sampling import small_rational
from facelattice.utils import DeskScaleLimit


def test_hyperbolic_pair():
    result = copositive_min(SymMatrix.from_rows([[0, -1], [-1, 0]]))
    assert result.minimum == Fraction(-1, 2)
    assert result.minimizer == (Fraction(1, 2), Fraction(1, 2))
    assert not result.is_copositive


def test_identity_barycenter():
    result = copositive_min(SymMatrix.identity(3))
    assert result.minimum == Fraction(1, 3)
    assert result.minimizer == (Fraction(1, 3),) * 3
    assert result.support == (1, 2, 3)


def test_horn_matrix_minimum_is_zero(horn):
    result = copositive_min(horn)
    assert result.minimum == 0
    assert result.is_copositive
    assert result.verify(horn)
    assert sum(result.counts().values()) == 2 ** 5 - 1


def test_horn_has_no_negative_value_on_the_simplex(horn):
    # x^T H x is homogeneous, so integer points stand in for the simplex
    rng = make_rng(5)
    h = np.array([[int(horn[i, j]) for j in range(1, 6)] for i in range(1, 6)], dtype=np.int64)
    points = rng.integers(0, 7, size=(10 ** 5, 5))
    points = points[points.sum(axis=1) > 0]
    values = np.einsum("ki,ij,kj->k", points, h, points)
    assert (values >= 0).all()


def test_singular_supports_are_recorded():
    # every support of the all-ones matrix larger than one is degenerate
    result = copositive_min(SymMatrix.from_function(3, lambda i, j: 1))
    assert result.minimum == 1
    statuses = {case.support: case.status for case in result.transcript}
    assert statuses[(1,)] is SupportStatus.CANDIDATE
    assert statuses[(1, 2)] is SupportStatus.SINGULAR


def test_transcript_serialization(horn):
    d = copositive_min(horn).to_dict(transcript=True)
    assert d["minimum"] == "0"
    assert len(d["transcript"]) == 31
    assert "transcript" not in copositive_min(horn).to_dict()


def test_enumeration_limit():
    with pytest.raises(DeskScaleLimit):
        copositive_min(SymMatrix.identity(9))
    with pytest.raises(DeskScaleLimit):
        copositive_min(SymMatrix.identity(4), limit=3)
    assert copositive_min(SymMatrix.identity(9), limit=9).minimum == Fraction(1, 9)


def test_closed_form_agrees_with_enumeration():
    rng = make_rng(2024)
    for _ in range(10 ** 4):
        a, b, c = (small_rational(rng, -4, 4) for _ in range(3))
        result = copositive_min(SymMatrix.from_rows([[a, b], [b, c]]))
        assert result.is_copositive == copositive_2x2(a, b, c), (a, b, c)
