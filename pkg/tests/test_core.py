from fractions import Fraction

import numpy as np
import pytest
from conftest import gram_matrices
from conftest import sym_matrices
from hypothesis import given
from hypothesis import settings

from facelattice.core import format_symmat
from facelattice.core import inner_product
from facelattice.core import parse_symmat
from facelattice.core import psd_check
from facelattice.core import PsdVerdict
from facelattice.core import rank
from facelattice.core import scalar
from facelattice.core import solve_linear
from facelattice.core import SymMatrix
from facelattice.core import triangular
from facelattice.core import verify_psd_certificate
from facelattice.patterns import generator_E
from facelattice.sampling import make_rng
from facelattice.sampling import sample_psd
from facelattice.utils import DimensionMismatch
from facelattice.utils import IndexOutOfRange
from facelattice.utils import ParseError


def test_triangular():
    assert [triangular(n) for n in range(1, 6)] == [1, 3, 6, 10, 15]


def test_scalar_refuses_floats():
    assert scalar("-3/4") == Fraction(-3, 4)
    assert scalar(2) == Fraction(2)
    with pytest.raises(TypeError):
        scalar(0.5)
    with pytest.raises(ParseError):
        scalar("1e3")
    with pytest.raises(ParseError):
        scalar("1/0")


def test_upper_triangle_storage_mirrors():
    a = SymMatrix.from_rows([[1, 2, 3], [2, 4, 5], [3, 5, 6]])
    assert a.entries == tuple(Fraction(v) for v in [1, 2, 3, 4, 5, 6])
    assert a[3, 1] == a[1, 3] == 3
    with pytest.raises(IndexOutOfRange):
        a[0, 1]
    with pytest.raises(DimensionMismatch):
        SymMatrix.from_rows([[1, 2], [3, 4]])


def test_padded_principal_comparison():
    a = SymMatrix.from_rows([[0, 1], [1, 2]]).padded(3)
    assert a.rows == [[0, 1, 0], [1, 2, 0], [0, 0, 0]]
    assert a.principal([2, 1]).rows == [[2, 1], [1, 0]]
    b = SymMatrix.from_rows([[1, -2], [-2, 8]])
    assert b.comparison().rows == [[1, -2], [-2, 8]]
    assert SymMatrix.from_rows([[1, 2], [2, 8]]).comparison() == b


def test_inner_product_examples():
    identity = SymMatrix.identity(2)
    assert inner_product(identity, identity) == 2
    a = SymMatrix.from_rows([[3, -5], [-5, 7]])
    assert inner_product(a, generator_E(2, 1, 2)) == 3 + 7 + 2 * -5
    assert inner_product(a, SymMatrix.zeros(2)) == 0
    with pytest.raises(DimensionMismatch):
        inner_product(a, SymMatrix.identity(3))


@given(sym_matrices(min_order=3, max_order=3), sym_matrices(min_order=3, max_order=3))
def test_inner_product_symmetric_and_linear(a, b):
    assert inner_product(a, b) == inner_product(b, a)
    assert inner_product(a + a, b) == 2 * inner_product(a, b)
    assert inner_product(a, b.scale(Fraction(-1, 3))) == -inner_product(a, b) / 3


def test_solve_linear_and_rank():
    assert solve_linear([[2, 1], [1, 3]], [3, 4]) == [1, 1]
    assert solve_linear([[1, 1], [2, 2]], [1, 2]) is None
    assert rank([[1, 0, 0], [0, 1, 0], [1, 1, 0]]) == 2
    assert rank([]) == 0


def test_psd_check_examples():
    cert = psd_check(SymMatrix.from_rows([[1, 1], [1, 1]]))
    assert cert.is_psd
    assert cert.diagonal == (1, 0)

    cert = psd_check(SymMatrix.from_rows([[0, 1], [1, 0]]))
    assert cert.verdict is PsdVerdict.NOT_PSD
    assert cert.value < 0
    assert [abs(x) for x in cert.witness] == [1, 1]
    assert cert.witness[0] == -cert.witness[1]

    cert = psd_check(SymMatrix.from_rows([[1, 2], [2, 1]]))
    assert not cert.is_psd
    assert SymMatrix.from_rows([[1, 2], [2, 1]]).quadratic_form(cert.witness) < 0


def test_psd_zero_and_order_one():
    assert psd_check(SymMatrix.zeros(4)).is_psd
    assert psd_check(SymMatrix(1, [0])).is_psd
    assert not psd_check(SymMatrix(1, [-1])).is_psd


def test_psd_certificate_checker_is_independent():
    a = SymMatrix.from_rows([[2, 1], [1, 2]])
    cert = psd_check(a)
    assert verify_psd_certificate(a, cert)
    assert not verify_psd_certificate(SymMatrix.from_rows([[2, 1], [1, 3]]), cert)


@settings(max_examples=200, deadline=None)
@given(gram_matrices(max_order=5))
def test_gram_matrices_are_psd(a):
    cert = psd_check(a)
    assert cert.is_psd
    assert verify_psd_certificate(a, cert)


@settings(max_examples=200, deadline=None)
@given(sym_matrices(max_order=5))
def test_psd_verdict_is_never_refuted(a):
    cert = psd_check(a)
    if cert.is_psd:
        # clear denominators; the sign of x^T A x is unchanged
        scale = int(np.lcm.reduce([v.denominator for v in a.entries]))
        m = np.array(
            [[int(a[i, j] * scale) for j in range(1, a.n + 1)] for i in range(1, a.n + 1)],
            dtype=np.int64,
        )
        x = np.random.default_rng(7).integers(-12, 13, size=(10 ** 4, a.n))
        assert (np.einsum("ki,ij,kj->k", x, m, x) >= 0).all()
    else:
        assert a.quadratic_form(cert.witness) < 0


def test_ldl_reconstruction_on_sampled_grams():
    rng = make_rng(11)
    for _ in range(1000):
        a = sample_psd(rng, int(rng.integers(1, 6)))
        cert = psd_check(a)
        assert cert.is_psd
        assert verify_psd_certificate(a, cert)


def test_symmat_round_trip():
    text = "3\n1\n-1/2 2\n0 7/3 -4\n"
    a = parse_symmat(text)
    assert a[1, 2] == Fraction(-1, 2)
    assert a[3, 2] == Fraction(7, 3)
    assert format_symmat(a) == text


def test_symmat_comments_and_errors():
    a = parse_symmat("# a comment\n2\n\n1\n# another\n-1 1\n")
    assert a == SymMatrix.from_rows([[1, -1], [-1, 1]])
    with pytest.raises(ParseError):
        parse_symmat("")
    with pytest.raises(ParseError):
        parse_symmat("2\n1\n")
    with pytest.raises(ParseError):
        parse_symmat("2\n1 2\n3 4\n")
    with pytest.raises(ParseError):
        parse_symmat("x\n")
    with pytest.raises(ParseError):
        parse_symmat("1\n0.5\n")


def test_symmat_bytes_must_be_utf8():
    assert parse_symmat(b"1\n3/4\n")[1, 1] == Fraction(3, 4)
    with pytest.raises(ParseError, match="not UTF-8"):
        parse_symmat(b"2\n\xff\xfe\n1 1\n")
