import attr
import pytest

from facelattice.chains import build_chain_cop
from facelattice.chains import build_chain_cp
from facelattice.chains import equality_collapse_check
from facelattice.chains import Face
from facelattice.chains import face_axiom_test
from facelattice.chains import longest_chain_upper_bound
from facelattice.chains import Ordering
from facelattice.chains import replay_remark_cop_order
from facelattice.chains import replay_remark_dual_ddplus
from facelattice.chains import step_verdicts
from facelattice.chains import verify_chain
from facelattice.chains import verify_witness_cop
from facelattice.chains import verify_witness_cp
from facelattice.cones import ConeId
from facelattice.cones import ConeKind
from facelattice.cones import member_sdd_plus
from facelattice.cones import PluginCone
from facelattice.cones import Side
from facelattice.core import SymMatrix
from facelattice.core import triangular
from facelattice.patterns import build_I
from facelattice.patterns import build_J
from facelattice.utils import DimensionMismatch
from facelattice.utils import IndexOutOfRange
from facelattice.utils import SandwichViolation

CP_KINDS = [ConeKind.NONNEG, ConeKind.DD_PLUS, ConeKind.DNN]
COP_KINDS = [ConeKind.NONNEG, ConeKind.DUAL_SDD_PLUS]


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("kind", CP_KINDS)
def test_cp_chain_length_and_witnesses(n, kind):
    chain = build_chain_cp(n, ConeId(kind, n))
    assert chain.length == triangular(n) + 1 == longest_chain_upper_bound(n)
    verdicts = verify_chain(chain)
    assert len(verdicts) == triangular(n)
    assert all(v.ok for v in verdicts)


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("kind", COP_KINDS)
def test_cop_chain_length_and_witnesses(n, kind):
    chain = build_chain_cop(n, ConeId(kind, n))
    assert chain.length == triangular(n) + 1
    assert all(v.ok for v in verify_chain(chain))
    assert step_verdicts(chain) == [None] * triangular(n)


def test_order_two_chains():
    cp = build_chain_cp(2, ConeId(ConeKind.DNN, 2))
    assert [f.pattern.label for f in cp.descending()] == [
        "I_{0,0}",
        "I_{1,2}",
        "I_{1,1}",
        "I_{2,2}",
    ]
    cop = build_chain_cop(2, ConeId(ConeKind.DUAL_SDD_PLUS, 2))
    assert [sorted(f.pattern.pairs) for f in cop.descending()] == [
        [],
        [(1, 1)],
        [(1, 1), (1, 2)],
        [(1, 1), (1, 2), (2, 2)],
    ]
    assert cop.descending()[0].label == "(SDD+)*^2[J_{0,2}]"


def test_steps_separate_neighbouring_faces():
    for chain in [
        build_chain_cp(3, ConeId(ConeKind.DNN, 3)),
        build_chain_cop(3, ConeId(ConeKind.DUAL_SDD_PLUS, 3)),
    ]:
        for step in chain.steps():
            assert step.larger.contains(step.witness)
            assert not step.smaller.contains(step.witness)
            assert step.added in step.smaller.pattern
            assert step.added not in step.larger.pattern


def test_legacy_chain_is_also_maximal():
    chain = build_chain_cp(3, ConeId(ConeKind.DNN, 3), Ordering.LEGACY)
    assert chain.length == 7
    assert all(v.ok for v in verify_chain(chain))
    assert [f.pattern.label for f in chain.descending()][:2] == ["L_0", "L_1"]


def test_witness_verdicts():
    verdict = verify_witness_cp(3, 1, 3, ConeId(ConeKind.DNN, 3))
    assert verdict.ok
    assert verdict.to_dict()["clauses"] == {"a": True, "b": True, "c": True}
    assert verify_witness_cp(3, 2, 2, ConeId(ConeKind.NONNEG, 3)).ok
    assert verify_witness_cop(3, 1, 1, ConeId(ConeKind.DUAL_SDD_PLUS, 3)).ok
    assert verify_witness_cop(3, 2, 2, ConeId(ConeKind.NONNEG, 3)).ok


@pytest.mark.parametrize("i, j", [(0, 1), (2, 1), (1, 4), (4, 4)])
def test_witness_out_of_range(i, j):
    with pytest.raises(IndexOutOfRange):
        verify_witness_cp(3, i, j, ConeId(ConeKind.DNN, 3))
    with pytest.raises(IndexOutOfRange):
        verify_witness_cop(3, i, j, ConeId(ConeKind.NONNEG, 3))


def test_witness_on_the_wrong_side():
    with pytest.raises(SandwichViolation):
        verify_witness_cp(3, 1, 1, ConeId(ConeKind.DUAL_SDD_PLUS, 3))


def test_broken_witnesses_are_reported():
    chain = build_chain_cp(2, ConeId(ConeKind.DNN, 2))
    broken = attr.evolve(chain, witnesses=(SymMatrix.zeros(2),) * 3)
    verdicts = step_verdicts(broken)
    assert len(verdicts) == 3
    assert all(v is not None and "(c)" in v for v in verdicts)


def test_sandwich_preconditions():
    with pytest.raises(SandwichViolation):
        build_chain_cp(3, ConeId(ConeKind.DUAL_SDD_PLUS, 3))
    with pytest.raises(SandwichViolation):
        build_chain_cop(3, ConeId(ConeKind.DNN, 3))
    with pytest.raises(SandwichViolation):
        build_chain_cop(3, ConeId(ConeKind.DUAL_DD_PLUS, 3))
    with pytest.raises(DimensionMismatch):
        build_chain_cp(3, ConeId(ConeKind.DNN, 4))
    with pytest.raises(DimensionMismatch):
        Face(ConeId(ConeKind.DNN, 3), build_I(4, 1, 1))


def test_plugin_cone_chain():
    cone = PluginCone("SDD+", 3, Side.CP, lambda a: member_sdd_plus(a).is_member)
    chain = build_chain_cp(3, cone)
    assert chain.length == 7
    assert all(v.ok for v in verify_chain(chain))
    with pytest.raises(SandwichViolation):
        build_chain_cop(3, cone)
    with pytest.raises(SandwichViolation):
        build_chain_cp(3, PluginCone("everything", 3, Side.CP, lambda a: True))


FACE_AXIOM_SUITE = [(Side.CP, kind) for kind in CP_KINDS] + [
    (Side.COP, kind) for kind in COP_KINDS
]


@pytest.mark.parametrize("n", range(2, 6))
@pytest.mark.parametrize("side, kind", FACE_AXIOM_SUITE)
def test_chain_faces_pass_the_face_axiom(n, side, kind):
    cone = ConeId(kind, n)
    chain = build_chain_cp(n, cone) if side is Side.CP else build_chain_cop(n, cone)
    for face in chain.descending():
        report = face_axiom_test(face, samples=1000, seed=n)
        assert report.ok, report.to_dict()


SMALL_ORDER_SUITE = [
    (Side.CP, ConeKind.SDD_PLUS),
    (Side.CP, ConeKind.CP),
    (Side.COP, ConeKind.SPN),
    (Side.COP, ConeKind.COP),
]


@pytest.mark.parametrize("n", range(2, 5))
@pytest.mark.parametrize("side, kind", SMALL_ORDER_SUITE)
def test_small_order_chains_pass_the_face_axiom(n, side, kind):
    cone = ConeId(kind, n)
    chain = build_chain_cp(n, cone) if side is Side.CP else build_chain_cop(n, cone)
    for face in chain.descending():
        report = face_axiom_test(face, samples=200, seed=n)
        assert report.ok, report.to_dict()
        assert report.probes > 0 or report.skipped


def test_face_axiom_skips_the_whole_cone():
    report = face_axiom_test(Face(ConeId(ConeKind.DNN, 3), build_I(3, 0, 0)), 10)
    assert report.ok
    assert report.probes == 0
    assert "whole cone" in report.skipped


@pytest.mark.parametrize("n", range(2, 7))
def test_dual_dd_plus_replay(n):
    replay = replay_remark_dual_ddplus(n)
    assert replay.confirmed
    a, b = replay.pair
    assert a.n == n
    assert replay.to_dict()["confirmed"] is True


@pytest.mark.parametrize("n", range(2, 7))
def test_cop_ordering_replay(n):
    replay = replay_remark_cop_order(n)
    assert replay.confirmed
    expected = "SPN" if n <= 4 else "(SDD+)*"
    assert replay.cone.startswith(expected)


@pytest.mark.parametrize("kind", [ConeKind.PSD, ConeKind.COP, ConeKind.DUAL_SDD_PLUS])
def test_cop_ordering_replay_on_other_cones(kind):
    assert replay_remark_cop_order(3, ConeId(kind, 3)).confirmed


def test_replays_need_order_two():
    with pytest.raises(IndexOutOfRange):
        replay_remark_dual_ddplus(1)
    with pytest.raises(IndexOutOfRange):
        replay_remark_cop_order(1)
    with pytest.raises(SandwichViolation):
        replay_remark_cop_order(3, ConeId(ConeKind.DNN, 3))


def test_face_axiom_detects_the_dual_dd_plus_non_face():
    replay = replay_remark_dual_ddplus(3)
    face = Face(ConeId(ConeKind.DUAL_DD_PLUS, 3), build_J(3, 1, 2))
    report = face_axiom_test(face, samples=50, extra_pairs=[replay.pair])
    assert not report.ok
    assert "first_violation" in report.to_dict()
    # the same pattern does cut a face of (SDD+)*
    face = Face(ConeId(ConeKind.DUAL_SDD_PLUS, 3), build_J(3, 1, 2))
    assert face_axiom_test(face, samples=300).ok


def test_equality_collapse():
    report = equality_collapse_check(3, ConeId(ConeKind.DNN, 3), samples=200)
    assert report.ok
    assert len(report.zero_diagonals) == 3
    assert report.rejected_truncations > 0
    assert equality_collapse_check(4, ConeId(ConeKind.CP, 4), samples=50).ok
    with pytest.raises(SandwichViolation):
        equality_collapse_check(3, ConeId(ConeKind.NONNEG, 3), samples=10)
