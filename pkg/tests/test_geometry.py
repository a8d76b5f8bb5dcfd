import pytest

from facelattice.chains import build_chain_cop
from facelattice.chains import build_chain_cp
from facelattice.chains import Face
from facelattice.chains import Ordering
from facelattice.cones import ConeId
from facelattice.cones import ConeKind
from facelattice.cones import PluginCone
from facelattice.cones import Side
from facelattice.core import SymMatrix
from facelattice.core import triangular
from facelattice.geometry import classify_polyhedral
from facelattice.geometry import compute_bounds
from facelattice.geometry import conic_independence
from facelattice.geometry import embedded_block
from facelattice.geometry import extreme_ray_family
from facelattice.geometry import face_dimension
from facelattice.geometry import PolyhedralCertificate
from facelattice.geometry import RayFamily
from facelattice.patterns import build_I
from facelattice.patterns import build_J
from facelattice.patterns import IndexSet
from facelattice.utils import IndexOutOfRange
from facelattice.utils import UnsupportedFace

DNN3 = ConeId(ConeKind.DNN, 3)
DUAL_SDD3 = ConeId(ConeKind.DUAL_SDD_PLUS, 3)


def test_face_dimension_examples():
    assert face_dimension(Face(DNN3, build_I(3, 1, 3))).upper == 5
    assert face_dimension(Face(DNN3, build_I(3, 1, 3))).exact
    assert face_dimension(Face(DUAL_SDD3, build_J(3, 3, 3))).lower == 0
    full = face_dimension(Face(DNN3, build_I(3, 0, 0)))
    assert (full.lower, full.upper) == (6, 6)


CP_CONES = [ConeKind.NONNEG, ConeKind.DD_PLUS, ConeKind.SDD_PLUS, ConeKind.DNN]
COP_CONES = [ConeKind.NONNEG, ConeKind.DUAL_SDD_PLUS]


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("side, kinds", [(Side.CP, CP_CONES), (Side.COP, COP_CONES)])
def test_dimension_ladder(n, side, kinds):
    for kind in kinds:
        cone = ConeId(kind, n)
        chain = build_chain_cp(n, cone) if side is Side.CP else build_chain_cop(n, cone)
        dimensions = [face_dimension(face) for face in chain.descending()]
        assert [d.upper for d in dimensions] == list(range(triangular(n), -1, -1))
        assert all(d.exact for d in dimensions)


def test_classification_examples():
    result = classify_polyhedral(Face(DNN3, build_I(3, 1, 1)))
    assert not result.polyhedral
    assert result.certificate == PolyhedralCertificate.RAY_FAMILY
    assert result.block == (2, 3)
    assert result.independence.independent

    result = classify_polyhedral(Face(DNN3, build_I(3, 2, 2)))
    assert result.polyhedral
    assert result.certificate == PolyhedralCertificate.LOW_DIMENSION

    result = classify_polyhedral(Face(DUAL_SDD3, build_J(3, 1, 3)))
    assert not result.polyhedral
    assert result.block == (2, 3)


def test_polyhedral_cones_short_circuit():
    result = classify_polyhedral(Face(ConeId(ConeKind.DD_PLUS, 3), build_I(3, 0, 0)))
    assert result.polyhedral
    assert result.certificate == PolyhedralCertificate.POLYHEDRAL_CONE


@pytest.mark.parametrize("n", range(3, 6))
def test_legacy_face_of_dimension_n_is_polyhedral(n):
    chain = build_chain_cp(n, ConeId(ConeKind.DNN, n), Ordering.LEGACY)
    faces = chain.descending()
    face = faces[triangular(n - 1)]
    assert face_dimension(face).upper == n
    result = classify_polyhedral(face)
    assert result.polyhedral
    assert result.certificate == PolyhedralCertificate.DIAGONAL_GENERATORS
    verdicts = [classify_polyhedral(f).polyhedral for f in faces]
    assert verdicts.index(True) == triangular(n - 1)


def test_classification_refuses_unsupported_faces():
    stray = IndexSet(3, frozenset({(2, 3)}), "stray")
    with pytest.raises(UnsupportedFace):
        classify_polyhedral(Face(DNN3, stray))
    with pytest.raises(UnsupportedFace):
        classify_polyhedral(Face(ConeId(ConeKind.DUAL_DD_PLUS, 3), build_J(3, 1, 1)))
    plugin = PluginCone("x", 3, Side.CP, lambda a: True)
    with pytest.raises(UnsupportedFace):
        classify_polyhedral(Face(plugin, build_I(3, 1, 1)))


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize(
    "side, kind",
    [(Side.CP, ConeKind.DNN), (Side.CP, ConeKind.SDD_PLUS), (Side.COP, ConeKind.DUAL_SDD_PLUS)],
)
def test_leading_non_polyhedral_run(n, side, kind):
    cone = ConeId(kind, n)
    chain = build_chain_cp(n, cone) if side is Side.CP else build_chain_cop(n, cone)
    verdicts = [classify_polyhedral(face).polyhedral for face in chain.descending()]
    run = triangular(n) - 2
    assert verdicts == [False] * run + [True] * 3


def test_extreme_rays_cp_side():
    family = extreme_ray_family(Face(DNN3, build_I(3, 1, 1)), 4)
    assert family.block == (2, 3)
    assert [r[2, 3] for r in family.rays] == [1, 2, 3, 4]
    assert conic_independence(family).independent


def test_extreme_rays_cop_side():
    family = extreme_ray_family(Face(DUAL_SDD3, build_J(3, 1, 3)), 4)
    assert [r[2, 3] for r in family.rays] == [-1, -2, -3, -4]
    assert conic_independence(family).independent


def test_thirty_two_rays_are_independent():
    for face in [Face(DNN3, build_I(3, 0, 0)), Face(DUAL_SDD3, build_J(3, 1, 1))]:
        certificate = conic_independence(extreme_ray_family(face, 32))
        assert certificate.independent
        assert len(certificate.results) == 32


def test_single_ray_and_proportional_rays():
    face = Face(DNN3, build_I(3, 1, 1))
    ray = extreme_ray_family(face, 1).rays[0]
    assert conic_independence(RayFamily(face, (2, 3), (ray,))).independent
    dependent = conic_independence(RayFamily(face, (2, 3), (ray, ray.scale(2))))
    assert not dependent.independent
    assert dependent.to_dict()["dependent_rays"] == [0, 1]


def test_diagonal_and_rank_one_rays_are_independent():
    face = Face(DNN3, build_I(3, 1, 1))
    rays = (
        SymMatrix.from_upper(3, {(2, 2): 1}),
        SymMatrix.from_upper(3, {(3, 3): 1}),
        SymMatrix.from_upper(3, {(2, 2): 1, (2, 3): 1, (3, 3): 1}),
    )
    assert conic_independence(RayFamily(face, (2, 3), rays)).independent


def test_no_block_means_no_family():
    face = Face(DNN3, build_I(3, 2, 3))
    assert embedded_block(face) is None
    with pytest.raises(UnsupportedFace):
        extreme_ray_family(face)


def test_bounds():
    one = compute_bounds(1, Side.CP)
    assert (one.l_k, one.l_poly) == (2, 0)
    three = compute_bounds(3, Side.COP)
    assert (three.l_k, three.l_poly, three.singularity_upper) == (7, 4, 5)
    assert compute_bounds(4, Side.CP).caratheodory_upper == 10
    assert not compute_bounds(2, Side.CP).dnn_bound_sharper
    assert compute_bounds(3, Side.CP).dnn_bound_sharper
    with pytest.raises(IndexOutOfRange):
        compute_bounds(0, Side.CP)
