"""
Face dimensions, polyhedrality of chain faces, independent extreme-ray
families of the embedded 2x2 cones, and the derived bounds.
"""
from fractions import Fraction
from typing import Any
from typing import Dict
from typing import FrozenSet
from typing import List
from typing import Optional
from typing import Tuple

import attr
from boltons.cacheutils import cached
from boltons.cacheutils import LRU

from facelattice import constants
from facelattice.chains import Face
from facelattice.cones import ConeId
from facelattice.cones import ConeKind
from facelattice.cones import member_dd_plus
from facelattice.cones import member_nonneg
from facelattice.cones import member_psd
from facelattice.cones import member_sdd_plus
from facelattice.cones import PluginCone
from facelattice.cones import SANDWICHED
from facelattice.cones import Side
from facelattice.core import Pair
from facelattice.core import rank
from facelattice.core import SymMatrix
from facelattice.core import triangular
from facelattice.lp import FeasibilityResult
from facelattice.lp import nonnegative_combination
from facelattice.patterns import build_I
from facelattice.patterns import build_J
from facelattice.patterns import chain_order_cop
from facelattice.patterns import chain_order_cp
from facelattice.patterns import generator_E
from facelattice.patterns import legacy_patterns
from facelattice.patterns import unit_matrix
from facelattice.patterns import vanishes_on
from facelattice.utils import debug_echo
from facelattice.utils import require_order
from facelattice.utils import UnsupportedFace


@attr.s(frozen=True, auto_attribs=True)
class DimensionResult:
    lower: int
    upper: int

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_dict(self) -> Dict[str, Any]:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact}


def _contains_nonneg(face: Face) -> bool:
    cone = face.cone
    if isinstance(cone, PluginCone):
        return cone.side is Side.COP
    return Side.COP in cone.sides or cone.kind is ConeKind.DUAL_DD_PLUS


def in_face_generators(face: Face) -> List[SymMatrix]:
    """
    Generators known to lie in the face: unit matrices on free entries when
    N ⊆ K, otherwise the E_kl whose whole support is free (E_kl ∈ DD_+ ⊆ K).
    """
    n, pattern = face.n, face.pattern
    free = pattern.free()
    if _contains_nonneg(face):
        generators = [unit_matrix(n, k, l) for k, l in free]
        check = member_nonneg
    else:
        free_set = set(free)
        generators = [
            generator_E(n, k, l)
            for k, l in free
            if (k, k) in free_set and (l, l) in free_set
        ]
        check = member_dd_plus
    return [g for g in generators if check(g).is_member and vanishes_on(g, pattern)]


def face_dimension(face: Face) -> DimensionResult:
    generators = in_face_generators(face)
    lower = rank([list(g.entries) for g in generators])
    return DimensionResult(lower, triangular(face.n) - len(face.pattern))


@attr.s(frozen=True, auto_attribs=True)
class IndependenceCertificate:
    """
    For each ray, the exact LP deciding whether it is a nonnegative
    combination of the other rays, over the listed coordinates.
    """

    coordinates: Tuple[Pair, ...]
    results: Tuple[FeasibilityResult, ...]

    @property
    def independent(self) -> bool:
        return not any(r.feasible for r in self.results)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "coordinates": [list(c) for c in self.coordinates],
            "independent": self.independent,
            "dependent_rays": [t for t, r in enumerate(self.results) if r.feasible],
        }


@attr.s(frozen=True, auto_attribs=True)
class RayFamily:
    face: Face
    block: Pair
    rays: Tuple[SymMatrix, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"block": list(self.block), "count": len(self.rays)}


def _vectors(rays: Tuple[SymMatrix, ...]) -> Tuple[Tuple[Pair, ...], List[List[Fraction]]]:
    support: FrozenSet[Pair] = frozenset().union(*(r.support for r in rays))
    coordinates = tuple(sorted(support))
    return coordinates, [[r[c] for c in coordinates] for r in rays]


@cached(LRU(max_size=256))
def _independence(vectors: Tuple[Tuple[Fraction, ...], ...]) -> Tuple[FeasibilityResult, ...]:
    results = []
    for t, target in enumerate(vectors):
        others = [v for s, v in enumerate(vectors) if s != t]
        results.append(nonnegative_combination(others, target))
    return tuple(results)


def conic_independence(family: RayFamily) -> IndependenceCertificate:
    coordinates, vectors = _vectors(family.rays)
    results = _independence(tuple(tuple(v) for v in vectors))
    return IndependenceCertificate(coordinates, results)


def embedded_block(face: Face) -> Optional[Pair]:
    """The free principal 2x2 block (k,l) with the largest indices, if any."""
    free = set(face.pattern.free())
    blocks = [
        (k, l)
        for k, l in free
        if k < l and (k, k) in free and (l, l) in free
    ]
    return max(blocks) if blocks else None


def _ray(n: int, block: Pair, slope: int) -> SymMatrix:
    k, l = block
    return SymMatrix.from_upper(n, {(k, k): 1, (k, l): slope, (l, l): slope * slope})


def extreme_ray_family(face: Face, count: int = constants.DEFAULT_RAY_COUNT) -> RayFamily:
    """
    Rank-one rays a a^T embedded at the free block: a = (1, m) on the CP side,
    a = (1, -m) on the COP side, m = 1..count. Each ray is checked in-face
    through an inner cone of K.
    """
    block = embedded_block(face)
    if block is None:
        raise UnsupportedFace(f"{face.label} has no free principal 2x2 block")
    cop_side = _contains_nonneg(face)
    sign = -1 if cop_side else 1
    rays = tuple(_ray(face.n, block, sign * m) for m in range(1, count + 1))
    # rank-one PSD lies in SPN ⊆ COP and in (SDD+)*; nonnegative 2x2 rank-one in SDD+
    check = member_psd if cop_side else member_sdd_plus
    for ray in rays:
        if not (check(ray).is_member and vanishes_on(ray, face.pattern)):
            raise UnsupportedFace(f"ray {ray!r} is not in {face.label}")
    return RayFamily(face, block, rays)


class PolyhedralCertificate:
    POLYHEDRAL_CONE = "polyhedral-cone"
    LOW_DIMENSION = "dimension<=2"
    DIAGONAL_GENERATORS = "diagonal-face generators"
    RAY_FAMILY = "independent-ray-family"


@attr.s(frozen=True, auto_attribs=True)
class PolyhedralityResult:
    polyhedral: bool
    certificate: str
    dimension: DimensionResult
    block: Optional[Pair] = None
    independence: Optional[IndependenceCertificate] = None
    ray_count: int = 0

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "polyhedral": self.polyhedral,
            "certificate": self.certificate,
        }
        if self.block is not None:
            d["embedded_block"] = list(self.block)
        if self.independence is not None:
            d["rays"] = self.ray_count
            d["rays_independent"] = self.independence.independent
        return d


@cached(LRU(max_size=64))
def supported_patterns(n: int) -> FrozenSet[FrozenSet[Pair]]:
    patterns = [build_I(n, i, j) for i, j in chain_order_cp(n)]
    patterns += [build_J(n, i, j) for i, j in chain_order_cop(n)]
    patterns += legacy_patterns(n)
    return frozenset(p.pairs for p in patterns)


CLASSIFIABLE = SANDWICHED[Side.CP] | SANDWICHED[Side.COP]


def classify_polyhedral(
    face: Face, rays: int = constants.DEFAULT_RAY_COUNT
) -> PolyhedralityResult:
    cone = face.cone
    if not isinstance(cone, ConeId) or cone.kind not in CLASSIFIABLE:
        raise UnsupportedFace(
            f"polyhedrality of {face.label} is only classified for the sandwiched built-in cones"
        )
    if face.pattern.pairs not in supported_patterns(face.n):
        raise UnsupportedFace(
            f"{face.label} is not a face of a supported chain; the 2x2 block rule does not apply"
        )
    dimension = face_dimension(face)
    if cone.polyhedral:
        return PolyhedralityResult(True, PolyhedralCertificate.POLYHEDRAL_CONE, dimension)
    block = embedded_block(face)
    if block is not None:
        family = extreme_ray_family(face, rays)
        independence = conic_independence(family)
        debug_echo(
            f"{face.label}: block {block}, {rays} rays, independent={independence.independent}"
        )
        return PolyhedralityResult(
            False,
            PolyhedralCertificate.RAY_FAMILY,
            dimension,
            block,
            independence,
            len(family.rays),
        )
    if dimension.upper <= 2:
        return PolyhedralityResult(True, PolyhedralCertificate.LOW_DIMENSION, dimension)
    if all(k == l for k, l in face.pattern.free()):
        return PolyhedralityResult(
            True, PolyhedralCertificate.DIAGONAL_GENERATORS, dimension
        )
    raise UnsupportedFace(f"{face.label} has free off-diagonal entries but no free 2x2 block")


@attr.s(frozen=True, auto_attribs=True)
class Bounds:
    n: int
    side: Side
    l_k: int
    l_poly: int
    caratheodory_upper: int
    singularity_upper: int
    dnn_singularity_upper: int

    @property
    def dnn_bound_sharper(self) -> bool:
        return self.dnn_singularity_upper < self.singularity_upper

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "side": self.side.value,
            "l_k": self.l_k,
            "l_poly": self.l_poly,
            "caratheodory_upper": self.caratheodory_upper,
            "singularity_upper": self.singularity_upper,
            "dnn_singularity_upper": self.dnn_singularity_upper,
            "dnn_bound_sharper": self.dnn_bound_sharper,
        }


def compute_bounds(n: int, side: Side) -> Bounds:
    require_order(n)
    t = triangular(n)
    l_poly = 0 if n == 1 else t - 2
    return Bounds(
        n=n,
        side=side,
        l_k=t + 1,
        l_poly=l_poly,
        caratheodory_upper=t,
        singularity_upper=l_poly + 1,
        dnn_singularity_upper=n,
    )
