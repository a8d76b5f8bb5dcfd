import pytest

from facelattice.formatter import render_ascii
from facelattice.formatter import render_svg
from facelattice.patterns import build_I
from facelattice.patterns import build_J
from facelattice.patterns import chain_order_cop
from facelattice.patterns import chain_order_cp
from facelattice.patterns import generator_E
from facelattice.patterns import pattern_matrix_E
from facelattice.patterns import render_diagram

CP_PANELS = chain_order_cp(3)
COP_PANELS = chain_order_cop(3)


@pytest.mark.parametrize("i, j", CP_PANELS)
def test_cp_side_panels(fixtures_path, i, j):
    golden = (fixtures_path / "diagrams" / f"cp-n3-i{i}-j{j}.txt").read_text()
    assert render_ascii(render_diagram(build_I(3, i, j))) == golden


@pytest.mark.parametrize("i, j", COP_PANELS)
def test_cop_side_panels(fixtures_path, i, j):
    golden = (fixtures_path / "diagrams" / f"cop-n3-i{i}-j{j}.txt").read_text()
    assert render_ascii(render_diagram(build_J(3, i, j))) == golden


def test_cop_witness_in_gray(fixtures_path):
    diagram = render_diagram(build_J(3, 1, 2), pattern_matrix_E(build_J(3, 1, 1)))
    golden = (fixtures_path / "diagrams" / "cop-n3-i1-j2-witness.txt").read_text()
    assert render_ascii(diagram) == golden


def test_cp_witness_in_gray(fixtures_path):
    diagram = render_diagram(build_I(3, 1, 1), generator_E(3, 1, 1))
    golden = (fixtures_path / "diagrams" / "cp-n3-i1-j1-witness.txt").read_text()
    assert render_ascii(diagram) == golden


def test_cp_witness_avoids_larger_pattern():
    # E_ij has no gray cell on a zero of I_{i,j+1}
    for i, j in [(1, 3), (1, 2), (2, 3), (2, 2)]:
        larger = build_I(3, i, j + 1)
        diagram = render_diagram(larger, generator_E(3, i, j))
        assert not any(diagram.is_gray(k, l) for k, l in larger)


def test_svg_is_deterministic():
    diagram = render_diagram(build_J(3, 1, 2), pattern_matrix_E(build_J(3, 1, 1)))
    first = render_svg(diagram)
    assert first == render_svg(diagram)
    assert first.lstrip().startswith("<?xml")
    assert "<svg" in first
    assert "dc:date" not in first
