import io
from fractions import Fraction
from typing import Any
from typing import Dict
from typing import Iterable
from typing import List
from typing import Sequence

import click
import matplotlib
from glom import Coalesce
from glom import glom
from glom import T
from matplotlib.figure import Figure
from matplotlib.patches import Rectangle
from ruamel.yaml import YAML
from ruamel.yaml.comments import CommentedMap
from ruamel.yaml.comments import CommentedSeq

from facelattice.patterns import Cell
from facelattice.patterns import ZeroPatternDiagram
from facelattice.utils import get_aligned_command

SVG_HASH_SALT = "facelattice"
CELL_SIZE = 0.5
GRAY = "#c8c8c8"


def render_ascii(diagram: ZeroPatternDiagram) -> str:
    """
    One line per row, cells separated by single spaces. Gray cells read
    "[0]" / "[*]"; when anything is gray the others are padded to the same
    width.
    """
    lines = []
    for i in range(1, diagram.n + 1):
        tokens = []
        for j in range(1, diagram.n + 1):
            symbol = diagram.cell(i, j).value
            if diagram.is_gray(i, j):
                tokens.append(f"[{symbol}]")
            elif diagram.highlighted:
                tokens.append(f" {symbol} ")
            else:
                tokens.append(symbol)
        lines.append(" ".join(tokens).rstrip())
    return "\n".join(lines) + "\n"


def render_svg(diagram: ZeroPatternDiagram) -> str:
    n = diagram.n
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        figure = Figure(figsize=(n * CELL_SIZE, n * CELL_SIZE))
        axes = figure.add_axes([0, 0, 1, 1])
        axes.set_xlim(0, n)
        axes.set_ylim(n, 0)
        axes.set_axis_off()
        for i in range(1, diagram.n + 1):
            for j in range(1, diagram.n + 1):
                face = GRAY if diagram.is_gray(i, j) else "white"
                axes.add_patch(
                    Rectangle((j - 1, i - 1), 1, 1, facecolor=face, edgecolor="black")
                )
                symbol = "0" if diagram.cell(i, j) is Cell.ZERO else "*"
                axes.text(j - 0.5, i - 0.5, symbol, ha="center", va="center")
        buffer = io.StringIO()
        figure.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def _is_leaf_list(value: Sequence[Any]) -> bool:
    return all(not isinstance(v, (dict, list, tuple)) for v in value)


def _to_yaml_tree(value: Any) -> Any:
    if isinstance(value, dict):
        tree = CommentedMap()
        for k, v in value.items():
            tree[k] = _to_yaml_tree(v)
        return tree
    if isinstance(value, (list, tuple)):
        seq = CommentedSeq(_to_yaml_tree(v) for v in value)
        if value and _is_leaf_list(value):
            seq.fa.set_flow_style()
        return seq
    if isinstance(value, Fraction):
        return str(value)
    return value


def dump_yaml(data: Dict[str, Any]) -> str:
    yaml = YAML()
    yaml.default_flow_style = False
    yaml.width = 4096
    stream = io.StringIO()
    yaml.dump(_to_yaml_tree(data), stream)
    return stream.getvalue()


FACE_ROW = {
    "index": T["index"],
    "label": T["label"],
    "size": T["cardinality"],
    "dim": T["dimension"]["upper"],
    "exact": T["dimension"]["exact"],
    "polyhedral": T["polyhedral"],
    "witness": Coalesce(T["witness_ok"], default=None),
    "axiom": Coalesce(T["face_axiom"]["violations"], default=None),
}


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if value is True:
        return "yes"
    if value is False:
        return "no"
    return str(value)


def aligned_table(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    text_rows = [[_cell(v) for v in row] for row in rows]
    widths = [
        max([len(h)] + [len(row[c]) for row in text_rows]) for c, h in enumerate(header)
    ]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for row in text_rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def chain_table(report: Dict[str, Any]) -> str:
    rows: List[Dict[str, Any]] = glom(report, ("faces", [FACE_ROW]), default=[])
    header = list(FACE_ROW)
    return aligned_table(header, [[row[h] for h in header] for row in rows])


def chain_summary(report: Dict[str, Any]) -> List[str]:
    summary = [
        get_aligned_command(
            "chain",
            f"{glom(report, T['side'])}-side {glom(report, T['ordering'])} chain of {glom(report, T['cone'])}",
        ),
        get_aligned_command(
            "length", f"{glom(report, T['length'])} (bound {glom(report, T['l_k_bound'])})"
        ),
        get_aligned_command(
            "l_poly",
            f"{glom(report, T['l_poly'])} (expected {_cell(glom(report, T['l_poly_expected']))})",
        ),
    ]
    summary.extend(get_aligned_command("flag", flag) for flag in report.get("flags", []))
    return summary


BOUNDS_HEADER = [
    "n",
    "side",
    "l_k",
    "l_poly",
    "caratheodory_upper",
    "singularity_upper",
    "dnn_singularity_upper",
    "dnn_bound_sharper",
]


def bounds_table(bounds: Iterable[Dict[str, Any]]) -> str:
    return aligned_table(BOUNDS_HEADER, [[b[h] for h in BOUNDS_HEADER] for b in bounds])


def echo_status(title: str, subtext: str) -> None:
    click.echo(get_aligned_command(title, subtext), err=True)
