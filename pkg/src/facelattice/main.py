import sys
from pathlib import Path
from typing import Any
from typing import Dict
from typing import Optional
from typing import Tuple

import click

from facelattice import constants
from facelattice.chains import build_chain_cop
from facelattice.chains import build_chain_cp
from facelattice.chains import Face
from facelattice.chains import face_axiom_test
from facelattice.chains import Ordering
from facelattice.chains import replay_remark_cop_order
from facelattice.chains import replay_remark_dual_ddplus
from facelattice.chains import verify_witness_cop
from facelattice.chains import verify_witness_cp
from facelattice.cones import ConeId
from facelattice.cones import ConeKind
from facelattice.cones import member
from facelattice.cones import Side
from facelattice.core import parse_symmat
from facelattice.core import SymMatrix
from facelattice.formatter import bounds_table
from facelattice.formatter import chain_summary
from facelattice.formatter import chain_table
from facelattice.formatter import dump_yaml
from facelattice.formatter import echo_status
from facelattice.formatter import render_ascii
from facelattice.formatter import render_svg
from facelattice.geometry import compute_bounds
from facelattice.patterns import build_I
from facelattice.patterns import build_J
from facelattice.patterns import generator_E
from facelattice.patterns import IndexSet
from facelattice.patterns import pattern_matrix_E
from facelattice.patterns import render_diagram
from facelattice.report import chain_report
from facelattice.report import full_report
from facelattice.utils import IndexOutOfRange
from facelattice.utils import require_order
from facelattice.utils import WitnessFailure

CONE_NAMES = [kind.value for kind in ConeKind]
SIDE_NAMES = [side.value for side in Side]

side_option = click.option(
    "--side", type=click.Choice(SIDE_NAMES), required=True, help="Which sandwich to work in"
)
order_option = click.option("--n", "n", type=click.IntRange(min=1), required=True)
seed_option = click.option(
    "--seed",
    envvar=constants.SEED_ENVVAR,
    type=int,
    default=constants.DEFAULT_SEED,
    show_default=True,
)
samples_option = click.option(
    "--samples",
    type=click.IntRange(min=0),
    default=constants.DEFAULT_CLI_SAMPLES,
    show_default=True,
    help="Sampled members per face for the face-axiom test",
)
rays_option = click.option(
    "--rays",
    type=click.IntRange(min=2),
    default=constants.DEFAULT_RAY_COUNT,
    show_default=True,
    help="Extreme rays per non-polyhedral face",
)


def _finish(ok: bool) -> None:
    sys.exit(constants.EXIT_OK if ok else constants.EXIT_NEGATIVE)


def _cone(name: str, n: int, cop_limit: int = constants.DEFAULT_COP_LIMIT) -> ConeId:
    return ConeId(ConeKind(name), n, cop_limit)


@click.group()
@click.version_option(package_name="facelattice")
def main() -> None:
    """
    Longest chains of faces of the cones between DD+ and N (and dually between
    N and (DD+)*), with exact certificates for every claim.
    """


@main.command(name="member")
@click.option("--cone", "cone_name", type=click.Choice(CONE_NAMES), required=True)
@click.option(
    "--cop-limit",
    envvar=constants.COP_LIMIT_ENVVAR,
    type=click.IntRange(min=1),
    default=constants.DEFAULT_COP_LIMIT,
    show_default=True,
    help="Largest order the copositivity oracle enumerates",
)
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def cmd_member(cone_name: str, cop_limit: int, file: Path) -> None:
    """Decide membership of the symmat matrix in FILE and print the certificate."""
    a = parse_symmat(file.read_bytes())
    if cop_limit > constants.DEFAULT_COP_LIMIT:
        click.secho(
            f"warning: copositivity enumerates 2^n supports; n = {a.n} visits "
            f"{2 ** a.n - 1} of them",
            fg="yellow",
            err=True,
        )
    cone = _cone(cone_name, a.n, cop_limit)
    cert = member(cone, a)
    echo_status("membership", f"{cone.name}: {cert.verdict.value}")
    data: Dict[str, Any] = cert.to_dict()
    data["matrix"] = a.to_dict()
    click.echo(dump_yaml(data), nl=False)
    _finish(cert.is_member)


@main.command(name="chain")
@side_option
@order_option
@click.option("--cone", "cone_name", type=click.Choice(CONE_NAMES), required=True)
@click.option("--verify", is_flag=True, help="Check witnesses, face axioms and replays")
@click.option(
    "--ordering",
    type=click.Choice([o.value for o in Ordering]),
    default=Ordering.PAPER.value,
    show_default=True,
)
@samples_option
@seed_option
@rays_option
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["yaml", "table"]),
    default="yaml",
    show_default=True,
)
def cmd_chain(
    side: str,
    n: int,
    cone_name: str,
    verify: bool,
    ordering: str,
    samples: int,
    seed: int,
    rays: int,
    output_format: str,
) -> None:
    """Build the longest chain of faces and report dimensions and polyhedrality."""
    cone = _cone(cone_name, n)
    chain_ordering = Ordering(ordering)
    if Side(side) is Side.CP:
        chain = build_chain_cp(n, cone, chain_ordering)
    elif chain_ordering is Ordering.LEGACY:
        raise click.UsageError("the legacy ordering only exists on the cp side")
    else:
        chain = build_chain_cop(n, cone)

    report = chain_report(chain, verify, samples, seed, rays)
    data = report.to_dict()
    for line in chain_summary(data):
        click.echo(line, err=True)
    if output_format == "table":
        click.echo(chain_table(data), nl=False)
    else:
        click.echo(dump_yaml(data), nl=False)
    _finish(report.ok)


@main.command(name="verify")
@side_option
@order_option
@click.option("--i", "i", type=int, required=True)
@click.option("--j", "j", type=int, required=True)
@click.option("--cone", "cone_name", type=click.Choice(CONE_NAMES), required=True)
def cmd_verify(side: str, n: int, i: int, j: int, cone_name: str) -> None:
    """Check the witness separating the chain step that adds the entry (i,j)."""
    cone = _cone(cone_name, n)
    check = verify_witness_cp if Side(side) is Side.CP else verify_witness_cop
    try:
        verdict = check(n, i, j, cone)
    except WitnessFailure as ex:
        click.secho(ex.message, fg="red", err=True)
        _finish(False)
        return
    echo_status("witness", f"{verdict.step}: ok")
    click.echo(dump_yaml(verdict.to_dict()), nl=False)
    _finish(verdict.ok)


@main.command(name="counterexample")
@click.argument("which", type=click.Choice(["dual-ddp-face", "cop-ordering"]))
@order_option
@click.option(
    "--cone",
    "cone_name",
    type=click.Choice(["spn4", "cop", "sddp-dual", "psd"]),
    default=None,
    help="Cone for the cop-ordering replay [default: spn4 for n <= 4, else sddp-dual]",
)
@samples_option
@seed_option
def cmd_counterexample(
    which: str, n: int, cone_name: Optional[str], samples: int, seed: int
) -> None:
    """Replay one of the two patterns that do not cut out a face."""
    require_order(n, minimum=2)
    if which == "cop-ordering":
        cone = None if cone_name is None else _cone(cone_name, n)
        replay = replay_remark_cop_order(n, cone)
        data = replay.to_dict()
        confirmed = replay.confirmed
    else:
        if cone_name is not None:
            raise click.UsageError("--cone only applies to the cop-ordering replay")
        replay = replay_remark_dual_ddplus(n)
        face = Face(ConeId(ConeKind.DUAL_DD_PLUS, n), build_J(n, 1, 2))
        detection = face_axiom_test(face, samples, seed, extra_pairs=[replay.pair])
        data = replay.to_dict()
        data["face_axiom"] = detection.to_dict()
        confirmed = replay.confirmed and not detection.ok

    for check in data["checks"]:
        echo_status("check", f"{check['claim']}: {'holds' if check['holds'] else 'FAILS'}")
    echo_status(which, "confirmed" if confirmed else "not confirmed")
    data["confirmed"] = confirmed
    click.echo(dump_yaml(data), nl=False)
    _finish(confirmed)


def _diagram_pattern(side: Side, n: int, i: int, j: int) -> IndexSet:
    return build_I(n, i, j) if side is Side.CP else build_J(n, i, j)


def _diagram_witness(side: Side, n: int, i: int, j: int) -> Tuple[str, SymMatrix]:
    """The matrix that lies in the next larger face but not in K[pattern]."""
    if i == 0:
        raise IndexOutOfRange("the whole cone is the top of the chain and has no witness")
    if side is Side.CP:
        return f"E_{{{i},{j}}}", generator_E(n, i, j)
    larger = build_J(n, i, j - 1)
    return f"E[{larger.label}]", pattern_matrix_E(larger)


@main.command(name="diagram")
@side_option
@order_option
@click.option("--i", "i", type=int, required=True)
@click.option("--j", "j", type=int, required=True)
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["ascii", "vector"]),
    default="ascii",
    show_default=True,
)
@click.option("--witness", is_flag=True, help="Gray out the support of the step witness")
def cmd_diagram(side: str, n: int, i: int, j: int, output_format: str, witness: bool) -> None:
    """Draw the zero pattern of one face of the chain."""
    chain_side = Side(side)
    pattern = _diagram_pattern(chain_side, n, i, j)
    highlight = None
    if witness:
        label, highlight = _diagram_witness(chain_side, n, i, j)
        echo_status("witness", f"{label} in gray")
    diagram = render_diagram(pattern, highlight)
    echo_status("diagram", f"K[{diagram.title}], n = {n}")
    if output_format == "vector":
        click.echo(render_svg(diagram), nl=False)
    else:
        click.echo(render_ascii(diagram), nl=False)


@main.command(name="bounds")
@click.option(
    "--n", "orders", type=click.IntRange(min=1), multiple=True, required=True
)
def cmd_bounds(orders: Tuple[int, ...]) -> None:
    """Print chain length and distance-to-polyhedrality bounds."""
    rows = [compute_bounds(n, side).to_dict() for n in orders for side in Side]
    click.echo(bounds_table(rows), nl=False)


@main.command(name="report")
@order_option
@click.option(
    "--cp-cone",
    type=click.Choice(["n", "ddp", "sddp", "dnn", "cp4"]),
    default=ConeKind.DNN.value,
    show_default=True,
)
@click.option(
    "--cop-cone",
    type=click.Choice(["n", "spn4", "cop", "sddp-dual"]),
    default=ConeKind.DUAL_SDD_PLUS.value,
    show_default=True,
)
@samples_option
@seed_option
@rays_option
def cmd_report(
    n: int, cp_cone: str, cop_cone: str, samples: int, seed: int, rays: int
) -> None:
    """Build, classify and verify both chains and print the full report."""
    click.echo("=== building chains", err=True)
    data = full_report(n, _cone(cp_cone, n), _cone(cop_cone, n), samples, seed, rays)
    for chain in data["chains"]:
        echo_status(
            f"{chain['side']} {chain['ordering']}",
            f"length {chain['length']}, l_poly {chain['l_poly']}, {len(chain['flags'])} flags",
        )
    click.echo(dump_yaml(data), nl=False)
    _finish(data["ok"])
