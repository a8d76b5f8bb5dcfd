import sys

import click

from facelattice import constants
from facelattice.main import main
from facelattice.utils import FaceLatticeError


def error_guard() -> None:
    try:
        main()
    except FaceLatticeError as ex:
        click.secho(ex.message, fg="red", err=True)
        sys.exit(constants.EXIT_USAGE)


if __name__ == "__main__":
    error_guard()
