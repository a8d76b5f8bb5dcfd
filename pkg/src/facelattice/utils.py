import os
from typing import Tuple

import click

from facelattice import constants


class FaceLatticeError(Exception):
    """
    Indicates that a command cannot proceed, but prevents a stack trace
    """

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


class DimensionMismatch(FaceLatticeError):
    pass


class IndexOutOfRange(FaceLatticeError):
    pass


class UnsupportedOrder(FaceLatticeError):
    pass


class DeskScaleLimit(FaceLatticeError):
    pass


class NotAMember(FaceLatticeError):
    pass


class SandwichViolation(FaceLatticeError):
    pass


class UnsupportedFace(FaceLatticeError):
    pass


class ParseError(FaceLatticeError):
    pass


class CertificateError(FaceLatticeError):
    """
    An internally produced certificate failed independent re-verification.

    This always points at a bug in an oracle; callers must not catch it.
    """


class WitnessFailure(FaceLatticeError):
    def __init__(self, clause: str, message: str) -> None:
        super().__init__(f"witness clause ({clause}) failed: {message}")
        self.clause = clause


def debug_echo(text: str) -> None:
    """Print debug messages with context-specific debug formatting."""
    if not os.getenv(constants.DEBUG_ENVVAR):
        return
    prefix = "=== [DEBUG] "
    text = "\n".join(prefix + line for line in text.splitlines())
    click.echo(text, err=True)


def get_aligned_command(title: str, subtext: str) -> str:
    return f"| {title.ljust(17)} - {subtext}"


def require_order(n: int, minimum: int = 1) -> int:
    if n < minimum:
        raise IndexOutOfRange(f"order must be at least {minimum}, got {n}")
    return n


def pair_label(pair: Tuple[int, int]) -> str:
    return f"({pair[0]},{pair[1]})"
