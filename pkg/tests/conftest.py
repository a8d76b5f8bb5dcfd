import os
import subprocess
import sys
from fractions import Fraction
from pathlib import Path
from typing import List
from typing import NamedTuple
from typing import Union

import pytest
from hypothesis import strategies as st
from ruamel.yaml import YAML

from facelattice.core import SymMatrix
from facelattice.core import triangular

TESTS_PATH = Path(__file__).parent
SRC_PATH = (TESTS_PATH.parent / "src").resolve()
FIXTURES_PATH = TESTS_PATH / "fixtures"


class CliResult(NamedTuple):
    returncode: int
    stdout: str
    stderr: str

    def yaml(self):
        return YAML(typ="safe").load(self.stdout)


def _run_facelattice(*options: Union[str, Path]) -> CliResult:
    env = dict(os.environ)
    env["PYTHONPATH"] = os.pathsep.join(
        p for p in [str(SRC_PATH), env.get("PYTHONPATH", "")] if p
    )
    env.pop("FACELATTICE_SEED", None)
    env.pop("FACELATTICE_DEBUG", None)
    process = subprocess.run(
        [sys.executable, "-m", "facelattice", *[str(o) for o in options]],
        encoding="utf-8",
        cwd=TESTS_PATH,
        env=env,
        stderr=subprocess.PIPE,
        stdout=subprocess.PIPE,
    )

    print(f"--- stderr start ---\n{process.stderr}\n--- stderr end ---")

    return CliResult(process.returncode, process.stdout, process.stderr)


@pytest.fixture
def run_facelattice():
    yield _run_facelattice


@pytest.fixture
def fixtures_path():
    yield FIXTURES_PATH.resolve()


def horn_matrix() -> SymMatrix:
    rows: List[List[int]] = [
        [1, -1, 1, 1, -1],
        [-1, 1, -1, 1, 1],
        [1, -1, 1, -1, 1],
        [1, 1, -1, 1, -1],
        [-1, 1, 1, -1, 1],
    ]
    return SymMatrix.from_rows(rows)


@pytest.fixture
def horn():
    yield horn_matrix()


rationals = st.fractions(min_value=-8, max_value=8, max_denominator=6)
nonneg_rationals = st.fractions(min_value=0, max_value=8, max_denominator=6)


@st.composite
def sym_matrices(draw, min_order=1, max_order=4, elements=rationals):
    n = draw(st.integers(min_value=min_order, max_value=max_order))
    entries = draw(
        st.lists(elements, min_size=triangular(n), max_size=triangular(n))
    )
    return SymMatrix(n, entries)


@st.composite
def gram_matrices(draw, min_order=1, max_order=4, elements=rationals):
    """G G^T for a random rational G, always PSD."""
    n = draw(st.integers(min_value=min_order, max_value=max_order))
    rank = draw(st.integers(min_value=1, max_value=n))
    factor = [
        draw(st.lists(elements, min_size=rank, max_size=rank)) for _ in range(n)
    ]
    return SymMatrix.from_function(
        n,
        lambda i, j: sum(
            (a * b for a, b in zip(factor[i - 1], factor[j - 1])), Fraction(0)
        ),
    )
