import csv
import os
from pathlib import Path

import pytest

from markovj import build_tree, compute_values, find_fraction, j_coefficients

DATA = Path(__file__).parent / "data"

_JOBS = min(4, os.cpu_count() or 1)


@pytest.fixture(scope="session")
def series():
    return j_coefficients(40)


@pytest.fixture(scope="session")
def reference_rows():
    """The 80 published (p/q, J/q, j) rows."""
    with open(DATA / "reference_values.csv") as fh:
        rows = []
        for rec in csv.DictReader(fh):
            rows.append({
                "p": int(rec["p"]),
                "q": int(rec["q"]),
                "Jq": complex(float(rec["Jq_re"]), float(rec["Jq_im"])),
                "j": complex(float(rec["j_re"]), float(rec["j_im"])),
            })
    assert len(rows) == 80
    return rows


@pytest.fixture(scope="session")
def depth9_values(series):
    """Cycle values for every node with level <= 9, keyed by path."""
    return compute_values(build_tree(9), tol=1e-10, series=series, jobs=_JOBS)


@pytest.fixture(scope="session")
def reference_values(series, reference_rows):
    """Computed values at the 80 published fractions, keyed by (p, q)."""
    nodes = [find_fraction(r["p"], r["q"]) for r in reference_rows]
    values = compute_values(nodes, tol=1e-10, series=series, jobs=_JOBS)
    return {(n.farey.p, n.farey.q): values[n.path] for n in nodes}
