"""Deterministic CSV writing: fixed %.17g float formatting and "\n" line
endings so identical runs produce byte-identical files."""

from __future__ import annotations

import os
from typing import Iterable, Sequence


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    try:
        import numpy as np

        if isinstance(value, np.floating):
            return format(float(value), ".17g")
        if isinstance(value, np.integer):
            return str(int(value))
    except ImportError:  # pragma: no cover
        pass
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable, comment: str | None = None) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
