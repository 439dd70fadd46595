"""Edge-list file ingestion.

Format: UTF-8 text, LF or CRLF line endings, one edge per data line as
two tokens separated by whitespace or a comma; lines starting with the
comment prefix (default '#') and blank lines are skipped.

Indexing modes: 'zero' and 'one' require integer labels (1-based input is
shifted down); 'auto' accepts arbitrary labels and densely remaps them in
first-appearance order.  After parsing, vertex ids are dense in [0, n).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InputError
from .graph import BipartiteNet, from_directed_edges, from_undirected_edges

_SPLIT = re.compile(r"[,\s]+")


@dataclass
class EdgeListFile:
    path: str
    directed: bool = True
    indexing: str = "auto"  # zero | one | auto
    comment_prefix: str = "#"

    def __post_init__(self):
        if self.indexing not in ("zero", "one", "auto"):
            raise InputError(
                f"indexing must be zero|one|auto, got {self.indexing!r}")


@dataclass
class ParseReport:
    n: int
    input_edges: int
    bipartite_edges: int
    remapped: bool
    labels: Optional[list] = None  # auto mode: labels[i] is vertex i's label


def parse_edge_list(file: EdgeListFile):
    """Parse an edge list into its bipartite view.

    Returns (BipartiteNet, ParseReport).  Duplicate lines are kept as
    parallel edges.  Malformed lines raise InputError with the 1-based
    line number.
    """
    try:
        text = Path(file.path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read edge list {file.path}: {exc}") from None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(file.comment_prefix):
            continue
        tokens = _SPLIT.split(line)
        if len(tokens) != 2:
            raise InputError(
                f"{file.path}:{lineno}: expected two tokens, got {len(tokens)}: {raw!r}")
        pairs.append((tokens[0], tokens[1], lineno))

    labels = None
    if file.indexing == "auto":
        index = {}
        edges = np.empty((len(pairs), 2), dtype=np.int64)
        for i, (a, b, _ln) in enumerate(pairs):
            edges[i, 0] = index.setdefault(a, len(index))
            edges[i, 1] = index.setdefault(b, len(index))
        n = max(len(index), 1)
        labels = list(index)
        remapped = True
    else:
        shift = 0 if file.indexing == "zero" else 1
        edges = np.empty((len(pairs), 2), dtype=np.int64)
        for i, (a, b, ln) in enumerate(pairs):
            try:
                u, v = int(a), int(b)
            except ValueError:
                raise InputError(
                    f"{file.path}:{ln}: non-integer vertex id {a!r}/{b!r} "
                    f"(use indexing='auto' for arbitrary labels)") from None
            u -= shift
            v -= shift
            if u < 0 or v < 0:
                raise InputError(
                    f"{file.path}:{ln}: vertex id below {shift} "
                    f"for {file.indexing}-based indexing")
            edges[i, 0] = u
            edges[i, 1] = v
        n = int(edges.max()) + 1 if len(pairs) else 1
        remapped = False

    build = from_directed_edges if file.directed else from_undirected_edges
    net = build(n, edges)
    report = ParseReport(n=n, input_edges=len(pairs),
                         bipartite_edges=net.edge_count,
                         remapped=remapped, labels=labels)
    return net, report


def write_edge_list(net: BipartiteNet, path: str, header: str = "") -> None:
    """Serialize the bipartite view as a directed edge list (one 'l r'
    line per edge); round-trips through parse_edge_list(directed=True)."""
    el, er = net.live_edges()
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"# n={net.n} directed bipartite view\n")
        for a, b in zip(el.tolist(), er.tolist()):
            fh.write(f"{a} {b}\n")
