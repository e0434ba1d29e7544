"""Plain-text graph files.

Header ``n m [d] [weighted]`` followed by ``m`` lines ``u v [weight]`` with
0-based ids.  Blank lines and ``#`` comments are ignored.  The writer emits
edges in rank order so output is byte-stable.
"""

from __future__ import annotations

from pathlib import Path

from .errors import UsageError
from .graph import QueryGraph, format_fixed, to_fixed


def parse_graph(text: str) -> QueryGraph:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line.split()))
    if not lines:
        raise UsageError("empty graph file")
    lineno, header = lines[0]
    try:
        n, m = int(header[0]), int(header[1])
    except (IndexError, ValueError):
        raise UsageError(f"line {lineno}: header must start with 'n m'") from None
    d = None
    weighted = False
    for tok in header[2:]:
        if tok == "weighted":
            weighted = True
        elif tok.isdigit() and d is None:
            d = int(tok)
        else:
            raise UsageError(f"line {lineno}: unexpected header token {tok!r}")
    body = lines[1:]
    if len(body) != m:
        raise UsageError(f"header declares {m} edges, file has {len(body)}")
    edges = []
    for lineno, toks in body:
        want = 3 if weighted else 2
        if len(toks) != want:
            raise UsageError(f"line {lineno}: expected {want} fields, got {len(toks)}")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise UsageError(f"line {lineno}: vertex ids must be integers") from None
        if weighted:
            edges.append((u, v, to_fixed(toks[2])))
        else:
            edges.append((u, v))
    try:
        return QueryGraph(n, edges, degree_bound=d, weighted=weighted)
    except UsageError as exc:
        raise UsageError(f"invalid graph: {exc}") from None


def format_graph(g: QueryGraph) -> str:
    header = [str(g.n), str(g.m)]
    if g.degree_bound is not None:
        header.append(str(g.degree_bound))
    if g.weighted:
        header.append("weighted")
    out = [" ".join(header)]
    for u, v in g.edges():
        if g.weighted:
            out.append(f"{u} {v} {format_fixed(g.weight(u, v))}")
        else:
            out.append(f"{u} {v}")
    return "\n".join(out) + "\n"


def read_graph(path) -> QueryGraph:
    return parse_graph(Path(path).read_text())


def write_graph(g: QueryGraph, path) -> None:
    Path(path).write_text(format_graph(g))
