"""Text formats for profiles and graphs.

Profile::

    # optional comment lines start with '#'
    n t
    <n lines of exactly t characters from {0,1}>

Graph::

    n m
    <m lines "u v", 0-based vertex ids>

Lines end with LF; trailing whitespace is rejected.
"""

from __future__ import annotations

from anscombe.core import Profile, bits_from_string
from anscombe.errors import FormatError

__all__ = ["parse_profile", "format_profile", "read_profile", "write_profile", "parse_graph", "format_graph", "read_graph"]


def _lines(text: str):
    if "\r" in text:
        line_no = text[: text.index("\r")].count("\n") + 1
        col = text.index("\r") - (text.rfind("\n", 0, text.index("\r")) + 1) + 1
        raise FormatError("carriage return found; lines must end with LF", line_no, col)
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for i, line in enumerate(lines, 1):
        if line != line.rstrip():
            raise FormatError("trailing whitespace", i, len(line.rstrip()) + 1)
        yield i, line


def _content(text: str):
    for i, line in _lines(text):
        if line.startswith("#"):
            continue
        yield i, line


def _header(line_no: int, line: str, what: str) -> tuple[int, int]:
    parts = line.split(" ")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise FormatError(f"expected header '<{what[0]}> <{what[1]}>' as two decimals separated by one space", line_no, 1)
    return int(parts[0]), int(parts[1])


def parse_profile(text: str) -> Profile:
    it = _content(text)
    try:
        line_no, line = next(it)
    except StopIteration:
        raise FormatError("empty profile file") from None
    n, t = _header(line_no, line, ("n", "t"))
    if n < 1 or t < 1:
        raise FormatError("n and t must both be at least 1", line_no, 1)
    rows = []
    last = line_no
    for line_no, line in it:
        last = line_no
        if len(rows) == n:
            raise FormatError(f"more than n={n} ballot lines", line_no, 1)
        if len(line) != t:
            raise FormatError(f"ballot has {len(line)} entries, expected t={t}", line_no, min(len(line), t) + 1)
        for j, ch in enumerate(line):
            if ch not in "01":
                raise FormatError(f"unexpected character {ch!r}", line_no, j + 1)
        rows.append(bits_from_string(line))
    if len(rows) != n:
        raise FormatError(f"expected {n} ballot lines, found {len(rows)}", last + 1, 0)
    return Profile(rows, t)


def format_profile(profile: Profile) -> str:
    out = [f"{profile.n} {profile.t}"]
    out.extend(profile.to_strings())
    return "\n".join(out) + "\n"


def read_profile(path) -> Profile:
    with open(path, encoding="ascii", newline="") as fh:
        return parse_profile(fh.read())


def write_profile(profile: Profile, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_profile(profile))


def parse_graph(text: str):
    """Return a :class:`anscombe.gadgets.Graph`."""
    from anscombe.gadgets import Graph

    it = _content(text)
    try:
        line_no, line = next(it)
    except StopIteration:
        raise FormatError("empty graph file") from None
    n, m = _header(line_no, line, ("n", "m"))
    edges = []
    last = line_no
    for line_no, line in it:
        last = line_no
        if len(edges) == m:
            raise FormatError(f"more than m={m} edge lines", line_no, 1)
        u, v = _header(line_no, line, ("u", "v"))
        edges.append((u, v))
    if len(edges) != m:
        raise FormatError(f"expected {m} edge lines, found {len(edges)}", last + 1, 0)
    try:
        return Graph(n, edges)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def format_graph(graph) -> str:
    out = [f"{graph.vertex_count} {len(graph.edges)}"]
    out.extend(f"{u} {v}" for u, v in graph.edges)
    return "\n".join(out) + "\n"


def read_graph(path):
    with open(path, encoding="ascii", newline="") as fh:
        return parse_graph(fh.read())
