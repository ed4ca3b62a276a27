"""graph6 text codec (short form, n <= 62).

Format: one byte ``63 + n`` followed by the upper triangle of the adjacency
matrix in column order (x(0,1), x(0,2), x(1,2), x(0,3), ...), packed six bits
per byte, most significant bit first, each group offset by 63. Padding bits in
the final byte must be zero.
"""

from __future__ import annotations

from pathlib import Path
from typing import IO, Iterable, Iterator

from .graph import MAX_VERTICES, Graph

GRAPH6_HEADER = ">>graph6<<"


class Graph6Error(ValueError):
    code = "graph6"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def encode(g: Graph) -> str:
    if g.n > MAX_VERTICES:
        raise Graph6Error(f"graph on {g.n} vertices needs the long form, which is not supported", 0)
    out = [chr(63 + g.n)]
    group = 0
    width = 0
    for j in range(1, g.n):
        row = g.rows[j]
        for i in range(j):
            group = (group << 1) | (row >> i & 1)
            width += 1
            if width == 6:
                out.append(chr(63 + group))
                group = 0
                width = 0
    if width:
        out.append(chr(63 + (group << (6 - width))))
    return "".join(out)


def decode(text: str) -> Graph:
    line = text.rstrip("\r\n")
    base = 0
    if line.startswith(GRAPH6_HEADER):
        base = len(GRAPH6_HEADER)
        line = line[base:]
    if not line:
        raise Graph6Error("empty graph6 line", base)
    for pos, ch in enumerate(line):
        if not 63 <= ord(ch) <= 126:
            raise Graph6Error(f"character {ch!r} outside the graph6 range 63..126", base + pos)
    n = ord(line[0]) - 63
    if n > MAX_VERTICES:
        raise Graph6Error("long-form length header (n > 62) is not supported", base)
    pairs = n * (n - 1) // 2
    expected = 1 + (pairs + 5) // 6
    if len(line) != expected:
        offset = base + min(len(line), expected)
        raise Graph6Error(f"length header says n={n}, which needs {expected} bytes, got {len(line)}", offset)

    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            byte = ord(line[1 + k // 6]) - 63
            if byte >> (5 - k % 6) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    pad = (6 - pairs % 6) % 6
    if pad and (ord(line[-1]) - 63) & ((1 << pad) - 1):
        raise Graph6Error("padding bits after the adjacency data are set", base + len(line) - 1)
    return Graph(n, tuple(rows))


def iter_graph6(lines: Iterable[str]) -> Iterator[Graph]:
    for raw in lines:
        line = raw.strip()
        if line:
            yield decode(line)


def read_graph6(source: Path | str | IO[str]) -> list[Graph]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="ascii") as handle:
            return list(iter_graph6(handle))
    return list(iter_graph6(source))


def write_graph6(graphs: Iterable[Graph], target: IO[str]) -> int:
    count = 0
    for g in graphs:
        target.write(encode(g) + "\n")
        count += 1
    return count
