"""Edge-list and CSV input/output."""

from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .graph import Graph, build_graph


class EdgeListError(ValidationError):
    """Malformed edge-list line; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def parse_edge_list(text: str, n: int | None = None) -> tuple[Graph, list[str] | None]:
    """Parse ``u v [w]`` lines; ``#`` starts a comment.

    A ``# n <count>`` header fixes the vertex count so isolated vertices
    survive a round trip.  If any endpoint is not an integer, all ids are
    treated as strings and mapped to ``0..n-1`` in order of first
    appearance; the mapping is returned as the second element.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "n" and _is_int(parts[1]) and n is None:
                n = int(parts[1])
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) not in (2, 3):
            raise EdgeListError(lineno, f"expected 'u v [w]', got {raw.strip()!r}")
        w = 1.0
        if len(toks) == 3:
            try:
                w = float(toks[2])
            except ValueError:
                raise EdgeListError(lineno, f"weight {toks[2]!r} is not a number") from None
        rows.append((lineno, toks[0], toks[1], w))
    numeric = all(_is_int(a) and _is_int(b) for _, a, b, _ in rows)
    names = None
    if numeric:
        ids = [(ln, int(a), int(b), w) for ln, a, b, w in rows]
        top = max((max(a, b) for _, a, b, _ in ids), default=-1) + 1
        n = top if n is None else n
    else:
        index: dict[str, int] = {}
        for _, a, b, _ in rows:
            for tok in (a, b):
                index.setdefault(tok, len(index))
        names = list(index)
        ids = [(ln, index[a], index[b], w) for ln, a, b, w in rows]
        n = len(names) if n is None else n
    if n < 1:
        raise ValidationError("edge list defines no vertices")
    seen: dict[tuple[int, int], int] = {}
    for ln, a, b, w in ids:
        if not (0 <= a < n and 0 <= b < n):
            raise EdgeListError(ln, f"endpoint out of range for n={n}")
        if a == b:
            raise EdgeListError(ln, f"self-loop at vertex {a}")
        if not w > 0 or not np.isfinite(w):
            raise EdgeListError(ln, f"weight {w} is not positive")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise EdgeListError(ln, f"duplicate edge {key} (first on line {seen[key]})")
        seen[key] = ln
    return build_graph(n, [(a, b, w) for _, a, b, w in ids]), names


def read_edge_list(path: str | Path, n: int | None = None) -> tuple[Graph, list[str] | None]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return parse_edge_list(text, n)


def format_edge_list(g: Graph, names: list[str] | None = None) -> str:
    """Edges with ``u < v`` in sorted order, preceded by a ``# n`` header."""
    out = _io.StringIO()
    out.write(f"# n {g.n}\n")
    for a, b, w in zip(g.u.tolist(), g.v.tolist(), g.w.tolist()):
        ua = names[a] if names else a
        ub = names[b] if names else b
        out.write(f"{ua} {ub} {w!r}\n")
    return out.getvalue()


def write_edge_list(g: Graph, path: str | Path, names: list[str] | None = None) -> None:
    Path(path).write_text(format_edge_list(g, names))


def write_csv(path: str | Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])


def _read_rows(path: str | Path) -> list[list[str]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise ValidationError(f"{path} is empty")
    return rows[1:]


def read_vector_csv(path: str | Path, n: int, names: list[str] | None = None) -> np.ndarray:
    """``vertex,value`` rows after a header; missing vertices are zero."""
    lookup = {s: i for i, s in enumerate(names)} if names else None
    x = np.zeros(n)
    for lineno, row in enumerate(_read_rows(path), start=2):
        if not row:
            continue
        if len(row) < 2:
            raise ValidationError(f"{path} line {lineno}: expected vertex,value")
        v = _vertex(row[0], n, lookup, path, lineno)
        try:
            x[v] = float(row[1])
        except ValueError:
            raise ValidationError(f"{path} line {lineno}: bad value {row[1]!r}") from None
    return x


def read_labels_csv(path: str | Path, n: int, names: list[str] | None = None) -> dict[int, int]:
    """``vertex,class`` rows after a header."""
    lookup = {s: i for i, s in enumerate(names)} if names else None
    labels = {}
    for lineno, row in enumerate(_read_rows(path), start=2):
        if not row:
            continue
        if len(row) < 2 or not _is_int(row[1]):
            raise ValidationError(f"{path} line {lineno}: expected vertex,class")
        labels[_vertex(row[0], n, lookup, path, lineno)] = int(row[1])
    return labels


def _vertex(tok, n, lookup, path, lineno) -> int:
    tok = tok.strip()
    if lookup is not None and tok in lookup:
        return lookup[tok]
    if not _is_int(tok) or not 0 <= int(tok) < n:
        raise ValidationError(f"{path} line {lineno}: unknown vertex {tok!r}")
    return int(tok)
