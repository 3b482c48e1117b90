"""Sparse binary matrices, degree distributions and Tanner-graph utilities.

Matrices are stored as dual adjacency lists (per-column row indices and
per-row column indices).  Everything else in the package builds on
:class:`BitMatrix`.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp


class AlistError(ValueError):
    """Malformed or inconsistent alist text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class BitMatrix:
    """Immutable sparse GF(2) matrix with row and column adjacency views."""

    num_rows: int
    num_cols: int
    col_support: tuple[tuple[int, ...], ...]
    row_support: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        if len(self.col_support) != self.num_cols:
            raise ValueError(
                f"expected {self.num_cols} column supports, got {len(self.col_support)}"
            )
        for c, rows in enumerate(self.col_support):
            for a, b in zip(rows, rows[1:]):
                if a >= b:
                    raise ValueError(f"column {c} support is not strictly increasing")
            if rows and (rows[0] < 0 or rows[-1] >= self.num_rows):
                raise ValueError(f"column {c} has a row index out of range")
        derived = _transpose_supports(self.col_support, self.num_rows)
        if self.row_support and self.row_support != derived:
            raise ValueError("row and column supports disagree")
        object.__setattr__(self, "row_support", derived)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_columns(cls, num_rows: int, columns: Iterable[Iterable[int]]) -> BitMatrix:
        cols = tuple(tuple(sorted(set(int(r) for r in c))) for c in columns)
        return cls(num_rows, len(cols), cols)

    @classmethod
    def from_dense(cls, dense) -> BitMatrix:
        a = np.asarray(dense) % 2
        if a.ndim != 2:
            raise ValueError("dense matrix must be 2-D")
        cols = tuple(tuple(int(r) for r in np.flatnonzero(a[:, c])) for c in range(a.shape[1]))
        return cls(a.shape[0], a.shape[1], cols)

    @classmethod
    def zeros(cls, num_rows: int, num_cols: int) -> BitMatrix:
        return cls(num_rows, num_cols, ((),) * num_cols)

    # -- basic views --------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.num_rows, self.num_cols)

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.col_support)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for c, rows in enumerate(self.col_support):
            out[list(rows), c] = 1
        return out

    @cached_property
    def csr(self) -> sp.csr_matrix:
        rows, cols = self.edges()
        data = np.ones(len(rows), dtype=np.int32)
        return sp.csr_matrix((data, (rows, cols)), shape=self.shape)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Row and column index arrays of all nonzeros, sorted by row."""
        rows = np.fromiter(
            (r for r, cs in enumerate(self.row_support) for _ in cs), dtype=np.int64, count=self.nnz
        )
        cols = np.fromiter(
            (c for cs in self.row_support for c in cs), dtype=np.int64, count=self.nnz
        )
        return rows, cols

    def column_degrees(self) -> np.ndarray:
        return np.array([len(c) for c in self.col_support], dtype=np.int64)

    def row_degrees(self) -> np.ndarray:
        return np.array([len(r) for r in self.row_support], dtype=np.int64)

    def select_columns(self, cols: Sequence[int]) -> BitMatrix:
        return BitMatrix(self.num_rows, len(cols), tuple(self.col_support[c] for c in cols))

    def hstack(self, other: BitMatrix) -> BitMatrix:
        if other.num_rows != self.num_rows:
            raise ValueError("row counts differ")
        return BitMatrix(
            self.num_rows, self.num_cols + other.num_cols, self.col_support + other.col_support
        )

    def with_entry(self, row: int, col: int) -> BitMatrix:
        """Copy of the matrix with entry (row, col) set to one."""
        cols = list(self.col_support)
        cols[col] = tuple(sorted(set(cols[col]) | {row}))
        return BitMatrix(self.num_rows, self.num_cols, tuple(cols))

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and self.col_support == other.col_support

    def __hash__(self):
        return hash((self.shape, self.col_support))

    def __repr__(self):
        return f"BitMatrix({self.num_rows}x{self.num_cols}, nnz={self.nnz})"


def _transpose_supports(col_support, num_rows):
    rows: list[list[int]] = [[] for _ in range(num_rows)]
    for c, rs in enumerate(col_support):
        for r in rs:
            rows[r].append(c)
    return tuple(tuple(r) for r in rows)


# -- alist ------------------------------------------------------------


def from_alist(text: str) -> BitMatrix:
    """Parse an alist description (1-indexed, zero padded) into a BitMatrix."""
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(n, toks) for n, toks in lines if toks]
    pos = 0

    def next_ints(what: str, count: int | None = None) -> tuple[int, list[int]]:
        nonlocal pos
        if pos >= len(lines):
            raise AlistError(f"unexpected end of input while reading {what}")
        lineno, toks = lines[pos]
        pos += 1
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise AlistError(f"non-integer token in {what}", lineno) from None
        if count is not None and len(vals) != count:
            raise AlistError(f"expected {count} values in {what}, got {len(vals)}", lineno)
        return lineno, vals

    hline, (n, m) = next_ints("header", 2)
    if n < 0 or m < 0:
        raise AlistError("negative dimensions", hline)
    _, (max_col, max_row) = next_ints("max degree line", 2)
    col_line, col_deg = next_ints("column degree list", n) if n else (hline, [])
    row_line, row_deg = next_ints("row degree list", m) if m else (hline, [])
    for d in col_deg:
        if d < 0 or d > max_col or d > m:
            raise AlistError(f"column degree {d} out of range", col_line)
    for d in row_deg:
        if d < 0 or d > max_row or d > n:
            raise AlistError(f"row degree {d} out of range", row_line)

    def read_supports(count, degrees, limit, maxdeg, what):
        out = []
        for i in range(count):
            if maxdeg == 0:
                out.append(())
                continue
            lineno, vals = next_ints(f"{what} {i + 1}")
            support = [v for v in vals if v != 0]
            if any(v < 1 or v > limit for v in support):
                raise AlistError(f"index out of range in {what} {i + 1}", lineno)
            if len(support) != degrees[i]:
                raise AlistError(
                    f"{what} {i + 1} lists {len(support)} entries, degree says {degrees[i]}",
                    lineno,
                )
            if len(set(support)) != len(support):
                raise AlistError(f"duplicate index in {what} {i + 1}", lineno)
            out.append(tuple(sorted(v - 1 for v in support)))
        return out

    cols = read_supports(n, col_deg, m, max_col, "column")
    rows = read_supports(m, row_deg, n, max_row, "row")
    if pos != len(lines):
        raise AlistError("trailing content after row supports", lines[pos][0])
    try:
        return BitMatrix(m, n, tuple(cols), tuple(rows))
    except ValueError as exc:
        raise AlistError(f"inconsistent alist: {exc}") from None


def to_alist(m: BitMatrix) -> str:
    cdeg = m.column_degrees()
    rdeg = m.row_degrees()
    max_c = int(cdeg.max()) if m.num_cols else 0
    max_r = int(rdeg.max()) if m.num_rows else 0

    def pad(support, width):
        vals = [s + 1 for s in support] + [0] * (width - len(support))
        return " ".join(str(v) for v in vals)

    out = [f"{m.num_cols} {m.num_rows}", f"{max_c} {max_r}"]
    out.append(" ".join(str(int(d)) for d in cdeg))
    out.append(" ".join(str(int(d)) for d in rdeg))
    out += [pad(c, max_c) for c in m.col_support]
    out += [pad(r, max_r) for r in m.row_support]
    return "\n".join(out) + "\n"


# -- arithmetic -------------------------------------------------------


def mod2_syndrome(m: BitMatrix, v) -> np.ndarray:
    """``m @ v`` over GF(2).  ``v`` may be a vector or a (batch, num_cols) array."""
    v = np.asarray(v)
    if v.shape[-1] != m.num_cols:
        raise ValueError(f"vector length {v.shape[-1]} does not match {m.num_cols} columns")
    if v.ndim == 1:
        return (m.csr @ v.astype(np.int64) % 2).astype(np.uint8)
    return ((m.csr @ v.T.astype(np.int64)) % 2).T.astype(np.uint8)


def degree_histograms(m: BitMatrix) -> tuple[dict[int, int], dict[int, int]]:
    """Counts of columns and rows per exact degree."""
    cols = Counter(int(d) for d in m.column_degrees())
    rows = Counter(int(d) for d in m.row_degrees())
    return dict(sorted(cols.items())), dict(sorted(rows.items()))


# -- cycles -----------------------------------------------------------


class CycleWitness(NamedTuple):
    """A closed walk ``columns[0] - rows[0] - columns[1] - ... - rows[-1] - columns[0]``."""

    columns: tuple[int, ...]
    rows: tuple[int, ...]


class CycleCheck(NamedTuple):
    cycle_free: bool
    witness: CycleWitness | None = None


def cycle_free_within_columns(m: BitMatrix, cols: Iterable[int]) -> CycleCheck:
    """Check whether the Tanner subgraph on ``cols`` (and all rows) is a forest.

    Leaves are peeled off repeatedly, on both sides of the bipartite graph;
    a nonempty residual (the 2-core) holds a cycle, which is returned as a
    witness.
    """
    colset = sorted(set(cols))
    # nodes: ("c", j) and ("r", i); adjacency restricted to colset
    adj: dict[tuple[str, int], set[tuple[str, int]]] = {}
    for c in colset:
        adj[("c", c)] = {("r", r) for r in m.col_support[c]}
        for r in m.col_support[c]:
            adj.setdefault(("r", r), set()).add(("c", c))

    degree = {node: len(nb) for node, nb in adj.items()}
    queue = deque(node for node, d in degree.items() if d <= 1)
    removed = set()
    while queue:
        node = queue.popleft()
        if node in removed:
            continue
        removed.add(node)
        for nb in adj[node]:
            if nb not in removed:
                degree[nb] -= 1
                if degree[nb] <= 1:
                    queue.append(nb)
    core = [node for node in adj if node not in removed]
    if not core:
        return CycleCheck(True)

    start = next(node for node in core if node[0] == "c")
    path = [start]
    index = {start: 0}
    prev = None
    cur = start
    while True:
        nxt = min(nb for nb in adj[cur] if nb not in removed and nb != prev)
        if nxt in index:
            loop = path[index[nxt]:]
            break
        index[nxt] = len(path)
        path.append(nxt)
        prev, cur = cur, nxt
    # rotate so the walk starts at a column
    if loop[0][0] != "c":
        loop = loop[1:] + loop[:1]
    return CycleCheck(
        False,
        CycleWitness(
            tuple(n[1] for n in loop[0::2]),
            tuple(n[1] for n in loop[1::2]),
        ),
    )


def is_valid_cycle(m: BitMatrix, witness: CycleWitness) -> bool:
    """True if the witness is a simple alternating cycle of length >= 4 in ``m``."""
    cols, rows = witness
    s = len(cols)
    if s < 2 or len(rows) != s or len(set(cols)) != s or len(set(rows)) != s:
        return False
    for i in range(s):
        a, b = cols[i], cols[(i + 1) % s]
        if rows[i] not in m.col_support[a] or rows[i] not in m.col_support[b]:
            return False
    return True


# -- degree distributions ---------------------------------------------


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective variable (lambda) and check (rho) degree distributions."""

    variable_edge_coeffs: Mapping[int, float]
    check_edge_coeffs: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for name, family in (
            ("variable", self.variable_edge_coeffs),
            ("check", self.check_edge_coeffs),
        ):
            if not family:
                if name == "variable":
                    raise ValueError("variable distribution is empty")
                continue
            for deg, frac in family.items():
                if int(deg) != deg or deg < 1:
                    raise ValueError(f"{name} degree {deg} must be a positive integer")
                if not 0.0 <= frac <= 1.0:
                    raise ValueError(f"{name} coefficient for degree {deg} outside [0, 1]")
            total = sum(family.values())
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"{name} coefficients sum to {total!r}, not 1")

    @classmethod
    def normalized(cls, variable: Mapping[int, float], check: Mapping[int, float] | None = None):
        """Build from tabulated coefficients that only sum to 1 up to rounding."""

        def norm(family):
            total = sum(family.values())
            return {int(k): v / total for k, v in family.items() if v > 0}

        return cls(norm(variable), norm(check) if check else {})

    def variable_node_fractions(self) -> dict[int, float]:
        inv = {d: f / d for d, f in self.variable_edge_coeffs.items()}
        total = sum(inv.values())
        return {d: v / total for d, v in sorted(inv.items())}

    def edges_per_variable_node(self) -> float:
        """Average variable degree, ``1 / sum(lambda_i / i)``."""
        return 1.0 / sum(f / d for d, f in self.variable_edge_coeffs.items())

    @classmethod
    def from_text(cls, text: str) -> DegreeDistribution:
        """Parse ``degree:fraction`` lines under ``[variable]`` and ``[check]`` headers."""
        sections: dict[str, dict[int, float]] = {"variable": {}, "check": {}}
        current = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1].strip().lower()
                if current not in sections:
                    raise ValueError(f"line {lineno}: unknown section {line}")
                continue
            if current is None:
                raise ValueError(f"line {lineno}: entry before any section header")
            try:
                deg, frac = line.split(":")
                sections[current][int(deg)] = float(frac)
            except ValueError:
                raise ValueError(f"line {lineno}: expected 'degree:fraction'") from None
        return cls.normalized(sections["variable"], sections["check"])

    def to_text(self) -> str:
        out = ["[variable]"]
        out += [f"{d}:{f!r}" for d, f in sorted(self.variable_edge_coeffs.items())]
        out.append("[check]")
        out += [f"{d}:{f!r}" for d, f in sorted(self.check_edge_coeffs.items())]
        return "\n".join(out) + "\n"


def edge_fractions(degrees: Iterable[int]) -> dict[int, float]:
    """Edge-perspective fractions realized by a list of node degrees."""
    counts = Counter(int(d) for d in degrees if d > 0)
    total = sum(d * n for d, n in counts.items())
    return {d: d * n / total for d, n in sorted(counts.items())}
