"""Progressive edge growth for the systematic part H1 and the L columns of H2."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import gf2
from .encoder import trailing_triangular_offset, triangular_sweep
from .matrix import BitMatrix, DegreeDistribution, edge_fractions

MIN_FREE_DEGREE = 3


class InfeasibleConstruction(ValueError):
    def __init__(self, message: str, column: int | None = None):
        super().__init__(message)
        self.column = column


@dataclass(frozen=True)
class ConstructionTarget:
    """What the edge builder must realize.

    ``column_degree_assignment`` lists the K systematic column degrees
    followed by the degrees of the ``l`` L columns.  With
    ``match_check_degrees`` each row gets a target degree drawn from the
    check distribution and check selection prefers the largest remaining
    deficit; otherwise only the current row degree is used.
    """

    distribution: DegreeDistribution | None
    column_degree_assignment: tuple[int, ...]
    girth_floor: int = 6
    seed: int = 0
    match_check_degrees: bool = False

    def __post_init__(self):
        low = [d for d in self.column_degree_assignment if d < MIN_FREE_DEGREE]
        if low:
            raise ValueError(f"free column degrees must be >= {MIN_FREE_DEGREE}, got {low[0]}")


def _largest_remainder(weights: dict[int, float], total: int) -> dict[int, int]:
    raw = {d: total * w for d, w in weights.items()}
    counts = {d: math.floor(v + 1e-9) for d, v in raw.items()}
    leftover = total - sum(counts.values())
    # ties go to the larger degree
    order = sorted(raw, key=lambda d: (-(raw[d] - counts[d]), -d))
    for d in order[:leftover]:
        counts[d] += 1
    return counts


def assign_column_degrees(
    dist: DegreeDistribution,
    K: int,
    l: int = 0,  # noqa: E741
    total_edges_budget: int | None = None,
    nv2: int | None = None,
) -> list[int]:
    """Integer degrees for K systematic columns followed by l L columns.

    Degree-one and degree-two mass belongs to H2 and is skipped; the
    remaining node-perspective mass is rounded with the largest-remainder
    method.  The lowest degrees go to the L columns.  With ``nv2`` and
    ``total_edges_budget`` given, a degree-two demand beyond what H2 supplies
    is rejected.
    """
    if K < 1:
        raise ValueError("K must be positive")
    free = {d: f / d for d, f in dist.variable_edge_coeffs.items() if d >= MIN_FREE_DEGREE and f > 0}
    if not free:
        raise InfeasibleConstruction("distribution has no mass on degrees >= 3")
    if nv2 is not None and total_edges_budget is not None:
        demand = dist.variable_edge_coeffs.get(2, 0.0) * total_edges_budget / 2
        if demand > nv2 + 0.5:
            raise InfeasibleConstruction(
                f"distribution needs {demand:.1f} degree-2 columns but H2 provides {nv2}"
            )
    total = sum(free.values())
    counts = _largest_remainder({d: v / total for d, v in free.items()}, K + l)
    degrees = sorted(d for d, n in counts.items() for _ in range(n))
    l_part, sys_part = degrees[:l], degrees[l:]
    return sys_part + l_part


def nv2_from_distribution(dist: DegreeDistribution, N: int, M: int) -> int:
    """Number of degree-two columns implied by the distribution for length N, capped at M - 1."""
    nodes = dist.variable_node_fractions()
    return max(1, min(M - 1, round(N * nodes.get(2, 0.0))))


def _free_columns(h2: BitMatrix) -> list[int]:
    return [c for c, rows in enumerate(h2.col_support) if not rows]


def peg_build(h2: BitMatrix, target: ConstructionTarget) -> BitMatrix:
    """Grow H = [H1 | H2] edge by edge.

    Columns are processed in nondecreasing degree.  For each new edge the
    neighborhood tree of the column is expanded level by level; the edge goes
    to a check outside the tree if one exists, otherwise to a check on the
    deepest level, picking the lowest current check degree and then the
    lowest row index.  If a column cannot be completed without a cycle
    shorter than ``girth_floor``, its first edge is moved to the next check
    in preference order; when every start fails,
    :class:`InfeasibleConstruction` is raised.

    The seed only permutes which systematic positions carry which degree.
    In the low-rate case the empty H2 columns (L) are filled as well, and the
    final L columns are chosen among the lowest-degree new columns so that H2
    is invertible.
    """
    M = h2.num_rows
    l_positions = _free_columns(h2)
    l = len(l_positions)
    assign = list(target.column_degree_assignment)
    K = len(assign) - l
    if K < 0:
        raise ValueError(f"assignment has {len(assign)} degrees but H2 has {l} empty columns")
    if any(d > M for d in assign):
        raise InfeasibleConstruction(f"column degree exceeds the {M} available rows")

    rng = np.random.default_rng(target.seed)
    sys_degrees = [assign[i] for i in rng.permutation(K)] if K else []
    N = K + h2.num_cols

    cols: list[list[int]] = [[] for _ in range(K)] + [list(c) for c in h2.col_support]
    degree_of = {c: sys_degrees[c] for c in range(K)}
    for pos, d in zip(l_positions, assign[K:]):
        degree_of[K + pos] = d

    adj = np.zeros((M, N), dtype=bool)
    adj_t = np.zeros((N, M), dtype=bool)
    row_deg = np.zeros(M, dtype=np.int64)
    for c, rows in enumerate(cols):
        adj[rows, c] = True
        adj_t[c, rows] = True
        row_deg[rows] += 1

    row_target = None
    if target.match_check_degrees:
        if target.distribution is None:
            raise ValueError("match_check_degrees needs a check distribution")
        row_target = row_degree_targets(target.distribution, row_deg)

    def place(c: int, r: int):
        cols[c].append(r)
        adj[r, c] = adj_t[c, r] = True
        row_deg[r] += 1

    for c in sorted(degree_of, key=lambda c: (degree_of[c], c)):
        # the greedy first edge can strand a column on tiny graphs; retry it
        last_error = None
        for first in _ranked(np.arange(M), row_deg, row_target):
            place(c, int(first))
            try:
                for _ in range(degree_of[c] - 1):
                    place(c, _pick_check(adj, adj_t, row_deg, cols[c], target.girth_floor, c, row_target))
                break
            except InfeasibleConstruction as err:
                last_error = err
                for r in cols[c]:
                    adj[r, c] = adj_t[c, r] = False
                    row_deg[r] -= 1
                cols[c].clear()
        else:
            raise last_error

    h = BitMatrix.from_columns(M, cols)
    if l:
        h = _make_h2_invertible(h, K, [K + p for p in l_positions], degree_of)
    return h


def row_degree_targets(dist: DegreeDistribution, base_degrees: np.ndarray) -> np.ndarray:
    """Per-row target degrees from the check distribution.

    Node counts come from the largest-remainder rounding of ``rho_j / j``;
    the largest targets go to the rows that already carry the most edges,
    and no target is below a row's current degree.
    """
    base = np.asarray(base_degrees, dtype=np.int64)
    nodes = {d: f / d for d, f in dist.check_edge_coeffs.items() if f > 0}
    total = sum(nodes.values())
    counts = _largest_remainder({d: v / total for d, v in nodes.items()}, base.size)
    targets = sorted((d for d, n in counts.items() for _ in range(n)), reverse=True)
    order = np.argsort(-base, kind="stable")
    out = np.empty_like(base)
    out[order] = targets
    return np.maximum(out, base)


def _pick_check(adj, adj_t, row_deg, current: list[int], girth_floor: int, col: int, row_target=None) -> int:
    M, N = adj.shape
    unreached = np.iinfo(np.int64).max
    level = np.full(M, unreached, dtype=np.int64)
    level[current] = 0
    seen = np.zeros(N, dtype=bool)
    frontier = np.asarray(current)
    depth = 0
    while frontier.size:
        var_hit = adj[frontier].any(axis=0) & ~seen
        seen |= var_hit
        new = adj_t[var_hit].any(axis=0) & (level == unreached)
        if not new.any():
            break
        depth += 1
        level[new] = depth
        frontier = np.flatnonzero(new)

    if row_target is not None:
        # a check short of its target may sit at any level that keeps the girth
        ok = (level == unreached) | (2 * level + 2 >= girth_floor)
        ok &= row_target > row_deg
        if ok.any():
            idx = np.flatnonzero(ok)
            pick = np.lexsort((idx, row_deg[idx], row_deg[idx] - row_target[idx], -level[idx]))[0]
            return int(idx[pick])

    idx = np.flatnonzero(level == unreached)
    if idx.size == 0:
        if 2 * depth + 2 < girth_floor:
            raise InfeasibleConstruction(
                f"column {col}: every free check closes a cycle of length {2 * depth + 2}", col
            )
        idx = np.flatnonzero(level == depth)
    return _best(idx, row_deg, row_target)


def _ranked(idx: np.ndarray, row_deg: np.ndarray, row_target) -> np.ndarray:
    """Candidate checks in preference order."""
    if row_target is None:
        return idx[np.lexsort((idx, row_deg[idx]))]
    # largest deficit, then lowest degree, then lowest index
    deficit = row_target[idx] - row_deg[idx]
    return idx[np.lexsort((idx, row_deg[idx], -deficit))]


def _best(idx: np.ndarray, row_deg: np.ndarray, row_target) -> int:
    if row_target is None:
        return int(idx[np.argmin(row_deg[idx])])
    return int(_ranked(idx, row_deg, row_target)[0])


def _make_h2_invertible(h: BitMatrix, K: int, l_cols: list[int], degree_of: dict[int, int]) -> BitMatrix:
    """Swap systematic columns into the L slots until H2 = [L | T] has full rank.

    Only columns with a degree used by L are eligible, so the degree profile
    and the girth are unchanged (a column permutation of H).
    """
    M = h.num_rows
    h2 = h.select_columns(range(K, h.num_cols))
    l = len(l_cols)
    if trailing_triangular_offset(h2) != l:
        raise InfeasibleConstruction("T block of H2 is not unit lower triangular")
    nt = M - l
    l_degrees = {degree_of[c] for c in l_cols}
    pool = list(l_cols) + [c for c in range(K) if degree_of[c] in l_degrees]

    # reduce each candidate column to its image in the l-dimensional residual space
    top_rows = []
    bottom_rows = []
    for r, cs in enumerate(h2.row_support):
        t = tuple(c - l for c in cs if c >= l)
        if r < nt:
            top_rows.append(tuple(c for c in t if c != r))
        else:
            bottom_rows.append(t)
    cand = np.zeros((M, len(pool)), dtype=np.uint8)
    for j, c in enumerate(pool):
        cand[list(h.col_support[c]), j] = 1
    x = triangular_sweep(top_rows, cand[:nt].copy())
    image = cand[nt:].copy()
    for i, cs in enumerate(bottom_rows):
        for c in cs:
            image[i] ^= x[c]
    chosen = gf2.independent_columns(image)
    if len(chosen) < l:
        raise InfeasibleConstruction(
            f"only {len(chosen)} of {l} independent L candidates; H2 cannot be made invertible"
        )
    chosen_cols = [pool[j] for j in chosen[:l]]
    if chosen_cols == l_cols:
        return h
    supports = list(h.col_support)
    incoming = [c for c in chosen_cols if c not in l_cols]
    outgoing = [c for c in l_cols if c not in chosen_cols]
    # outgoing L columns take the vacated systematic positions
    for src, dst in zip(incoming, outgoing):
        supports[src], supports[dst] = supports[dst], supports[src]
    return BitMatrix(M, h.num_cols, tuple(supports))


def audit_4cycles(h: BitMatrix) -> list[tuple[int, int, int, int]]:
    """All column pairs sharing at least two rows, as (col_a, col_b, row_x, row_y)."""
    shared: dict[tuple[int, int], list[int]] = defaultdict(list)
    for r, cs in enumerate(h.row_support):
        for a, b in combinations(cs, 2):
            shared[(a, b)].append(r)
    return [(a, b, rows[0], rows[1]) for (a, b), rows in sorted(shared.items()) if len(rows) >= 2]


def realized_variable_fractions(h: BitMatrix) -> dict[int, float]:
    return edge_fractions(h.column_degrees())


def check_degree_fractions(h: BitMatrix) -> dict[int, float]:
    return edge_fractions(h.row_degrees())

