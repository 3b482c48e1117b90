"""Deterministic construction of the nonsystematic part H2.

The parity part is a concatenation of k-step-recoverable blocks.  Block k
holds ``gamma(k)`` weight-two columns; column ``j`` of block ``k`` has ones
in rows ``j + S(k-1)`` and ``j + S(k-1) + gamma(k)`` where ``S`` is the
running sum of block widths.  Block widths roughly halve:
``gamma(k) = floor(M - (M + S(k-1)) / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .matrix import BitMatrix, cycle_free_within_columns

FULL = "full"
LOW_RATE = "low_rate"


@dataclass(frozen=True)
class E2rcProfile:
    """All integer parameters of one construction.

    ``gamma[k-1]`` is the width of block ``k`` and ``S[k]`` the running sum
    (``S[0] == 0``).  ``zeta`` is the degree of the last row of H2 and only
    exists in the full regime; ``delta_span`` replaces ``gamma(d)`` as the
    row offset of the last block in the low-rate regime.
    """

    M: int
    K: int
    nv2: int
    d: int
    gamma: tuple[int, ...]
    S: tuple[int, ...]
    zeta: int | None = None
    delta_span: int | None = None

    @property
    def N(self) -> int:
        return self.K + self.M

    @property
    def regime(self) -> str:
        return FULL if self.nv2 == self.M - 1 else LOW_RATE

    @property
    def is_full(self) -> bool:
        return self.regime == FULL

    @property
    def l(self) -> int:  # noqa: E743 - matches the conventional symbol
        """Number of high-degree (never punctured) parity columns."""
        return 0 if self.is_full else self.M - self.nv2

    @property
    def window(self) -> int:
        """Shift-register length of the sliding-window encoder."""
        return self.gamma[0]

    @property
    def num_h2_columns(self) -> int:
        return self.M

    def block_of_column(self, c: int) -> int:
        """Block number k of an H2 column index (``d + 1`` for the degree-one column, 0 for L)."""
        c -= self.l
        if c < 0:
            return 0
        for k in range(1, self.d + 1):
            if c < self.S[k]:
                return k
        return self.d + 1

    def block_columns(self, k: int) -> range:
        """H2 column indices (0-based within H2) of block ``k``."""
        if 1 <= k <= self.d:
            return range(self.l + self.S[k - 1], self.l + self.S[k])
        if k == self.d + 1 and self.is_full:
            return range(self.M - 1, self.M)
        raise ValueError(f"no block {k} in this profile")

    def to_text(self) -> str:
        lines = [
            f"M = {self.M}",
            f"K = {self.K}",
            f"nv2 = {self.nv2}",
            f"regime = {self.regime}",
            f"d = {self.d}",
            "gamma = " + " ".join(str(g) for g in self.gamma),
        ]
        if self.zeta is not None:
            lines.append(f"zeta = {self.zeta}")
        if self.delta_span is not None:
            lines.append(f"delta_span = {self.delta_span}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> E2rcProfile:
        """Read a profile written by :meth:`to_text`; derived fields are recomputed and checked."""
        values: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = val
        try:
            prof = compute_profile(int(values["M"]), int(values["nv2"]), int(values["K"]))
        except KeyError as exc:
            raise ValueError(f"profile is missing {exc.args[0]!r}") from None
        for key, expected in (
            ("d", str(prof.d)),
            ("gamma", " ".join(str(g) for g in prof.gamma)),
            ("zeta", None if prof.zeta is None else str(prof.zeta)),
            ("delta_span", None if prof.delta_span is None else str(prof.delta_span)),
            ("regime", prof.regime),
        ):
            if key in values and " ".join(values[key].split()) != expected:
                raise ValueError(f"profile field {key} = {values[key]!r} disagrees with {expected!r}")
        return prof


def _halving_width(M: int, S_prev: int) -> int:
    # floor(M - (gamma(0) + ... + gamma(k-1)) / 2) with gamma(0) = M
    return (2 * M - (M + S_prev)) // 2


def compute_profile(M: int, nv2: int, K: int) -> E2rcProfile:
    """Block widths, depth and derived constants for ``M`` parity bits.

    ``nv2 == M - 1`` selects the full regime (all parities weight two plus one
    weight-one column); smaller ``nv2`` selects the low-rate regime.
    """
    if M < 2:
        raise ValueError(f"M must be at least 2, got {M}")
    if not 1 <= nv2 <= M - 1:
        raise ValueError(f"nv2 must lie in [1, {M - 1}], got {nv2}")
    if K < 0:
        raise ValueError(f"K must be nonnegative, got {K}")

    if nv2 == M - 1:
        d = math.ceil(math.log2(M))
        gamma: list[int] = []
        S = [0]
        for _ in range(d):
            g = _halving_width(M, S[-1])
            gamma.append(g)
            S.append(S[-1] + g)
        zeta = sum(gamma[i - 1] + S[i] - S[d] for i in range(1, d + 1)) + 1
        return E2rcProfile(M, K, nv2, d, tuple(gamma), tuple(S), zeta=zeta)

    gamma = []
    S = [0]
    while True:
        g = _halving_width(M, S[-1])
        if S[-1] + g >= nv2:
            delta_span = g
            gamma.append(nv2 - S[-1])
            S.append(nv2)
            break
        gamma.append(g)
        S.append(S[-1] + g)
    return E2rcProfile(M, K, nv2, len(gamma), tuple(gamma), tuple(S), delta_span=delta_span)


def ksr_column(profile: E2rcProfile, k: int, j: int) -> tuple[int, ...]:
    """Row indices of column ``j`` of block ``k``."""
    p = profile
    if p.is_full and k == p.d + 1:
        if j != 0:
            raise ValueError("the degree-one block has a single column")
        return (p.M - 1,)
    if not 1 <= k <= p.d:
        raise ValueError(f"block {k} out of range 1..{p.d + 1 if p.is_full else p.d}")
    if not 0 <= j < p.gamma[k - 1]:
        raise ValueError(f"column {j} out of range for block {k} of width {p.gamma[k - 1]}")
    first = j + p.S[k - 1]
    span = p.delta_span if (not p.is_full and k == p.d) else p.gamma[k - 1]
    return (first, first + span)


def build_h2(profile: E2rcProfile) -> BitMatrix:
    """H2 for the profile.

    Full regime: ``[block 1 | ... | block d | degree-one column]``, lower
    triangular with unit diagonal.  Low-rate regime: ``l`` empty columns
    (to be filled by the edge builder) followed by the blocks.
    """
    cols: list[tuple[int, ...]] = [()] * profile.l
    for k in range(1, profile.d + 1):
        cols += [ksr_column(profile, k, j) for j in range(profile.gamma[k - 1])]
    if profile.is_full:
        cols.append(ksr_column(profile, profile.d + 1, 0))
    return BitMatrix(profile.M, len(cols), tuple(cols))


# -- verification -----------------------------------------------------


@dataclass
class CheckItem:
    name: str
    passed: bool | None  # None: not applicable to this regime
    detail: str = ""


@dataclass
class VerificationReport:
    items: list[CheckItem] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(item.passed is not False for item in self.items)

    def __getitem__(self, name: str) -> CheckItem:
        for item in self.items:
            if item.name == name:
                return item
        raise KeyError(name)

    def lines(self) -> list[str]:
        mark = {True: "PASS", False: "FAIL", None: "N/A "}
        return [f"{mark[i.passed]} {i.name}" + (f": {i.detail}" if i.detail else "") for i in self.items]


def verify_h2(h2: BitMatrix, profile: E2rcProfile) -> VerificationReport:
    """Audit a candidate H2 against the structural claims for ``profile``.

    Every item is computed from the matrix itself; the profile only supplies
    block boundaries and the expected constants.
    """
    report = VerificationReport()
    p = profile
    add = report.items.append

    if h2.shape != (p.M, p.M):
        add(CheckItem("shape", False, f"got {h2.shape}, expected {(p.M, p.M)}"))
        return report
    add(CheckItem("shape", True))

    # (a) lower triangular, unit diagonal
    if p.is_full:
        bad = [
            c for c, rows in enumerate(h2.col_support) if not rows or rows[0] != c
        ]
        add(CheckItem("lower_triangular", not bad, f"columns {bad[:5]}" if bad else ""))
    else:
        t_cols = range(p.l, p.M)
        bad = [c for c in t_cols if not h2.col_support[c] or h2.col_support[c][0] != c - p.l]
        add(CheckItem("lower_triangular", not bad, "T block" + (f", columns {bad[:5]}" if bad else "")))

    # (b) no cycles among weight-two columns
    deg2 = [c for c in range(p.l, p.l + p.nv2)]
    wrong_weight = [c for c in deg2 if len(h2.col_support[c]) != 2]
    check = cycle_free_within_columns(h2, deg2)
    detail = ""
    if wrong_weight:
        detail = f"columns {wrong_weight[:5]} are not weight two"
    elif not check.cycle_free:
        detail = f"cycle through columns {check.witness.columns}"
    add(CheckItem("cycle_free", check.cycle_free and not wrong_weight, detail))

    row_deg = h2.row_degrees()
    if not p.is_full:
        for name in ("block_witness_rows", "row_degree_counts", "last_row_degree"):
            add(CheckItem(name, None, "full regime only"))
        return report

    # (c) every block-k column touches a degree-k row holding one column of each lower block
    failures = []
    for k in range(1, p.d + 1):
        for c in p.block_columns(k):
            if not any(_is_witness_row(h2, p, r, k, c, row_deg) for r in h2.col_support[c]):
                failures.append(c)
    add(CheckItem("block_witness_rows", not failures, f"columns {failures[:5]}" if failures else ""))

    # (d) row-degree counts gamma(k) + [k == zeta], plus the last row at degree zeta
    expected: dict[int, int] = {k: p.gamma[k - 1] for k in range(1, p.d + 1)}
    expected[p.zeta] = expected.get(p.zeta, 0) + 1
    actual: dict[int, int] = {}
    for dgr in row_deg:
        actual[int(dgr)] = actual.get(int(dgr), 0) + 1
    expected = {k: v for k, v in expected.items() if v}
    add(
        CheckItem(
            "row_degree_counts",
            actual == expected,
            "" if actual == expected else f"got {dict(sorted(actual.items()))}, expected {expected}",
        )
    )

    # (e) last row degree
    closed_form = sum(p.gamma[i - 1] + p.S[i] - p.S[p.d] for i in range(1, p.d + 1)) + 1
    last = int(row_deg[-1])
    ok = last == closed_form == p.zeta and 1 <= last <= p.d + 1
    add(CheckItem("last_row_degree", ok, f"last row {last}, closed form {closed_form}"))
    return report


def _is_witness_row(h2: BitMatrix, p: E2rcProfile, r: int, k: int, c: int, row_deg) -> bool:
    if row_deg[r] != k:
        return False
    blocks = [p.block_of_column(x) for x in h2.row_support[r] if x != c]
    return sorted(blocks) == list(range(1, k))
