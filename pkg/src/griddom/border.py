"""Border pieces of the grid and their loss matrices.

All the loss of a near-optimal dominating set concentrates along the
grid border.  The border of thickness k splits into four congruent
L-shaped pieces, each a quarter-turn image of the canonical piece

    P_p(k) = ([k] x {k+2})  u  ([k+1] x {k+1})  u  ([p] x [k]),

anchored at the bottom-left corner of the quadrant {i >= 1, j >= 1}.
The piece's input vertices are (i, k+2) for i in [k]; its output
vertices are (p, i) for i in [k].  For a vertex subset S of the piece,
reading the label 0/1/2 (in S / dominated / undominated) along input and
output vertices yields the piece's words; grouping subsets that dominate
all internal vertices by their word pair and minimising the quadrant
loss gives the piece matrix, the object that the tropical evolution
extends column by column.

Neighborhoods here are always the ambient quadrant ones: the bottom and
left sides are true grid boundary, the top and right stay open, so that
the piece matrix is exactly what each rotated copy contributes inside a
large grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .tropical import INF, TropicalMatrix, min_plus_product
from .words import Word, WordTable, enumerate_words

ORACLE_CELL_LIMIT = 24

__all__ = [
    "BorderPiece",
    "border_cells",
    "decompose_border",
    "internal_vertices",
    "quadrant_loss",
    "piece_words",
    "base_piece_matrix",
    "extension_matrix",
    "evolve_piece_matrix",
    "piece_matrix_bruteforce",
    "extension_loss_delta",
    "ORACLE_CELL_LIMIT",
]


def _quadrant_neighbors(v):
    i, j = v
    out = []
    if i > 1:
        out.append((i - 1, j))
    if j > 1:
        out.append((i, j - 1))
    out.append((i + 1, j))
    out.append((i, j + 1))
    return out


@dataclass(frozen=True)
class BorderPiece:
    """The canonical piece P_p(k) in quadrant coordinates."""

    k: int
    p: int

    def __post_init__(self):
        if not 1 <= self.k:
            raise ValueError(f"width must be >= 1, got {self.k}")
        if self.p < self.k + 2:
            raise ValueError(f"extent must be >= width + 2, got p={self.p}")

    def height(self, x: int) -> int:
        """Number of cells in column x (columns are 1..p)."""
        if x <= self.k:
            return self.k + 2
        if x == self.k + 1:
            return self.k + 1
        return self.k

    @property
    def cells(self) -> frozenset:
        return self._cells()

    @lru_cache(maxsize=None)
    def _cells(self):
        return frozenset(
            (x, y) for x in range(1, self.p + 1) for y in range(1, self.height(x) + 1)
        )

    @property
    def input_vertices(self) -> tuple:
        return tuple((i, self.k + 2) for i in range(1, self.k + 1))

    @property
    def output_vertices(self) -> tuple:
        return tuple((self.p, i) for i in range(1, self.k + 1))

    @property
    def halo(self) -> frozenset:
        """Quadrant cells adjacent to the piece but not in it."""
        cells = self.cells
        return frozenset(
            u for v in cells for u in _quadrant_neighbors(v) if u not in cells
        )

    @property
    def internal(self) -> frozenset:
        """Cells whose whole quadrant neighborhood stays in the piece."""
        return internal_vertices(self.cells)

    def __len__(self):
        return self.k + (self.k + 1) + self.p * self.k


def internal_vertices(s) -> frozenset:
    """I(S): members of S whose closed quadrant neighborhood lies in S."""
    s = frozenset(s)
    return frozenset(v for v in s if all(u in s for u in _quadrant_neighbors(v)))


def quadrant_loss(s) -> int:
    """5|S| - |N[S]| with N taken in the quadrant {i >= 1, j >= 1}."""
    s = frozenset(s)
    cover = set(s)
    for v in s:
        cover.update(_quadrant_neighbors(v))
    return 5 * len(s) - len(cover)


def _labels(s, cells):
    """phi_S on the given cells: 0 member, 1 dominated, 2 undominated."""
    s = frozenset(s)
    cover = set(s)
    for v in s:
        cover.update(_quadrant_neighbors(v))
    return tuple(0 if v in s else (1 if v in cover else 2) for v in cells)


def piece_words(piece: BorderPiece, s) -> tuple:
    """(input word, output word) of a subset of the piece."""
    s = frozenset(s)
    if not s <= piece.cells:
        raise ValueError("subset reaches outside the piece")
    w_in = Word(_labels(s, piece.input_vertices))
    w_out = Word(_labels(s, piece.output_vertices))
    return w_in, w_out


# ---------------------------------------------------------------------------
# border decomposition of a full grid


def border_cells(n: int, m: int, k: int) -> frozenset:
    """The thickness-k border of the n x m grid plus its four inner corners."""
    frame = {
        (i, j)
        for i in range(1, n + 1)
        for j in range(1, m + 1)
        if i <= k or j <= k or i > n - k or j > m - k
    }
    frame.update({(k + 1, k + 1), (k + 1, m - k), (n - k, k + 1), (n - k, m - k)})
    return frozenset(frame)


@dataclass(frozen=True)
class PlacedPiece:
    """A canonical piece plus the quarter-turn map embedding it in the grid."""

    piece: BorderPiece
    turns: int  # quarter turns counter-clockwise from the bottom-left anchor
    n: int
    m: int

    def place(self, v) -> tuple:
        i, j = v
        n, m = self.n, self.m
        if self.turns == 0:
            return (i, j)
        if self.turns == 1:  # left side, anchored at the top-left corner
            return (j, m - i + 1)
        if self.turns == 2:  # top side, anchored at the top-right corner
            return (n - i + 1, m - j + 1)
        return (n - j + 1, i)  # right side, anchored at the bottom-right corner

    def unplace(self, v) -> tuple:
        i, j = v
        n, m = self.n, self.m
        if self.turns == 0:
            return (i, j)
        if self.turns == 1:
            return (m - j + 1, i)
        if self.turns == 2:
            return (n - i + 1, m - j + 1)
        return (j, n - i + 1)

    @property
    def image(self) -> frozenset:
        return frozenset(self.place(v) for v in self.piece.cells)


def decompose_border(n: int, m: int, k: int) -> tuple:
    """The four placed pieces tiling the thickness-k border of n x m.

    Returns (P, Q, R, O): extents n-(k+2), m-(k+2), n-(k+2), m-(k+2) at
    quarter turns 0, 1, 2, 3.  Their images are pairwise disjoint and
    union to border_cells(n, m, k); requires n, m >= 2(k+2).
    """
    if min(n, m) < 2 * (k + 2):
        raise ValueError(f"grid {n}x{m} too small for width {k}: need >= {2 * (k + 2)}")
    along_n = BorderPiece(k, n - (k + 2))
    along_m = BorderPiece(k, m - (k + 2))
    return (
        PlacedPiece(along_n, 0, n, m),
        PlacedPiece(along_m, 1, n, m),
        PlacedPiece(along_n, 2, n, m),
        PlacedPiece(along_m, 3, n, m),
    )


# ---------------------------------------------------------------------------
# the one-column extension matrix
#
# Appending column p+1 to a piece changes the loss by an amount that
# depends only on the old and new output words:
#
#   delta = 3|w'|_0 - #{i : w[i]=2 and w'[i]=0} - |w'|_1 + |w|_0 - [w'[k]=0]
#
# (5 per new set vertex, minus newly covered cells in columns p, p+1 and
# p+2 and the cell above the strip).  The pair is infeasible when a
# label would be contradicted: a 2 next to a set vertex, an undominated
# internal cell left behind, or a claimed-dominated cell with no
# dominator.  Note the column-p term counts only cells actually covered
# by the new column: the top strip cell (p, k) is not internal, so with
# w[k] = 2 and w'[k] != 0 it legitimately stays undominated.


def extension_matrix(k: int) -> TropicalMatrix:
    """Transition matrix over output words: piece matrices evolve by it."""
    table = enumerate_words(k)
    ls = table.letters.astype(np.int64)
    n = len(table)

    def pairs(left, right):
        return left.astype(np.int64) @ right.astype(np.int64).T

    # a set vertex cannot face an undominated cell
    viol = pairs(ls == 0, ls == 2)
    # cells (p, i) for i < k are internal after the extension: a 2 must
    # be covered by the new column
    if k >= 2:
        head = ls[:, : k - 1]
        viol += pairs(head == 2, head != 0)
    # a new cell claiming label 1 needs a dominator: behind it, or a set
    # neighbor inside the new column
    witness = np.zeros((n, k), dtype=bool)
    for i in range(k):
        cond = ls[:, i] == 1
        if i > 0:
            cond &= ls[:, i - 1] != 0
        if i < k - 1:
            cond &= ls[:, i + 1] != 0
        witness[:, i] = cond
    viol += pairs(ls != 0, witness)

    zeros = (ls == 0).sum(axis=1)
    ones = (ls == 1).sum(axis=1)
    covered_behind = pairs(ls == 2, ls == 0)
    delta = (
        3 * zeros[None, :]
        - covered_behind
        - ones[None, :]
        + zeros[:, None]
        - (ls[:, k - 1] == 0)[None, :].astype(np.int64)
    )
    return TropicalMatrix(np.where(viol > 0, INF, delta))


def evolve_piece_matrix(
    c: TropicalMatrix, t: TropicalMatrix, steps: int
) -> TropicalMatrix:
    """Extend the piece matrix by the given number of columns."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    for _ in range(steps):
        c = min_plus_product(c, t)
    return c


def extension_loss_delta(
    s_prev, s_next, piece_prev: BorderPiece, piece_next: BorderPiece
) -> int:
    """Loss change when a piece grows one column, checked on real sets.

    Requires piece_next one column longer, s_prev the restriction of
    s_next, and s_next dominating the longer piece's internal cells;
    returns quadrant_loss(s_next) - quadrant_loss(s_prev), which equals
    the closed-form entry of extension_matrix on the two output words.
    """
    if piece_next.k != piece_prev.k or piece_next.p != piece_prev.p + 1:
        raise ValueError("pieces must differ by exactly one column")
    s_prev, s_next = frozenset(s_prev), frozenset(s_next)
    if not s_next <= piece_next.cells:
        raise ValueError("extended set reaches outside its piece")
    if s_prev != s_next & piece_prev.cells:
        raise ValueError("previous set is not the restriction of the extended set")
    cover = set(s_next)
    for v in s_next:
        cover.update(_quadrant_neighbors(v))
    if not piece_next.internal <= cover:
        raise ValueError("extended set fails to dominate the internal cells")
    return quadrant_loss(s_next) - quadrant_loss(s_prev)


# ---------------------------------------------------------------------------
# exhaustive piece matrix (the independent oracle)


def piece_matrix_bruteforce(
    k: int, p: int, cell_limit: int = ORACLE_CELL_LIMIT
) -> TropicalMatrix:
    """Piece matrix by enumeration of every subset of P_p(k).

    Groups subsets dominating the internal cells by (input word, output
    word) and keeps the minimum quadrant loss.  Independent of the
    frontier DP and of the extension matrix; intentionally brute force.
    """
    piece = BorderPiece(k, p)
    ncells = len(piece.cells)
    if ncells > cell_limit:
        raise ValueError(
            f"piece P_{p}({k}) has {ncells} cells; oracle limit is {cell_limit}"
        )
    table = enumerate_words(k)
    if ncells <= 16:
        return _bruteforce_python(piece, table)
    from ._kernels import piece_oracle

    return _bruteforce_gray(piece, table)


def _bruteforce_python(piece: BorderPiece, table: WordTable) -> TropicalMatrix:
    cells = sorted(piece.cells)
    internal = piece.internal
    n = len(table)
    out = np.full((n, n), INF, dtype=np.int64)
    for mask in range(1 << len(cells)):
        s = frozenset(c for b, c in enumerate(cells) if mask >> b & 1)
        cover = set(s)
        for v in s:
            cover.update(_quadrant_neighbors(v))
        if not internal <= cover:
            continue
        w_in, w_out = piece_words(piece, s)
        i, j = table.rank_of(w_in), table.rank_of(w_out)
        val = 5 * len(s) - len(cover)
        if val < out[i, j]:
            out[i, j] = val
    return TropicalMatrix(out)


def _bruteforce_gray(piece: BorderPiece, table: WordTable) -> TropicalMatrix:
    """Gray-code subset walk with incremental cover counts (compiled)."""
    from ._kernels import piece_oracle

    cells = sorted(piece.cells)
    halo = sorted(piece.halo)
    universe = cells + halo
    uindex = {v: q for q, v in enumerate(universe)}
    nbrs = np.full((len(cells), 6), -1, dtype=np.int64)
    for b, v in enumerate(cells):
        around = [v] + [u for u in _quadrant_neighbors(v) if u in uindex]
        for q, u in enumerate(around):
            nbrs[b, q] = uindex[u]
    internal_mask = np.array([v in piece.internal for v in universe], dtype=np.bool_)
    in_pos = np.array([uindex[v] for v in piece.input_vertices], dtype=np.int64)
    out_pos = np.array([uindex[v] for v in piece.output_vertices], dtype=np.int64)
    rank = np.full(3**piece.k, -1, dtype=np.int64)
    pow3 = 3 ** np.arange(piece.k, dtype=np.int64)
    for r, w in enumerate(table.words):
        rank[int(np.dot(np.array(w.letters, dtype=np.int64), pow3))] = r
    raw = piece_oracle(
        len(cells), nbrs, internal_mask, in_pos, out_pos, rank, len(table)
    )
    return TropicalMatrix(raw)


# ---------------------------------------------------------------------------
# frontier dynamic program for the base piece matrix
#
# Cells are decided in lexicographic (column-major) order.  The DP state
# is the labelling of the frontier: every decided cell that still has an
# undecided quadrant neighbor.  Cells adjacent to the halo (the column
# tops and the output column) never leave the frontier; every other cell
# retires as soon as its last neighbor is decided, at which point it is
# internal and a leftover label 2 kills the branch.  The loss is paid
# incrementally: +5 when a cell joins the set, -1 for each quadrant cell
# (piece or halo) the moment it first becomes dominated.  The frontier
# never exceeds 2k+1 cells and always sorts into chains in which only
# consecutive cells are adjacent.


@dataclass(frozen=True)
class _Step:
    """Static description of one cell decision for the DP executors."""

    cell: tuple
    pos_left: int  # index in the old frontier, -1 if absent
    pos_down: int
    pos_left_up: int  # prior dominator of the piece cell above, -1 if none
    up_is_piece: bool
    halo_up_other: int  # prior dominator of the halo cell above, -1 if none
    right_is_piece: bool
    halo_right_other: int
    retire: bool  # whether the left neighbor retires after this decision
    new_from_old: tuple  # new frontier built from old positions; -1 = this cell
    new_size: int


def _frontier_order(cells, x) -> list:
    """Canonical frontier order while column x is being decided.

    Column tops left of x-1 ascending, then column x-1 top-down, then
    column x top-down: with this order any two adjacent frontier cells
    are consecutive, so states are labellings of disjoint chains.
    """
    a = sorted(c for c in cells if c[0] <= x - 2)
    b = sorted((c for c in cells if c[0] == x - 1), key=lambda c: -c[1])
    c_ = sorted((c for c in cells if c[0] == x), key=lambda c: -c[1])
    return a + b + c_


def _build_steps(k: int):
    """The DP schedule for the base piece P_{k+2}(k).

    Returns (steps, final_frontier); the final frontier is exactly the
    crust: input column, inner corner, output column.
    """
    piece = BorderPiece(k, k + 2)
    p0 = k + 2
    heights = {x: piece.height(x) for x in range(1, p0 + 1)}
    crust = {(x, heights[x]) for x in range(1, p0 + 1)}
    crust.update((p0, y) for y in range(1, k + 1))
    order = [(x, y) for x in range(1, p0 + 1) for y in range(1, heights[x] + 1)]
    steps = []
    frontier: list = []
    for x, y in order:
        fpos = {v: q for q, v in enumerate(frontier)}
        left = (x - 1, y)
        down = (x, y - 1)
        left_up = (x - 1, y + 1)
        up_is_piece = y < heights[x]
        halo_up_other = -1
        if not up_is_piece and x > 1 and heights[x - 1] >= y + 1:
            halo_up_other = fpos[left_up]
        right_is_piece = x < p0 and y <= heights[x + 1]
        retire = x > 1 and left not in crust
        kept = set(frontier)
        if retire:
            kept.discard(left)
        kept.add((x, y))
        new_frontier = _frontier_order(kept, x)
        new_from_old = tuple(fpos[v] if v != (x, y) else -1 for v in new_frontier)
        steps.append(
            _Step(
                cell=(x, y),
                pos_left=fpos.get(left, -1),
                pos_down=fpos.get(down, -1),
                pos_left_up=fpos.get(left_up, -1) if up_is_piece else -1,
                up_is_piece=up_is_piece,
                halo_up_other=halo_up_other,
                right_is_piece=right_is_piece,
                halo_right_other=-1,  # right halo cells have no prior dominator
                retire=retire,
                new_from_old=new_from_old,
                new_size=len(new_frontier),
            )
        )
        # frontier bound and chain shape are structural invariants
        assert len(new_frontier) <= 2 * k + 1
        for a in range(len(new_frontier)):
            for b in range(a + 2, len(new_frontier)):
                va, vb = new_frontier[a], new_frontier[b]
                assert abs(va[0] - vb[0]) + abs(va[1] - vb[1]) != 1
        frontier = new_frontier
    assert set(frontier) == crust and len(frontier) == 2 * k + 1
    return steps, frontier


def _dp_python(k: int):
    """Reference frontier-DP over dict states; fine up to moderate widths."""
    steps, final_frontier = _build_steps(k)
    states = {(): 0}
    for st in steps:
        nxt: dict = {}
        pl, pd = st.pos_left, st.pos_down
        for labels, val in states.items():
            pre_dominated = (pl >= 0 and labels[pl] == 0) or (
                pd >= 0 and labels[pd] == 0
            )
            for member in (True, False):
                ls = list(labels)
                if member:
                    v = val + 5
                    if not pre_dominated:
                        v -= 1  # the cell itself
                    for pos in (pl, pd):
                        if pos >= 0 and ls[pos] == 2:
                            ls[pos] = 1
                            v -= 1
                    if st.up_is_piece:
                        if not (st.pos_left_up >= 0 and ls[st.pos_left_up] == 0):
                            v -= 1
                    elif not (st.halo_up_other >= 0 and ls[st.halo_up_other] == 0):
                        v -= 1
                    if st.right_is_piece:
                        v -= 1
                    elif not (
                        st.halo_right_other >= 0 and ls[st.halo_right_other] == 0
                    ):
                        v -= 1
                    lab = 0
                else:
                    v = val
                    lab = 1 if pre_dominated else 2
                if st.retire and ls[pl] == 2:
                    continue  # an internal cell would stay undominated
                new_labels = tuple(
                    ls[q] if q >= 0 else lab for q in st.new_from_old
                )
                old = nxt.get(new_labels)
                if old is None or v < old:
                    nxt[new_labels] = v
        states = nxt
    return states, final_frontier


def base_piece_matrix(k: int, max_width: int = 10) -> TropicalMatrix:
    """The base matrix: minimum loss of P_{k+2}(k) per word pair.

    Computed by the frontier DP; symmetric because the base piece is
    symmetric across the main diagonal.  Width 10 is the full-scale,
    hours-long case; keep it behind explicit opt-in.
    """
    if not 1 <= k <= max_width:
        raise ValueError(f"width must be in 1..{max_width}, got {k}")
    table = enumerate_words(k)
    n = len(table)
    if k <= 5:
        final, frontier = _dp_python(k)
        piece = BorderPiece(k, k + 2)
        pos = {v: q for q, v in enumerate(frontier)}
        in_pos = [pos[v] for v in piece.input_vertices]
        out_pos = [pos[v] for v in piece.output_vertices]
        out = np.full((n, n), INF, dtype=np.int64)
        for labels, val in final.items():
            w_in = tuple(labels[q] for q in in_pos)
            w_out = tuple(labels[q] for q in out_pos)
            i, j = table.rank[w_in], table.rank[w_out]
            if val < out[i, j]:
                out[i, j] = val
        return TropicalMatrix(out)
    from ._dp_large import large_base_piece_matrix

    return large_base_piece_matrix(k)
