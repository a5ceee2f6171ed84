"""Complete grid graphs: neighborhoods, domination, the loss function,
and two independent exact solvers.

The grid G(n, m) has vertex set [n] x [m]; (i, j) is column i, row j,
with (1, 1) the bottom-left corner.  Vertices are adjacent when their
coordinates differ by 1 in exactly one component.

The loss of a vertex set S is  loss(S) = 5|S| - |N[S]|.  A vertex covers
at most 5 cells, so the loss measures wasted coverage; for a dominating
set D of the whole grid, loss(D) = 5|D| - n*m, which ties the minimum
loss directly to the domination number.

Two exact solvers cross-check each other: a branch-and-bound search over
subsets in increasing size (every grid up to the cell limit), and a
broken-profile dynamic program over column labellings (every grid whose
narrow side fits the width limit).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

BRUTE_FORCE_CELL_LIMIT = 30
PROFILE_WIDTH_LIMIT = 12

__all__ = [
    "GridDims",
    "VertexSet",
    "GammaValue",
    "closed_neighborhood",
    "closed_neighborhood_of_set",
    "is_dominating",
    "loss",
    "gamma_bruteforce",
    "gamma_profile_dp",
    "GridTooLarge",
    "BRUTE_FORCE_CELL_LIMIT",
    "PROFILE_WIDTH_LIMIT",
]


class GridTooLarge(ValueError):
    """Instance exceeds the configured size ceiling of a solver."""


@dataclass(frozen=True, order=True)
class GridDims:
    """Grid dimensions: n columns, m rows (both at least 1)."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"grid dimensions must be >= 1, got {self.n}x{self.m}")

    @property
    def cells(self) -> int:
        return self.n * self.m

    def contains(self, v) -> bool:
        i, j = v
        return 1 <= i <= self.n and 1 <= j <= self.m

    def index(self, v) -> int:
        i, j = v
        return (j - 1) * self.n + (i - 1)

    def vertex(self, idx) -> tuple:
        return idx % self.n + 1, idx // self.n + 1

    def normalized(self) -> "GridDims":
        """Same grid with n <= m (the narrow side first)."""
        return self if self.n <= self.m else GridDims(self.m, self.n)


@dataclass(frozen=True)
class GammaValue:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("domination number cannot be negative")


@lru_cache(maxsize=256)
def _neighbor_masks(dims: GridDims) -> tuple:
    """Closed-neighborhood bitmask for every cell, indexed like VertexSet."""
    n, m = dims.n, dims.m
    masks = []
    for idx in range(n * m):
        i, j = dims.vertex(idx)
        mask = 1 << idx
        for u, v in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
            if 1 <= u <= n and 1 <= v <= m:
                mask |= 1 << dims.index((u, v))
        masks.append(mask)
    return tuple(masks)


class VertexSet:
    """A set of grid vertices backed by a bitset.

    Bit (j-1)*n + (i-1) holds vertex (i, j), so membership, unions and
    coverage checks are single integer operations even for large grids.
    """

    __slots__ = ("dims", "mask")

    def __init__(self, dims: GridDims, vertices=(), mask: int | None = None):
        self.dims = dims
        if mask is not None:
            self.mask = mask
        else:
            m = 0
            for v in vertices:
                if not dims.contains(v):
                    raise ValueError(f"vertex {v} outside {dims.n}x{dims.m} grid")
                m |= 1 << dims.index(v)
            self.mask = m

    def __len__(self):
        return self.mask.bit_count()

    def __contains__(self, v):
        return self.dims.contains(v) and self.mask >> self.dims.index(v) & 1

    def __eq__(self, other):
        return (
            isinstance(other, VertexSet)
            and self.dims == other.dims
            and self.mask == other.mask
        )

    def __hash__(self):
        return hash((self.dims, self.mask))

    def __iter__(self):
        mask = self.mask
        while mask:
            low = mask & -mask
            yield self.dims.vertex(low.bit_length() - 1)
            mask ^= low

    def __repr__(self):
        return f"VertexSet({self.dims.n}x{self.dims.m}, {sorted(self)})"

    def union(self, other: "VertexSet") -> "VertexSet":
        self._check_dims(other)
        return VertexSet(self.dims, mask=self.mask | other.mask)

    def intersection(self, other: "VertexSet") -> "VertexSet":
        self._check_dims(other)
        return VertexSet(self.dims, mask=self.mask & other.mask)

    def issubset(self, other: "VertexSet") -> bool:
        self._check_dims(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "VertexSet") -> bool:
        self._check_dims(other)
        return self.mask & other.mask == 0

    def _check_dims(self, other):
        if self.dims != other.dims:
            raise ValueError("vertex sets live on different grids")


def closed_neighborhood(dims: GridDims, v) -> VertexSet:
    """N[v]: v and its grid neighbors; v must lie inside the grid."""
    if not dims.contains(v):
        raise ValueError(f"vertex {v} outside {dims.n}x{dims.m} grid")
    return VertexSet(dims, mask=_neighbor_masks(dims)[dims.index(v)])


def closed_neighborhood_of_set(s: VertexSet) -> VertexSet:
    """N[S]: union of closed neighborhoods; empty for empty S."""
    masks = _neighbor_masks(s.dims)
    cover = 0
    mask = s.mask
    while mask:
        low = mask & -mask
        cover |= masks[low.bit_length() - 1]
        mask ^= low
    return VertexSet(s.dims, mask=cover)


def is_dominating(s: VertexSet) -> bool:
    """True iff N[S] covers every vertex of the grid."""
    full = (1 << s.dims.cells) - 1
    return closed_neighborhood_of_set(s).mask == full


def loss(s: VertexSet) -> int:
    """loss(S) = 5|S| - |N[S]|, computed inside the grid; always >= 0."""
    return 5 * len(s) - len(closed_neighborhood_of_set(s))


# ---------------------------------------------------------------------------
# exact solver 1: branch and bound over subsets by increasing size


def gamma_bruteforce(dims: GridDims, cell_limit: int = BRUTE_FORCE_CELL_LIMIT):
    """Exact domination number with a witness, by exhaustive search.

    Searches subsets in increasing size with early exit: for each target
    size we branch on dominators of the first uncovered cell, so the
    first hit is a minimum dominating set.  Limited to small grids.

    Returns (GammaValue, witness VertexSet).
    """
    if dims.cells > cell_limit:
        raise GridTooLarge(
            f"{dims.n}x{dims.m} has {dims.cells} cells; brute-force limit is "
            f"{cell_limit}"
        )
    masks = _neighbor_masks(dims)
    full = (1 << dims.cells) - 1
    candidates = []  # dominator choices for each cell = its closed neighborhood
    for idx in range(dims.cells):
        candidates.append([c for c in range(dims.cells) if masks[idx] >> c & 1])
    chosen = []

    def search(cover: int, budget: int) -> bool:
        if cover == full:
            return True
        if budget == 0:
            return False
        uncovered = full & ~cover
        # admissible bound: one new vertex covers at most 5 cells
        if uncovered.bit_count() > 5 * budget:
            return False
        first = (uncovered & -uncovered).bit_length() - 1
        for cand in candidates[first]:
            chosen.append(cand)
            if search(cover | masks[cand], budget - 1):
                return True
            chosen.pop()
        return False

    size = (dims.cells + 4) // 5  # gamma >= ceil(nm / 5)
    while True:
        if search(0, size):
            witness = VertexSet(dims, (dims.vertex(c) for c in chosen))
            return GammaValue(size), witness
        size += 1


# ---------------------------------------------------------------------------
# exact solver 2: broken-profile DP over column labellings
#
# Cells are scanned column by column, bottom to top.  The state is one
# label per row: rows already decided in the current column carry their
# own label, rows not yet reached carry the previous column's label (the
# "broken profile").  Labels: 0 in the set, 1 dominated, 2 undominated.
# When a cell is decided, its left neighbor has seen its whole closed
# neighborhood, so a leftover label 2 there kills the branch.  States
# pack into base-3 integers; invalid labellings are simply never reached.


def gamma_profile_dp(dims: GridDims, width_limit: int = PROFILE_WIDTH_LIMIT):
    """Exact domination number by the broken-profile dynamic program.

    The grid is traversed with its narrow side as the column height, so
    the state is a word of that length; agrees with gamma_bruteforce on
    every grid where both run.
    """
    d = dims.normalized()
    n, m = d.n, d.m
    if n > width_limit:
        raise GridTooLarge(
            f"narrow side {n} exceeds the profile-DP width limit {width_limit}"
        )
    if n >= 9:
        from ._kernels import rect_profile_dp

        return GammaValue(int(rect_profile_dp(n, m)))
    return GammaValue(_profile_dp_python(n, m))


def _profile_dp_python(n, m):
    pow3 = [3**q for q in range(n + 1)]
    # before column 1 every profile digit reads 2 ("nothing decided"),
    # which is sum of 2*3^q = 3^n - 1
    states = {pow3[n] - 1: 0}
    for c in range(m):
        for y in range(n):
            nxt: dict = {}
            for s, cost in states.items():
                left = s // pow3[y] % 3  # previous column, same row
                down = s // pow3[y - 1] % 3 if y > 0 else -1
                base = s - left * pow3[y]
                # choice: put the cell in the dominating set
                s2 = base  # new digit 0 at position y
                if down == 2:
                    s2 -= pow3[y - 1]  # upgrade 2 -> 1
                v = cost + 1
                if nxt.get(s2, m * n + 1) > v:
                    nxt[s2] = v
                # choice: leave it out (left neighbor must now be covered)
                if left == 2 and c > 0:
                    continue
                lab = 1 if (left == 0 and c > 0) or down == 0 else 2
                s3 = base + lab * pow3[y]
                if nxt.get(s3, m * n + 1) > cost:
                    nxt[s3] = cost
            states = nxt
    best = None
    for s, cost in states.items():
        digits = [s // pow3[q] % 3 for q in range(n)]
        if 2 not in digits and (best is None or cost < best):
            best = cost
    return best
