"""Square matrices over the (min,+) semiring with integer entries.

Entries are nonnegative integers or +inf; the product is
C[i,j] = min_k (A[i,k] + B[k,j]) with saturating addition.  +inf is a
large int64 sentinel so sums of two entries never overflow, and equality
is exact (no tolerances anywhere).

The pipeline use is: a loss matrix evolves by repeated multiplication
with a fixed sparse transition matrix, eventually the iterates grow by a
constant shift per step, and an entrywise folded minimum of the shifted
iterates turns that tail behaviour into a uniform lower bound.  This
module provides the product, the shift, the shift-point detector, the
fold, the closed-cycle quadruple minimum, and the binary/CSV file
formats shared with the matrix cache.
"""

from __future__ import annotations

import struct

import numpy as np

INF = np.int64(2**61)  # saturating infinity; INF + INF still fits in int64
_INF_U32 = 0xFFFFFFFF  # +inf encoding in cache files

TAG_BYTES = {"C": ord("C"), "L": ord("L"), "T": ord("T"), "M": ord("M"), "M'": ord("'")}
_BYTE_TAGS = {v: k for k, v in TAG_BYTES.items()}

__all__ = [
    "INF",
    "TropicalMatrix",
    "min_plus_product",
    "shift",
    "detect_eventual_shift",
    "fold_min_shifted",
    "quadruple_min",
    "ShiftNotFound",
    "CacheFormatError",
    "write_tmx",
    "read_tmx",
    "write_csv",
]


class ShiftNotFound(RuntimeError):
    """Raised when no constant-shift step appears within the iteration cap."""


class CacheFormatError(ValueError):
    """Raised on a corrupt or foreign matrix cache file."""


class TropicalMatrix:
    """A dim x dim int64 array; +inf is the INF sentinel.

    Immutable by convention: operations return new matrices.  Finite
    entries must be nonnegative unless ``signed`` is set (the folded
    matrices subtract iteration counts and may go negative).
    """

    def __init__(self, entries, signed: bool = False):
        a = np.asarray(entries, dtype=np.int64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"square matrix required, got shape {a.shape}")
        if not signed and a.min(initial=INF) < 0:
            raise ValueError("negative entry in unsigned tropical matrix")
        self.entries = a
        self.signed = signed

    @property
    def dim(self):
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "TropicalMatrix":
        a = np.full((dim, dim), INF, dtype=np.int64)
        np.fill_diagonal(a, 0)
        return cls(a)

    @classmethod
    def full_inf(cls, dim: int) -> "TropicalMatrix":
        return cls(np.full((dim, dim), INF, dtype=np.int64))

    def finite_mask(self):
        return self.entries < INF

    def finite_density(self) -> float:
        return float(self.finite_mask().mean())

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.T))

    def transpose(self) -> "TropicalMatrix":
        return TropicalMatrix(self.entries.T.copy(), signed=self.signed)

    def __eq__(self, other):
        return isinstance(other, TropicalMatrix) and np.array_equal(
            self.entries, other.entries
        )

    def __repr__(self):
        return f"TropicalMatrix(dim={self.dim}, finite={self.finite_mask().sum()})"

    def minimum(self, other: "TropicalMatrix") -> "TropicalMatrix":
        _check_dims(self, other)
        return TropicalMatrix(
            np.minimum(self.entries, other.entries),
            signed=self.signed or other.signed,
        )

    def entrywise_le(self, other: "TropicalMatrix") -> bool:
        _check_dims(self, other)
        return bool(np.all(self.entries <= other.entries))


def _check_dims(a: TropicalMatrix, b: TropicalMatrix):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def min_plus_product(a: TropicalMatrix, b: TropicalMatrix) -> TropicalMatrix:
    """(min,+) matrix product with saturating +inf.

    Dense row-blocked numpy for small matrices; when the right operand is
    sparse enough (the evolution chain's transition matrix is ~95% +inf)
    a compiled kernel iterating its per-column finite entries wins and is
    used instead.
    """
    _check_dims(a, b)
    n = a.dim
    if n >= 64 and b.finite_density() < 0.25:
        from ._kernels import sparse_min_plus

        out = sparse_min_plus(a.entries, b.entries)
        return TropicalMatrix(out, signed=a.signed or b.signed)
    out = np.empty((n, n), dtype=np.int64)
    block = max(1, min(n, 8_000_000 // max(n * n, 1) + 1))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        # sums (block, n, n): rows lo:hi of a against all of b
        sums = a.entries[lo:hi, :, None] + b.entries[None, :, :]
        out[lo:hi] = sums.min(axis=1)
    return TropicalMatrix(np.minimum(out, INF), signed=a.signed or b.signed)


def shift(a: TropicalMatrix, c: int) -> TropicalMatrix:
    """Add c to every finite entry; +inf entries stay +inf.

    In unsigned mode, shifting an entry below zero is an error; build the
    matrix with ``signed=True`` to opt in to negative entries.
    """
    c = int(c)
    mask = a.finite_mask()
    out = a.entries.copy()
    out[mask] += c
    if not a.signed and c < 0 and out[mask].min(initial=0) < 0:
        raise ValueError(f"shift by {c} drives an unsigned entry below zero")
    return TropicalMatrix(out, signed=a.signed)


def _shift_constant(prev: TropicalMatrix, cur: TropicalMatrix):
    """c with cur = prev + c entrywise (same +inf pattern), else None."""
    fp, fc = prev.finite_mask(), cur.finite_mask()
    if not np.array_equal(fp, fc):
        return None
    if not fp.any():
        return 0
    diff = cur.entries[fc] - prev.entries[fp]
    c = int(diff[0])
    return c if bool(np.all(diff == c)) else None


def detect_eventual_shift(step, start: TropicalMatrix, max_iters: int = 256):
    """Iterate A <- step(A) until one step equals a constant shift.

    Returns (t, c, history) where t is the number of steps taken before
    the shift step (t = 0 means step(start) = start + c already), c is the
    shift constant, and history is [A_0, ..., A_{t+1}] including the
    matrix after the shift step.  Raises ShiftNotFound with diff
    statistics when max_iters steps pass without a constant shift.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be positive")
    history = [start]
    cur = start
    for t in range(max_iters):
        nxt = step(cur)
        _check_dims(cur, nxt)
        history.append(nxt)
        c = _shift_constant(cur, nxt)
        if c is not None:
            return t, c, history
        cur = nxt
    fp, fc = history[-2].finite_mask(), history[-1].finite_mask()
    both = fp & fc
    diffs = history[-1].entries[both] - history[-2].entries[both]
    raise ShiftNotFound(
        f"no constant shift within {max_iters} iterations; last diff range "
        f"[{diffs.min(initial=0)}, {diffs.max(initial=0)}], "
        f"finite-pattern stable: {np.array_equal(fp, fc)}"
    )


def fold_min_shifted(sequence, base_index: int = 0) -> TropicalMatrix:
    """Entrywise min of (sequence[t] - t): the stabilised lower envelope.

    Once the sequence grows by a fixed +1 shift per step past its end,
    every later iterate q satisfies  M_q >= fold + (q - base)  entrywise,
    so the fold is the uniform per-step lower bound for the whole tail.
    """
    if not sequence:
        raise ValueError("empty sequence")
    out = sequence[0]
    for t, m in enumerate(sequence[1:], start=1):
        out = out.minimum(TropicalMatrix(_shift_signed(m, -t), signed=True))
    return out


def _shift_signed(a: TropicalMatrix, c: int):
    mask = a.finite_mask()
    out = a.entries.copy()
    out[mask] += c
    return out


def quadruple_min(mn: TropicalMatrix, mm: TropicalMatrix):
    """min over w1..w4 of mn[w1,w2] + mm[w2,w3] + mn[w3,w4] + mm[w4,w1].

    This is the cost of the cheapest closed 4-cycle alternating between
    the two matrices; computed as  min (A + A^T)  with A = mn (x) mm.
    Returns an int, or INF when no finite cycle exists.
    """
    a = min_plus_product(mn, mm).entries
    total = a + a.T
    best = total.min()
    return INF if best >= INF else int(best)


# ---------------------------------------------------------------------------
# binary cache format and CSV export

_HEADER = struct.Struct("<4sIHBI")  # magic, dim, k, tag, p


def write_tmx(path, matrix: TropicalMatrix, k: int, tag: str, p: int = 0):
    """Write the TMX1 binary format: header then dim^2 little-endian u32.

    +inf is stored as 0xFFFFFFFF.  Finite entries must fit in a u32 and,
    because the file format is unsigned, be nonnegative.
    """
    if tag not in TAG_BYTES:
        raise ValueError(f"unknown tag {tag!r}; expected one of {sorted(TAG_BYTES)}")
    ent = matrix.entries
    mask = ent < INF
    if mask.any() and (ent[mask].min() < 0 or ent[mask].max() >= _INF_U32):
        raise ValueError("entries outside the u32 range of the cache format")
    packed = np.where(mask, ent, _INF_U32).astype("<u4")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(b"TMX1", matrix.dim, k, TAG_BYTES[tag], p))
        f.write(packed.tobytes())


def read_tmx(path):
    """Read a TMX1 file; returns (matrix, k, tag, p)."""
    with open(path, "rb") as f:
        head = f.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise CacheFormatError(f"{path}: truncated header")
        magic, dim, k, tag_byte, p = _HEADER.unpack(head)
        if magic != b"TMX1":
            raise CacheFormatError(f"{path}: bad magic {magic!r}")
        if tag_byte not in _BYTE_TAGS:
            raise CacheFormatError(f"{path}: unknown tag byte {tag_byte}")
        body = np.frombuffer(f.read(), dtype="<u4")
    if body.size != dim * dim:
        raise CacheFormatError(
            f"{path}: expected {dim * dim} entries, found {body.size}"
        )
    ent = body.astype(np.int64).reshape(dim, dim)
    ent[ent == _INF_U32] = INF
    return TropicalMatrix(ent), k, _BYTE_TAGS[tag_byte], p


def write_csv(path, matrix: TropicalMatrix):
    """CSV export with +inf rendered as "inf"."""
    with open(path, "w") as f:
        for row in matrix.entries:
            f.write(",".join("inf" if v >= INF else str(int(v)) for v in row))
            f.write("\n")
