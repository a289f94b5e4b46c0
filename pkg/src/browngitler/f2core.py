"""Linear algebra over F2 and the 2-adic integer helpers used everywhere else.

Vectors are Python ints: bit ``j`` is coordinate ``j``.  A matrix is a tuple
of such ints, one per row (row-major), so elimination XORs whole rows at once
and the word size is whatever CPython's bignum limb happens to be.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence


# --------------------------------------------------------------------------
# integer combinatorics
# --------------------------------------------------------------------------

def alpha2(n: int) -> int:
    """Number of ones in the binary expansion of ``n``."""
    if n < 0:
        raise ValueError(f"alpha2 needs n >= 0, got {n}")
    return bin(n).count("1")


def nu2(n: int) -> int:
    """2-adic valuation: the largest ``i`` with ``2**i`` dividing ``n``."""
    if n <= 0:
        raise ValueError(f"nu2 is undefined for n = {n}")
    return (n & -n).bit_length() - 1


def binom_mod2(j: int, i: int) -> int:
    """Coefficient of ``x**i`` in ``(1 + x)**j`` over F2.

    ``j`` may be negative.  Since ``(1+x)**(2**N) = 1 + x**(2**N)`` mod 2, the
    coefficients of degree below ``2**N`` do not change when ``2**N`` is added
    to ``j``; pick ``N`` so that ``j + 2**N >= 0`` and ``2**N > i`` and use
    Lucas' theorem.
    """
    if i < 0:
        raise ValueError(f"binom_mod2 needs i >= 0, got {i}")
    if j < 0:
        shift = 1 << max(i.bit_length(), (-j).bit_length())
        j += shift
    return 1 if (i & j) == i else 0


@dataclass(frozen=True)
class BinaryProfile:
    n: int
    alpha2: int
    nu2: int | None
    exponents: tuple[int, ...]


def binary_profile(n: int) -> BinaryProfile:
    if n < 0:
        raise ValueError(f"binary_profile needs n >= 0, got {n}")
    exps = tuple(bits(n))
    return BinaryProfile(n, len(exps), exps[0] if exps else None, exps)


def bits(v: int) -> Iterable[int]:
    """Positions of the set bits of ``v``, ascending."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def parity(v: int) -> int:
    return bin(v).count("1") & 1


# --------------------------------------------------------------------------
# matrices
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class F2Matrix:
    """Dense F2 matrix; ``rows[r]`` holds row ``r`` with column ``c`` at bit ``c``."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ValueError("row count does not match nrows")
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row has bits outside the column range")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "F2Matrix":
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, tuple(1 << r for r in range(n)))

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]], ncols: int | None = None) -> "F2Matrix":
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        rows = []
        for row in entries:
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            v = 0
            for c, e in enumerate(row):
                if e & 1:
                    v |= 1 << c
            rows.append(v)
        return cls(len(rows), ncols, tuple(rows))

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> "F2Matrix":
        """Matrix whose ``c``-th column is the bit vector ``columns[c]``."""
        return cls(nrows, len(columns), _transpose_bits(columns, nrows))

    @classmethod
    def random(cls, nrows: int, ncols: int, rng: random.Random) -> "F2Matrix":
        return cls(nrows, ncols, tuple(rng.getrandbits(ncols) if ncols else 0 for _ in range(nrows)))

    def columns(self) -> tuple[int, ...]:
        return _transpose_bits(self.rows, self.ncols)

    def transpose(self) -> "F2Matrix":
        return F2Matrix(self.ncols, self.nrows, self.columns())

    def entry(self, r: int, c: int) -> int:
        return (self.rows[r] >> c) & 1

    def to_lists(self) -> list[list[int]]:
        return [[(row >> c) & 1 for c in range(self.ncols)] for row in self.rows]

    def mul_vec(self, v: int) -> int:
        """``M v`` with ``v`` a column vector packed as an int."""
        out = 0
        for r, row in enumerate(self.rows):
            if parity(row & v):
                out |= 1 << r
        return out

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        out = []
        for row in self.rows:
            acc = 0
            for c in bits(row):
                acc ^= other.rows[c]
            out.append(acc)
        return F2Matrix(self.nrows, other.ncols, tuple(out))

    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return F2Matrix(self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def bitstrings(self) -> list[str]:
        """Rows as strings of 0/1, column 0 first."""
        return ["".join("1" if (row >> c) & 1 else "0" for c in range(self.ncols)) for row in self.rows]

    @classmethod
    def from_bitstrings(cls, rows: Sequence[str], ncols: int) -> "F2Matrix":
        return cls.from_lists([[int(ch) for ch in s] for s in rows], ncols)


def _transpose_bits(vectors: Sequence[int], length: int) -> tuple[int, ...]:
    out = [0] * length
    for c, v in enumerate(vectors):
        bit = 1 << c
        for r in bits(v):
            out[r] |= bit
    return tuple(out)


# --------------------------------------------------------------------------
# elimination
# --------------------------------------------------------------------------

class Echelon:
    """Incrementally maintained echelon basis of a subspace of F2^N.

    Pivots are highest set bits.  Each stored row can carry a ``tag`` bit
    vector recording which inserted vectors it is a combination of, which
    turns reduction into solving.
    """

    __slots__ = ("rows", "tags", "mask")

    def __init__(self):
        self.rows: dict[int, int] = {}
        self.tags: dict[int, int] = {}
        self.mask = 0

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v: int, tag: int = 0) -> tuple[int, int]:
        """Return ``(residue, tag)`` after clearing every pivot bit of ``v``."""
        rows, tags = self.rows, self.tags
        hit = v & self.mask
        while hit:
            p = hit.bit_length() - 1
            v ^= rows[p]
            tag ^= tags[p]
            hit = v & self.mask & ((1 << p) - 1)
        return v, tag

    def add(self, v: int, tag: int = 0) -> bool:
        """Insert ``v``; return False when it was already in the span."""
        v, tag = self.reduce(v, tag)
        if not v:
            return False
        p = v.bit_length() - 1
        self.rows[p] = v
        self.tags[p] = tag
        self.mask |= 1 << p
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0


def rref(m: F2Matrix) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Reduced row echelon form with pivots taken left to right.

    Returns ``(rows, pivot_columns)``; only the nonzero rows are kept.
    """
    work = list(m.rows)
    pivots: list[int] = []
    r = 0
    for c in range(m.ncols):
        bit = 1 << c
        sel = None
        for k in range(r, len(work)):
            if work[k] & bit:
                sel = k
                break
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        pr = work[r]
        for k in range(len(work)):
            if k != r and work[k] & bit:
                work[k] ^= pr
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return tuple(work[:r]), tuple(pivots)


def f2_rank(m: F2Matrix) -> int:
    e = Echelon()
    for row in m.rows:
        e.add(row)
    return len(e)


def f2_kernel_basis(m: F2Matrix) -> list[int]:
    """Canonical basis of ``{v : M v = 0}``, one vector per free column."""
    rows, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivset:
            continue
        v = 1 << free
        for row, p in zip(rows, pivots):
            if (row >> free) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


@dataclass(frozen=True)
class Solution:
    particular: int
    kernel: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.kernel)


def f2_solve(m: F2Matrix, b: int) -> Solution | None:
    """Solve ``M v = b``; None when inconsistent."""
    if b >> m.nrows:
        raise ValueError("right-hand side longer than the row count")
    # augment b as column ncols
    aug = F2Matrix(m.nrows, m.ncols + 1,
                   tuple(row | (((b >> r) & 1) << m.ncols) for r, row in enumerate(m.rows)))
    rows, pivots = rref(aug)
    if pivots and pivots[-1] == m.ncols:
        return None
    part = 0
    for row, p in zip(rows, pivots):
        if (row >> m.ncols) & 1:
            part |= 1 << p
    return Solution(part, tuple(f2_kernel_basis(m)))


class LeftInverse:
    """Solver for repeated systems ``M y = b`` with one fixed injective-ish ``M``.

    ``M`` is given by its columns.  ``solve`` returns ``y`` or None when ``b``
    is not in the column span.
    """

    def __init__(self, columns: Sequence[int]):
        self.ncols = len(columns)
        self._e = Echelon()
        self.rank = 0
        for c, col in enumerate(columns):
            if self._e.add(col, 1 << c):
                self.rank += 1

    @property
    def injective(self) -> bool:
        return self.rank == self.ncols

    def solve(self, b: int) -> int | None:
        residue, y = self._e.reduce(b)
        if residue:
            return None
        return y
