"""Residues, subsets and affine maps of Z_p.

Sets are stored as a dense boolean mask over ``{0, ..., p-1}`` together with
the sorted member array, which gives O(1) membership and cheap linear scans
for the desk-scale moduli this package targets (p up to about 10^5).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np
from sympy import isprime

PRECISIONS = ("float64", "extended")


class ZpError(ValueError):
    """Invalid modulus, residue or set operation."""


@dataclass(frozen=True)
class PrimeContext:
    """An odd prime modulus plus the floating point policy used downstream."""

    p: int
    precision: str = "float64"

    def __post_init__(self):
        p = self.p
        if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
            raise ZpError(f"modulus must be an integer, got {p!r}")
        object.__setattr__(self, "p", int(p))
        if self.p < 3 or self.p % 2 == 0 or not isprime(self.p):
            raise ZpError(f"modulus must be an odd prime >= 3, got {self.p}")
        if self.precision not in PRECISIONS:
            raise ZpError(f"unknown precision policy {self.precision!r}; "
                          f"choose one of {PRECISIONS}")

    @property
    def half(self) -> int:
        """(p - 1) / 2, the largest signed-representative magnitude."""
        return (self.p - 1) // 2

    @property
    def real_dtype(self):
        return np.float64 if self.precision == "float64" else np.longdouble

    @property
    def complex_dtype(self):
        return np.complex128 if self.precision == "float64" else np.clongdouble

    @property
    def unit_roundoff(self) -> float:
        return float(np.finfo(self.real_dtype).eps) / 2


@dataclass(frozen=True, eq=False)
class ZpSet:
    """An immutable subset of Z_p.

    Build one with :meth:`from_iterable`, which reduces every element mod p.
    """

    context: PrimeContext
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != (self.context.p,):
            raise ZpError(f"mask must have length p={self.context.p}")
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)
        members = np.flatnonzero(mask)
        members.flags.writeable = False
        object.__setattr__(self, "_members", members)

    @classmethod
    def from_iterable(cls, ctx: PrimeContext, elements: Iterable[int]) -> "ZpSet":
        mask = np.zeros(ctx.p, dtype=bool)
        idx = np.fromiter((int(e) % ctx.p for e in elements), dtype=np.int64)
        mask[idx] = True
        return cls(ctx, mask)

    @classmethod
    def empty(cls, ctx: PrimeContext) -> "ZpSet":
        return cls(ctx, np.zeros(ctx.p, dtype=bool))

    @classmethod
    def full(cls, ctx: PrimeContext) -> "ZpSet":
        return cls(ctx, np.ones(ctx.p, dtype=bool))

    @property
    def p(self) -> int:
        return self.context.p

    @property
    def members(self) -> np.ndarray:
        """Sorted residues in the set (read-only int64 array)."""
        return self._members

    @property
    def cardinality(self) -> int:
        return int(self._members.size)

    def __len__(self) -> int:
        return self.cardinality

    def __iter__(self) -> Iterator[int]:
        return (int(x) for x in self._members)

    def __contains__(self, x) -> bool:
        return bool(self.mask[int(x) % self.p])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZpSet):
            return NotImplemented
        return self.p == other.p and bool(np.array_equal(self.mask, other.mask))

    def __hash__(self) -> int:
        return hash((self.p, self.mask.tobytes()))

    def __repr__(self) -> str:
        shown = list(self)[:12]
        tail = ", ..." if self.cardinality > 12 else ""
        return f"ZpSet(p={self.p}, {{{', '.join(map(str, shown))}{tail}}})"

    def issubset(self, other: "ZpSet") -> bool:
        _check_same(self, other)
        return not bool(np.any(self.mask & ~other.mask))

    def signed(self) -> np.ndarray:
        """Signed representatives of the members, in (-p/2, p/2), sorted."""
        return np.sort(signed_reps(self._members, self.p))

    def indicator(self, dtype=np.float64) -> np.ndarray:
        return self.mask.astype(dtype)


def _check_same(a: ZpSet, b: ZpSet) -> None:
    if a.p != b.p:
        raise ZpError(f"sets live in different groups (p={a.p} vs p={b.p})")


def signed_reps(x, p: int) -> np.ndarray:
    """Vectorised :func:`min_abs_rep` for arrays of residues."""
    r = np.asarray(x, dtype=np.int64) % p
    return np.where(r > p // 2, r - p, r)


def min_abs_rep(x: int, ctx: PrimeContext) -> int:
    """The representative of ``x`` with minimal absolute value.

    >>> min_abs_rep(5, PrimeContext(7))
    -2
    """
    if not 0 <= x < ctx.p:
        raise ZpError(f"residue {x} outside [0, {ctx.p - 1}]")
    return x - ctx.p if x > ctx.half else x


def affine_dilate(A: ZpSet, q: int, x0: int = 0) -> ZpSet:
    """Return ``q * (A - x0)``; ``q`` must be invertible."""
    p = A.p
    if q % p == 0:
        raise ZpError("dilation by q = 0 mod p is degenerate")
    image = ((A.members - x0) % p) * (q % p) % p
    mask = np.zeros(p, dtype=bool)
    mask[image] = True
    return ZpSet(A.context, mask)


def interval_members(A: ZpSet, n: int) -> ZpSet:
    """Members of ``A`` whose signed representative lies in [-n, n]."""
    if not 0 <= n < A.p / 2:
        raise ZpError(f"interval radius n={n} must satisfy 0 <= n < p/2")
    keep = A.members[np.abs(signed_reps(A.members, A.p)) <= n]
    mask = np.zeros(A.p, dtype=bool)
    mask[keep] = True
    return ZpSet(A.context, mask)


def complement(A: ZpSet) -> ZpSet:
    return ZpSet(A.context, ~A.mask)


def interval(ctx: PrimeContext, start: int, length: int) -> ZpSet:
    """The arithmetic progression ``{start, start+1, ..., start+length-1}``."""
    return ZpSet.from_iterable(ctx, range(start, start + length))


def parse_set_literal(text: str) -> list[int]:
    """Parse ``"0,1,4"`` (whitespace tolerated) into a list of integers."""
    items = [t for t in text.replace(" ", "").split(",") if t]
    try:
        return [int(t) for t in items]
    except ValueError as exc:
        raise ZpError(f"bad set literal {text!r}: {exc}") from None


def read_set_file(path) -> list[int]:
    """One integer per line; blank lines and ``#`` comments are skipped."""
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise ZpError(f"{path}:{lineno}: not an integer: {line!r}") from None
    return values
