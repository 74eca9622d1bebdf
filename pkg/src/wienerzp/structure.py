"""Generalised arithmetic progressions and dilation search in Z_p.

The lattice-point argument that guarantees a good dilate is replaced by an
exhaustive scan over ``q in Z_p^*``, which at desk scale is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .zp_core import PrimeContext, ZpError, ZpSet, affine_dilate, signed_reps

GAP_ENUM_CAP = 10**7


@dataclass(frozen=True)
class GapDescriptor:
    """``P(x0; x; w) = {x0 + sum_i v_i x_i : 0 <= v_i < w_i}``."""

    x0: int
    generators: tuple[int, ...]
    widths: tuple[int, ...]

    def __post_init__(self):
        gens = tuple(int(g) for g in self.generators)
        widths = tuple(int(w) for w in self.widths)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "x0", int(self.x0))
        if not gens or len(gens) != len(widths):
            raise ZpError("a GAP needs d >= 1 generators and as many widths")
        if any(w < 1 for w in widths):
            raise ZpError(f"widths must be positive, got {widths}")

    @property
    def d(self) -> int:
        return len(self.generators)

    @property
    def size(self) -> int:
        return math.prod(self.widths)

    def check(self, ctx: PrimeContext) -> None:
        if any(g % ctx.p == 0 for g in self.generators):
            raise ZpError("GAP generators must be nonzero mod p")

    @classmethod
    def parse(cls, text: str) -> "GapDescriptor":
        """Parse the literal ``"x0; x1,...,xd; w1,...,wd"``."""
        parts = [s.strip() for s in text.split(";")]
        if len(parts) != 3:
            raise ZpError(f"GAP literal must look like 'x0; x1,..,xd; w1,..,wd', got {text!r}")
        try:
            x0 = int(parts[0])
            gens = tuple(int(t) for t in parts[1].split(",") if t.strip())
            widths = tuple(int(t) for t in parts[2].split(",") if t.strip())
        except ValueError as exc:
            raise ZpError(f"bad GAP literal {text!r}: {exc}") from None
        return cls(x0, gens, widths)

    def to_json(self) -> dict:
        return {"x0": self.x0, "generators": list(self.generators),
                "widths": list(self.widths), "d": self.d, "size": self.size}


def gap_enumerate(P: GapDescriptor, ctx: PrimeContext) -> ZpSet:
    """All elements of the GAP reduced mod p (collisions merge)."""
    P.check(ctx)
    if P.size > GAP_ENUM_CAP:
        raise ZpError(f"GAP size {P.size} exceeds enumeration cap {GAP_ENUM_CAP}")
    elems = np.array([P.x0 % ctx.p], dtype=np.int64)
    for g, w in zip(P.generators, P.widths):
        steps = (np.arange(w, dtype=np.int64) * (g % ctx.p)) % ctx.p
        elems = (elems[:, None] + steps[None, :]).ravel() % ctx.p
    return ZpSet.from_iterable(ctx, elems)


def gap_is_proper(P: GapDescriptor, ctx: PrimeContext) -> bool:
    return gap_enumerate(P, ctx).cardinality == P.size


@dataclass(frozen=True)
class DilateWitness:
    q: int
    achieved: tuple[int, ...]
    targets: tuple[int, ...]

    def to_json(self) -> dict:
        return {"q": self.q, "achieved": list(self.achieved), "targets": list(self.targets)}


def find_dilate(ctx: PrimeContext, generators: Sequence[int],
                targets: Sequence[int]) -> Optional[DilateWitness]:
    """Smallest ``q`` in 1..p-1 with ``|q x_i| <= t_i`` for every i, else None."""
    gens = [int(g) % ctx.p for g in generators]
    targets = [int(t) for t in targets]
    if len(gens) != len(targets) or not gens:
        raise ZpError("need equally many (>= 1) generators and targets")
    if any(g == 0 for g in gens):
        raise ZpError("generators must be nonzero mod p")
    if any(t < 1 or 2 * t >= ctx.p for t in targets):
        raise ZpError(f"targets must satisfy 1 <= t < p/2, got {targets}")
    q = np.arange(1, ctx.p, dtype=np.int64)
    ok = np.ones(q.size, dtype=bool)
    for g, t in zip(gens, targets):
        ok &= np.abs(signed_reps(q * g, ctx.p)) <= t
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    best = int(q[hits[0]])
    achieved = tuple(abs(int(signed_reps(best * g, ctx.p))) for g in gens)
    return DilateWitness(best, achieved, tuple(targets))


@dataclass(frozen=True)
class BlichfeldtParams:
    alphas: tuple[float, ...]
    targets: tuple[int, ...]
    m: int
    degenerate: bool

    def to_json(self) -> dict:
        return {"alphas": list(self.alphas), "targets": list(self.targets),
                "m": self.m, "degenerate": self.degenerate}


def window_scale(A_size: int, p: int, d_eps: float) -> int:
    """``floor(d p (|A|/p)^(1/d))``, the localisation window radius."""
    if d_eps <= 0:
        return 0
    return math.floor(d_eps * p * (A_size / p) ** (1 / d_eps))


def blichfeldt_params(A_size: int, ctx: PrimeContext, P: GapDescriptor,
                      d_eps: float) -> BlichfeldtParams:
    """Box sides ``alpha_i = (|A|/p)^(1/d) / w_i`` and the window radius m."""
    if not 1 <= A_size <= ctx.p:
        raise ZpError(f"need 1 <= |A| <= p, got {A_size}")
    if d_eps <= 0:
        raise ZpError(f"d_eps must be positive, got {d_eps}")
    root = (A_size / ctx.p) ** (1 / P.d)
    alphas = tuple(root / w for w in P.widths)
    # guard floor() against p * alpha landing just below an integer
    targets = tuple(math.floor(ctx.p * a * (1 + 1e-12)) for a in alphas)
    m = window_scale(A_size, ctx.p, d_eps)
    return BlichfeldtParams(alphas, targets, m, m == 0)


@dataclass
class Localization:
    x0: int
    q: int
    B: ZpSet
    captured: int
    search_space: str

    def to_json(self) -> dict:
        return {"x0": self.x0, "q": self.q, "captured": self.captured,
                "search_space": self.search_space}


def _best_window_counts(A: ZpSet, m: int, qs: np.ndarray) -> np.ndarray:
    """For each q, the most points of ``qA`` in any window of 2m+1 residues."""
    p = A.p
    n = A.cardinality
    out = np.empty(qs.size, dtype=np.int64)
    rows = max(1, (1 << 20) // max(n, 1))
    for start in range(0, qs.size, rows):
        q = qs[start:start + rows]
        vals = np.sort((q[:, None] * A.members[None, :]) % p, axis=1)
        ext = np.concatenate([vals, vals + p], axis=1)
        # windows anchored at a point; every optimum is attained by one of them
        shift = (np.arange(q.size, dtype=np.int64) * 3 * p)[:, None]
        pos = np.searchsorted((ext + shift).ravel(), (vals + 2 * m + shift).ravel(),
                              side="right").reshape(vals.shape)
        counts = pos - (np.arange(q.size)[:, None] * 2 * n + np.arange(n)[None, :])
        out[start:start + q.size] = counts.max(axis=1)
    return out


def _run_midpoint(good: np.ndarray) -> int:
    """Midpoint of the cyclic run of True entries containing the first True."""
    p = good.size
    first = int(np.argmax(good))
    if good.all():
        return 0
    start = first
    if first == 0:
        # the run may wrap around from the end of the array
        start = p - int(np.argmax(~good[::-1])) if good[-1] else 0
    end = first + int(np.argmax(~np.roll(good, -first)))
    length = (end - start) % p if start > end else end - start
    return (start + (length - 1) // 2) % p


def localize(A: ZpSet, m: int) -> Localization:
    """Best ``q, x0`` maximising ``|q (A - x0) cap [-m, m]|``.

    Every q in Z_p^* and every x0 in Z_p is covered exactly: for each q the
    maximal window count is found by a sliding window over the sorted
    dilate.  Ties go to the smallest q; x0 is the midpoint of the run of
    optimal centres containing the smallest optimal residue, so a captured
    progression ends up centred at 0.
    """
    p = A.p
    if not 1 <= m < p / 2:
        raise ZpError(f"window radius needs 1 <= m < p/2, got m={m}")
    if A.cardinality == 0:
        raise ZpError("cannot localize the empty set")
    qs = np.arange(1, p, dtype=np.int64)
    counts = _best_window_counts(A, m, qs)
    best_i = int(np.argmax(counts))
    q = int(qs[best_i])
    captured = int(counts[best_i])

    # exact per-center counts for the winning q, to pick the smallest x0
    mask = affine_dilate(A, q, 0).mask.astype(np.int64)
    cyc = np.concatenate([mask, mask, mask])
    csum = np.concatenate([[0], np.cumsum(cyc)])
    centers = np.arange(p)
    window = csum[centers + p + m + 1] - csum[centers + p - m]
    good = window == captured
    q_inv = pow(q, -1, p)
    x0 = (_run_midpoint(good) * q_inv) % p
    B = affine_dilate(A, q, x0)
    return Localization(x0, q, B, captured,
                        "all q in Z_p^*, all x0 in Z_p (exact)")


def ap_scan(A: ZpSet) -> tuple[GapDescriptor, int]:
    """Heuristic one-dimensional GAP cover of A.

    Scans every difference ``x`` in Z_p^* and returns the AP of length |A|
    with that difference meeting A most, together with ``|A cap P|``.
    Offers no guarantee comparable to a Freiman-type structure theorem.
    """
    p, n = A.p, A.cardinality
    if n == 0:
        raise ZpError("cannot scan the empty set")
    best = (0, 1, 1, 0)   # (count, x, w, x0)
    for x in range(1, p):
        q = pow(x, -1, p)
        vals = np.sort((A.members * q) % p)
        ext = np.concatenate([vals, vals + p])
        # window [v, v + n - 1] in q-coordinates is an AP of length n with step x
        ends = np.searchsorted(ext, vals + n - 1, side="right") - np.arange(n)
        i = int(np.argmax(ends))
        if ends[i] > best[0]:
            best = (int(ends[i]), x, n, int(vals[i]) * x % p)
    count, x, w, x0 = best
    return GapDescriptor(x0, (x,), (min(w, p),)), count
