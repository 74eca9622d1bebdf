"""Scattered sets, their energy bounds, and an instrumented proof trace.

A scattered family is a union of M-element blocks Q_i, each lying in the
4-adic annulus ``4^i m / 2 < |b| <= 4^i m``.  For such sets

    T_k(Q) <= 2^(8k) k^k I^k M^(2k-1)     and     N_k(x) <= 2^(6k) k^k M^(k-1),

and both are checked here against exact counts.  :func:`trace_theorem3`
runs the medium-size lower-bound argument end to end on a concrete set and
records every parameter and every inequality it meets.  At desk scale the
argument usually degenerates (M = 0); the trail is the product, not a
verdict.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .dlvp import shell_concentration_check
from .energy import EnergyBudgetError, nk_profile, t_k, t_k_lower_bound_check
from .spectral import wiener_norm
from .structure import ap_scan, localize, window_scale
from .zp_core import ZpError, ZpSet, interval_members

BRANCHES = ("sparse_shell", "scattered", "degenerate")


class SparseShellError(ZpError):
    """A shell has fewer than M new points, so no scattered family exists."""

    def __init__(self, level: int, size: int, M: int):
        super().__init__(f"shell l={level} has {size} new points, fewer than M={M}")
        self.level = level
        self.size = size
        self.M = M


@dataclass(frozen=True)
class ScatteredFamily:
    m: int
    M: int
    indices: tuple[int, ...]
    blocks: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        object.__setattr__(self, "blocks",
                           tuple(frozenset(int(b) for b in blk) for blk in self.blocks))

    @property
    def I(self) -> int:  # noqa: E743
        return len(self.indices)

    def union(self) -> set[int]:
        out: set[int] = set()
        for blk in self.blocks:
            out |= blk
        return out

    def to_json(self) -> dict:
        return {"m": self.m, "M": self.M, "indices": list(self.indices),
                "blocks": [sorted(b) for b in self.blocks]}


def in_shell(b: int, i: int, m: int) -> bool:
    """``b in [-4^i m, -4^i m / 2) cup (4^i m / 2, 4^i m]``, exactly."""
    r = 4**i * m
    return 2 * abs(b) > r and abs(b) <= r


def validate_scattered(F: ScatteredFamily) -> tuple[bool, list[str]]:
    violations = []
    if F.m < 1:
        violations.append(f"scale m={F.m} must be positive")
    if F.M < 1:
        violations.append(f"block size M={F.M} must be positive")
    if len(F.indices) != len(F.blocks):
        violations.append("indices and blocks differ in length")
    if any(i < 1 for i in F.indices):
        violations.append("indices must be positive")
    if any(b <= a for a, b in zip(F.indices, F.indices[1:])):
        violations.append("indices must be strictly increasing")
    for i, blk in zip(F.indices, F.blocks):
        if len(blk) != F.M:
            violations.append(f"block {i} has {len(blk)} elements, expected M={F.M}")
        bad = sorted(b for b in blk if not in_shell(b, i, F.m))
        if bad:
            violations.append(f"block {i} has elements outside its shell: {bad}")
    seen: set[int] = set()
    for i, blk in zip(F.indices, F.blocks):
        if seen & blk:
            violations.append(f"block {i} overlaps an earlier block")
        seen |= blk
    return not violations, violations


def random_family(rng, I_max: int = 6, M_max: int = 4, m_max: int = 4,
                  max_index: int = 8) -> ScatteredFamily:
    """A random valid family; block i is drawn uniformly from its annulus."""
    m = int(rng.integers(1, m_max + 1))
    M = int(rng.integers(1, M_max + 1))
    I = int(rng.integers(1, I_max + 1))  # noqa: E741
    indices = sorted(int(i) for i in rng.choice(np.arange(1, max_index + 1), size=I, replace=False))
    blocks = []
    for i in indices:
        r = 4**i * m
        # r/2 < |b| <= r on either side: 2 * (r - r//2) candidates, at least 4
        mags = np.arange(r // 2 + 1, r + 1)
        ring = np.concatenate([mags, -mags])
        blocks.append(frozenset(int(b) for b in rng.choice(ring, size=M, replace=False)))
    return ScatteredFamily(m, M, tuple(indices), tuple(blocks))


def scattered_tk_bound(I: int, M: int, k: int) -> int:  # noqa: E741
    """``2^(8k) k^k I^k M^(2k-1)``."""
    if min(I, M, k) < 1:
        raise ValueError("I, M and k must be positive")
    return 2 ** (8 * k) * k**k * I**k * M ** (2 * k - 1)


def nk_uniform_bound(M: int, k: int) -> int:
    """``2^(6k) k^k M^(k-1)``."""
    if min(M, k) < 1:
        raise ValueError("M and k must be positive")
    return 2 ** (6 * k) * k**k * M ** (k - 1)


def _require_valid(F: ScatteredFamily) -> None:
    ok, violations = validate_scattered(F)
    if not ok:
        raise ZpError("invalid scattered family: " + "; ".join(violations))


def verify_scattered_bound(F: ScatteredFamily, k: int) -> dict:
    _require_valid(F)
    exact = t_k(F.union(), k)
    bound = scattered_tk_bound(F.I, F.M, k)
    return {"t_k_exact": exact, "bound": bound,
            "slack_ratio": Fraction(bound, exact), "holds": exact <= bound}


def verify_nk_uniform(F: ScatteredFamily, k: int) -> dict:
    _require_valid(F)
    max_nk = nk_profile(F.union(), k).max_nk
    bound = nk_uniform_bound(F.M, k)
    return {"max_nk": max_nk, "bound": bound, "holds": max_nk <= bound}


@dataclass
class ShellDecomposition:
    m: int
    l_0: int
    shells: list[ZpSet] = field(repr=False)
    deltas: list[int]
    degenerate: bool

    @property
    def sizes(self) -> list[int]:
        return [s.cardinality for s in self.shells]


def max_shell_level(p: int, m: int) -> int:
    """Largest l >= 1 with ``2^l m < p/3``, or 0 when there is none."""
    if m < 1:
        return 0
    level = 0
    while 3 * 2 ** (level + 1) * m < p:
        level += 1
    return level


def shell_decomposition(B: ZpSet, m: int) -> ShellDecomposition:
    """Nested windows ``D_l = B cap [-2^l m, 2^l m]`` for 0 <= l <= l_0.

    ``deltas[l-1] = |D_l \\ D_(l-1)|`` for l = 1..l_0.  When no l >= 1 fits
    below p/3 the decomposition is flagged degenerate with l_0 = 0.
    """
    l_0 = max_shell_level(B.p, m)
    if l_0 == 0:
        shells = [interval_members(B, m)] if 1 <= m < B.p / 2 else []
        return ShellDecomposition(m, 0, shells, [], True)
    shells = [interval_members(B, 2**l * m) for l in range(l_0 + 1)]
    deltas = [shells[l].cardinality - shells[l - 1].cardinality for l in range(1, l_0 + 1)]
    return ShellDecomposition(m, l_0, shells, deltas, False)


def extract_scattered(shells: ShellDecomposition, M: int) -> ScatteredFamily:
    """Take the M smallest points of each even shell ``D_l \\ D_(l-1)``.

    Shell l becomes block i = l/2 at scale m, since ``2^(l-1) m < |b| <= 2^l m``
    is exactly the annulus condition with ``4^i = 2^l``.
    """
    if shells.degenerate:
        raise ZpError("shell decomposition is degenerate")
    if M < 1:
        raise ZpError(f"block size M must be positive, got {M}")
    indices, blocks = [], []
    for l in range(2, shells.l_0 + 1, 2):
        new = shells.shells[l].mask & ~shells.shells[l - 1].mask
        ring = ZpSet(shells.shells[l].context, new).signed()
        if ring.size < M:
            raise SparseShellError(l, int(ring.size), M)
        chosen = sorted((int(b) for b in ring), key=lambda b: (abs(b), b))[:M]
        indices.append(l // 2)
        blocks.append(frozenset(chosen))
    return ScatteredFamily(shells.m, M, tuple(indices), tuple(blocks))


@dataclass
class TraceReport:
    p: int
    set_size: int
    K: float
    K_err: float
    eps: float
    C: float
    d_eps: float
    eta: float
    M: int
    m: int
    l_0: int
    I: int
    k: Optional[int]
    branch: str
    localization: Optional[dict]
    ap_cover: Optional[dict]
    shell_sizes: list[int]
    deltas: list[int]
    inequalities: dict
    verdict: str

    def to_json(self) -> dict:
        out = asdict(self)
        out["schema"] = "v1"
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _pair(lhs, rhs, holds: Optional[bool] = None, note: str = "") -> dict:
    out = {"lhs": str(lhs) if isinstance(lhs, int) else lhs,
           "rhs": str(rhs) if isinstance(rhs, int) else rhs}
    if holds is not None:
        out["holds"] = bool(holds)
    if note:
        out["note"] = note
    return out


def trace_theorem3(A: ZpSet, eps: float = 0.1, C: float = 1.0,
                   k_override: Optional[int] = None,
                   cell_cap: int = 10**7) -> TraceReport:
    """Run the medium-size argument on A and record everything it computes.

    Pipeline: K = ||chi_A||_A, d = (ln K)^(3+eps), window radius
    m = floor(d p (|A|/p)^(1/d)), eta = exp(-C K), M = floor(eta |A| e^-d);
    localise A into [-m, m]; split the image into shells D_l; either some
    shell is sparse (fewer than M new points), or even shells yield a
    scattered family Q whose T_k is squeezed between the lower bound from
    the Wiener norm and the scattered upper bound.
    """
    p, n = A.p, A.cardinality
    if n == 0:
        raise ZpError("A must be nonempty")
    if 3 * n > p:
        raise ZpError(f"need |A| <= p/3, got |A|={n}, p={p}")
    if eps <= 0 or C <= 0:
        raise ZpError("eps and C must be positive")
    if k_override is not None and k_override < 1:
        raise ZpError("k_override must be a positive integer")

    K, K_err = wiener_norm(A)
    d_eps = math.log(K) ** (3 + eps) if K > 1 else 0.0
    eta = math.exp(-C * K)
    M = math.floor(eta * n * math.exp(-d_eps))
    m = window_scale(n, p, d_eps)
    l_0 = max_shell_level(p, m)
    ineq: dict = {"trivial": _pair(K + K_err, 1.0, K + K_err >= 1)}

    gap, covered = ap_scan(A)
    ap_cover = {"gap": gap.to_json(), "covered": covered,
                "fraction": covered / n, "target_fraction": math.exp(-d_eps)}

    loc = None
    B = None
    if 1 <= m < p / 2:
        found = localize(A, m)
        B = found.B
        loc = found.to_json()
        target = n * math.exp(-d_eps)
        ineq["localization"] = _pair(found.captured, target, found.captured >= target,
                                     "|B cap [-m,m]| vs |A| e^-d")

    shells = shell_decomposition(B, m) if B is not None else None
    shell_sizes = shells.sizes if shells else []
    deltas = shells.deltas if shells else []

    def report(branch, I, k, verdict):
        return TraceReport(p=p, set_size=n, K=K, K_err=K_err, eps=eps, C=C,
                           d_eps=d_eps, eta=eta, M=M, m=m, l_0=l_0, I=I, k=k,
                           branch=branch, localization=loc, ap_cover=ap_cover,
                           shell_sizes=shell_sizes, deltas=deltas,
                           inequalities=ineq, verdict=verdict)

    if M == 0 or l_0 < 2:
        why = []
        if M == 0:
            why.append(f"M = floor(eta |A| e^-d) = 0")
        if l_0 < 2:
            why.append(f"l_0 = {l_0} < 2 (m = {m})")
        return report("degenerate", 0, None,
                      "degenerate at this scale: " + "; ".join(why))

    sparse = [l for l, dl in enumerate(deltas, 1) if dl < M]
    if sparse:
        level = sparse[0]
        radius = 2 ** (level - 1) * m
        if 0.0 < eta < 0.5:
            check = shell_concentration_check(B, radius, eta)
            ineq["shell_concentration"] = {
                "level": level, "n": radius, "applicable": check["applicable"],
                "bound": check["bound"], "measured_norm": check["measured_norm"],
                "window_l1": check["window_l1"],
                "ratio": check["measured_norm"] / check["bound"] if check["bound"] else None,
            }
        else:
            ineq["shell_concentration"] = {"level": level, "n": radius,
                                           "applicable": False,
                                           "note": "eta outside (0, 1/2)"}
        d0 = shell_sizes[0]
        ineq["log_inverse_eta_vs_log_D0"] = _pair(math.log(1 / eta),
                                                  math.log(d0) if d0 else -math.inf)
        return report("sparse_shell", 0, None,
                      f"shell l={level} has {deltas[level - 1]} < M={M} new points; "
                      "norm compared with min(log 1/eta, log|D|)")

    family = extract_scattered(shells, M)
    I = family.I  # noqa: E741
    k = k_override if k_override is not None else max(1, math.floor(K))
    Q_int = family.union()
    size_q = len(Q_int)
    K_up = K + K_err
    try:
        t_int = t_k(Q_int, k, cell_cap=cell_cap)
        Q_res = ZpSet.from_iterable(A.context, Q_int)
        lower = t_k_lower_bound_check(B, Q_res, k, K=K_up)
    except EnergyBudgetError as exc:
        return report("scattered", I, k, f"partial: T_k budget exhausted ({exc})")

    upper = scattered_tk_bound(I, M, k)
    ineq["scattered_upper"] = _pair(t_int, upper, t_int <= upper,
                                    "integer T_k(Q) vs 2^8k k^k I^k M^(2k-1)")
    ineq["wiener_lower"] = _pair(lower.lhs, lower.rhs, lower.holds,
                                 "T_k(Q) in Z_p vs |Q|^2k / (|A| K^(2k-2))")
    # T_k over Z_p can exceed T_k over Z once k-fold sums wrap around
    ineq["scattered_upper_residue"] = _pair(lower.lhs, upper, lower.lhs <= upper,
                                            "T_k(Q) in Z_p vs the same upper bound")
    lhs = Fraction(size_q, n) * I ** (k - 1)
    combined = 2 ** (8 * k) * k**k * K_up ** (2 * k - 2)
    ineq["combined"] = _pair(float(lhs), combined, float(lhs) <= combined,
                             "(|Q|/|A|) I^(k-1) vs 2^8k k^k K^(2k-2)")
    final = K_up ** (3 * k - 2) * 2 ** (8 * k)
    ineq["final"] = _pair(float(lhs), final, float(lhs) <= final,
                          "(|Q|/|A|) I^(k-1) vs K^(3k-2) 2^8k")
    ineq["I_vs_K_cubed"] = _pair(I, K_up**3, None, "leading-order I << K^3, constant unknown")
    return report("scattered", I, k,
                  f"scattered family with I={I} blocks of M={M}; "
                  f"final inequality {'holds' if ineq['final']['holds'] else 'fails'}")
