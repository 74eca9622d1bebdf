"""Leading-order theorem bounds, AP norm profiles and extremal-set search.

Every bound is evaluated with its implicit constant set to 1 and any o(1)
exponent set to 0.  They are reference curves for ratio reports, never
pass/fail thresholds.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .spectral import value_error_bound, wiener_norm, wiener_norms_batch
from .zp_core import PrimeContext, ZpError, ZpSet, interval

THEOREMS = ("char_large", "char_small_density", "charsmall", "mediumsize",
            "trivial", "conjecture")
STRATEGIES = ("exhaustive", "local_search")
EXHAUSTIVE_CAP = 10**7

# annealing schedule for local_search
T0 = 0.5
COOLING = 0.995
SWEEPS_PER_RESTART = 100


@dataclass
class BoundEvaluation:
    theorem: str
    p: int
    n: int
    value: float
    regime_ok: bool
    label: str = "leading-order"

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "p": self.p, "n": self.n,
                "value": self.value, "regime_ok": self.regime_ok, "label": self.label}


def small_size_limit(p: int) -> float:
    """``exp((ln p / lnln p)^(1/3))``: boundary between small and medium sets."""
    return math.exp((math.log(p) / math.log(math.log(p))) ** (1 / 3))


def density_threshold(p: int) -> float:
    """``(ln p)^(-1/4) (lnln p)^(1/2)``."""
    return math.log(p) ** -0.25 * math.log(math.log(p)) ** 0.5


def eval_bound(theorem: str, p: int, n: int) -> BoundEvaluation:
    """Evaluate one lower bound for a set of size n in Z_p.

    ``value`` is NaN where the displayed expression is undefined (for
    instance a logarithm of a non-positive number outside the regime).
    """
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {THEOREMS}")
    if p < 11:
        raise ZpError("bounds use lnln p and need p >= 11")
    if not 1 <= n < p:
        raise ZpError(f"need 1 <= n < p, got n={n}")
    L, LL = math.log(p), math.log(math.log(p))
    density = n / p
    nan = math.nan

    if theorem == "trivial":
        return BoundEvaluation(theorem, p, n, 1.0, True)
    if theorem == "conjecture":
        return BoundEvaluation(theorem, p, n, math.log(n), 2 <= n < p / 2)
    if theorem == "charsmall":
        return BoundEvaluation(theorem, p, n, math.log(n), 2 <= n <= small_size_limit(p))
    if theorem == "mediumsize":
        ratio = p / n
        value = (math.log(ratio) ** (1 / 3) / math.log(math.log(ratio))
                 if ratio > math.e else nan)
        ok = small_size_limit(p) <= n <= p / 3
        return BoundEvaluation(theorem, p, n, value, ok)

    thr = density_threshold(p)
    in_range = 0 < density < 0.5
    if theorem == "char_large":
        inner = 1 + math.log(density**2 * L**0.5 / LL)
        value = (L**0.5 / LL * density**1.5 * inner**-0.5) if inner > 0 else nan
        return BoundEvaluation(theorem, p, n, value, in_range and density >= thr)
    value = density**0.5 * L**0.25 * LL**-0.5
    return BoundEvaluation(theorem, p, n, value, in_range and density < thr)


@dataclass
class ProfileRow:
    n: int
    norm: float
    err_bound: float
    ratio: float
    in_range: bool


def ap_norm_profile(p: int, lengths, precision: str = "float64") -> list[ProfileRow]:
    """Wiener norm of ``{0, ..., n-1}`` and ``norm / ln n`` for each length.

    Lengths outside ``2 <= n < p/2`` are still evaluated but flagged
    ``in_range=False``; n = 1 gets ratio NaN.
    """
    ctx = PrimeContext(p, precision)
    rows = []
    for n in lengths:
        n = int(n)
        if not 1 <= n < p:
            raise ZpError(f"AP length must satisfy 1 <= n < p, got {n}")
        norm, err = wiener_norm(interval(ctx, 0, n))
        ratio = norm / math.log(n) if n > 1 else math.nan
        rows.append(ProfileRow(n, norm, err, ratio, 2 <= n < p / 2))
    return rows


@dataclass
class SearchResult:
    p: int
    n: int
    strategy: str
    seed: Optional[int]
    best_set: tuple[int, ...]
    best_norm: float
    err_bound: float
    evaluations: int
    budget_exhausted: bool
    bound_comparisons: dict = field(default_factory=dict)

    def csv_row(self) -> dict:
        bc = self.bound_comparisons
        return {
            "p": self.p, "n": self.n, "strategy": self.strategy,
            "best_norm": repr(self.best_norm), "err_bound": repr(self.err_bound),
            "bound_mediumsize": _fmt(bc.get("mediumsize", {}).get("value")),
            "bound_charsmall": _fmt(bc.get("charsmall", {}).get("value")),
            "bound_conjecture": _fmt(bc.get("conjecture", {}).get("value")),
            "ratio_mediumsize": _fmt(bc.get("mediumsize", {}).get("ratio")),
            "ratio_charsmall": _fmt(bc.get("charsmall", {}).get("ratio")),
            "ratio_conjecture": _fmt(bc.get("conjecture", {}).get("ratio")),
            "evaluations": self.evaluations,
            "budget_exhausted": int(self.budget_exhausted),
            "best_set": " ".join(map(str, self.best_set)),
        }

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "strategy": self.strategy, "seed": self.seed,
                "best_set": list(self.best_set), "best_norm": self.best_norm,
                "err_bound": self.err_bound, "evaluations": self.evaluations,
                "budget_exhausted": self.budget_exhausted,
                "bound_comparisons": self.bound_comparisons}


CSV_FIELDS = ["p", "n", "strategy", "best_norm", "err_bound", "bound_mediumsize",
              "bound_charsmall", "bound_conjecture", "ratio_mediumsize",
              "ratio_charsmall", "ratio_conjecture", "evaluations",
              "budget_exhausted", "best_set"]


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def results_to_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def bound_comparisons(p: int, n: int, norm: float) -> dict:
    if p < 11:
        return {}
    out = {}
    for name in THEOREMS:
        ev = eval_bound(name, p, n)
        ratio = norm / ev.value if ev.value and not math.isnan(ev.value) else math.nan
        out[name] = {"value": ev.value, "regime_ok": ev.regime_ok, "ratio": ratio}
    return out


def _candidate_rows(p: int, n: int, reduce_orbits: bool):
    """Yield index tuples of the subsets to score, lexicographically."""
    if reduce_orbits and n >= 2:
        # every affine orbit meets the family of sets containing 0 and 1
        for rest in itertools.combinations(range(2, p), n - 2):
            yield (0, 1) + rest
    elif reduce_orbits and n == 1:
        yield (0,)
    else:
        yield from itertools.combinations(range(p), n)


def _exhaustive(ctx: PrimeContext, n: int, budget: int, reduce_orbits: bool,
                threads: int, chunk: int = 1 << 14):
    p = ctx.p
    gen = _candidate_rows(p, n, reduce_orbits)
    best_norm, best_set, evaluated, exhausted = math.inf, None, 0, False

    def score(rows):
        idx = np.array(rows, dtype=np.int64)
        masks = np.zeros((idx.shape[0], p))
        np.put_along_axis(masks, idx, 1.0, axis=1)
        return rows, wiener_norms_batch(masks, ctx)

    def chunks():
        nonlocal evaluated, exhausted
        while True:
            take = min(chunk, budget - evaluated)
            if take <= 0:
                exhausted = next(gen, None) is not None
                return
            rows = list(itertools.islice(gen, take))
            if not rows:
                return
            evaluated += len(rows)
            yield rows

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        # map preserves order, so the merge below is schedule independent
        for rows, norms in pool.map(score, chunks()):
            # first index within rounding of the chunk minimum, so ties go to
            # the lexicographically first set
            i = int(np.flatnonzero(norms <= norms.min() + 1e-12)[0])
            if norms[i] < best_norm - 1e-12:
                best_norm, best_set = float(norms[i]), tuple(rows[i])
    return best_set, best_norm, evaluated, exhausted


def _local_search(ctx: PrimeContext, n: int, seed: int, budget: int):
    p = ctx.p
    rng = np.random.default_rng(seed)
    cache: dict[bytes, float] = {}
    evaluated = 0

    def norm_of(mask):
        nonlocal evaluated
        evaluated += 1
        key = np.packbits(mask).tobytes()
        if key not in cache:
            cache[key] = float(np.abs(np.fft.ifft(mask.astype(np.float64))).sum())
        return cache[key]

    best_norm, best_set = math.inf, None
    steps_per_restart = SWEEPS_PER_RESTART * n
    while evaluated < budget:
        mask = np.zeros(p, dtype=bool)
        mask[rng.choice(p, size=n, replace=False)] = True
        cur = norm_of(mask)
        temp = T0
        for step in range(steps_per_restart):
            if n == p or evaluated >= budget:
                break
            out_el = rng.choice(np.flatnonzero(mask))
            in_el = rng.choice(np.flatnonzero(~mask))
            mask[out_el], mask[in_el] = False, True
            new = norm_of(mask)
            if new <= cur or rng.random() < math.exp(-(new - cur) / temp):
                cur = new
            else:
                mask[out_el], mask[in_el] = True, False
            cand = tuple(int(x) for x in np.flatnonzero(mask))
            if cur < best_norm - 1e-12 or (abs(cur - best_norm) <= 1e-12 and cand < best_set):
                best_norm, best_set = cur, cand
            if (step + 1) % n == 0:
                temp *= COOLING
        if cur < best_norm - 1e-12 or best_set is None:
            best_norm, best_set = cur, tuple(int(x) for x in np.flatnonzero(mask))
        if n == p:
            break
    return best_set, best_norm, evaluated, True


def extremal_search(p: int, n: int, strategy: str = "exhaustive", seed: int = 0,
                    budget: int = EXHAUSTIVE_CAP, reduce_orbits: bool = False,
                    threads: int = 1) -> SearchResult:
    """Minimise the Wiener norm over all n-element subsets of Z_p.

    ``exhaustive`` scores every subset (or, with ``reduce_orbits``, only
    sets containing {0, 1}, which meet every affine orbit) and is exact
    unless the budget runs out.  ``local_search`` is simulated annealing on
    single-element swaps with geometric cooling, restarted until the budget
    of norm queries is used; it is deterministic for a seed.
    """
    ctx = PrimeContext(p)
    if not 1 <= n < p:
        raise ZpError(f"need 1 <= n < p, got n={n}, p={p}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    if budget < 1:
        raise ValueError("budget must be positive")
    if strategy == "exhaustive":
        if math.comb(p, n) > EXHAUSTIVE_CAP:
            raise ZpError(f"C({p},{n}) = {math.comb(p, n)} exceeds the exhaustive cap "
                          f"{EXHAUSTIVE_CAP}; use local_search")
        best_set, best_norm, evaluated, exhausted = _exhaustive(
            ctx, n, budget, reduce_orbits, threads)
    else:
        best_set, best_norm, evaluated, exhausted = _local_search(ctx, n, seed, budget)
    err = p * value_error_bound(ctx, 1.0)
    return SearchResult(p, n, strategy, seed if strategy == "local_search" else None,
                        best_set, best_norm, err, evaluated, exhausted,
                        bound_comparisons(p, n, best_norm))


def exact_norm(best_set, p: int) -> float:
    """Re-score a set with the reference path (used to audit search output)."""
    return wiener_norm(ZpSet.from_iterable(PrimeContext(p), best_set), method="direct").norm
