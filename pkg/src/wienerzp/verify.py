"""Randomised suites for the proved inequalities and exact identities.

Each suite returns a :class:`SuiteResult`.  A failure in any of them means
an implementation bug, since every checked statement is a theorem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import dlvp, energy, scattered, spectral, structure
from .zp_core import PrimeContext, ZpSet, affine_dilate, complement

REL_TOL = 1e-9


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    passed: int = 0
    failed: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, detail: Optional[dict] = None) -> None:
        self.trials += 1
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.violations) < 20:
                self.violations.append(detail or {})

    def to_json(self) -> dict:
        return {"suite": self.name, "trials": self.trials, "passed": self.passed,
                "failed": self.failed, "ok": self.ok, "violations": self.violations}


def random_set(rng: np.random.Generator, ctx: PrimeContext, size: Optional[int] = None) -> ZpSet:
    if size is None:
        size = int(rng.integers(1, ctx.p))
    return ZpSet.from_iterable(ctx, rng.choice(ctx.p, size=size, replace=False))


def random_poly(rng: np.random.Generator, ctx: PrimeContext) -> spectral.TrigPoly:
    c = rng.standard_normal(ctx.p) + 1j * rng.standard_normal(ctx.p)
    return spectral.TrigPoly(ctx, c)


def random_function(rng: np.random.Generator, p: int) -> np.ndarray:
    return rng.standard_normal(p) + 1j * rng.standard_normal(p)


def suite_parseval(trials: int = 100, seed: int = 0, primes=(13, 101, 1009, 10007)) -> SuiteResult:
    """Round trip and Parseval to relative 1e-9 on random complex functions."""
    res = SuiteResult("parseval")
    rng = np.random.default_rng(seed)
    for p in primes:
        ctx = PrimeContext(p)
        for _ in range(trials):
            f = random_function(rng, p)
            back = spectral.inverse_transform(spectral.fourier_transform(f, ctx))
            rt = float(np.max(np.abs(back - f)) / np.max(np.abs(f)))
            lhs, rhs = spectral.parseval_sides(f, ctx)
            pv = abs(lhs - rhs) / rhs
            res.record(rt <= REL_TOL and pv <= REL_TOL,
                       {"p": p, "round_trip_rel": rt, "parseval_rel": pv})
    return res


def suite_norm_identities(trials: int = 100, seed: int = 0, primes=(13, 101, 1009)) -> SuiteResult:
    """Trivial bound, complement identity and affine invariance of the norm."""
    res = SuiteResult("norm-identities")
    rng = np.random.default_rng(seed)
    for p in primes:
        ctx = PrimeContext(p)
        for _ in range(trials):
            A = random_set(rng, ctx)
            norm, err = spectral.wiener_norm(A)
            cn, cerr = spectral.wiener_norm(complement(A))
            q = int(rng.integers(1, p))
            x0 = int(rng.integers(0, p))
            dn, derr = spectral.wiener_norm(affine_dilate(A, q, x0))
            expected = norm + (1 - 2 * A.cardinality / p)
            ok = (norm >= 1 - err
                  and abs(cn - expected) <= 2 * max(err, cerr)
                  and abs(dn - norm) <= 2 * max(err, derr))
            res.record(ok, {"p": p, "size": A.cardinality, "q": q, "x0": x0})
    return res


def suite_young(trials: int = 100, seed: int = 0, primes=(13, 101, 1009)) -> SuiteResult:
    res = SuiteResult("young")
    rng = np.random.default_rng(seed)
    for p in primes:
        ctx = PrimeContext(p)
        for _ in range(trials):
            F, G = random_poly(rng, ctx), random_poly(rng, ctx)
            lhs = spectral.wiener_norm_poly(dlvp.spectral_convolution(F, G))
            rhs = spectral.wiener_norm_poly(F) * spectral.wiener_norm_poly(G) / p
            res.record(lhs <= rhs * (1 + REL_TOL), {"p": p, "lhs": lhs, "rhs": rhs})
    return res


def suite_vdp(trials: int = 100, seed: int = 0, primes=(13, 101, 1009)) -> SuiteResult:
    """Kernel bound for every admissible order, then the factor-3 mean bound."""
    res = SuiteResult("vdp")
    for p in primes:
        ctx = PrimeContext(p)
        for n, total in dlvp.vdp_norm_table(ctx):
            res.record(total <= 3 * p * (1 + REL_TOL), {"p": p, "n": n, "norm": total})
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        p = int(rng.choice(primes))
        ctx = PrimeContext(p)
        F = random_poly(rng, ctx)
        n = int(rng.integers(1, p // 4 + 1))
        lhs = spectral.wiener_norm_poly(dlvp.vdp_mean(F, n))
        rhs = 3 * spectral.wiener_norm_poly(F)
        res.record(lhs <= rhs * (1 + REL_TOL), {"p": p, "n": n, "lhs": lhs, "rhs": rhs})
    return res


def suite_tk_lower(trials: int = 200, seed: int = 0, primes=(5, 7, 11, 13, 17, 19, 23, 29, 31)) -> SuiteResult:
    res = SuiteResult("tk-lower")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        p = int(rng.choice(primes))
        ctx = PrimeContext(p)
        A = random_set(rng, ctx)
        q_size = int(rng.integers(1, A.cardinality + 1))
        Q = ZpSet.from_iterable(ctx, rng.choice(A.members, size=q_size, replace=False))
        k = int(rng.integers(1, 4))
        chk = energy.t_k_lower_bound_check(A, Q, k)
        res.record(chk.holds, {"p": p, "A": list(A), "Q": list(Q), "k": k,
                               "lhs": chk.lhs, "rhs": chk.rhs})
    return res


def suite_energy_wiener(trials: int = 200, seed: int = 0, primes=(13, 31, 101)) -> SuiteResult:
    res = SuiteResult("energy-wiener")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        ctx = PrimeContext(int(rng.choice(primes)))
        A = random_set(rng, ctx)
        chk = energy.energy_via_wiener_check(A)
        res.record(chk.holds, {"p": ctx.p, "A": list(A), "lhs": chk.lhs, "rhs": chk.rhs})
    return res


def suite_sumdiff(trials: int = 500, seed: int = 0) -> SuiteResult:
    """``|A| |A+A| <= |A-A|^2`` on random finite integer sets."""
    res = SuiteResult("sumdiff")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        span = int(rng.integers(1, 200))
        size = int(rng.integers(1, min(span, 40) + 1))
        A = [int(a) for a in rng.choice(span, size=size, replace=False) - span // 2]
        chk = energy.sum_difference_check(A)
        res.record(chk.holds, {"A": A, "lhs": chk.lhs, "rhs": chk.rhs})
    return res


def suite_scattered(trials: int = 200, seed: int = 0, k_max: int = 3) -> SuiteResult:
    res = SuiteResult("scattered")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        fam = scattered.random_family(rng)
        k = int(rng.integers(1, k_max + 1))
        tk = scattered.verify_scattered_bound(fam, k)
        nk = scattered.verify_nk_uniform(fam, k)
        res.record(tk["holds"] and nk["holds"],
                   {"family": fam.to_json(), "k": k, "t_k": str(tk["t_k_exact"]),
                    "max_nk": nk["max_nk"]})
    return res


def random_blichfeldt_instance(rng: np.random.Generator, primes, d_max: int = 3):
    """Generators and targets ``floor(p alpha_i)`` with prod alpha_i >= 1/p."""
    p = int(rng.choice(primes))
    ctx = PrimeContext(p)
    d = int(rng.integers(1, d_max + 1))
    # log-uniform size keeps most boxes far from the trivial q = 1 regime
    A_size = int(np.exp(rng.uniform(0, np.log(p + 1))))
    A_size = min(max(A_size, 1), p)
    widths = []
    budget = A_size
    for _ in range(d):
        w = int(rng.integers(1, budget + 1))
        widths.append(w)
        budget //= w
    gens = tuple(int(g) for g in rng.integers(1, p, size=d))
    P = structure.GapDescriptor(0, gens, tuple(widths))
    params = structure.blichfeldt_params(A_size, ctx, P, 1.0)
    return ctx, gens, params


def suite_blichfeldt(trials: int = 200, seed: int = 0,
                     primes=(101, 211, 307, 401, 503, 607, 701, 809, 907, 1009)) -> SuiteResult:
    """A dilate within ``floor(p alpha_i)`` exists whenever the box volume allows."""
    res = SuiteResult("blichfeldt")
    rng = np.random.default_rng(seed)
    while res.trials < trials:
        ctx, gens, params = random_blichfeldt_instance(rng, primes)
        if any(a >= 1 for a in params.alphas) or math.prod(params.alphas) * ctx.p < 1:
            continue
        targets = [min(t, ctx.half) for t in params.targets]
        w = structure.find_dilate(ctx, gens, targets)
        ok = w is not None and all(a <= t for a, t in zip(w.achieved, targets))
        res.record(ok, {"p": ctx.p, "generators": list(gens), "targets": targets})
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "parseval": suite_parseval,
    "norm-identities": suite_norm_identities,
    "young": suite_young,
    "vdp": suite_vdp,
    "tk-lower": suite_tk_lower,
    "energy-wiener": suite_energy_wiener,
    "sumdiff": suite_sumdiff,
    "scattered": suite_scattered,
    "blichfeldt": suite_blichfeldt,
}
