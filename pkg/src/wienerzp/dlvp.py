"""De la Vallee-Poussin kernels, spectral convolution and L1 comparisons.

Discrete side: polynomials ``F(g) = sum_x c_x e_p(x g)`` on Z_p (see
:class:`~wienerzp.spectral.TrigPoly`).  Continuous side: integrals
``int_0^1 |sum_j c_j e(b_j u)| du`` by composite midpoint rule with sample
doubling.  The checkers in this module return measured quantities rather
than verdicts wherever the underlying inequality only holds up to an
unspecified absolute constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .spectral import TrigPoly, _same_context, wiener_norm, wiener_norm_poly
from .zp_core import PrimeContext, ZpError, ZpSet, interval_members

#: relative change between successive refinements that counts as converged
QUAD_RTOL = 1e-8
QUAD_MAX_SAMPLES = 1 << 26
_QUAD_BLOCK = 1 << 18
_QUAD_FFT_MAX = 1 << 22


@dataclass
class ContinuousL1Result:
    value: float
    samples_used: int
    convergence_gap: float

    @property
    def converged(self) -> bool:
        return self.convergence_gap <= QUAD_RTOL

    def to_json(self) -> dict:
        return {"value": self.value, "samples_used": self.samples_used,
                "convergence_gap": self.convergence_gap}


def vdp_weight(n: int, x: int) -> Fraction:
    """Exact coefficient of ``e_p(x g)`` in V_n at signed frequency x."""
    ax = abs(x)
    if ax <= n:
        return Fraction(1)
    if ax <= 2 * n:
        return Fraction(2 * n - ax + 1, n + 1)
    return Fraction(0)


def _check_order(n: int, ctx: PrimeContext) -> None:
    if n < 1 or 4 * n > ctx.p:
        raise ZpError(f"de la Vallee-Poussin order needs 1 <= n <= p/4, got n={n}, p={ctx.p}")


def vdp_polynomial(n: int, ctx: PrimeContext) -> TrigPoly:
    """The kernel ``V_n``: flat on |x| <= n, linear taper to zero at 2n+1."""
    _check_order(n, ctx)
    return TrigPoly.from_signed(
        ctx, {x: float(vdp_weight(n, x)) for x in range(-2 * n, 2 * n + 1)})


def spectral_convolution(F: TrigPoly, G: TrigPoly) -> TrigPoly:
    """``F*G``: coefficientwise product of the two coefficient vectors."""
    _same_context(F.context, G.context)
    return TrigPoly(F.context, F.coeffs * G.coeffs)


def value_side_convolution(F: TrigPoly, G: TrigPoly) -> np.ndarray:
    """``(1/p) sum_{a+b=g} F(a) G(b)`` computed from values, for cross-checks."""
    _same_context(F.context, G.context)
    fv, gv = F.values(), G.values()
    p = F.p
    out = np.empty(p, dtype=fv.dtype)
    idx = np.arange(p)
    for g in range(p):
        out[g] = np.dot(fv, gv[(g - idx) % p])
    return out / p


def vdp_mean(F: TrigPoly, n: int) -> TrigPoly:
    return spectral_convolution(F, vdp_polynomial(n, F.context))


def _eval_block(freqs: np.ndarray, coeffs: np.ndarray, u: np.ndarray) -> np.ndarray:
    acc = np.zeros(u.size, dtype=np.complex128)
    for b, c in zip(freqs, coeffs):
        acc += c * np.exp(2j * np.pi * b * u)
    return np.abs(acc)


def _midpoint_fft(freqs: np.ndarray, coeffs: np.ndarray, n: int) -> float:
    # F((j + 1/2)/n) = sum_b c_b e(b/2n) e(bj/n), one inverse FFT of length n
    b = freqs.astype(np.int64)
    a = np.zeros(n, dtype=np.complex128)
    np.add.at(a, b % n, coeffs * np.exp(1j * np.pi * b / n))
    return math.fsum(np.abs(np.fft.ifft(a) * n)) / n


def _midpoint(freqs: np.ndarray, coeffs: np.ndarray, n: int) -> float:
    integral = np.all(freqs == np.round(freqs))
    if integral and n <= _QUAD_FFT_MAX and 2 * np.max(np.abs(freqs)) < n:
        return _midpoint_fft(freqs, coeffs, n)
    total = 0.0
    for start in range(0, n, _QUAD_BLOCK):
        stop = min(n, start + _QUAD_BLOCK)
        u = (np.arange(start, stop, dtype=np.float64) + 0.5) / n
        total += math.fsum(_eval_block(freqs, coeffs, u))
    return total / n


def continuous_l1(frequencies: Sequence[float], coefficients: Sequence[complex],
                  rtol: float = QUAD_RTOL,
                  max_samples: int = QUAD_MAX_SAMPLES) -> ContinuousL1Result:
    """``int_0^1 |sum_j c_j e(b_j u)| du`` by doubling midpoint rule.

    Starts from ``max(1024, 64 (max|b| + 1))`` samples and doubles until two
    successive estimates agree to ``rtol`` relative, or ``max_samples`` is
    reached, in which case the last gap is reported and the caller decides.
    """
    freqs = np.asarray(frequencies, dtype=np.float64)
    coeffs = np.asarray(coefficients, dtype=np.complex128)
    if freqs.shape != coeffs.shape or freqs.ndim != 1:
        raise ValueError("frequencies and coefficients must be 1-d and equal length")
    if np.unique(freqs).size != freqs.size:
        raise ValueError("frequencies must be distinct")
    if freqs.size == 0 or not np.any(coeffs):
        return ContinuousL1Result(0.0, 0, 0.0)

    n = max(1024, 64 * int(math.ceil(float(np.max(np.abs(freqs))) + 1)))
    prev = _midpoint(freqs, coeffs, n)
    gap = math.inf
    while n < max_samples:
        n *= 2
        cur = _midpoint(freqs, coeffs, n)
        gap = abs(cur - prev) / abs(cur) if cur else abs(cur - prev)
        prev = cur
        if gap < rtol:
            break
    return ContinuousL1Result(prev, n, gap)


def poly_continuous_l1(F: TrigPoly) -> ContinuousL1Result:
    """Continuous L1 norm of F read as a polynomial in signed frequencies."""
    freqs = F.signed_support()
    return continuous_l1(freqs, [F.coefficient(x) for x in freqs])


def disc_cont_ratio(F: TrigPoly) -> dict:
    """Discrete mean ``(1/p) sum_g |F(g)|`` against the continuous L1 norm.

    F must be supported on signed frequencies |x| <= p/3.
    """
    support = F.signed_support()
    if support.size and 3 * int(np.max(np.abs(support))) > F.p:
        raise ZpError("disc_cont_ratio needs coefficients supported on |x| <= p/3")
    discrete = wiener_norm_poly(F) / F.p
    cont = poly_continuous_l1(F)
    ratio = discrete / cont.value if cont.value else math.nan
    return {"discrete": discrete, "continuous": cont.value, "ratio": ratio,
            "samples_used": cont.samples_used}


def hardy_ratio(b: Sequence[float], c: Sequence[complex]) -> dict:
    """Continuous L1 norm against the harmonic weight ``sum_j |c_j| / j``."""
    b = [float(v) for v in b]
    if not b:
        raise ValueError("need at least one frequency")
    if any(y <= x for x, y in zip(b, b[1:])):
        raise ValueError("frequencies must be strictly increasing")
    if len(c) != len(b):
        raise ValueError("frequencies and coefficients must have equal length")
    integral = continuous_l1(b, c).value
    harmonic = math.fsum(abs(cj) / j for j, cj in enumerate(c, 1))
    ratio = integral / harmonic if harmonic else math.nan
    return {"integral": integral, "harmonic_sum": harmonic, "ratio": ratio}


def shell_concentration_check(B: ZpSet, n: int, eta: float) -> dict:
    """Measure the norm of B against ``min(log 1/eta, log |B cap [-2n,2n]|)``.

    ``applicable`` records whether B is concentrated in the inner window:
    at least two points in [-2n, 2n] and a (1 - eta) share of them in
    [-n, n].  ``window_l1`` is the continuous L1 norm of the exponential sum
    over ``B cap [-2n, 2n]`` with unit coefficients.
    """
    if n < 1 or 6 * n > B.p:
        raise ZpError(f"need 1 <= n <= p/6, got n={n}, p={B.p}")
    if not 0 < eta < 0.5:
        raise ZpError(f"need 0 < eta < 1/2, got {eta}")
    outer = interval_members(B, 2 * n)
    inner = interval_members(B, n)
    size = outer.cardinality
    applicable = size >= 2 and inner.cardinality >= (1 - eta) * size
    bound = min(math.log(1 / eta), math.log(size)) if size >= 1 else 0.0
    measured = wiener_norm(B).norm
    window = continuous_l1(outer.signed(), np.ones(size)).value if size else 0.0
    return {"applicable": bool(applicable), "bound": bound, "measured_norm": measured,
            "inner_count": inner.cardinality, "outer_count": size,
            "window_l1": window}


def vdp_norm_table(ctx: PrimeContext, orders=None) -> list[tuple[int, float]]:
    """``(n, sum_g |V_n(g)|)`` for each order (default: every n <= p/4)."""
    if orders is None:
        orders = range(1, ctx.p // 4 + 1)
    return [(n, wiener_norm_poly(vdp_polynomial(n, ctx))) for n in orders]
