"""Fourier analysis on Z_p and the Wiener norm.

Normalisation follows the convention

    fhat(g) = (1/p) * sum_x f(x) e_p(x g),      e_p(u) = exp(2 pi i u / p),
    f(x)    = sum_g fhat(g) e_p(-x g),

so the Wiener norm of an indicator is ``sum_g |fhat(g)|`` and is at least 1
for every nonempty set.

Two transform paths exist: a direct O(p^2) summation through a table of
p-th roots of unity (the reference) and numpy's FFT (the default).  Both run
in the dtype selected by the context's precision policy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .zp_core import PrimeContext, ZpError, ZpSet, signed_reps

METHODS = ("fft", "direct")

# rows of the direct-summation phase matrix processed at once
_DIRECT_CHUNK_CELLS = 1 << 22


class NormResult(NamedTuple):
    norm: float
    err_bound: float

    def to_json(self) -> dict:
        return {"norm": self.norm, "err_bound": self.err_bound}


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """``F(g) = sum_x c_x e_p(x g)`` stored by its p coefficients.

    ``coeffs[x]`` is the coefficient of the residue ``x``; use
    :meth:`from_signed` to build from signed frequencies.
    """

    context: PrimeContext
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=self.context.complex_dtype)
        if c.shape != (self.context.p,):
            raise ZpError(f"need exactly p={self.context.p} coefficients, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ZpError("coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_signed(cls, ctx: PrimeContext, coeffs: Mapping[int, complex]) -> "TrigPoly":
        c = np.zeros(ctx.p, dtype=ctx.complex_dtype)
        for x, v in coeffs.items():
            c[int(x) % ctx.p] += v
        return cls(ctx, c)

    @property
    def p(self) -> int:
        return self.context.p

    def signed_support(self) -> np.ndarray:
        """Signed frequencies with nonzero coefficient, sorted."""
        return np.sort(signed_reps(np.flatnonzero(self.coeffs), self.p))

    def coefficient(self, x: int) -> complex:
        return complex(self.coeffs[int(x) % self.p])

    def values(self, method: str = "fft") -> np.ndarray:
        """``F(g)`` for every g in Z_p."""
        return self.p * _forward(self.coeffs, self.context, method)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        _same_context(self.context, other.context)
        return TrigPoly(self.context, self.coeffs + other.coeffs)

    def __mul__(self, scalar) -> "TrigPoly":
        return TrigPoly(self.context, self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Values ``fhat(g)`` with a uniform absolute error bound per value."""

    context: PrimeContext
    values: np.ndarray = field(repr=False)
    err_bound: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=self.context.complex_dtype)
        if v.shape != (self.context.p,):
            raise ZpError(f"need exactly p={self.context.p} values, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ZpError("spectrum values must be finite")
        if not (self.err_bound >= 0 and math.isfinite(self.err_bound)):
            raise ZpError(f"err_bound must be finite and >= 0, got {self.err_bound}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def p(self) -> int:
        return self.context.p

    def l1(self) -> float:
        return float(np.sum(np.abs(self.values)))

    def to_json(self) -> list[dict]:
        out = []
        for g, v in enumerate(self.values):
            out.append({"gamma": g, "re": float(v.real), "im": float(v.imag),
                        "abs": float(abs(v))})
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _same_context(a: PrimeContext, b: PrimeContext) -> None:
    if a.p != b.p:
        raise ZpError(f"context mismatch: p={a.p} vs p={b.p}")


def roots_of_unity(ctx: PrimeContext) -> np.ndarray:
    """``e_p(k)`` for k = 0..p-1 in the context's complex dtype."""
    k = np.arange(ctx.p, dtype=ctx.real_dtype)
    theta = 2 * ctx.real_dtype(np.pi) * k / ctx.p
    return (np.cos(theta) + 1j * np.sin(theta)).astype(ctx.complex_dtype)


def _direct_sum(f: np.ndarray, ctx: PrimeContext, sign: int) -> np.ndarray:
    """``sum_x f(x) e_p(sign * x g)`` for all g, by explicit summation."""
    p = ctx.p
    table = roots_of_unity(ctx)
    x = np.arange(p, dtype=np.int64)
    out = np.empty(p, dtype=ctx.complex_dtype)
    rows = max(1, _DIRECT_CHUNK_CELLS // p)
    for start in range(0, p, rows):
        g = np.arange(start, min(p, start + rows), dtype=np.int64)
        phase = (sign * np.outer(g, x)) % p
        # fixed summation order per g keeps results reproducible
        out[start:start + g.size] = table[phase] @ f
    return out


def _forward(f: np.ndarray, ctx: PrimeContext, method: str) -> np.ndarray:
    """``(1/p) sum_x f(x) e_p(x g)``."""
    if method == "fft":
        return np.fft.ifft(f)
    if method == "direct":
        return _direct_sum(f, ctx, +1) / ctx.p
    raise ZpError(f"unknown transform method {method!r}; choose from {METHODS}")


def _backward(F: np.ndarray, ctx: PrimeContext, method: str) -> np.ndarray:
    """``sum_g F(g) e_p(-x g)``."""
    if method == "fft":
        return np.fft.fft(F)
    if method == "direct":
        return _direct_sum(F, ctx, -1)
    raise ZpError(f"unknown transform method {method!r}; choose from {METHODS}")


def value_error_bound(ctx: PrimeContext, max_abs: float) -> float:
    """Per-value absolute error envelope ``8 p u max|f|``."""
    return 8.0 * ctx.p * ctx.unit_roundoff * float(max_abs)


def _as_function(f, ctx: PrimeContext) -> np.ndarray:
    arr = np.asarray(f)
    if arr.shape != (ctx.p,):
        raise ZpError(f"function must have p={ctx.p} values, got shape {arr.shape}")
    arr = arr.astype(ctx.complex_dtype)
    if not np.all(np.isfinite(arr)):
        raise ZpError("function values must be finite")
    return arr


def fourier_transform(f, ctx: PrimeContext, method: str = "fft") -> Spectrum:
    """Fourier transform of a function on Z_p given as an array of p values."""
    arr = _as_function(f, ctx)
    values = _forward(arr, ctx, method)
    max_abs = float(np.max(np.abs(arr))) if arr.size else 0.0
    return Spectrum(ctx, values, value_error_bound(ctx, max_abs))


def inverse_transform(F: Spectrum, method: str = "fft") -> np.ndarray:
    return _backward(F.values, F.context, method)


def indicator_spectrum(A: ZpSet, method: str = "fft") -> Spectrum:
    return fourier_transform(A.indicator(A.context.real_dtype), A.context, method)


def wiener_norm(A: ZpSet, method: str = "fft") -> NormResult:
    """``sum_g |chi_A^(g)|`` with an absolute error bound.

    The empty set has norm 0 by convention.
    """
    if A.cardinality == 0:
        return NormResult(0.0, 0.0)
    spec = indicator_spectrum(A, method)
    return NormResult(spec.l1(), A.p * spec.err_bound)


def wiener_norms_batch(masks: np.ndarray, ctx: PrimeContext) -> np.ndarray:
    """Wiener norms of many indicator rows at once (float64 FFT).

    Used by the extremal search where millions of small sets are scored.
    """
    spec = np.fft.ifft(np.asarray(masks, dtype=np.float64), axis=-1)
    return np.abs(spec).sum(axis=-1)


def wiener_norm_poly(F: TrigPoly, method: str = "fft") -> float:
    """``sum_g |F(g)|`` for a polynomial given by coefficients."""
    return float(np.sum(np.abs(F.values(method))))


def parseval_sides(f, ctx: PrimeContext, method: str = "fft") -> tuple[float, float]:
    """``(sum |fhat|^2, (1/p) sum |f|^2)``; the two agree by Parseval."""
    arr = _as_function(f, ctx)
    spec = fourier_transform(arr, ctx, method)
    lhs = float(np.sum(np.abs(spec.values) ** 2))
    rhs = float(np.sum(np.abs(arr) ** 2)) / ctx.p
    return lhs, rhs
