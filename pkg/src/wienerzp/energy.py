"""Representation counts N_k, additive energies T_k and sumsets.

All counts are exact Python integers.  Profiles are built by k-1 rounds of
shift-and-add convolution of the count vector with the indicator of Q, in
int64 while ``|Q|^k`` provably fits and in object (big integer) arrays
otherwise.  Two independent routes to T_k exist alongside: a literal
2k-fold enumeration (:func:`t_k_bruteforce`) and the Fourier identity
``T_k(Q) = p^(2k-1) sum_g |chi_Q^(g)|^(2k)`` (:func:`t_k_spectral`).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

from .spectral import indicator_spectrum, wiener_norm
from .zp_core import ZpError, ZpSet

DOMAINS = ("integers", "residues")

#: default cap on the number of cells of a count array
DEFAULT_CELL_CAP = 10**8

#: enumeration cap for the brute-force oracle
BRUTEFORCE_CAP = 10**7

SetLike = Union[ZpSet, Iterable[int]]


class EnergyBudgetError(ZpError):
    """The requested computation exceeds a configured size cap."""


class SpectralPrecisionWarning(UserWarning):
    pass


@dataclass
class EnergyReport:
    k: int
    domain: str
    set_size: int
    nk_profile: dict[int, int] = field(repr=False)
    t_k: int
    spectral_estimate: Optional[float] = None

    @property
    def max_nk(self) -> int:
        return max(self.nk_profile.values())

    def to_json(self, include_profile: bool = False) -> dict:
        out = {
            "k": self.k,
            "domain": self.domain,
            "set_size": self.set_size,
            "t_k": str(self.t_k),
            "spectral_estimate": self.spectral_estimate,
        }
        if include_profile:
            out["profile"] = [[x, str(c)] for x, c in sorted(self.nk_profile.items())]
        return out


def _normalise(Q: SetLike, domain: Optional[str]):
    """Return (domain, sorted unique values, p or None)."""
    if domain is not None and domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}; choose from {DOMAINS}")
    if isinstance(Q, ZpSet):
        if domain == "integers":
            return "integers", [int(v) for v in Q.signed()], None
        return "residues", [int(v) for v in Q.members], Q.p
    if domain == "residues":
        raise ValueError("residue domain needs a ZpSet")
    values = sorted({int(v) for v in Q})
    return "integers", values, None


def _count_dtype(size: int, k: int):
    return np.int64 if size**k < 2**62 else object


def _profile_array(values: list[int], k: int, p: Optional[int],
                   cell_cap: int) -> tuple[np.ndarray, int]:
    """Dense N_k array and the value represented by index 0."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if not values:
        raise ValueError("Q must be nonempty")
    dtype = _count_dtype(len(values), k)
    if p is not None:
        cur = np.zeros(p, dtype=dtype)
        cur[values] = 1
        shifts = values
        for _ in range(k - 1):
            new = np.zeros(p, dtype=dtype)
            for s in shifts:
                new += np.roll(cur, s)
            cur = new
        return cur, 0

    lo, hi = values[0], values[-1]
    width = hi - lo + 1
    final_len = k * (width - 1) + 1
    if final_len > cell_cap:
        raise EnergyBudgetError(
            f"count array would need {final_len} cells (cap {cell_cap}); "
            "shrink the set range or k")
    offsets = [v - lo for v in values]
    cur = np.zeros(width, dtype=dtype)
    cur[offsets] = 1
    for _ in range(k - 1):
        new = np.zeros(cur.size + width - 1, dtype=dtype)
        n = cur.size
        for s in offsets:
            new[s:s + n] += cur
        cur = new
    return cur, k * lo


def _sum_of_squares(arr: np.ndarray) -> int:
    nz = arr[arr != 0]
    if nz.size == 0:
        return 0
    if nz.dtype != object and int(nz.max()) ** 2 * nz.size < 2**63:
        return int(np.dot(nz, nz))
    return sum(int(v) * int(v) for v in nz)


def nk_profile(Q: SetLike, k: int, domain: Optional[str] = None,
               cell_cap: int = DEFAULT_CELL_CAP) -> EnergyReport:
    """Exact counts ``N_k(x) = #{(q_1..q_k) in Q^k : q_1+...+q_k = x}``.

    ``Q`` is either a :class:`ZpSet` (sums wrap mod p) or an iterable of
    integers.  Passing ``domain="integers"`` with a ZpSet uses the signed
    representatives of its members.
    """
    domain, values, p = _normalise(Q, domain)
    arr, base = _profile_array(values, k, p, cell_cap)
    idx = np.flatnonzero(arr)
    profile = {int(base + i): int(arr[i]) for i in idx}
    return EnergyReport(k=k, domain=domain, set_size=len(values),
                        nk_profile=profile, t_k=_sum_of_squares(arr))


def t_k(Q: SetLike, k: int, domain: Optional[str] = None,
        cell_cap: int = DEFAULT_CELL_CAP) -> int:
    """Number of solutions of ``x_1+...+x_k = y_1+...+y_k`` in Q."""
    domain, values, p = _normalise(Q, domain)
    arr, _ = _profile_array(values, k, p, cell_cap)
    return _sum_of_squares(arr)


def t_k_bruteforce(Q: SetLike, k: int, domain: Optional[str] = None) -> int:
    """Reference count by enumerating all ``|Q|^(2k)`` tuples.

    Deliberately naive; refuses inputs with more than 10^7 tuples.
    """
    domain, values, p = _normalise(Q, domain)
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if len(values) ** (2 * k) > BRUTEFORCE_CAP:
        raise EnergyBudgetError(
            f"|Q|^(2k) = {len(values) ** (2 * k)} exceeds brute-force cap {BRUTEFORCE_CAP}")
    count = 0
    for t in itertools.product(values, repeat=2 * k):
        diff = sum(t[:k]) - sum(t[k:])
        if (diff % p == 0) if p is not None else diff == 0:
            count += 1
    return count


def t_k_spectral(Q: ZpSet, k: int, warn_threshold: float = 0.4) -> float:
    """``p^(2k-1) sum_g |chi_Q^(g)|^(2k)`` evaluated in floating point.

    The sum is formed as ``(1/p) sum_g |p chi_Q^(g)|^(2k)`` after scaling by
    the largest magnitude ``|Q|`` so intermediate powers never overflow.
    Emits :class:`SpectralPrecisionWarning` when the propagated error
    estimate exceeds ``warn_threshold``.
    """
    if not isinstance(Q, ZpSet):
        raise TypeError("t_k_spectral works on residue sets only")
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if Q.cardinality == 0:
        return 0.0
    p = Q.p
    spec = indicator_spectrum(Q)
    mags = np.abs(spec.values).astype(np.float64) * p
    top = float(Q.cardinality)
    scaled = math.fsum((mags / top) ** (2 * k))
    log_value = math.log(scaled) + 2 * k * math.log(top) - math.log(p)
    value = math.exp(log_value) if log_value < 709 else math.inf

    # first-order propagation of the per-value error plus rounding in powers
    delta = p * spec.err_bound
    err = 2 * k * delta * math.fsum(mags ** (2 * k - 1)) / p
    err += value * (2 * k + p) * np.finfo(np.float64).eps
    if err > warn_threshold:
        warnings.warn(f"spectral T_{k} error estimate {err:.3g} exceeds {warn_threshold}",
                      SpectralPrecisionWarning, stacklevel=2)
    return value


@dataclass
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool

    def to_json(self) -> dict:
        lhs = str(self.lhs) if isinstance(self.lhs, int) else self.lhs
        return {"lhs": lhs, "rhs": self.rhs, "holds": self.holds}


def t_k_lower_bound_check(A: ZpSet, Q: ZpSet, k: int,
                          K: Optional[float] = None) -> InequalityCheck:
    """Check ``T_k(Q) >= |Q|^(2k) / (|A| K^(2k-2))`` for ``Q`` inside ``A``.

    ``K`` defaults to the Wiener norm of A plus its error bound, an upper
    estimate, so float error can only weaken the right-hand side.
    """
    if A.cardinality == 0:
        raise ValueError("A must be nonempty")
    if not Q.issubset(A):
        raise ValueError("Q must be a subset of A")
    if K is None:
        norm, err = wiener_norm(A)
        K = norm + err
    lhs = t_k(Q, k)
    rhs = Q.cardinality ** (2 * k) / (A.cardinality * K ** (2 * k - 2))
    return InequalityCheck(lhs, rhs, lhs >= rhs)


def energy_via_wiener_check(A: ZpSet) -> InequalityCheck:
    """``T_2(A) >= |A|^3 / ||chi_A||_A^2`` (norm padded by its error bound)."""
    return t_k_lower_bound_check(A, A, 2)


@dataclass
class SumsetReport:
    sum_size: int
    diff_size: int
    doubling: Fraction
    L: Fraction

    def to_json(self) -> dict:
        return {"sum_size": self.sum_size, "diff_size": self.diff_size,
                "doubling": str(self.doubling), "L": str(self.L)}


def _combine(A: SetLike, B: SetLike, sign: str):
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    if isinstance(A, ZpSet):
        if not isinstance(B, ZpSet) or A.p != B.p:
            raise ZpError("both operands must be sets in the same Z_p")
        other = B.mask if sign == "+" else B.mask[(-np.arange(A.p)) % A.p]
        mask = np.zeros(A.p, dtype=bool)
        if A.cardinality <= B.cardinality:
            for a in A.members:
                mask |= np.roll(other, a)
        else:
            for b in np.flatnonzero(other):
                mask |= np.roll(A.mask, b)
        return ZpSet(A.context, mask)
    s = 1 if sign == "+" else -1
    a = np.fromiter((int(x) for x in set(A)), dtype=object)
    b = np.fromiter((int(x) for x in set(B)), dtype=object)
    return {int(v) for v in np.add.outer(a, s * b).ravel()}


def sumset(A: SetLike, B: SetLike, sign: str = "+"):
    """``A + B`` or ``A - B`` together with a :class:`SumsetReport` for A, B.

    The report carries ``|A+B|``, ``|A-B|``, the doubling ``|A+A|/|A|`` and
    the energy deficiency ``L = |A|^3 / T_2(A)``.
    """
    if len(A) == 0 or len(B) == 0:
        raise ValueError("sumset operands must be nonempty")
    result = _combine(A, B, sign)
    plus = result if sign == "+" else _combine(A, B, "+")
    minus = result if sign == "-" else _combine(A, B, "-")
    n = len(A)
    report = SumsetReport(
        sum_size=len(plus),
        diff_size=len(minus),
        doubling=Fraction(len(_combine(A, A, "+")), n),
        L=Fraction(n**3, t_k(A, 2)),
    )
    return result, report


def sum_difference_check(A: Iterable[int]) -> InequalityCheck:
    """Exact check of ``|A| |A+A| <= |A-A|^2`` for a finite integer set."""
    A = {int(a) for a in A}
    lhs = len(A) * len(_combine(A, A, "+"))
    rhs = len(_combine(A, A, "-")) ** 2
    return InequalityCheck(lhs, rhs, lhs <= rhs)

