"""Recovering p from the measured law mu = p * p.

Two decoders live here:

* the exact spectral inverse ``p = 2^-n H (H mu)^(1 / 2^(k-2))`` (dense, or
  on a GF(2) subspace holding the support), and
* the truncated convolution series ``p ~ sum_j c_j mu^{*j}`` whose
  coefficients are generated with exact rational arithmetic.

Power convention: ``mu^{*j}`` is the ``(j+1)``-fold XOR convolution of mu,
so ``mu^{*0} = mu``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from .distribution import Distribution
from .transform import check_dense_size, fwht

__all__ = [
    "fwht",
    "solve_exact",
    "solve_exact_subspace",
    "CoeffTable",
    "series_coefficients",
    "d_table",
    "decode_series",
    "bias_bound",
]

NEGATIVE_MODES = ("clamp", "error")


class NegativeSpectrumError(ValueError):
    """Raised when ``H mu`` has negative entries and clamping is disabled."""

    def __init__(self, indices: Sequence[int]):
        self.indices = list(indices)
        shown = ", ".join(hex(i) for i in self.indices[:10])
        more = "" if len(self.indices) <= 10 else f" (+{len(self.indices) - 10} more)"
        super().__init__(f"negative Walsh spectrum at b = {shown}{more}")


def _root_spectrum(spec: np.ndarray, k: int, negatives: str) -> tuple[np.ndarray, int]:
    if k < 3:
        raise ValueError("order k must be >= 3")
    if negatives not in NEGATIVE_MODES:
        raise ValueError(f"negatives must be one of {NEGATIVE_MODES}")
    bad = np.flatnonzero(spec < 0)
    if bad.size and negatives == "error":
        raise NegativeSpectrumError(bad.tolist())
    spec = np.maximum(spec, 0.0)
    return spec ** (1.0 / 2 ** (k - 2)), int(bad.size)


def _solve_dense(mu: np.ndarray, k: int, negatives: str) -> tuple[np.ndarray, int]:
    root, clamped = _root_spectrum(fwht(mu), k, negatives)
    return fwht(root, inplace=True) / mu.shape[0], clamped


def solve_exact(
    mu: Distribution,
    k: int = 3,
    negatives: str = "clamp",
    atol: float = 1e-15,
    return_info: bool = False,
):
    """Invert ``mu = p^{*(2^(k-2) - 1)}`` through the Walsh spectrum.

    Parameters
    ----------
    mu : Distribution
        Measured (or exact) outcome law.
    k : int
        Hypergraph order; ``k = 3`` takes a square root.
    negatives : {"clamp", "error"}
        What to do with negative spectral entries, which appear only for
        noisy estimates with ``mu_0 < 1/2``.
    atol : float
        Output entries with magnitude below this are dropped.
    return_info : bool
        Also return ``{"clamped": count}``.

    Returns
    -------
    Distribution
        Quasi-probability estimate of p.
    """
    check_dense_size(mu.n)
    p, clamped = _solve_dense(mu.to_dense(), k, negatives)
    out = Distribution.from_dense(p, kind="quasi", atol=atol)
    return (out, {"clamped": clamped}) if return_info else out


def _span_table(basis: Sequence[int]) -> np.ndarray:
    # span[y] = XOR of basis[i] over set bits i of y
    span = np.zeros(1, dtype=np.int64)
    for b in basis:
        span = np.concatenate([span, span ^ b])
    return span


def solve_exact_subspace(
    mu: Distribution,
    basis: Sequence[int],
    k: int = 3,
    negatives: str = "clamp",
    atol: float = 1e-15,
) -> Distribution:
    """Exact decoder restricted to the GF(2) span of ``basis``.

    The support of mu is rewritten in basis coordinates, solved densely on
    ``2^len(basis)`` entries, then mapped back.  Cost is independent of n.
    """
    basis = [int(b) for b in basis]
    d = len(basis)
    check_dense_size(d)
    span = _span_table(basis)
    if d and np.unique(span).size != span.size:
        raise ValueError("basis is not linearly independent over GF(2)")
    if any(b <= 0 or b >> mu.n for b in basis):
        raise ValueError("basis vectors must be nonzero masks inside n")
    coord = {int(m): y for y, m in enumerate(span.tolist())}
    local = np.zeros(1 << d)
    outside = []
    for m, v in mu.entries.items():
        y = coord.get(m)
        if y is None:
            if v != 0.0:
                outside.append(m)
            continue
        local[y] = v
    if outside:
        raise ValueError(f"mu has support outside the span: {[hex(m) for m in outside[:5]]}")
    p, _ = _solve_dense(local, k, negatives)
    keep = np.flatnonzero(np.abs(p) > atol)
    return Distribution(mu.n, dict(zip(span[keep].tolist(), p[keep].tolist())), kind="quasi")


# -- series decoder --------------------------------------------------------

Poly = list[Fraction]


def _pmul(a: Poly, b: Poly) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out


def _denominator(w: int) -> int:
    return 1 + sum(comb(l, 2 * k + 1) for l in range(w) for k in range(l // 2 + 1))


def _d(w: int, m: int) -> Fraction:
    num = sum(
        comb(l, 2 * k + 1) * comb(k + 1, m)
        for l in range(2 * (m // 2), w)
        for k in range(m - 1, l // 2 + 1)
    )
    return Fraction(num, _denominator(w))


@lru_cache(maxsize=None)
def d_table(w: int) -> tuple[tuple[Fraction, ...], float]:
    """``d(w, m)`` for ``m = 1 .. w-1`` and ``d_max = max_m d(w, m)^(1/m)``."""
    if w < 2:
        raise ValueError("w must be >= 2")
    ds = tuple(_d(w, m) for m in range(1, w))
    d_max = max(float(x) ** (1.0 / m) for m, x in enumerate(ds, start=1))
    return ds, d_max


@dataclass(frozen=True)
class CoeffTable:
    """Coefficients ``c_j`` of ``p ~ sum_j c_j mu^{*j}`` for a ``(w, s)`` decoder.

    Attributes
    ----------
    coeffs : tuple of Fraction
        Exact coefficients, trailing zeros removed.
    a_ws : int
        Number of terms, i.e. convolution powers ``0 .. a_ws - 1`` needed.
    eta : Fraction
        ``max_j c_j**2``; scales the sampling cost.
    d_max : float
    """

    w: int
    s: int
    coeffs: tuple[Fraction, ...]
    d_max: float

    @property
    def floats(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.coeffs)

    @property
    def a_ws(self) -> int:
        return len(self.coeffs)

    @property
    def eta(self) -> Fraction:
        return max(c * c for c in self.coeffs)

    @property
    def degree_bound(self) -> int:
        return (self.w - 1) // 2 + (self.w - 1) * (self.w + self.s - 1)

    def text(self) -> str:
        return " ".join(str(c) for c in self.coeffs)

    def rows(self) -> list[tuple[int, int, int, float]]:
        return [(j, c.numerator, c.denominator, float(c)) for j, c in enumerate(self.coeffs)]


@lru_cache(maxsize=None)
def series_coefficients(w: int, s: int = 0) -> CoeffTable:
    """Exact coefficients of the ``(w, s)`` convolution-series decoder.

    Work in a formal variable ``t`` with ``t^k`` standing for ``mu^{*k}``.
    With ``D0 = 1 + sum_{l<w} sum_k C(l, 2k+1)`` the decoder is

        N(t) * sum_{r=0}^{w+s-1} Y(t)^r,

    where ``N(t) = sum_{l<w} sum_k C(l, 2k) t^k / D0`` and
    ``Y(t) = sum_{m=1}^{w-1} (-1)^(m+1) d(w, m) (1 - t)^m``.  Coefficients sum
    to one because ``Y(1) = 0`` and ``N(1) = 1``.
    """
    if not 2 <= w <= 100:
        raise ValueError("w must be in [2, 100]")
    if s < 0:
        raise ValueError("s must be >= 0")
    den = _denominator(w)
    num = [Fraction(0)] * ((w - 1) // 2 + 1)
    for l in range(w):
        for k in range(l // 2 + 1):
            num[k] += comb(l, 2 * k)
    num = [x / den for x in num]

    ds, d_max = d_table(w)
    one_minus_t = [Fraction(1), Fraction(-1)]
    y: Poly = [Fraction(0)]
    power: Poly = [Fraction(1)]
    for m, dm in enumerate(ds, start=1):
        power = _pmul(power, one_minus_t)
        sign = 1 if m % 2 else -1
        y = _padd(y, [sign * dm * c for c in power])

    geo: Poly = [Fraction(1)]
    term: Poly = [Fraction(1)]
    for _ in range(1, w + s):
        term = _pmul(term, y)
        geo = _padd(geo, term)
    coeffs = _pmul(geo, num)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return CoeffTable(w, s, tuple(coeffs), d_max)


def _power_list(powers, needed: int) -> list[Distribution]:
    if hasattr(powers, "empirical"):
        have = powers.max_power + 1
        if have < needed:
            raise ValueError(f"decoder needs powers 0..{needed - 1}, batch has 0..{have - 1}")
        return [powers.empirical(j) for j in range(needed)]
    powers = list(powers)
    if len(powers) < needed:
        raise ValueError(f"decoder needs powers 0..{needed - 1}, got {len(powers)}")
    return powers[:needed]


def decode_series(powers, table: CoeffTable) -> Distribution:
    """Combine convolution powers with the table's coefficients.

    Parameters
    ----------
    powers : SampleBatch or sequence of Distribution
        ``powers[j]`` estimates ``mu^{*j}``; at least ``table.a_ws`` needed.
    table : CoeffTable

    Returns
    -------
    Distribution
        Quasi-probability estimate of p.
    """
    dists = _power_list(powers, table.a_ws)
    n = dists[0].n
    acc: dict[int, float] = {}
    for c, dist in zip(table.floats, dists):
        if dist.n != n:
            raise ValueError("powers disagree on n")
        for m, v in dist.entries.items():
            acc[m] = acc.get(m, 0.0) + c * v
    return Distribution(n, acc, kind="quasi")


def bias_bound(w: int, s: int, delta: float) -> float:
    """``(3 w delta / 2)^(w+s) + (2 delta)^w`` with unit constants.

    Valid for ``delta < 1 / (3w)``.
    """
    if w < 2 or s < 0:
        raise ValueError("need w >= 2 and s >= 0")
    if not 0 <= delta < 1 / (3 * w):
        raise ValueError(f"bias bound needs 0 <= delta < 1/(3w) = {1 / (3 * w):.4g}")
    return (1.5 * w * delta) ** (w + s) + (2 * delta) ** w
