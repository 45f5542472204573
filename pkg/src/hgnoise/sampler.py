"""XOR-convolution algebra and Monte-Carlo emulation of the two-copy protocol.

At the distribution level one measurement event draws two independent
samples ``a, b ~ p`` and reports ``u = a + b``, so outcomes follow
``mu = p * p``.  Samples of ``mu^{*j}`` are prefix XORs of ``j + 1``
independent mu-samples from the same event.
"""

from __future__ import annotations

import csv
import io
import os
from itertools import combinations
from math import comb
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil, log
from typing import Iterable

import numpy as np

from .distribution import Distribution
from .transform import check_dense_size, fwht, popcount

CHUNK_SHOTS = 1 << 16
THREADS_ENV = "HGNOISE_THREADS"


def _same_n(d1: Distribution, d2: Distribution) -> int:
    if d1.n != d2.n:
        raise ValueError(f"distributions act on different n ({d1.n} vs {d2.n})")
    return d1.n


def _result_kind(*ds: Distribution) -> str:
    return "prob" if all(d.kind == "prob" for d in ds) else "quasi"


def convolve(d1: Distribution, d2: Distribution, method: str = "auto") -> Distribution:
    """XOR convolution ``(d1 * d2)_u = sum_a d1_a d2_{a+u}``.

    ``method="sparse"`` loops over pairs of support entries, ``"fwht"``
    multiplies Walsh spectra; ``"auto"`` picks the cheaper one.
    """
    n = _same_n(d1, d2)
    kind = _result_kind(d1, d2)
    if method == "auto":
        pair_cost = len(d1) * len(d2)
        method = "sparse" if n > 20 or pair_cost <= (n + 1) << n else "fwht"
    if method == "fwht":
        check_dense_size(n)
        spec = fwht(d1.to_dense()) * fwht(d2.to_dense())
        return Distribution.from_dense(fwht(spec, inplace=True) / (1 << n), kind=kind)
    if method != "sparse":
        raise ValueError(f"unknown method {method!r}")
    m1, v1 = d1.arrays()
    m2, v2 = d2.arrays()
    if not m1.size or not m2.size:
        return Distribution(n, {}, kind)
    masks = (m1[:, None] ^ m2[None, :]).ravel()
    vals = (v1[:, None] * v2[None, :]).ravel()
    uniq, inv = np.unique(masks, return_inverse=True)
    sums = np.bincount(inv, weights=vals, minlength=uniq.size)
    return Distribution(n, dict(zip(uniq.tolist(), sums.tolist())), kind)


def convolution_power_exact(mu: Distribution, j: int) -> Distribution:
    """``mu^{*j}``: the ``(j+1)``-fold XOR convolution of ``mu``."""
    if j < 0:
        raise ValueError("j must be >= 0")
    if j == 0:
        return mu
    if mu.n <= 20:
        spec = fwht(mu.to_dense()) ** (j + 1)
        return Distribution.from_dense(fwht(spec, inplace=True) / (1 << mu.n), kind=mu.kind)
    out = mu
    for _ in range(j):
        out = convolve(out, mu, method="sparse")
    return out


def exact_powers(mu: Distribution, max_power: int) -> list[Distribution]:
    """``[mu^{*0}, ..., mu^{*max_power}]``."""
    return [convolution_power_exact(mu, j) for j in range(max_power + 1)]


# -- sampling --------------------------------------------------------------


class AliasTable:
    """Walker/Vose alias table for O(1) draws from a finite distribution."""

    def __init__(self, dist: Distribution):
        masks, vals = dist.arrays()
        keep = vals > 0
        masks, vals = masks[keep], vals[keep]
        if np.any(dist.arrays()[1] < 0):
            raise ValueError("cannot sample a distribution with negative entries")
        if not masks.size:
            raise ValueError("cannot sample an empty distribution")
        size = masks.size
        scaled = vals * (size / vals.sum())
        prob = np.ones(size)
        alias = np.arange(size)
        small = [i for i in range(size) if scaled[i] < 1.0]
        large = [i for i in range(size) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            g = large.pop()
            prob[s] = scaled[s]
            alias[s] = g
            scaled[g] -= 1.0 - scaled[s]
            (small if scaled[g] < 1.0 else large).append(g)
        self.masks = masks
        self.prob = prob
        self.alias = alias

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        idx = rng.integers(0, self.prob.size, size=size)
        flip = rng.random(size=size) >= self.prob[idx]
        idx = np.where(flip, self.alias[idx], idx)
        return self.masks[idx]


@dataclass(frozen=True)
class SampleBatch:
    """Outcome counts for convolution powers ``0 .. max_power``.

    With the ``prefix`` estimator ``counts[j]`` maps an outcome mask to the
    number of events in which the XOR of the first ``j + 1`` mu-samples
    equalled it.  The ``subsets`` estimator counts the XOR of every
    ``(j+1)``-subset of an event's mu-samples instead, so ``totals[j]`` is
    ``shots * C(J+1, j+1)``.
    """

    n: int
    shots: int
    seed: int
    counts: tuple[dict[int, int], ...]
    source: str = "p"
    estimator: str = "prefix"

    @property
    def totals(self) -> tuple[int, ...]:
        if self.estimator == "prefix":
            return (self.shots,) * len(self.counts)
        k = len(self.counts)
        return tuple(self.shots * comb(k, j + 1) for j in range(k))

    @property
    def max_power(self) -> int:
        return len(self.counts) - 1

    def empirical(self, j: int) -> Distribution:
        total = self.totals[j]
        return Distribution(self.n, {m: c / total for m, c in self.counts[j].items()})

    def distributions(self) -> list[Distribution]:
        return [self.empirical(j) for j in range(len(self.counts))]

    def p_samples_per_event(self) -> int:
        """p-draws consumed per measurement event (two per mu-sample)."""
        per_mu = 2 if self.source == "p" else 1
        return per_mu * (self.max_power + 1)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "shots": self.shots,
            "seed": self.seed,
            "source": self.source,
            "estimator": self.estimator,
            "powers": [
                {"power": j, "entries": [{"mask": hex(m), "count": c} for m, c in sorted(cnt.items())]}
                for j, cnt in enumerate(self.counts)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SampleBatch":
        powers = sorted(data["powers"], key=lambda p: p["power"])
        counts = tuple({int(e["mask"], 16): int(e["count"]) for e in p["entries"]} for p in powers)
        return cls(int(data["n"]), int(data["shots"]), int(data["seed"]), counts, data.get("source", "p"), data.get("estimator", "prefix"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# n={self.n} shots={self.shots} seed={self.seed} source={self.source} estimator={self.estimator}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["power", "mask", "count"])
        for j, cnt in enumerate(self.counts):
            for m, c in sorted(cnt.items()):
                w.writerow([j, hex(m), c])
        return buf.getvalue()


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``HGNOISE_THREADS``, else CPU count."""
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return threads


def _sample_chunk(table: AliasTable, seq, shots: int, max_power: int, per_mu: int, estimator: str):
    rng = np.random.default_rng(seq)
    draws = table.sample(rng, (shots, per_mu * (max_power + 1)))
    mu = draws[:, 0::2] ^ draws[:, 1::2] if per_mu == 2 else draws
    out = []
    if estimator == "prefix":
        prefix = np.bitwise_xor.accumulate(mu, axis=1)
        for j in range(max_power + 1):
            out.append(np.unique(prefix[:, j], return_counts=True))
        return out
    for j in range(max_power + 1):
        cols = [np.bitwise_xor.reduce(mu[:, list(sub)], axis=1) for sub in combinations(range(max_power + 1), j + 1)]
        out.append(np.unique(np.concatenate(cols), return_counts=True))
    return out


def sample_powers(
    dist: Distribution,
    shots: int,
    max_power: int,
    seed: int,
    source: str = "p",
    threads: int | None = None,
    estimator: str = "prefix",
) -> SampleBatch:
    """Emulate ``shots`` measurement events and histogram every power.

    Parameters
    ----------
    dist : Distribution
        The dephasing distribution p (``source="p"``, two draws per
        mu-sample) or mu itself (``source="mu"``).
    shots : int
        Number of measurement events.
    max_power : int
        Highest power ``J``; each event yields ``J + 1`` mu-samples.
    seed : int
        Master seed.  Work is split into fixed-size chunks, each seeded by
        its own child of ``SeedSequence(seed)``, so the result does not
        depend on the number of worker threads.
    source : {"p", "mu"}
    threads : int, optional
        Defaults to ``HGNOISE_THREADS`` or the CPU count.
    estimator : {"prefix", "subsets"}
        ``prefix`` uses one sample of each power per event (the XOR of the
        first ``j + 1`` mu-samples).  ``subsets`` averages over every
        ``(j+1)``-subset of the event's mu-samples; it is unbiased too and
        has lower variance at the same number of events.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if max_power < 0:
        raise ValueError("max_power must be >= 0")
    if source not in ("p", "mu"):
        raise ValueError("source must be 'p' or 'mu'")
    if estimator not in ("prefix", "subsets"):
        raise ValueError("estimator must be 'prefix' or 'subsets'")
    table = AliasTable(dist)
    per_mu = 2 if source == "p" else 1
    n_chunks = -(-shots // CHUNK_SHOTS)
    sizes = [CHUNK_SHOTS] * (n_chunks - 1) + [shots - CHUNK_SHOTS * (n_chunks - 1)]
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    workers = min(resolve_threads(threads), n_chunks)

    def run(i: int):
        return _sample_chunk(table, seqs[i], sizes[i], max_power, per_mu, estimator)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(n_chunks)))
    else:
        results = [run(i) for i in range(n_chunks)]

    counts = []
    for j in range(max_power + 1):
        acc: dict[int, int] = {}
        for res in results:
            for m, c in zip(res[j][0].tolist(), res[j][1].tolist()):
                acc[m] = acc.get(m, 0) + c
        counts.append(dict(sorted(acc.items())))
    return SampleBatch(dist.n, shots, seed, tuple(counts), source, estimator)


# -- distances -------------------------------------------------------------


def _diffs(d1: Distribution, d2: Distribution) -> np.ndarray:
    _same_n(d1, d2)
    keys = set(d1.entries) | set(d2.entries)
    return np.array([d1[k] - d2[k] for k in keys])


def l1(d1: Distribution, d2: Distribution) -> float:
    return float(np.abs(_diffs(d1, d2)).sum())


def l2(d1: Distribution, d2: Distribution) -> float:
    return float(np.sqrt((_diffs(d1, d2) ** 2).sum()))


def hamming_histogram(d: Distribution) -> np.ndarray:
    """Mass per Hamming weight ``0 .. n``."""
    masks, vals = d.arrays()
    return np.bincount(popcount(masks), weights=vals, minlength=d.n + 1)


# -- support propagation ---------------------------------------------------


def sumset(a: Iterable[int], b: Iterable[int]) -> set[int]:
    b = list(b)
    return {x ^ y for x in a for y in b}


def iterated_sumset(a: Iterable[int], copies: int) -> set[int]:
    """``A + A + ... + A`` with ``copies`` summands."""
    a = set(a)
    out = set(a)
    for _ in range(copies - 1):
        out = sumset(out, a)
    return out


def support_propagation_check(p: Distribution, support: Iterable[int]) -> tuple[float, float]:
    """Mass of ``mu = p * p`` on the sumset ``A + A``.

    Returns ``(epsilon, mass)`` with ``epsilon = 1 - sum_{a in A} p_a``; the
    mass is at least ``1 - 2 epsilon``.
    """
    a = set(support)
    if 0 not in a:
        raise ValueError("support set must contain 0")
    eps = 1.0 - sum(p[m] for m in a)
    mu = convolve(p, p)
    aa = sumset(a, a)
    mass = sum(v for m, v in mu.entries.items() if m in aa)
    return eps, mass


def power_support_check(mu: Distribution, support: Iterable[int], j: int) -> tuple[float, float]:
    """Mass of ``mu^{*j}`` on the ``(j+1)``-fold sumset of ``A``.

    ``epsilon`` is measured on mu; the mass is at least ``1 - (j+1) epsilon``.
    """
    a = set(support)
    if 0 not in a:
        raise ValueError("support set must contain 0")
    eps = 1.0 - sum(mu[m] for m in a)
    power = convolution_power_exact(mu, j)
    big = iterated_sumset(a, j + 1)
    mass = sum(v for m, v in power.entries.items() if m in big)
    return eps, mass


def sample_size_bound(support_size: int, epsilon: float, delta_f: float, norm: str = "l1", j: int = 0) -> int:
    """Order-of-magnitude shot count for accuracy ``epsilon`` w.p. ``1 - delta_f``.

    ``l1``: ``|A|^(j+1) eps^-2 ln(1/delta_f)``; ``l2``: ``eps^-2 ln(1/delta_f)``.
    Leading constants are set to one.
    """
    if not (0 < epsilon < 1 and 0 < delta_f < 1):
        raise ValueError("epsilon and delta_f must lie in (0, 1)")
    base = log(1.0 / delta_f) / epsilon**2
    if norm == "l2":
        return ceil(base)
    if norm == "l1":
        if support_size < 1:
            raise ValueError("support_size must be >= 1")
        return ceil(support_size ** (j + 1) * base)
    raise ValueError("norm must be 'l1' or 'l2'")

