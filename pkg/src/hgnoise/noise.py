"""Pauli error channels with per-qubit presets and weight truncation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .hypergraph import Hypergraph, bits_of

NORM_TOL = 1e-12
DEFAULT_CUTOFF = 4
PRESET_KINDS = ("depolarizing", "x", "z", "xz", "xz_total")


def pauli_weight(bx: int, bz: int) -> int:
    """Number of qubits acted on nontrivially (a Y counts once)."""
    return (bx | bz).bit_count()


@dataclass(frozen=True)
class PauliTerm:
    bx: int
    bz: int
    rate: float

    def __post_init__(self) -> None:
        if not -NORM_TOL <= self.rate <= 1 + NORM_TOL:
            raise ValueError(f"rate {self.rate} outside [0, 1]")

    @property
    def weight(self) -> int:
        return pauli_weight(self.bx, self.bz)


@dataclass(frozen=True)
class PauliChannel:
    """Sparse Pauli channel.

    ``deficit`` is the probability mass removed by weight truncation; the
    kept rates plus the deficit always sum to one.
    """

    n: int
    terms: tuple[PauliTerm, ...]
    deficit: float = field(default=0.0)

    def __post_init__(self) -> None:
        seen = set()
        for t in self.terms:
            key = (t.bx, t.bz)
            if key in seen:
                raise ValueError(f"duplicate Pauli term {key}")
            if (t.bx | t.bz) >> self.n:
                raise ValueError(f"term {key} acts outside n={self.n}")
            seen.add(key)
        total = sum(t.rate for t in self.terms) + self.deficit
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"rates plus deficit sum to {total}, not 1")

    @classmethod
    def from_rates(cls, n: int, rates: dict[tuple[int, int], float], deficit: float = 0.0) -> "PauliChannel":
        terms = tuple(PauliTerm(bx, bz, r) for (bx, bz), r in sorted(rates.items()))
        return cls(n, terms, deficit)

    @classmethod
    def identity(cls, n: int) -> "PauliChannel":
        return cls(n, (PauliTerm(0, 0, 1.0),))

    @property
    def kept_mass(self) -> float:
        return sum(t.rate for t in self.terms)

    def rates(self) -> dict[tuple[int, int], float]:
        return {(t.bx, t.bz): t.rate for t in self.terms}

    def max_weight(self) -> int:
        return max((t.weight for t in self.terms), default=0)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "terms": [{"bx": hex(t.bx), "bz": hex(t.bz), "rate": t.rate} for t in self.terms],
        }
        if self.deficit:
            out["deficit"] = self.deficit
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PauliChannel":
        rates = {(int(t["bx"], 16), int(t["bz"], 16)): float(t["rate"]) for t in data["terms"]}
        return cls.from_rates(int(data["n"]), rates, float(data.get("deficit", 0.0)))


def _single_qubit_rates(kind: str, tau: float) -> dict[tuple[int, int], float]:
    # (bx, bz) on one qubit -> rate
    if kind == "depolarizing":
        return {(0, 0): 1 - tau, (1, 0): tau / 3, (1, 1): tau / 3, (0, 1): tau / 3}
    if kind == "z":
        return {(0, 0): 1 - tau, (0, 1): tau}
    if kind == "x":
        return {(0, 0): 1 - tau, (1, 0): tau}
    if kind in ("xz", "xz_total"):
        # independent X and Z flips; xz_total splits tau between them
        t = tau if kind == "xz" else tau / 2
        return {(0, 0): (1 - t) ** 2, (1, 0): t * (1 - t), (0, 1): t * (1 - t), (1, 1): t * t}
    raise ValueError(f"unknown noise kind {kind!r}; expected one of {PRESET_KINDS}")


def _expand(n: int, factors: Iterable[tuple[int, dict[tuple[int, int], float]]], cutoff: int | None) -> PauliChannel:
    # Product-expand independent per-qubit channels, pruning at weight >= cutoff.
    # Weights only grow with further factors, so pruning early is exact.
    rates: dict[tuple[int, int], float] = {(0, 0): 1.0}
    dropped = 0.0
    for q, local in factors:
        new: dict[tuple[int, int], float] = {}
        for (bx, bz), r in rates.items():
            for (lx, lz), lr in local.items():
                key = (bx | (lx << q), bz | (lz << q))
                val = r * lr
                if cutoff is not None and pauli_weight(*key) >= cutoff:
                    dropped += val
                    continue
                new[key] = new.get(key, 0.0) + val
        rates = new
    rates = {k: v for k, v in rates.items() if v > 0.0 or k == (0, 0)}
    return PauliChannel.from_rates(n, rates, dropped)


def preset_local(
    n: int,
    graph: Hypergraph | None,
    kind: str,
    tau: float,
    cutoff: int | None = DEFAULT_CUTOFF,
) -> PauliChannel:
    """Independent single-qubit noise on every qubit touched by an edge.

    Parameters
    ----------
    n : int
        Qubit count.
    graph : Hypergraph or None
        Noise acts on vertices covered by at least one edge.  ``None`` puts
        noise on every qubit.
    kind : {"depolarizing", "x", "z", "xz", "xz_total"}
        ``xz`` flips X and Z independently with probability ``tau`` each;
        ``xz_total`` uses ``tau / 2`` each.
    tau : float
        Per-qubit error probability.
    cutoff : int or None
        Terms of weight ``>= cutoff`` are not materialized; their mass is
        recorded in ``deficit``.  ``None`` expands fully.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    if graph is not None and graph.n != n:
        raise ValueError("graph size does not match n")
    local = _single_qubit_rates(kind, tau)
    if graph is None:
        qubits = list(range(n))
    else:
        covered = 0
        for e in graph.edges:
            covered |= e
        qubits = bits_of(covered)
    return _expand(n, ((q, local) for q in qubits), cutoff)


def compose(c1: PauliChannel, c2: PauliChannel, cutoff: int | None = None) -> PauliChannel:
    """Channel applying ``c1`` then ``c2`` (Pauli phases are irrelevant)."""
    if c1.n != c2.n:
        raise ValueError("channels act on different qubit counts")
    rates: dict[tuple[int, int], float] = {}
    dropped = 0.0
    for t1 in c1.terms:
        for t2 in c2.terms:
            key = (t1.bx ^ t2.bx, t1.bz ^ t2.bz)
            val = t1.rate * t2.rate
            if cutoff is not None and pauli_weight(*key) >= cutoff:
                dropped += val
                continue
            rates[key] = rates.get(key, 0.0) + val
    rates.setdefault((0, 0), 0.0)
    deficit = 1.0 - (1.0 - c1.deficit) * (1.0 - c2.deficit) + dropped
    return PauliChannel.from_rates(c1.n, rates, deficit)


def truncate_by_weight(c: PauliChannel, K: int) -> tuple[PauliChannel, float]:
    """Keep terms of weight ``< K``; rates are not renormalized.

    Returns the truncated channel and the probability mass it dropped.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    kept = [t for t in c.terms if t.weight < K]
    dropped = sum(t.rate for t in c.terms if t.weight >= K)
    if K == 0:
        # everything goes, but keep an empty identity slot
        kept = [PauliTerm(0, 0, 0.0)]
    return PauliChannel(c.n, tuple(kept), c.deficit + dropped), dropped


def tail_bound(n: int, tau: float, K: int) -> float:
    """Bound ``n * (n**2 * tau)**K`` on the mass of errors with weight ``>= K``.

    Leading constant set to one; meaningful for local noise with per-qubit
    rate ``tau``.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    x = n * n * tau
    if x >= 1.0:
        raise ValueError(f"tail bound needs n^2 tau < 1, got {x}")
    return n * x**K
