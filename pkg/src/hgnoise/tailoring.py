"""Diagonal of a noisy hypergraph state in the ``{Z^a |psi>}`` basis.

For Pauli noise ``rho = sum_b eta_b T_b |psi><psi| T_b`` the tailored
distribution is

    p_a = sum_b eta_b * overlap(b_x, b_z + a),
    overlap(x, z) = [2^-n sum_c (-1)^(P(c + x) + P(c) + z.c)]^2,

so every X part ``x`` contributes the squared Walsh spectrum of the
derivative ``P(.|x)``, shifted by ``b_z``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .distribution import Distribution
from .hypergraph import BoolPoly, Hypergraph, bits_of, directional_derivative, evaluate_all, poly_from_graph
from .noise import PauliChannel
from .transform import check_dense_size, fwht

BRUTE_MAX_QUBITS = 20
LOCAL_MAX_VARS = 24
METHODS = ("auto", "brute", "local")


def _spectrum_brute(poly: BoolPoly) -> tuple[np.ndarray, np.ndarray]:
    n = poly.n
    if n > BRUTE_MAX_QUBITS:
        raise ValueError(f"brute-force path limited to n <= {BRUTE_MAX_QUBITS}, got {n}")
    signs = 1.0 - 2.0 * evaluate_all(poly)
    amp = fwht(signs, inplace=True) / (1 << n)
    sq = amp * amp
    idx = np.flatnonzero(sq > 1e-300)
    return idx.astype(np.int64), sq[idx]


def _spectrum_local(poly: BoolPoly) -> tuple[np.ndarray, np.ndarray]:
    # Variables outside the nonlinear part S enter linearly; summing over one
    # forces c_j to equal its linear coefficient.  Only S is enumerated.
    nonlinear = 0
    linear = 0
    for m in poly.monomials:
        if m.bit_count() >= 2:
            nonlinear |= m
        elif m.bit_count() == 1:
            linear ^= m
    s_bits = bits_of(nonlinear)
    d = len(s_bits)
    if d > LOCAL_MAX_VARS:
        raise ValueError(f"nonlinear part has {d} variables, limit {LOCAL_MAX_VARS}")
    free = linear & ~nonlinear
    if d == 0:
        return np.array([free], dtype=np.int64), np.array([1.0])

    # compress S onto bits 0..d-1
    pos = {v: i for i, v in enumerate(s_bits)}

    def squash(m: int) -> int:
        return sum(1 << pos[v] for v in bits_of(m))

    local = BoolPoly(d, frozenset(squash(m) for m in poly.monomials if m and not m & ~nonlinear))
    signs = 1.0 - 2.0 * evaluate_all(local)
    amp = fwht(signs, inplace=True) / (1 << d)
    sq = amp * amp
    idx = np.flatnonzero(sq > 1e-300)

    full = np.zeros(idx.size, dtype=np.int64)
    for i, v in enumerate(s_bits):
        full |= ((idx >> i) & 1) << v
    return full | free, sq[idx]


def derivative_spectrum(graph: Hypergraph, bx: int, method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Nonzero values of ``overlap(bx, z)`` as parallel arrays ``(z, value)``."""
    return _cached_spectrum(poly_from_graph(graph), bx, _pick(graph.n, method))


@lru_cache(maxsize=4096)
def _cached_spectrum(poly: BoolPoly, bx: int, method: str) -> tuple[np.ndarray, np.ndarray]:
    deriv = directional_derivative(poly, bx)
    z, v = _spectrum_brute(deriv) if method == "brute" else _spectrum_local(deriv)
    z.setflags(write=False)
    v.setflags(write=False)
    return z, v


def _pick(n: int, method: str) -> str:
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if method == "auto":
        return "brute" if n <= 10 else "local"
    return method


def overlap_sq(graph: Hypergraph, bx: int, bz_plus_a: int, method: str = "auto") -> float:
    """``|<psi| X^bx Z^(bz+a) |psi>|^2`` for the hypergraph state of ``graph``."""
    if (bx | bz_plus_a) >> graph.n:
        raise ValueError("mask has bits beyond n")
    z, v = derivative_spectrum(graph, bx, method)
    hit = np.flatnonzero(z == bz_plus_a)
    return float(v[hit[0]]) if hit.size else 0.0


def tailored_distribution(graph: Hypergraph, channel: PauliChannel, method: str = "auto") -> Distribution:
    """Diagonal ``p_a = <psi_a| rho |psi_a>`` of the twirled noisy state.

    The result sums to the channel's kept mass; truncated channels give a
    sub-normalized vector whose deficit equals ``channel.deficit``.
    """
    if channel.n != graph.n:
        raise ValueError("channel and graph act on different n")
    by_x: dict[int, list[tuple[int, float]]] = {}
    for t in channel.terms:
        by_x.setdefault(t.bx, []).append((t.bz, t.rate))

    n = graph.n
    dense = n <= 24
    if dense:
        check_dense_size(n)
        acc = np.zeros(1 << n)
    else:
        sparse: dict[int, float] = {}
    # fixed order over X parts keeps the floating-point sum reproducible
    for bx in sorted(by_x):
        z, v = derivative_spectrum(graph, bx, method)
        for bz, rate in sorted(by_x[bx]):
            if rate == 0.0:
                continue
            if dense:
                acc[z ^ bz] += rate * v
            else:
                for m, val in zip((z ^ bz).tolist(), (rate * v).tolist()):
                    sparse[m] = sparse.get(m, 0.0) + val
    if dense:
        return Distribution.from_dense(acc)
    return Distribution(n, sparse)


def dominant_support(p: Distribution, epsilon: float) -> set[int]:
    """Smallest set containing 0 that carries at least ``1 - epsilon`` of p.

    Greedy by descending value; ties go to the smaller mask.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    target = 1.0 - epsilon
    chosen = {0}
    mass = p[0]
    for m, v in sorted(p.entries.items(), key=lambda kv: (-kv[1], kv[0])):
        if mass >= target:
            break
        if m == 0:
            continue
        chosen.add(m)
        mass += v
    return chosen
