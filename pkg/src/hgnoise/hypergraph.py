"""Hypergraphs, GF(2) phase polynomials and their directional derivatives.

Bit-order convention used across the package: bit ``i`` of a mask is qubit
``i + 1`` (the least significant bit is qubit 1).  Vertices are stored
0-based internally; the JSON format is 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 32


def _toggle(acc: set[int], item: int) -> None:
    # GF(2) insert: a repeated element cancels.
    if item in acc:
        acc.remove(item)
    else:
        acc.add(item)


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits_of(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class BoolPoly:
    """Multilinear polynomial over GF(2).

    Each monomial is a variable bitmask; ``0`` is the constant monomial.
    """

    n: int
    monomials: frozenset[int]

    @classmethod
    def from_monomials(cls, n: int, monomials: Iterable[int]) -> "BoolPoly":
        acc: set[int] = set()
        for m in monomials:
            if m >> n:
                raise ValueError(f"monomial {m:#x} uses variables beyond n={n}")
            _toggle(acc, m)
        return cls(n, frozenset(acc))

    @classmethod
    def zero(cls, n: int) -> "BoolPoly":
        return cls(n, frozenset())

    @property
    def degree(self) -> int:
        """Largest monomial size; -1 for the zero polynomial."""
        if not self.monomials:
            return -1
        return max(m.bit_count() for m in self.monomials)

    def is_zero(self) -> bool:
        return not self.monomials

    def __add__(self, other: "BoolPoly") -> "BoolPoly":
        if self.n != other.n:
            raise ValueError("variable counts differ")
        return BoolPoly(self.n, self.monomials ^ other.monomials)

    def sorted_monomials(self) -> list[int]:
        return sorted(self.monomials, key=lambda m: (m.bit_count(), bits_of(m)))

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        terms = []
        for m in self.sorted_monomials():
            terms.append("1" if m == 0 else "".join(f"x{i + 1}" for i in bits_of(m)))
        return " + ".join(terms)

    def __call__(self, x: int) -> int:
        return evaluate(self, x)


@dataclass(frozen=True)
class Hypergraph:
    """Vertex count plus a deduplicated set of hyperedges (vertex bitmasks)."""

    n: int
    edges: frozenset[int]

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"n must be in [1, {MAX_QUBITS}], got {self.n}")
        for e in self.edges:
            if e == 0 or e >> self.n:
                raise ValueError(f"edge {bits_of(e)} is empty or outside [n]")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        """Build from 0-based vertex lists; duplicate edges cancel in pairs."""
        acc: set[int] = set()
        for e in edges:
            verts = list(e)
            if len(set(verts)) != len(verts):
                raise ValueError(f"edge {verts} repeats a vertex")
            if any(v < 0 or v >= n for v in verts):
                raise ValueError(f"edge {verts} has a vertex outside [0, {n})")
            _toggle(acc, mask_of(verts))
        return cls(n, frozenset(acc))

    @property
    def k_max(self) -> int:
        return max((e.bit_count() for e in self.edges), default=0)

    def edge_list(self) -> list[list[int]]:
        return [bits_of(e) for e in sorted(self.edges, key=lambda e: (e.bit_count(), bits_of(e)))]

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [[v + 1 for v in e] for e in self.edge_list()]}

    @classmethod
    def from_json(cls, data: dict) -> "Hypergraph":
        n = int(data["n"])
        return cls.from_edges(n, [[int(v) - 1 for v in e] for e in data["edges"]])


def poly_from_graph(g: Hypergraph) -> BoolPoly:
    return BoolPoly(g.n, g.edges)


def evaluate(poly: BoolPoly, x: int) -> int:
    """Value of the polynomial at ``x`` (0 or 1)."""
    v = 0
    for m in poly.monomials:
        if x & m == m:
            v ^= 1
    return v


def evaluate_all(poly: BoolPoly, xs: np.ndarray | None = None) -> np.ndarray:
    """Vectorised evaluation; defaults to every ``x`` in ``[0, 2**n)``."""
    if xs is None:
        xs = np.arange(1 << poly.n, dtype=np.int64)
    xs = np.asarray(xs, dtype=np.int64)
    out = np.zeros(xs.shape, dtype=np.uint8)
    for m in poly.monomials:
        out ^= ((xs & m) == m).astype(np.uint8)
    return out


def directional_derivative(poly: BoolPoly, shift: int) -> BoolPoly:
    """``P(x + shift) + P(x)`` expanded symbolically.

    For a monomial ``x^m`` only the variables in ``m & shift`` get flipped, so
    the difference is the sum of ``x^(m - T)`` over nonempty ``T`` inside
    ``m & shift``.  Top-degree monomials therefore always cancel.
    """
    if shift >> poly.n:
        raise ValueError("shift has bits beyond n")
    acc: set[int] = set()
    for m in poly.monomials:
        hit = m & shift
        if not hit:
            continue
        sub = hit
        while sub:
            _toggle(acc, m & ~sub)
            sub = (sub - 1) & hit
    return BoolPoly(poly.n, frozenset(acc))


def higher_derivative(poly: BoolPoly, shifts: Sequence[int]) -> BoolPoly:
    if not shifts:
        raise ValueError("need at least one shift")
    out = poly
    for s in shifts:
        out = directional_derivative(out, s)
    return out


def vertex_degree(g: Hypergraph, v: int) -> int:
    """Number of edges containing vertex ``v`` (0-based)."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} outside [0, {g.n})")
    bit = 1 << v
    return sum(1 for e in g.edges if e & bit)


def neighborhood(g: Hypergraph, vertices: Iterable[int]) -> set[int]:
    """Union of all edges that meet ``vertices``."""
    s = mask_of(vertices)
    out = 0
    for e in g.edges:
        if e & s:
            out |= e
    return set(bits_of(out))


def vertex_neighbor_count(g: Hypergraph, v: int) -> int:
    """Number of other vertices sharing an edge with ``v``."""
    nb = neighborhood(g, [v])
    nb.discard(v)
    return len(nb)


def max_vertex_neighbors(g: Hypergraph) -> int:
    return max((vertex_neighbor_count(g, v) for v in range(g.n)), default=0)


def build_k4() -> Hypergraph:
    """Complete 3-uniform hypergraph on four vertices."""
    return Hypergraph.from_edges(4, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def union_jack_size(rows: int, cols: int) -> int:
    return (rows + 1) * (cols + 1) + rows * cols


def build_union_jack(rows: int, cols: int) -> Hypergraph:
    """Union Jack lattice of ``rows x cols`` square cells with open boundaries.

    Every cell has four corner qubits and one centre qubit.  Its two diagonals
    split it into four triangles (two adjacent corners plus the centre), each
    of which is a CCZ hyperedge.

    Numbering: corners first, row-major, corner ``(r, c)`` -> ``r*(cols+1)+c``;
    then centres row-major, centre of cell ``(r, c)`` ->
    ``(rows+1)*(cols+1) + r*cols + c``.  ``rows=2, cols=3`` gives 18 qubits.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    n = union_jack_size(rows, cols)
    if n > MAX_QUBITS:
        raise ValueError(f"Union Jack {rows}x{cols} needs {n} > {MAX_QUBITS} qubits")

    def corner(r: int, c: int) -> int:
        return r * (cols + 1) + c

    n_corners = (rows + 1) * (cols + 1)
    edges = []
    for r in range(rows):
        for c in range(cols):
            ctr = n_corners + r * cols + c
            tl, tr = corner(r, c), corner(r, c + 1)
            bl, br = corner(r + 1, c), corner(r + 1, c + 1)
            edges += [(tl, tr, ctr), (tr, br, ctr), (br, bl, ctr), (bl, tl, ctr)]
    return Hypergraph.from_edges(n, edges)
