"""Dense small-n checks of the twirl and of the two-copy measurement circuit.

Used to certify once that the distribution-level emulation in
:mod:`hgnoise.sampler` matches the quantum protocol.  Limited to n <= 4.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .distribution import Distribution
from .hypergraph import (
    BoolPoly,
    Hypergraph,
    bits_of,
    directional_derivative,
    evaluate_all,
    poly_from_graph,
)
from .noise import PauliChannel
from .sampler import convolve
from .tailoring import tailored_distribution

MAX_VERIFY_QUBITS = 4
OFFDIAG_TOL = 1e-10
UNIFORM_TOL = 1e-12
DIST_TOL = 1e-10


def _check_size(n: int) -> None:
    if n > MAX_VERIFY_QUBITS:
        raise ValueError(f"dense verification limited to n <= {MAX_VERIFY_QUBITS}, got {n}")


def _phase_signs(poly: BoolPoly) -> np.ndarray:
    return 1.0 - 2.0 * evaluate_all(poly)


def graph_basis(graph: Hypergraph) -> np.ndarray:
    """Columns are ``|psi_a> = Z^a U_E |+>^n`` for ``a = 0 .. 2^n - 1``."""
    n = graph.n
    x = np.arange(1 << n)
    base = _phase_signs(poly_from_graph(graph)) / np.sqrt(1 << n)
    parity = np.bitwise_count((x[:, None] & x[None, :]).astype(np.uint64)) & 1
    return base[:, None] * (1.0 - 2.0 * parity)


def pauli_matrix(n: int, bx: int, bz: int) -> np.ndarray:
    """Dense ``X^bx Z^bz`` in the computational basis."""
    x = np.arange(1 << n)
    signs = 1.0 - 2.0 * (np.bitwise_count((x & bz).astype(np.uint64)) & 1)
    mat = np.zeros((1 << n, 1 << n))
    mat[x ^ bx, x] = signs
    return mat


def channel_kraus(channel: PauliChannel) -> list[np.ndarray]:
    return [np.sqrt(t.rate) * pauli_matrix(channel.n, t.bx, t.bz) for t in channel.terms if t.rate > 0]


def random_kraus(n: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Kraus operators of a generic (non-Pauli) CPTP map, via a random isometry."""
    dim = 1 << n
    g = rng.normal(size=(count * dim, dim)) + 1j * rng.normal(size=(count * dim, dim))
    iso, _ = np.linalg.qr(g)
    return [iso[i * dim:(i + 1) * dim, :] for i in range(count)]


@dataclass
class TwirlReport:
    n: int
    max_offdiag: float
    max_diag_change: float
    max_tailoring_dev: float | None
    passed: bool

    def to_json(self) -> dict:
        return asdict(self)


def verify_twirl(graph: Hypergraph, noise) -> TwirlReport:
    """Apply ``rho -> 2^-n sum_a X_psi^a rho X_psi^a`` and inspect the result.

    Parameters
    ----------
    graph : Hypergraph
    noise : PauliChannel or list of ndarray
        A Pauli channel (also compared against the analytic tailored
        distribution) or arbitrary Kraus operators.
    """
    n = graph.n
    _check_size(n)
    dim = 1 << n
    basis = graph_basis(graph)
    psi = basis[:, 0]
    kraus = channel_kraus(noise) if isinstance(noise, PauliChannel) else list(noise)
    rho = sum(k @ np.outer(psi, psi.conj()) @ k.conj().T for k in kraus)

    u = np.diag(_phase_signs(poly_from_graph(graph)))
    twirled = np.zeros((dim, dim), dtype=complex)
    for a in range(dim):
        xa = u @ pauli_matrix(n, a, 0) @ u
        twirled += xa @ rho @ xa
    twirled /= dim

    before = basis.conj().T @ rho @ basis
    after = basis.conj().T @ twirled @ basis
    diag = np.real(np.diag(after))
    off = after - np.diag(np.diag(after))
    max_off = float(np.max(np.abs(off)))
    diag_change = float(np.max(np.abs(np.diag(after) - np.diag(before))))
    tailoring_dev = None
    if isinstance(noise, PauliChannel):
        p = tailored_distribution(graph, noise).to_dense()
        tailoring_dev = float(np.max(np.abs(p - diag)))
    passed = max_off <= OFFDIAG_TOL and diag_change <= OFFDIAG_TOL
    if tailoring_dev is not None:
        passed = passed and tailoring_dev <= OFFDIAG_TOL
    return TwirlReport(n, max_off, diag_change, tailoring_dev, bool(passed))


def correction_gates(graph: Hypergraph, u_prime: int) -> tuple[list[tuple[int, int]], list[int], int]:
    """CZ pairs, Z qubits and global sign bit implementing ``(-1)^P(x|u')``.

    Raises if the derivative has a cubic term, which cannot happen for
    hyperedges of size at most 3.
    """
    deriv = directional_derivative(poly_from_graph(graph), u_prime)
    if deriv.degree > 2:
        raise ValueError("derivative has degree > 2; not a CZ/Z layer")
    cz, z, const = [], [], 0
    for m in deriv.sorted_monomials():
        if m == 0:
            const = 1
        elif m.bit_count() == 1:
            z.append(bits_of(m)[0])
        else:
            a, b = bits_of(m)
            cz.append((a, b))
    return cz, z, const


def _apply_cnots(state: np.ndarray, n: int) -> np.ndarray:
    # CNOT from qubit i (register 1) onto qubit i + n (register 2), all i.
    idx = np.arange(state.size)
    x = idx & ((1 << n) - 1)
    xp = idx >> n
    out = np.empty_like(state)
    out[x | ((xp ^ x) << n)] = state
    return out


@dataclass
class TwoCopyReport:
    n: int
    max_uniform_dev: float
    max_conv_dev: float
    max_uprime_spread: float
    corrected: bool
    passed: bool
    final: list[float]

    def to_json(self) -> dict:
        return asdict(self)


def verify_two_copy(graph: Hypergraph, p: Distribution, apply_correction: bool = True) -> TwoCopyReport:
    """Simulate the two-copy circuit on ``rho_p (x) rho_p``.

    The input is held as a mixture of product states ``psi_a (x) psi_b`` with
    weights ``p_a p_b``.  After the transversal CNOT layer the second register
    is measured in Z (outcome ``u'``), the phase layer ``(-1)^P(x|u')`` is
    applied to the first register, and it is measured in the X basis.
    """
    n = graph.n
    _check_size(n)
    if p.n != n:
        raise ValueError("distribution and graph act on different n")
    dim = 1 << n
    basis = graph_basis(graph)
    pd = p.to_dense()
    x = np.arange(dim)
    hadamard = 1.0 - 2.0 * (np.bitwise_count((x[:, None] & x[None, :]).astype(np.uint64)) & 1)
    hadamard /= np.sqrt(dim)

    poly = poly_from_graph(graph)
    phases = [_phase_signs(directional_derivative(poly, up)) for up in range(dim)]
    prob_uprime = np.zeros(dim)
    joint = np.zeros((dim, dim))  # [u', u]
    for a in np.flatnonzero(pd):
        for b in np.flatnonzero(pd):
            w = pd[a] * pd[b]
            state = _apply_cnots(np.kron(basis[:, b], basis[:, a]), n)
            block = state.reshape(dim, dim)  # [x', x]
            for up in range(dim):
                amp = block[up]
                pu = float(np.vdot(amp, amp).real)
                prob_uprime[up] += w * pu
                phi = amp / np.sqrt(pu)
                if apply_correction:
                    phi = phi * phases[up]
                joint[up] += w * pu * np.abs(hadamard @ phi) ** 2

    target = convolve(p, p).to_dense()
    final = joint / prob_uprime[:, None]
    uniform_dev = float(np.max(np.abs(prob_uprime - 1.0 / dim)))
    conv_dev = float(np.max(np.abs(final - target[None, :]).sum(axis=1)))
    spread = float(max(np.abs(final[i] - final[j]).sum() for i in range(dim) for j in range(dim)))
    passed = uniform_dev <= UNIFORM_TOL and conv_dev <= DIST_TOL and spread <= DIST_TOL
    return TwoCopyReport(n, uniform_dev, conv_dev, spread, apply_correction, bool(passed), final[0].tolist())


def final_distribution(report: TwoCopyReport) -> Distribution:
    return Distribution.from_dense(np.asarray(report.final))

