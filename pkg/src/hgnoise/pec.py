"""Quasi-probability inverses of Z-dephasing channels for error cancellation.

A dephasing channel with distribution p over Z-masks is undone by the
quasi-probability q with ``q * p = delta_0``.  In the Walsh basis this is
``q = 2^-n H (1 / Hp)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, comb, log

import numpy as np

from .distribution import Distribution
from .transform import check_dense_size, fwht

SINGULAR_TOL = 1e-15


@dataclass(frozen=True)
class PecPlan:
    """Quasi-probability over Z-masks plus its l1 norm (the sampling cost)."""

    q: Distribution
    kind: str

    @property
    def l1_norm(self) -> float:
        return self.q.l1_norm()

    def to_json(self) -> dict:
        return {"kind": self.kind, "l1_norm": self.l1_norm, "q": self.q.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "PecPlan":
        return cls(Distribution.from_json(data["q"]), data["kind"])


def pec_exact(p: Distribution, atol: float = 1e-15) -> PecPlan:
    """Exact inverse ``q = 2^-n H (1 / Hp)``; normalized so that ``sum q = 1``."""
    check_dense_size(p.n)
    spec = fwht(p.to_dense())
    bad = np.flatnonzero(np.abs(spec) < SINGULAR_TOL)
    if bad.size:
        raise ValueError(f"singular spectrum at b = {[hex(b) for b in bad[:5].tolist()]}")
    q = fwht(1.0 / spec, inplace=True) / (1 << p.n)
    return PecPlan(Distribution.from_dense(q, kind="quasi", atol=atol), "exact")


def pec_approx(p: Distribution) -> PecPlan:
    """First-order inverse ``q_0 = 2 - p_0``, ``q_a = -p_a``; l1 norm ``1 + 2 delta``."""
    entries = {m: -v for m, v in p.entries.items() if m != 0}
    entries[0] = 2.0 - p[0]
    return PecPlan(Distribution(p.n, entries, kind="quasi"), "approx")


def overhead(plan: PecPlan, epsilon: float, delta_f: float) -> int:
    """Shots for accuracy ``epsilon`` w.p. ``1 - delta_f``: ``l1^2 eps^-2 ln(1/delta_f)``.

    Leading constant set to one.
    """
    if not (0 < epsilon < 1 and 0 < delta_f < 1):
        raise ValueError("epsilon and delta_f must lie in (0, 1)")
    return ceil(plan.l1_norm**2 * log(1.0 / delta_f) / epsilon**2)


def bias_bound_downstream(L: int, M: float, eps_per_state: float) -> float:
    """Bias of an L-gate mitigated circuit when each inverse is off by ``eps``.

    First order ``M L eps`` plus the pairwise term ``M^2 C(L, 2) eps^2``.
    """
    if L < 0 or M < 0 or eps_per_state < 0:
        raise ValueError("arguments must be nonnegative")
    return M * L * eps_per_state + M**2 * comb(L, 2) * eps_per_state**2
