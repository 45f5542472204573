"""Sparse (quasi-)probability vectors over Z_2^n."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .transform import check_dense_size

SUM_TOL = 1e-9
KINDS = ("prob", "quasi")


@dataclass(frozen=True, eq=False)
class Distribution:
    """Map from bitmask to value.

    ``kind="prob"`` requires nonnegative values; ``"quasi"`` allows
    negatives.  Normalization is checked by :meth:`validate` rather than on
    construction because truncated channels give sub-normalized vectors.
    """

    n: int
    entries: Mapping[int, float]
    kind: str = "prob"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if not 1 <= self.n <= 32:
            raise ValueError(f"n must be in [1, 32], got {self.n}")
        clean = {}
        for m, v in self.entries.items():
            m = int(m)
            if m < 0 or m >> self.n:
                raise ValueError(f"mask {m:#x} outside n={self.n}")
            clean[m] = float(v)
        object.__setattr__(self, "entries", MappingProxyType(dict(sorted(clean.items()))))

    @classmethod
    def point(cls, n: int, mask: int = 0) -> "Distribution":
        return cls(n, {mask: 1.0})

    @classmethod
    def from_dense(cls, arr: np.ndarray, kind: str = "prob", atol: float = 0.0) -> "Distribution":
        arr = np.asarray(arr, dtype=float)
        n = int(arr.shape[0]).bit_length() - 1
        if arr.ndim != 1 or 1 << n != arr.shape[0]:
            raise ValueError("dense length must be a power of two")
        idx = np.flatnonzero(np.abs(arr) > atol)
        return cls(n, dict(zip(idx.tolist(), arr[idx].tolist())), kind)

    def to_dense(self) -> np.ndarray:
        check_dense_size(self.n)
        out = np.zeros(1 << self.n)
        for m, v in self.entries.items():
            out[m] = v
        return out

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Support masks and values as parallel arrays."""
        masks = np.fromiter(self.entries.keys(), dtype=np.int64, count=len(self.entries))
        vals = np.fromiter(self.entries.values(), dtype=float, count=len(self.entries))
        return masks, vals

    def __getitem__(self, mask: int) -> float:
        return self.entries.get(mask, 0.0)

    def __len__(self) -> int:
        return len(self.entries)

    def support(self) -> list[int]:
        return [m for m, v in self.entries.items() if v != 0.0]

    def total(self) -> float:
        return float(sum(self.entries.values()))

    def infidelity(self) -> float:
        return 1.0 - self[0]

    def negativity(self) -> float:
        """Total negative mass (zero for a probability vector)."""
        return -sum(v for v in self.entries.values() if v < 0)

    def l1_norm(self) -> float:
        return float(sum(abs(v) for v in self.entries.values()))

    def validate(self, tol: float = SUM_TOL) -> "Distribution":
        s = self.total()
        if abs(s - 1.0) > tol:
            raise ValueError(f"values sum to {s}, not 1")
        if self.kind == "prob" and any(v < -tol for v in self.entries.values()):
            raise ValueError("probability distribution has negative entries")
        return self

    def pruned(self, atol: float = 0.0) -> "Distribution":
        return Distribution(self.n, {m: v for m, v in self.entries.items() if abs(v) > atol}, self.kind)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "entries": [{"mask": hex(m), "value": v} for m, v in self.entries.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Distribution":
        entries: dict[int, float] = {}
        for e in data["entries"]:
            m = int(e["mask"], 16)
            entries[m] = entries.get(m, 0.0) + float(e["value"])
        return cls(int(data["n"]), entries, data.get("kind", "prob"))

    def __repr__(self) -> str:
        return f"Distribution(n={self.n}, kind={self.kind!r}, support={len(self)}, delta={self.infidelity():.4g})"
