"""Walsh-Hadamard transform over Z_2^n."""

from __future__ import annotations

import numpy as np

MAX_DENSE_QUBITS = 24


def fwht(v: np.ndarray, inplace: bool = False) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform, ``(Hv)_b = sum_a (-1)^(a.b) v_a``.

    Applying it twice multiplies by ``len(v)``.
    """
    v = np.asarray(v)
    size = v.shape[0]
    if v.ndim != 1 or size == 0 or size & (size - 1):
        raise ValueError(f"length must be a power of two, got {v.shape}")
    out = v if inplace else v.astype(np.result_type(v.dtype, np.float64), copy=True)
    h = 1
    while h < size:
        # butterfly on pairs (i, i + h) for every block of width 2h
        blocks = out.reshape(-1, 2, h)
        a = blocks[:, 0, :].copy()
        blocks[:, 0, :] += blocks[:, 1, :]
        blocks[:, 1, :] = a - blocks[:, 1, :]
        h *= 2
    return out


def popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(x, dtype=np.uint64)).astype(np.int64)


def check_dense_size(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense vectors limited to n <= {MAX_DENSE_QUBITS}, got n={n}")
