"""Blocked single-precision GEMM with optional multiply counting.

Row-major, no transposes: out = A @ B (+ C when beta=1).  The kernel
walks block_m x block_k panels of A against block_k x block_n panels of
B so the A panel stays resident while B streams past.  Default blocks
target a 32 KiB L1: the packed A panel is 32*128 floats = 16 KiB, half
of L1, leaving room for the B stream and the output tile.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SizeError


@dataclass(frozen=True)
class GemmConfig:
    block_m: int = 32
    block_n: int = 512
    block_k: int = 128
    counters_enabled: bool = True

    def __post_init__(self):
        if min(self.block_m, self.block_n, self.block_k) < 1:
            raise SizeError(
                f"block sizes must be >= 1, got "
                f"({self.block_m}, {self.block_n}, {self.block_k})"
            )


DEFAULT_CONFIG = GemmConfig()


class MacCounter:
    """Multiply-accumulate tally.  One instance per measurement context;
    add() is locked so threaded GEMM batches can share a counter.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._total = 0

    def add(self, n: int) -> None:
        with self._lock:
            self._total += int(n)

    def mac_count(self) -> int:
        return self._total

    def reset_counters(self) -> None:
        with self._lock:
            self._total = 0


def gemm(
    a: np.ndarray,
    b: np.ndarray,
    beta: int = 0,
    c: Optional[np.ndarray] = None,
    *,
    config: GemmConfig = DEFAULT_CONFIG,
    counter: Optional[MacCounter] = None,
) -> np.ndarray:
    """out = A @ B, plus C when beta=1.  Counts p*q*s multiplies.

    beta=0 writes a fresh array; beta=1 accumulates into c in place and
    returns it.
    """
    a = np.asarray(a, dtype=np.float32)
    b = np.asarray(b, dtype=np.float32)
    if a.ndim != 2 or b.ndim != 2:
        raise SizeError(f"gemm needs 2-D operands, got {a.shape} and {b.shape}")
    p, q = a.shape
    q2, s = b.shape
    if q != q2:
        raise SizeError(f"inner dims disagree: A is {a.shape}, B is {b.shape}")
    if beta == 0:
        out = np.zeros((p, s), dtype=np.float32)
    elif beta == 1:
        if c is None:
            raise SizeError("beta=1 needs an accumulator c")
        if c.shape != (p, s) or c.dtype != np.float32:
            raise SizeError(f"accumulator must be float32 {(p, s)}, got {c.shape}")
        out = c
    else:
        raise SizeError(f"beta must be 0 or 1, got {beta}")

    bm, bn, bk = config.block_m, config.block_n, config.block_k
    for i0 in range(0, p, bm):
        i1 = min(i0 + bm, p)
        for k0 in range(0, q, bk):
            k1 = min(k0 + bk, q)
            a_panel = a[i0:i1, k0:k1]
            for j0 in range(0, s, bn):
                j1 = min(j0 + bn, s)
                out[i0:i1, j0:j1] += a_panel @ b[k0:k1, j0:j1]
    if counter is not None and config.counters_enabled:
        counter.add(p * q * s)
    return out
