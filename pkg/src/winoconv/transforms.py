"""Exact generation of short-convolution transform matrices.

A transform set (AT, G, BT) computes m correlation outputs from a
length-r kernel and a length t = m + r - 1 input window using only t
elementwise multiplies:

    out = AT @ ((G @ kernel) * (BT @ window))

Construction is evaluation/interpolation: both operands are sampled at
m + r - 2 distinct rational points plus the point at infinity, the
samples are multiplied pointwise, and the product polynomial is
recovered by Lagrange interpolation.  G holds the kernel sampling
(Vandermonde rows), BT the transposed interpolation, AT the transposed
output sampling.  Two conventional rescalings keep the matrices tidy
without changing the product: the 1/f_i Lagrange denominators are moved
from BT onto the matching G rows, and two sign fixups (row 0 when its
denominator is negative, and the infinity row so its lowest-order
coefficient is positive) are cancelled against G row 0 and the last AT
column.  Everything here is Fraction arithmetic; float32 copies are
rounded once at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ArityError, ConstructionError, UnsupportedVariantError

Rational = Fraction
Matrix = tuple[tuple[Fraction, ...], ...]

# Tile sizes above this produce transform entries large enough to eat
# most of a float32 mantissa; refuse unless the caller overrides.
MAX_DEFAULT_TILE = 4


@dataclass(frozen=True)
class TransformSet:
    """Matrices for one 1-D transform, exact and rounded forms."""

    m: int
    r: int
    points: tuple[Fraction, ...]
    at_q: Matrix
    g_q: Matrix
    bt_q: Matrix
    at: np.ndarray
    g: np.ndarray
    bt: np.ndarray

    @property
    def t(self) -> int:
        return self.m + self.r - 1


def default_points(count: int) -> tuple[Fraction, ...]:
    """First `count` entries of 0, 1, -1, 2, -2, 3, -3, ..."""
    pts = [Fraction(0)]
    k = 1
    while len(pts) < count:
        pts.append(Fraction(k))
        pts.append(Fraction(-k))
        k += 1
    return tuple(pts[:count])


def _poly_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _poly_from_roots(roots: Sequence[Fraction]) -> list[Fraction]:
    """Monic polynomial with the given roots, coefficients low order first."""
    poly = [Fraction(1)]
    for a in roots:
        poly = _poly_mul(poly, [-a, Fraction(1)])
    return poly


def _to_float32(mat: Matrix) -> np.ndarray:
    arr = np.array([[float(v) for v in row] for row in mat], dtype=np.float32)
    arr.flags.writeable = False
    return arr


def generate_1d(
    m: int,
    r: int,
    points: Optional[Sequence[Union[int, Fraction]]] = None,
    *,
    allow_large_tiles: bool = False,
) -> TransformSet:
    """Build the (AT, G, BT) set for m outputs and an r-tap kernel.

    `points` are the finite sampling points; infinity is always implied
    as the last node.  Omitted points default to default_points(m+r-2).
    """
    if m < 1 or r < 1:
        raise ConstructionError(f"m and r must be >= 1, got m={m} r={r}")
    if m > MAX_DEFAULT_TILE and not allow_large_tiles:
        raise UnsupportedVariantError(
            f"tile size m={m} exceeds {MAX_DEFAULT_TILE}; float32 transforms "
            "degrade quickly, pass allow_large_tiles=True to force it"
        )
    n_pts = m + r - 2
    if points is None:
        pts = default_points(n_pts)
    else:
        pts = tuple(Fraction(p) for p in points)
    if len(pts) != n_pts:
        raise ArityError(
            f"m={m} r={r} needs m+r-2 = {n_pts} finite points, got {len(pts)}"
        )
    if len(set(pts)) != len(pts):
        dup = next(p for i, p in enumerate(pts) if p in pts[:i])
        raise ConstructionError(f"sampling points must be distinct, {dup} repeats")
    t = m + r - 1

    # Lagrange denominators, with the conventional sign flip on row 0.
    f = [Fraction(1)] * n_pts
    for i, a in enumerate(pts):
        for k, b in enumerate(pts):
            if k != i:
                f[i] *= a - b
    f_adj = list(f)
    if n_pts > 0 and f_adj[0] < 0:
        f_adj[0] = -f_adj[0]

    # Product polynomial over all finite points, and the sign that makes
    # its lowest-order nonzero coefficient positive.
    master = _poly_from_roots(pts)
    sigma = Fraction(1)
    for coeff in master:
        if coeff != 0:
            sigma = Fraction(1) if coeff > 0 else Fraction(-1)
            break

    g_rows: list[tuple[Fraction, ...]] = []
    bt_rows: list[tuple[Fraction, ...]] = []
    for i, a in enumerate(pts):
        g_rows.append(tuple(a**j / f_adj[i] for j in range(r)))
        numer = _poly_from_roots([b for k, b in enumerate(pts) if k != i])
        scale = f_adj[i] / f[i]
        bt_rows.append(tuple(scale * c for c in numer) + (Fraction(0),))
    g_rows.append(tuple(Fraction(1 if j == r - 1 else 0) for j in range(r)))
    bt_rows.append(tuple(sigma * c for c in master))

    at_rows = []
    for j in range(m):
        row = [a**j for a in pts]
        row.append(sigma if j == m - 1 else Fraction(0))
        at_rows.append(tuple(row))

    at_q: Matrix = tuple(at_rows)
    g_q: Matrix = tuple(g_rows)
    bt_q: Matrix = tuple(bt_rows)
    return TransformSet(
        m=m,
        r=r,
        points=pts,
        at_q=at_q,
        g_q=g_q,
        bt_q=bt_q,
        at=_to_float32(at_q),
        g=_to_float32(g_q),
        bt=_to_float32(bt_q),
    )


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of the exhaustive basis check of one transform set."""

    ok: bool
    pairs_checked: int
    failures: tuple[tuple[int, int, tuple, tuple], ...]

    def __str__(self) -> str:
        if self.ok:
            return f"ok: {self.pairs_checked} basis pairs exact"
        lines = [f"FAILED {len(self.failures)} of {self.pairs_checked} basis pairs:"]
        for i, j, got, want in self.failures:
            lines.append(
                f"  window basis e{i} x kernel basis e{j}: got {list(got)}, want {list(want)}"
            )
        return "\n".join(lines)


def verify_transform_set(ts: TransformSet) -> VerificationReport:
    """Check AT((G w) * (BT x)) against direct correlation, exactly.

    Runs every (window basis, kernel basis) pair in rational arithmetic,
    so a pass certifies the identity for all real inputs by linearity.
    """
    t, m, r = ts.t, ts.m, ts.r
    failures = []
    for i in range(t):
        x = [Fraction(1 if p == i else 0) for p in range(t)]
        btx = [sum(ts.bt_q[row][k] * x[k] for k in range(t)) for row in range(t)]
        for j in range(r):
            w = [Fraction(1 if u == j else 0) for u in range(r)]
            gw = [sum(ts.g_q[row][k] * w[k] for k in range(r)) for row in range(t)]
            had = [gw[row] * btx[row] for row in range(t)]
            got = tuple(
                sum(ts.at_q[row][k] * had[k] for k in range(t)) for row in range(m)
            )
            want = tuple(sum(x[p + u] * w[u] for u in range(r)) for p in range(m))
            if got != want:
                failures.append((i, j, got, want))
    return VerificationReport(
        ok=not failures, pairs_checked=t * r, failures=tuple(failures)
    )


def format_transform_set(ts: TransformSet) -> str:
    """Readable dump with exact p/q entries, one block per matrix."""
    header = (
        f"m={ts.m} r={ts.r} t={ts.t} "
        f"points=[{', '.join(str(p) for p in ts.points)}, inf]"
    )
    blocks = [header]
    for label, mat in (("G", ts.g_q), ("BT", ts.bt_q), ("AT", ts.at_q)):
        rows = len(mat)
        cols = len(mat[0])
        cells = [[str(v) for v in row] for row in mat]
        width = max(len(s) for row in cells for s in row)
        blocks.append(f"{label} ({rows}x{cols})")
        for row in cells:
            blocks.append("  " + "  ".join(s.rjust(width) for s in row))
    return "\n".join(blocks)
