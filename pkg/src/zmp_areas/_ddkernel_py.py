"""Pure-NumPy double-description inner step.

Mirrors the compiled kernel in _ddkernel.pyx; the driver in polyhedra.py
selects whichever is importable. Both must produce identical output (same
ray order), which the test suite checks when the compiled module exists.
"""

import numpy as np

BACKEND = "python"


def _rank_at_least(m, need, pivtol):
    """True if rank(m) >= need, by Gaussian elimination with partial pivoting.

    Pivot threshold is pivtol relative to the largest entry of m.
    """
    if need <= 0:
        return True
    rows, cols = m.shape
    if rows < need or cols < need:
        return False
    w = np.array(m, dtype=float)
    gmax = np.max(np.abs(w))
    if gmax == 0.0:
        return False
    thresh = pivtol * gmax
    rank = 0
    for col in range(cols):
        if rank + (cols - col) < need:
            return False
        piv = rank + int(np.argmax(np.abs(w[rank:, col])))
        if abs(w[piv, col]) <= thresh:
            continue
        if piv != rank:
            w[[rank, piv]] = w[[piv, rank]]
        w[rank + 1:, col:] -= np.outer(w[rank + 1:, col] / w[rank, col], w[rank, col:])
        rank += 1
        if rank >= need:
            return True
    return rank >= need


def combine_adjacent(rays, s, tight, rows, pos, neg, need, pivtol):
    """Combine adjacent (positive, negative) ray pairs across a new hyperplane.

    rays: (k, d) current rays; s: (k,) dots with the inserted row;
    tight: (k, m) uint8 flags over the already-processed rows; rows: (m, d)
    those rows; pos/neg: indices with s > 0 / s < 0; need: rank certifying
    adjacency (quotient dimension minus two). Returns the new rays, one per
    adjacent pair, in (pos-major, neg-minor) order.
    """
    if len(pos) == 0 or len(neg) == 0:
        return np.zeros((0, rays.shape[1]))
    tp = tight[pos].astype(np.int32)
    tn = tight[neg].astype(np.int32)
    counts = tp @ tn.T if tight.shape[1] else np.zeros((len(pos), len(neg)), dtype=np.int32)
    out = []
    for ip, p in enumerate(pos):
        tprow = tight[p]
        for iq, q in enumerate(neg):
            if counts[ip, iq] < need:
                continue
            common = np.flatnonzero(tprow & tight[q])
            if not _rank_at_least(rows[common], need, pivtol):
                continue
            out.append(s[p] * rays[q] - s[q] * rays[p])
    if not out:
        return np.zeros((0, rays.shape[1]))
    return np.array(out)
