"""Interface states from cell-centred primitives."""

from __future__ import annotations

import numpy as np

from ..engine import LoopBounds, LoopPolicy, device, kernel, par_for
from ..mesh import NVAR


@device
def mc_slope(dl, dr):
    """Monotonized-central limited slope from the two one-sided differences."""
    if dl * dr <= 0.0:
        return 0.0
    lim = min(2.0 * abs(dl), min(2.0 * abs(dr), 0.5 * abs(dl + dr)))
    return lim if dl > 0.0 else -lim


@kernel
def donor_kernel(k, j, i, args):
    w, wl, wr, dk, dj, di = args
    for v in range(8):
        wl[v, k, j, i] = w[v, k - dk, j - dj, i - di]
        wr[v, k, j, i] = w[v, k, j, i]


@kernel
def plm_kernel(k, j, i, args):
    """Face (k, j, i) sits between cells (k, j, i) - d and (k, j, i)."""
    w, wl, wr, dk, dj, di = args
    for v in range(8):
        wm2 = w[v, k - 2 * dk, j - 2 * dj, i - 2 * di]
        wm1 = w[v, k - dk, j - dj, i - di]
        w0 = w[v, k, j, i]
        wp1 = w[v, k + dk, j + dj, i + di]
        sl = mc_slope(wm1 - wm2, w0 - wm1)
        sr = mc_slope(w0 - wm1, wp1 - w0)
        wl[v, k, j, i] = wm1 + 0.5 * sl
        wr[v, k, j, i] = w0 - 0.5 * sr


def reconstruct(policy: LoopPolicy, bounds: LoopBounds, w, wl, wr, dim: int, order: int) -> None:
    """Fill ``wl``/``wr`` on the ``dim`` faces inside ``bounds``."""
    step = (int(dim == 3), int(dim == 2), int(dim == 1))
    body = plm_kernel if order == 2 else donor_kernel
    par_for(policy, bounds, body, (w, wl, wr) + step)


def plm_reconstruct(w_line, policy: LoopPolicy | None = None):
    """PLM interface states along a 1-D line of primitives.

    ``w_line`` has shape (ncell, 8) (or is a sequence of PrimState) and must
    include two ghost cells at each end.  Returns ``(left, right)`` arrays of
    shape (ncell - 3, 8) for the interfaces between cells ``m-1`` and ``m``,
    ``m = 2 .. ncell-2``.
    """
    rows = [np.asarray(r.as_array() if hasattr(r, "as_array") else r, dtype=float)
            for r in w_line]
    line = np.array(rows, dtype=float).reshape(len(rows), -1)
    n, nv = line.shape
    if n < 5:
        raise ValueError("plm_reconstruct needs at least one interior cell and two ghosts per side")
    w = np.zeros((NVAR, 1, 1, n))
    w[:nv, 0, 0, :] = line.T
    wl = np.zeros_like(w)
    wr = np.zeros_like(w)
    reconstruct(policy or LoopPolicy(), LoopBounds(0, 1, 0, 1, 2, n - 1), w, wl, wr, 1, 2)
    return wl[:nv, 0, 0, 2:n - 1].T.copy(), wr[:nv, 0, 0, 2:n - 1].T.copy()
