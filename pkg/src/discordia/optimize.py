"""Grid search followed by Nelder-Mead polishing for smooth low-dimensional maxima."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

GRID_THETA = 30
GRID_PHI = 30
N_STARTS = 3
XATOL = 1e-6


@dataclass(frozen=True)
class OptResult:
    x: np.ndarray
    value: float
    grid_best: float


def sphere_grid(n_theta: int = GRID_THETA, n_phi: int = GRID_PHI) -> np.ndarray:
    """Uniform (theta, phi) grid on [0, pi] x [0, 2 pi)."""
    th = np.linspace(0.0, np.pi, n_theta)
    ph = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    return np.column_stack([tt.ravel(), pp.ravel()])


def grid_maximize(f_batch, grid: np.ndarray, step, n_starts: int = N_STARTS,
                  xatol: float = XATOL, maxiter: int = 4000) -> OptResult:
    """Maximise ``f_batch`` (maps (N, k) points to (N,) values) over ``grid``
    then refine the best ``n_starts`` points with Nelder-Mead.

    ``step`` sets the edge lengths of each initial simplex (scalar or per-axis).
    The result is never worse than the best grid point.
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.asarray(f_batch(grid), dtype=float)
    order = np.argsort(-vals, kind="stable")
    i0 = order[0]
    best_x, best_v = grid[i0].copy(), float(vals[i0])
    grid_best = best_v
    step = np.broadcast_to(np.asarray(step, dtype=float), (grid.shape[1],))

    def neg(x):
        return -float(f_batch(x[None, :])[0])

    for i in order[:n_starts]:
        x0 = grid[i]
        simplex = np.vstack([x0, x0 + np.diag(step)])
        res = minimize(neg, x0, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": xatol,
                                "fatol": 1e-13, "maxiter": maxiter})
        if -res.fun > best_v:
            best_x, best_v = np.asarray(res.x, dtype=float), float(-res.fun)
    return OptResult(best_x, best_v, grid_best)
