"""Gaussian states in shot-noise units (vacuum covariance = identity).

Quadratures are ordered (x1, p1, x2, p2, ...) and the symplectic form is
Omega = direct sum of [[0, 1], [-1, 0]].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import optimize
from .errors import DomainError, StateError

BONA_FIDE_TOL = 1e-9
SYM_TOL = 1e-10
RIDGE = 1e-12

LOG_LAMBDA_GRID = 60
THETA_GRID = 30
LOG_LAMBDA_RANGE = (-3.0, 3.0)


def bona_fide_tol(cov: np.ndarray) -> float:
    """1e-9 plus the rounding floor of the symplectic spectrum.

    nu^2 comes out of cancellations between entries of size |V|, so double
    precision cannot resolve nu better than about eps |V|^2.
    """
    scale = np.linalg.norm(cov, 2)
    return BONA_FIDE_TOL + 8 * np.finfo(float).eps * scale * scale


def omega(m: int) -> np.ndarray:
    return np.kron(np.eye(m), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _sym_eigs(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a positive-definite matrix, ascending, length m."""
    m = cov.shape[0] // 2
    w, v = np.linalg.eigh(cov)
    if w.min() <= 0:
        raise StateError("bona fide violated: covariance matrix is not positive definite")
    root = (v * np.sqrt(w)) @ v.T
    # sqrt(V) (i Omega) sqrt(V) is Hermitian and isospectral with i Omega V
    herm = root @ (1j * omega(m)) @ root
    nu = np.sort(np.abs(np.linalg.eigvalsh(herm)))
    return nu[::2]


@dataclass(frozen=True, eq=False)
class GaussianState:
    modes: int
    mean: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = int(self.modes)
        if m < 1:
            raise StateError(f"modes must be >= 1, got {m}")
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.shape != (2 * m,):
            raise StateError(f"mean must have length {2 * m}, got {mean.shape[0]}")
        if cov.shape != (2 * m, 2 * m):
            raise StateError(f"cov must be {2 * m}x{2 * m}, got {cov.shape}")
        asym = np.max(np.abs(cov - cov.T))
        if asym > SYM_TOL:
            raise StateError(f"cov symmetric violated: max |V - V^T| = {asym:.3e}")
        cov = 0.5 * (cov + cov.T)
        nu = _sym_eigs(cov)
        if nu.min() < 1 - bona_fide_tol(cov):
            raise StateError(f"bona fide violated: symplectic eigenvalue {nu.min():.6g} < 1")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "modes", m)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def to_json(self) -> dict:
        return {"modes": self.modes, "mean": self.mean.tolist(), "cov": self.cov.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "GaussianState":
        try:
            modes = data["modes"]
            cov = data["cov"]
        except KeyError as exc:
            raise StateError(f"missing field {exc.args[0]!r}") from None
        mean = data.get("mean", [0.0] * (2 * int(modes)))
        return cls(modes, mean, cov)

    @classmethod
    def load(cls, path) -> "GaussianState":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class LossyChannel:
    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"transmissivity must lie in [0, 1], got {self.eta}")


def _slice(modes) -> np.ndarray:
    return np.concatenate([[2 * k, 2 * k + 1] for k in modes]).astype(int)


def vacuum(m: int = 1) -> GaussianState:
    return GaussianState(m, np.zeros(2 * m), np.eye(2 * m))


def thermal(nbar: float) -> GaussianState:
    if nbar < 0:
        raise DomainError(f"mean photon number must be >= 0, got {nbar}")
    return GaussianState(1, np.zeros(2), (2 * nbar + 1) * np.eye(2))


def tmsv(mu: float) -> GaussianState:
    """Two-mode squeezed vacuum with local variance ``mu`` = 2 nbar + 1."""
    if mu < 1:
        raise DomainError(f"tmsv variance parameter must be >= 1, got {mu}")
    c = np.sqrt(mu * mu - 1.0)
    zc = np.diag([c, -c])
    cov = np.block([[mu * np.eye(2), zc], [zc, mu * np.eye(2)]])
    return GaussianState(2, np.zeros(4), cov)


def tensor(*states: GaussianState) -> GaussianState:
    m = sum(s.modes for s in states)
    cov = np.zeros((2 * m, 2 * m))
    i = 0
    for s in states:
        n = 2 * s.modes
        cov[i:i + n, i:i + n] = s.cov
        i += n
    return GaussianState(m, np.concatenate([s.mean for s in states]), cov)


def reduce(s: GaussianState, keep) -> GaussianState:
    """Marginal on the listed modes (in the given order)."""
    keep = list(np.atleast_1d(keep))
    if not keep or any(not 0 <= k < s.modes for k in keep):
        raise IndexError(f"modes {keep} invalid for a {s.modes}-mode state")
    idx = _slice(keep)
    return GaussianState(len(keep), s.mean[idx], s.cov[np.ix_(idx, idx)])


def beam_splitter(s: GaussianState, i: int, j: int, eta: float) -> GaussianState:
    """Mix modes i and j on a beam splitter of transmissivity eta.

    Output i is sqrt(eta) i + sqrt(1 - eta) j, output j is
    -sqrt(1 - eta) i + sqrt(eta) j.
    """
    if i == j or not (0 <= i < s.modes and 0 <= j < s.modes):
        raise IndexError(f"invalid mode pair ({i}, {j}) for {s.modes} modes")
    LossyChannel(eta)
    t, r = np.sqrt(eta), np.sqrt(1.0 - eta)
    S = np.eye(2 * s.modes)
    a, b = _slice([i]), _slice([j])
    S[np.ix_(a, a)] = t * np.eye(2)
    S[np.ix_(a, b)] = r * np.eye(2)
    S[np.ix_(b, a)] = -r * np.eye(2)
    S[np.ix_(b, b)] = t * np.eye(2)
    return GaussianState(s.modes, S @ s.mean, S @ s.cov @ S.T)


def apply_loss(s: GaussianState, mode: int, ch: LossyChannel | float,
               keep_env: bool = False) -> GaussianState:
    """Pure-loss channel on ``mode`` as a beam splitter with a vacuum environment.

    With ``keep_env`` the environment output is appended as the last mode.
    """
    if not 0 <= mode < s.modes:
        raise IndexError(f"mode {mode} out of range for {s.modes} modes")
    eta = ch.eta if isinstance(ch, LossyChannel) else LossyChannel(float(ch)).eta
    out = beam_splitter(tensor(s, vacuum(1)), mode, s.modes, eta)
    if keep_env:
        return out
    return reduce(out, list(range(s.modes)))


def symplectic_eigenvalues(s: GaussianState | np.ndarray) -> np.ndarray:
    cov = s.cov if isinstance(s, GaussianState) else np.asarray(s, dtype=float)
    if np.max(np.abs(cov - cov.T)) > SYM_TOL:
        raise StateError("cov symmetric violated")
    return _sym_eigs(0.5 * (cov + cov.T))


def g_entropy(nu):
    """Entropy in bits of a thermal mode with symplectic eigenvalue ``nu``."""
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < 1 - BONA_FIDE_TOL):
        raise DomainError(f"symplectic eigenvalue below 1: {np.min(nu)}")
    nu = np.maximum(nu, 1.0)
    a = (nu + 1) / 2
    b = (nu - 1) / 2
    blogb = np.where(b > 0, b * np.log2(np.where(b > 0, b, 1.0)), 0.0)
    out = a * np.log2(a) - blogb
    return float(out) if out.ndim == 0 else out


def entropy(s: GaussianState) -> float:
    # validated states may sit a rounding floor below 1
    return float(np.sum(g_entropy(np.maximum(symplectic_eigenvalues(s), 1.0))))


def mutual_info(s: GaussianState, a=(0,), b=(1,)) -> float:
    a, b = list(a), list(b)
    return entropy(reduce(s, a)) + entropy(reduce(s, b)) - entropy(reduce(s, a + b))


def _measurement_covs(params: np.ndarray) -> np.ndarray:
    """R(theta) diag(lam, 1/lam) R(theta)^T for params rows (log10 lam, theta)."""
    loglam = np.clip(params[:, 0], *LOG_LAMBDA_RANGE)
    lam = 10.0 ** loglam
    th = params[:, 1]
    c, s = np.cos(th), np.sin(th)
    # R diag(l, 1/l) R^T
    xx = lam * c * c + s * s / lam
    pp = lam * s * s + c * c / lam
    xp = (lam - 1 / lam) * c * s
    return np.stack([np.stack([xx, xp], -1), np.stack([xp, pp], -1)], -2)


def _conditional_nu(a_blk, b_blk, c_blk, vm: np.ndarray) -> np.ndarray:
    """sqrt(det) of B - C (A + V_m)^-1 C^T for a stack of measurement covariances."""
    m = a_blk[None] + vm
    det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    scale = np.abs(m).max(axis=(1, 2))
    bad = np.abs(det) < 1e-12 * scale ** 2
    if np.any(bad):
        m = m + RIDGE * np.eye(2)
        det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    inv = np.stack([np.stack([m[:, 1, 1], -m[:, 0, 1]], -1),
                    np.stack([-m[:, 1, 0], m[:, 0, 0]], -1)], -2) / det[:, None, None]
    cond = b_blk[None] - c_blk[None] @ inv @ c_blk.T[None]
    d = cond[:, 0, 0] * cond[:, 1, 1] - cond[:, 0, 1] * cond[:, 1, 0]
    return np.sqrt(np.maximum(d, 1.0))


def _blocks(s: GaussianState, measured_mode: int):
    if s.modes != 2:
        raise StateError(f"gaussian discord needs a two-mode state, got {s.modes} modes")
    if measured_mode not in (0, 1):
        raise IndexError(f"measured mode must be 0 or 1, got {measured_mode}")
    ia, ib = _slice([measured_mode]), _slice([1 - measured_mode])
    v = s.cov
    return v[np.ix_(ia, ia)], v[np.ix_(ib, ib)], v[np.ix_(ib, ia)]


def conditional_entropy(s: GaussianState, measured_mode: int, params) -> np.ndarray:
    """Entropy of the unmeasured mode after a general-dyne outcome on ``measured_mode``."""
    a, b, c = _blocks(s, measured_mode)
    params = np.atleast_2d(params)
    return g_entropy(_conditional_nu(a, b, c, _measurement_covs(params)))


def measurement_grid() -> np.ndarray:
    ll = np.linspace(*LOG_LAMBDA_RANGE, LOG_LAMBDA_GRID)
    th = np.linspace(0.0, np.pi, THETA_GRID, endpoint=False)
    a, b = np.meshgrid(ll, th, indexing="ij")
    return np.column_stack([a.ravel(), b.ravel()])


def gaussian_discord(s: GaussianState, measured_mode: int):
    """delta(unmeasured | measured) over Gaussian general-dyne measurements.

    The measurement covariance is R(theta) diag(lam, 1/lam) R(theta)^T with
    lam in [1e-3, 1e3] (the ends stand in for homodyne). Returns
    ``(discord, {"lambda": ..., "theta": ...})``.
    """
    a, b, c = _blocks(s, measured_mode)
    s_meas = entropy(GaussianState(1, np.zeros(2), a))
    s_joint = entropy(s)

    def neg_cond(params):
        # maximise the negative conditional entropy
        return -np.atleast_1d(g_entropy(_conditional_nu(a, b, c, _measurement_covs(params))))

    res = optimize.grid_maximize(neg_cond, measurement_grid(),
                                 step=[6.0 / LOG_LAMBDA_GRID, np.pi / THETA_GRID])
    delta = s_meas - s_joint - res.value
    mi = mutual_info(s)
    delta = float(min(max(delta, 0.0), mi))
    loglam = float(np.clip(res.x[0], *LOG_LAMBDA_RANGE))
    return delta, {"lambda": 10.0 ** loglam, "theta": float(res.x[1] % np.pi)}


def heterodyne_discord(s: GaussianState, measured_mode: int) -> float:
    """Discord evaluated with heterodyne (V_m = I) only; an upper bound on the optimum."""
    a, b, c = _blocks(s, measured_mode)
    cond = b - c @ np.linalg.solve(a + np.eye(2), c.T)
    nu = np.sqrt(max(np.linalg.det(cond), 1.0))
    return entropy(GaussianState(1, np.zeros(2), a)) - entropy(s) + float(g_entropy(nu))


def partial_transpose(s: GaussianState, mode: int) -> np.ndarray:
    """Covariance with the momentum of ``mode`` sign-flipped (may be unphysical)."""
    flip = np.ones(2 * s.modes)
    flip[2 * mode + 1] = -1.0
    return s.cov * np.outer(flip, flip)


def ppt_min_symplectic(s: GaussianState, partition=0) -> float:
    """Smallest symplectic eigenvalue of the partial transpose w.r.t. one mode.

    For a two-mode state a value >= 1 certifies separability.
    """
    if s.modes != 2:
        raise StateError(f"PPT check supports two-mode states, got {s.modes} modes")
    part = list(np.atleast_1d(partition))
    if len(part) != 1 or part[0] not in (0, 1):
        raise ValueError(f"unsupported partition {partition!r}; give a single mode index")
    return float(_sym_eigs(partial_transpose(s, part[0])).min())
