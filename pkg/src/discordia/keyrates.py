"""Key-rate quantities for trusted-noise and ideal QKD, and the lossy-channel capacity."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import gaussian as gs
from . import info
from .errors import DomainError, StateError
from .qmat import QState, ptrace_matrix

DEFAULT_MU = 1e4


def _entropy(s, part) -> float:
    part = list(part)
    if isinstance(s, QState):
        return info.vn_entropy(ptrace_matrix(s.matrix, s.dims, part))
    return gs.entropy(gs.reduce(s, part))


def _nparts(s) -> int:
    return s.nsys if isinstance(s, QState) else s.modes


def coherent_infos(s, a=(0,), b=(1,)):
    """(S(B) - S(AB), S(A) - S(AB)): coherent and reverse coherent information.

    Accepts a QState or a GaussianState; ``a``/``b`` pick the subsystems (modes).
    """
    if not isinstance(s, (QState, gs.GaussianState)):
        raise StateError(f"unsupported state type {type(s).__name__}")
    a, b = list(a), list(b)
    if _nparts(s) < 2 or set(a) & set(b) or not a or not b:
        raise StateError("coherent information needs two disjoint non-empty parts")
    s_ab = _entropy(s, sorted(a + b)) if isinstance(s, QState) else _entropy(s, a + b)
    return _entropy(s, b) - s_ab, _entropy(s, a) - s_ab


def trusted_noise_bounds(s, partition=((0,), (1,), ())):
    """Lower and upper bounds on the trusted-noise key rate.

    lower = max(coherent, reverse coherent) of rho_AB, upper = lower + I(AB, P).
    An empty P gives upper == lower.
    """
    a, b, p = (list(x) for x in partition)
    used = a + b + p
    if len(set(used)) != len(used) or sorted(used) != list(range(_nparts(s))):
        raise StateError(f"partition {partition} does not split the {_nparts(s)} parts of the state")
    lower = max(coherent_infos(s, a, b))
    if not p:
        return lower, lower
    ab = sorted(a + b) if isinstance(s, QState) else a + b
    s_abp = _entropy(s, sorted(used)) if isinstance(s, QState) else _entropy(s, used)
    i_ab_p = _entropy(s, ab) + _entropy(s, p) - s_abp
    return lower, lower + i_ab_p


def discords(s):
    """(delta(A|B), delta(B|A)); the second argument names the measured side."""
    if isinstance(s, QState):
        if s.dims != (2, 2):
            raise StateError(f"discord bound needs a two-qubit state, got dims {s.dims}")
        return info.discord(s, 1).discord, info.discord(s, 0).discord
    if isinstance(s, gs.GaussianState):
        return gs.gaussian_discord(s, 1)[0], gs.gaussian_discord(s, 0)[0]
    raise StateError(f"unsupported state type {type(s).__name__}")


def discord_rate_bound(s) -> float:
    return max(discords(s))


def plob(eta: float) -> float:
    """-log2(1 - eta) secret bits per use of a pure-loss channel."""
    if not 0.0 <= eta < 1.0:
        raise DomainError(f"plob needs eta in [0, 1), got {eta}")
    return float(-np.log2(1.0 - eta)) if eta > 0 else 0.0


def plob_linearized(eta: float) -> float:
    """High-loss form eta / ln 2."""
    if not 0.0 <= eta < 1.0:
        raise DomainError(f"plob needs eta in [0, 1), got {eta}")
    return float(eta / np.log(2))


@dataclass(frozen=True)
class RateReport:
    eta: float
    mu: float
    coherent_info: float
    reverse_coherent_info: float
    ed_lower: float
    discord_ab: float
    discord_ba: float
    rate_upper_discord: float
    r_reverse: float
    ppt_nu_be: float
    ef_be_separable: bool
    plob: float

    def to_json(self) -> dict:
        return asdict(self)


def lossy_output(eta: float, mu: float) -> gs.GaussianState:
    """ABE state: TMSV(mu) with mode B sent through loss eta, environment kept."""
    return gs.apply_loss(gs.tmsv(mu), 1, gs.LossyChannel(eta), keep_env=True)


def lossy_rr_rate(eta: float, mu: float = DEFAULT_MU) -> RateReport:
    """Reverse-reconciliation rate of TMSV(mu) through a pure-loss channel.

    Bob-Eve separability (PPT) zeroes the entanglement-of-formation term, so
    the rate is delta(B|A) with the measurement on Alice's mode.
    """
    if not 0.0 < eta < 1.0:
        raise DomainError(f"lossy_rr_rate needs eta in (0, 1), got {eta}")
    if mu < 1:
        raise DomainError(f"mu must be >= 1, got {mu}")
    abe = lossy_output(eta, mu)
    ab = gs.reduce(abe, [0, 1])
    be = gs.reduce(abe, [1, 2])
    nu_be = gs.ppt_min_symplectic(be, 1)
    coh, rev = coherent_infos(ab)
    d_ab, d_ba = discords(ab)
    return RateReport(
        eta=float(eta), mu=float(mu),
        coherent_info=coh, reverse_coherent_info=rev, ed_lower=max(coh, rev),
        discord_ab=d_ab, discord_ba=d_ba, rate_upper_discord=max(d_ab, d_ba),
        r_reverse=d_ba, ppt_nu_be=nu_be,
        ef_be_separable=bool(nu_be >= 1 - gs.bona_fide_tol(be.cov)),
        plob=plob(eta),
    )


def sweep_long(mus, etas):
    """Rows (mu, eta, quantity, value) over a (mu, eta) grid of lossy TMSV states."""
    rows = []
    for mu in mus:
        for eta in etas:
            r = lossy_rr_rate(eta, mu)
            for q in ("reverse_coherent_info", "coherent_info", "discord_ba", "discord_ab",
                      "ppt_nu_be", "plob"):
                rows.append((mu, eta, q, getattr(r, q)))
    return rows
