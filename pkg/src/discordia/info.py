"""Entropies, mutual information, Holevo quantities, classical correlations and discord.

All quantities are in bits. ``discord(s, measured=1)`` is delta(A|B) with the
projective measurement on B.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import optimize
from .qmat import CLIP, PAULIS, TOL, QState, hermitian_eigvals, ptrace_matrix

DISCORD_FLOOR = -1e-6


def entropy_from_eigs(w) -> np.ndarray:
    """-sum w log2 w along the last axis, with 0 log 0 = 0.

    Works on unnormalised spectra too, which the conditional-state formulas use.
    """
    w = np.asarray(w, dtype=float)
    safe = np.where(w > CLIP, w, 1.0)
    return -np.sum(np.where(w > CLIP, w * np.log2(safe), 0.0), axis=-1)


def matrix_entropy(m) -> np.ndarray:
    return entropy_from_eigs(hermitian_eigvals(m))


def vn_entropy(s) -> float:
    m = s.matrix if isinstance(s, QState) else np.asarray(s)
    return float(max(matrix_entropy(m), 0.0))


def _split(s: QState, cut):
    if cut is None:
        if s.nsys != 2:
            raise ValueError("a cut is required for states with more than two subsystems")
        return [0], [1]
    a, b = (sorted(set(np.atleast_1d(part).tolist())) for part in cut)
    if not a or not b or set(a) & set(b) or sorted(a + b) != list(range(s.nsys)):
        raise ValueError(f"cut {cut} is not a bipartition of {s.nsys} subsystems")
    return a, b


def mutual_info(s: QState, cut=None) -> float:
    """S(A) + S(B) - S(AB) across ``cut`` = (A indices, B indices)."""
    a, b = _split(s, cut)
    sa = vn_entropy(ptrace_matrix(s.matrix, s.dims, a))
    sb = vn_entropy(ptrace_matrix(s.matrix, s.dims, b))
    return sa + sb - vn_entropy(s)


def holevo(ensemble) -> float:
    """S(sum p_k rho_k) - sum p_k S(rho_k) for a list of (p_k, state) pairs."""
    if not ensemble:
        raise ValueError("empty ensemble")
    probs = np.array([p for p, _ in ensemble], dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities must be non-negative and sum to 1, got {probs.sum()}")
    mats = [st.matrix if isinstance(st, QState) else np.asarray(st) for _, st in ensemble]
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise ValueError(f"ensemble members have mismatched dimensions {sorted(shapes)}")
    dims = {st.dims for _, st in ensemble if isinstance(st, QState)}
    if len(dims) > 1:
        raise ValueError(f"ensemble members have mismatched dims {sorted(dims)}")
    avg = sum(p * m for p, m in zip(probs, mats))
    chi = vn_entropy(avg) - sum(p * vn_entropy(m) for p, m in zip(probs, mats))
    return max(chi, 0.0)


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Rank-1 orthonormal projective measurement on one subsystem."""

    projectors: tuple = field(repr=False)
    angles: tuple | None = None

    def __post_init__(self):
        projs = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        d = projs[0].shape[0]
        if len(projs) != d:
            raise ValueError(f"need {d} projectors for a rank-1 basis, got {len(projs)}")
        if np.max(np.abs(sum(projs) - np.eye(d))) > TOL:
            raise ValueError("projectors do not resolve the identity")
        for p in projs:
            if np.max(np.abs(p @ p - p)) > TOL or abs(np.trace(p).real - 1) > TOL:
                raise ValueError("each projector must be idempotent with rank 1")
        object.__setattr__(self, "projectors", projs)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "MeasurementBasis":
        return cls(tuple(bloch_projectors(np.array([[theta, phi]]))[0]),
                   angles=(float(theta), float(phi)))

    @classmethod
    def computational(cls, d: int = 2) -> "MeasurementBasis":
        eye = np.eye(d)
        return cls(tuple(np.outer(e, e) for e in eye),
                   angles=(0.0, 0.0) if d == 2 else None)

    @classmethod
    def from_vectors(cls, vectors) -> "MeasurementBasis":
        return cls(tuple(np.outer(v, np.conj(v)) for v in vectors))

    def to_json(self) -> dict:
        out = {"projectors_re": [p.real.tolist() for p in self.projectors],
               "projectors_im": [p.imag.tolist() for p in self.projectors]}
        if self.angles is not None:
            out["theta"], out["phi"] = self.angles
        return out


def bloch_vectors(angles: np.ndarray) -> np.ndarray:
    th, ph = angles[:, 0], angles[:, 1]
    return np.column_stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


def bloch_projectors(angles: np.ndarray) -> np.ndarray:
    """(N, 2, 2, 2) stack of the +n and -n projectors for each (theta, phi)."""
    n = bloch_vectors(np.atleast_2d(angles))
    ndots = np.einsum("nj,jab->nab", n, np.stack(PAULIS[1:]))
    eye = np.eye(2)
    return np.stack([(eye + ndots) / 2, (eye - ndots) / 2], axis=1)


def pauli_components(s: QState, measured: int) -> np.ndarray:
    """Tr_measured[(sigma_j on measured) rho] for j = 0..3, on the unmeasured rest."""
    if s.dims[measured] != 2:
        raise ValueError("the optimised path needs a qubit measured subsystem")
    dims = list(s.dims)
    rest = [k for k in range(len(dims)) if k != measured]
    t = s.matrix.reshape(dims + dims)
    n = len(dims)
    # move the measured axes last: (rest..., rest'..., m, m')
    perm = rest + [n + k for k in rest] + [measured, n + measured]
    t = np.transpose(t, perm)
    dr = int(np.prod([dims[k] for k in rest]))
    t = t.reshape(dr, dr, 2, 2)
    # Tr[(P on m) rho] = sum_{ab} rho_{.., a b} P_{b a}
    return np.stack([np.einsum("ijab,ba->ij", t, P) for P in PAULIS])


def conditional_blocks(comps: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Unnormalised post-measurement states of the rest, shape (N, 2, dr, dr)."""
    n = bloch_vectors(np.atleast_2d(angles))
    nr = np.einsum("nj,jab->nab", n, comps[1:])
    return np.stack([(comps[0] + nr) / 2, (comps[0] - nr) / 2], axis=1)


def _j_batch(comps: np.ndarray, s_rest: float):
    def f(angles):
        blocks = conditional_blocks(comps, angles)
        w = hermitian_eigvals(blocks)
        p = np.clip(w.sum(axis=-1), 0.0, None)
        # p S(sigma/p) = S_un(sigma) + p log2 p
        plogp = np.where(p > CLIP, p * np.log2(np.where(p > CLIP, p, 1.0)), 0.0)
        cond = np.sum(entropy_from_eigs(w) + plogp, axis=-1)
        return s_rest - cond
    return f


def _j_for_basis(s: QState, measured: int, basis: MeasurementBasis) -> float:
    rest = [k for k in range(s.nsys) if k != measured]
    s_rest = vn_entropy(ptrace_matrix(s.matrix, s.dims, rest))
    cond = 0.0
    for P in basis.projectors:
        full = np.eye(1)
        for k, d in enumerate(s.dims):
            full = np.kron(full, P if k == measured else np.eye(d))
        blk = ptrace_matrix(full @ s.matrix @ full, s.dims, rest)
        p = np.trace(blk).real
        if p > CLIP:
            cond += p * vn_entropy(blk / p)
    return s_rest - cond


def classical_corr(s: QState, measured: int = 1, bases: Sequence[MeasurementBasis] | None = None,
                   grid=None):
    """J(rest|measured): best entropy reduction of the unmeasured part over
    rank-1 projective measurements on ``measured``.

    For a qubit ``measured`` subsystem the search is a (theta, phi) grid plus
    Nelder-Mead refinement; otherwise ``bases`` must be supplied.
    Returns ``(J, basis)``.
    """
    if not 0 <= measured < s.nsys or s.nsys < 2:
        raise IndexError(f"measured subsystem {measured} invalid for dims {s.dims}")
    if bases is not None:
        vals = [_j_for_basis(s, measured, b) for b in bases]
        i = int(np.argmax(vals))
        return max(vals[i], 0.0), bases[i]
    comps = pauli_components(s, measured)
    rest = [k for k in range(s.nsys) if k != measured]
    s_rest = vn_entropy(ptrace_matrix(s.matrix, s.dims, rest))
    g = optimize.sphere_grid() if grid is None else grid
    res = optimize.grid_maximize(_j_batch(comps, s_rest), g, step=np.pi / 30)
    return max(res.value, 0.0), MeasurementBasis.from_angles(*res.x)


@dataclass(frozen=True)
class CorrelationReport:
    mutual_info: float
    classical_corr: float
    discord: float
    argmax_basis: MeasurementBasis

    def to_json(self) -> dict:
        return {"mutual_info": self.mutual_info, "classical_corr": self.classical_corr,
                "discord": self.discord, "argmax_basis": self.argmax_basis.to_json()}


def discord(s: QState, measured: int = 1, bases=None) -> CorrelationReport:
    """delta = I - J with the measurement on ``measured`` (B by default)."""
    other = [k for k in range(s.nsys) if k != measured]
    mi = mutual_info(s, (other, [measured]))
    j, basis = classical_corr(s, measured, bases=bases)
    j = min(j, mi)
    d = mi - j
    if d < 0:
        if d < DISCORD_FLOOR:
            raise ArithmeticError(f"negative discord {d:.3e} beyond tolerance")
        d = 0.0
    return CorrelationReport(mi, j, d, basis)
