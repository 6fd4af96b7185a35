"""Finite-dimensional density matrices on labelled tensor-product spaces.

Subsystem 0 is always the leftmost tensor factor.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import StateError

TOL = 1e-10
CLIP = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, X, Y, Z)


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(mats: Iterable) -> np.ndarray:
    return reduce(np.kron, mats)


def check_density(matrix: np.ndarray, tol: float = TOL) -> None:
    """Raise StateError naming the first violated invariant."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StateError(f"matrix must be square, got shape {m.shape}")
    herm = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if herm > tol:
        raise StateError(f"Hermitian violated: max |M - M^dag| = {herm:.3e}")
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise StateError(f"unit trace violated: Tr M = {tr:.12g}")
    lmin = np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min()
    if lmin < -tol:
        raise StateError(f"positive semidefinite violated: min eigenvalue {lmin:.3e}")


@dataclass(frozen=True, eq=False)
class QState:
    """Density matrix with subsystem dimension labels."""

    dims: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise StateError(f"subsystem dimensions must be >= 2, got {dims}")
        m = np.array(self.matrix, dtype=complex)
        n = int(np.prod(dims))
        if m.shape != (n, n):
            raise StateError(f"matrix shape {m.shape} does not match dims {dims}")
        check_density(m)
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nsys(self) -> int:
        return len(self.dims)

    def eigvals(self) -> np.ndarray:
        return hermitian_eigvals(self.matrix)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "QState":
        try:
            dims = data["dims"]
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        except KeyError as exc:
            raise StateError(f"missing field {exc.args[0]!r}") from None
        if re.shape != im.shape:
            raise StateError(f"'re' and 'im' shapes differ: {re.shape} vs {im.shape}")
        return cls(dims, re + 1j * im)

    @classmethod
    def load(cls, path) -> "QState":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True, eq=False)
class UnitaryOp:
    matrix: np.ndarray = field(repr=False)
    target: int = 0

    def __post_init__(self):
        u = np.array(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise StateError(f"unitary must be square, got shape {u.shape}")
        err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if err > TOL:
            raise StateError(f"unitarity violated: max |U^dag U - I| = {err:.3e}")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)


def hermitian_eigvals(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix (or stack), tiny negatives clipped to 0."""
    w = np.linalg.eigvalsh(m)
    return np.where((w < 0) & (w >= -CLIP), 0.0, w)


def hermitian_eigh(m: np.ndarray):
    w, v = np.linalg.eigh(m)
    return np.where((w < 0) & (w >= -CLIP), 0.0, w), v


def embed(op: np.ndarray, target: int, dims: Sequence[int]) -> np.ndarray:
    """Lift a single-subsystem operator to the full space."""
    if not 0 <= target < len(dims):
        raise IndexError(f"subsystem {target} out of range for dims {tuple(dims)}")
    op = np.asarray(op)
    if op.shape != (dims[target], dims[target]):
        raise StateError(
            f"operator of side {op.shape[0]} does not fit subsystem {target} of dimension {dims[target]}"
        )
    left = int(np.prod(dims[:target]))
    right = int(np.prod(dims[target + 1:]))
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def ptrace_matrix(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace on a raw matrix; ``keep`` is returned in ascending order."""
    dims = list(dims)
    n = len(dims)
    keep = sorted(set(keep))
    t = np.asarray(m).reshape(dims + dims)
    # trace out from the highest index so lower axis numbers stay valid
    cur = n
    for ax in reversed(range(n)):
        if ax in keep:
            continue
        t = np.trace(t, axis1=ax, axis2=ax + cur)
        cur -= 1
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def partial_trace(s: QState, keep) -> QState:
    if isinstance(keep, (int, np.integer)):
        keep = [keep]
    keep = list(keep)
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    bad = [k for k in keep if not 0 <= k < s.nsys]
    if bad:
        raise IndexError(f"subsystem index {bad} out of range for {s.nsys} subsystems")
    keep = sorted(set(keep))
    return QState([s.dims[k] for k in keep], ptrace_matrix(s.matrix, s.dims, keep))


def apply_unitary(s: QState, u: UnitaryOp) -> QState:
    full = embed(u.matrix, u.target, s.dims)
    out = full @ s.matrix @ full.conj().T
    return QState(s.dims, 0.5 * (out + out.conj().T))


def ket(*bits: int, d: int = 2) -> np.ndarray:
    v = np.zeros(d ** len(bits), dtype=complex)
    idx = 0
    for b in bits:
        idx = idx * d + b
    v[idx] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def bell() -> QState:
    return QState((2, 2), projector((ket(0, 0) + ket(1, 1)) / np.sqrt(2)))


def classical_corr() -> QState:
    # normalised one-time-pad state (|00><00| + |11><11|)/2
    return QState((2, 2), 0.5 * (projector(ket(0, 0)) + projector(ket(1, 1))))


def werner(p: float) -> QState:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"werner weight must lie in [0, 1], got {p}")
    return QState((2, 2), p * bell().matrix + (1 - p) * np.eye(4) / 4)


def product(rho: QState, sigma: QState) -> QState:
    return QState(rho.dims + sigma.dims, np.kron(rho.matrix, sigma.matrix))


def bell_diagonal(weights) -> QState:
    """Mixture of the four Bell states Phi+, Phi-, Psi+, Psi- with the given weights."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,) or np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
        raise ValueError("bell_diagonal needs 4 non-negative weights summing to 1")
    return QState((2, 2), sum(wi * projector(b) for wi, b in zip(w, bell_basis())))


def bell_basis() -> list[np.ndarray]:
    r = 1 / np.sqrt(2)
    return [
        r * (ket(0, 0) + ket(1, 1)),
        r * (ket(0, 0) - ket(1, 1)),
        r * (ket(0, 1) + ket(1, 0)),
        r * (ket(0, 1) - ket(1, 0)),
    ]


def make_state(kind: str, *args, **kwargs) -> QState:
    """Build a named state: bell, classical_corr, werner(p), product(rho, sigma), custom."""
    if kind == "bell":
        return bell()
    if kind == "classical_corr":
        return classical_corr()
    if kind == "werner":
        return werner(*args, **kwargs)
    if kind == "product":
        return product(*args, **kwargs)
    if kind == "custom":
        return QState(*args, **kwargs)
    raise ValueError(f"unknown state kind {kind!r}")


def random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    """Hilbert-Schmidt random density matrix, G G^dag / Tr(G G^dag)."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_state(dims, rng: np.random.Generator) -> QState:
    return QState(dims, random_density(int(np.prod(dims)), rng))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a complex Ginibre matrix with phase fix."""
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
