"""Channel-guessing game: Alice encodes k with U_k on A, Bob guesses k using memory B.

Performance figures, all Holevo quantities in bits:

* ``i0``  memoryless Bob (only the A codewords),
* ``ic``  classical Bob (B measured in a fixed basis before the encoding),
* ``iq``  quantum Bob (full AB codewords).

``certify`` runs a finite-round simulation of the Pauli-4 game for three
concrete Bob strategies and gates on beating ``ic``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import info, optimize
from .estimators import batch_standard_error, mutual_info_mm
from .qmat import (CLIP, I2, X, Z, QState, UnitaryOp, apply_unitary, bell_basis, projector,
                   ptrace_matrix)

EPS_BOUNDS = 1e-2
MIN_ROUNDS = 1000
STRATEGIES = ("memoryless", "classical", "quantum_bell")


@dataclass(frozen=True, eq=False)
class EncodingEnsemble:
    entries: tuple  # of (p_k, UnitaryOp)

    def __post_init__(self):
        entries = tuple((float(p), u if isinstance(u, UnitaryOp) else UnitaryOp(u))
                        for p, u in self.entries)
        if not entries:
            raise ValueError("ensemble has no entries")
        probs = np.array([p for p, _ in entries])
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities must be non-negative and sum to 1 (sum {probs.sum()})")
        if len({u.target for _, u in entries}) != 1:
            raise ValueError("all unitaries must act on the same subsystem")
        object.__setattr__(self, "entries", entries)

    @property
    def target(self) -> int:
        return self.entries[0][1].target

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for p, _ in self.entries])

    @property
    def unitaries(self) -> np.ndarray:
        return np.stack([u.matrix for _, u in self.entries])

    @classmethod
    def uniform(cls, unitaries, target: int = 0) -> "EncodingEnsemble":
        n = len(unitaries)
        return cls(tuple((1.0 / n, UnitaryOp(u, target)) for u in unitaries))

    def to_json(self) -> dict:
        return {"target": self.target,
                "entries": [{"p": p, "re": u.matrix.real.tolist(), "im": u.matrix.imag.tolist()}
                            for p, u in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "EncodingEnsemble":
        try:
            target = int(data["target"])
            entries = [(e["p"], UnitaryOp(np.asarray(e["re"], dtype=float)
                                          + 1j * np.asarray(e.get("im", np.zeros_like(e["re"])), dtype=float),
                                          target))
                       for e in data["entries"]]
        except KeyError as exc:
            raise ValueError(f"ensemble JSON missing field {exc.args[0]!r}") from None
        return cls(tuple(entries))

    @classmethod
    def load(cls, path) -> "EncodingEnsemble":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def pauli4(target: int = 0) -> EncodingEnsemble:
    """Uniform {I, X, Z, XZ}; index k = 2a + b for U = X^a Z^b."""
    return EncodingEnsemble.uniform([I2, Z, X, X @ Z], target)


def bit_flip(target: int = 0) -> EncodingEnsemble:
    return EncodingEnsemble.uniform([I2, X], target)


def _check_pair(s: QState, e: EncodingEnsemble) -> int:
    if s.nsys != 2:
        raise ValueError(f"the game needs a bipartite state, got dims {s.dims}")
    t = e.target
    if not 0 <= t < 2:
        raise IndexError(f"encoding target {t} out of range")
    if e.unitaries.shape[1] != s.dims[t]:
        raise ValueError(f"unitaries of side {e.unitaries.shape[1]} do not fit subsystem {t} "
                         f"of dimension {s.dims[t]}")
    return 1 - t


def encode(s: QState, e: EncodingEnsemble):
    """Codewords U_k rho U_k^dag with their weights, and the average state."""
    _check_pair(s, e)
    codewords = [(p, apply_unitary(s, u)) for p, u in e.entries]
    avg = sum(p * c.matrix for p, c in codewords)
    return codewords, QState(s.dims, 0.5 * (avg + avg.conj().T))


def iq(s: QState, e: EncodingEnsemble) -> float:
    codewords, _ = encode(s, e)
    return info.holevo(codewords)


def i0(s: QState, e: EncodingEnsemble) -> float:
    _, avg = encode(s, e)
    t = e.target
    return info.vn_entropy(ptrace_matrix(avg.matrix, avg.dims, [t])) - \
        info.vn_entropy(ptrace_matrix(s.matrix, s.dims, [t]))


def _ic_batch(comps: np.ndarray, e: EncodingEnsemble):
    us = e.unitaries
    probs = e.probs

    def f(angles):
        blocks = info.conditional_blocks(comps, angles)  # (N, 2, dA, dA)
        enc = np.einsum("k,kij,nbjl,kml->nbim", probs, us, blocks, us.conj())
        w_enc = info.hermitian_eigvals(enc)
        w = info.hermitian_eigvals(blocks)
        return np.sum(info.entropy_from_eigs(w_enc) - info.entropy_from_eigs(w), axis=-1)
    return f


def ic(s: QState, e: EncodingEnsemble):
    """Best Holevo quantity when B is dephased in one basis before the encoding.

    With sigma_b = Tr_B[(I x P_b) rho] the dephased codewords are block
    diagonal, so chi(basis) = sum_b [S(sum_k p_k U_k sigma_b U_k^dag) - S(sigma_b)]
    with unnormalised entropies.
    Returns ``(I_c, basis)``.
    """
    measured = _check_pair(s, e)
    comps = info.pauli_components(s, measured)
    res = optimize.grid_maximize(_ic_batch(comps, e), optimize.sphere_grid(), step=np.pi / 30)
    return max(res.value, 0.0), info.MeasurementBasis.from_angles(*res.x)


@dataclass(frozen=True)
class GameReport:
    i0: float
    ic: float
    ic_basis: info.MeasurementBasis
    iq: float
    delta_q: float
    j: float
    j_tilde: float
    discord_before: float
    discord_after: float
    mutual_info: float
    mutual_tilde: float
    bounds_eq5_ok: bool
    bounds_eq6_ok: bool
    maximal: bool
    identity_deviations: dict | None = field(default=None)

    def to_json(self) -> dict:
        out = asdict(self)
        out["ic_basis"] = self.ic_basis.to_json()
        return out


def run_game(s: QState, e: EncodingEnsemble, eps: float = EPS_BOUNDS) -> GameReport:
    """Evaluate every performance figure and check the two sandwich bounds

        J - J~ <= I_c - I_0 <= J,     d_delta - I~ <= I_q - I_c <= d_delta,

    each with slack ``eps`` since J and I_c are optimised from below.
    """
    measured = _check_pair(s, e)
    t = e.target
    codewords, avg = encode(s, e)
    q = info.holevo(codewords)
    s_a = info.vn_entropy(ptrace_matrix(s.matrix, s.dims, [t]))
    rho_a_tilde = ptrace_matrix(avg.matrix, avg.dims, [t])
    zero = info.vn_entropy(rho_a_tilde) - s_a
    c, basis = ic(s, e)
    before = info.discord(s, measured)
    after = info.discord(avg, measured)
    d_delta = before.discord - after.discord

    classical_chain = (before.classical_corr - after.classical_corr - eps <= c - zero
           <= before.classical_corr + eps)
    quantum_chain = d_delta - after.mutual_info - eps <= q - c <= d_delta + eps
    d_a = s.dims[t]
    maximal = bool(np.max(np.abs(rho_a_tilde - np.eye(d_a) / d_a)) <= 1e-9)
    devs = None
    if maximal:
        devs = {
            "i0_minus_negentropy": zero - (np.log2(d_a) - s_a),
            "ic_minus_i0_plus_j": c - (zero + before.classical_corr),
            "iq_minus_i0_plus_mi": q - (zero + before.mutual_info),
        }
    return GameReport(
        i0=zero, ic=c, ic_basis=basis, iq=q, delta_q=q - zero,
        j=before.classical_corr, j_tilde=after.classical_corr,
        discord_before=before.discord, discord_after=after.discord,
        mutual_info=before.mutual_info, mutual_tilde=after.mutual_info,
        bounds_eq5_ok=bool(classical_chain), bounds_eq6_ok=bool(quantum_chain), maximal=maximal,
        identity_deviations=devs,
    )


# -- certification ---------------------------------------------------------

def _classical_mi(probs: np.ndarray, likelihood: np.ndarray) -> np.ndarray:
    """I(K;O) for priors (K,) and likelihoods (..., K, O)."""
    joint = probs[:, None] * likelihood
    p_o = joint.sum(axis=-2)
    h_o = info.entropy_from_eigs(p_o)
    h_o_k = np.sum(probs * info.entropy_from_eigs(likelihood), axis=-1)
    return h_o - h_o_k


def _best_qubit_readout(probs: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Projective qubit measurement maximising I(K;O) over codewords ``states`` (K, 2, 2).

    States may be unnormalised by a common factor. Returns the two projectors.
    """
    norm = np.trace(states[0]).real
    states = states / norm

    def f(angles):
        projs = info.bloch_projectors(angles)  # (N, 2, 2, 2)
        lik = np.einsum("noab,kba->nko", projs, states).real
        return _classical_mi(probs, np.clip(lik, 0.0, None))

    res = optimize.grid_maximize(f, optimize.sphere_grid(), step=np.pi / 30)
    return info.bloch_projectors(res.x[None, :])[0]


def strategy_povm(s: QState, e: EncodingEnsemble, strategy: str) -> np.ndarray:
    """POVM elements on AB (A = subsystem 0 encoded) implementing a Bob strategy."""
    probs = e.probs
    codewords, _ = encode(s, e)
    if strategy == "quantum_bell":
        return np.stack([projector(v) for v in bell_basis()])
    if strategy == "memoryless":
        marg = np.stack([ptrace_matrix(c.matrix, c.dims, [0]) for _, c in codewords])
        q = _best_qubit_readout(probs, marg)
        return np.stack([np.kron(qo, I2) for qo in q])
    if strategy == "classical":
        _, basis = ic(s, e)
        elems = []
        comps = info.pauli_components(s, 1)
        th, ph = basis.angles
        blocks = info.conditional_blocks(comps, np.array([[th, ph]]))[0]
        for b, pb in enumerate(basis.projectors):
            sigma = blocks[b]
            if np.trace(sigma).real <= CLIP:
                readout = np.stack([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]).astype(complex)
            else:
                encoded = np.einsum("kij,jl,kml->kim", e.unitaries, sigma, e.unitaries.conj())
                readout = _best_qubit_readout(probs, encoded)
            elems.extend(np.kron(qo, pb) for qo in readout)
        return np.stack(elems)
    raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")


@dataclass(frozen=True)
class CertifyResult:
    strategy: str
    rounds: int
    seed: int
    mi_estimate: float
    std_error: float
    margin: float
    ic: float
    certified: bool
    transcript: np.ndarray = field(repr=False, compare=False)

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("transcript")
        return out


def simulate_certification(s: QState, strategy: str, rounds: int, seed: int) -> CertifyResult:
    """Play ``rounds`` Pauli-4 games; transcript columns are (round, k, guess)."""
    if s.dims != (2, 2):
        raise ValueError(f"certification needs a two-qubit state, got dims {s.dims}")
    if rounds < MIN_ROUNDS:
        raise ValueError(f"rounds must be >= {MIN_ROUNDS} for the estimator bias to be negligible")
    e = pauli4(0)
    codewords, _ = encode(s, e)
    povm = strategy_povm(s, e, strategy)
    lik = np.einsum("oab,kba->ko", povm, np.stack([c.matrix for _, c in codewords])).real
    lik = np.clip(lik, 0.0, None)
    lik /= lik.sum(axis=1, keepdims=True)
    probs = e.probs
    # maximum-likelihood decision rule, ties to the lowest k
    guess_of = np.argmax(probs[:, None] * lik, axis=0)

    rng = np.random.default_rng(seed)
    ks = rng.choice(len(probs), size=rounds, p=probs)
    cdf = np.cumsum(lik, axis=1)
    u = rng.random(rounds)
    outcomes = np.minimum((u[:, None] >= cdf[ks]).sum(axis=1), lik.shape[1] - 1)
    guesses = guess_of[outcomes]

    kw = {"n_x": 4, "n_y": 4}
    mi = mutual_info_mm(ks, guesses, **kw)
    se = batch_standard_error(ks, guesses, 10, **kw)
    margin = 3 * se
    c, _ = ic(s, e)
    transcript = np.column_stack([np.arange(rounds), ks, guesses])
    return CertifyResult(strategy, rounds, seed, mi, se, margin, c, bool(mi > c + margin), transcript)


def certify(s: QState, strategy: str, rounds: int, seed: int):
    """Returns ``(mi_estimate, certified)``."""
    r = simulate_certification(s, strategy, rounds, seed)
    return r.mi_estimate, r.certified
