import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from discordia import info, optimize, qmat
from discordia.qmat import QState, UnitaryOp

import oracles

seeds = st.integers(0, 2**32 - 1)


class TestEntropy:
    def test_maximally_mixed(self):
        assert info.vn_entropy(QState((2,), np.eye(2) / 2)) == pytest.approx(1.0)

    def test_pure(self):
        assert info.vn_entropy(qmat.bell()) == pytest.approx(0.0, abs=1e-12)

    def test_binary(self):
        # -3/4 log2 3/4 - 1/4 log2 1/4
        assert info.vn_entropy(QState((2,), np.diag([0.75, 0.25]))) == pytest.approx(0.811278, abs=1e-6)

    @given(seeds)
    def test_bounds(self, seed):
        s = qmat.random_state((3, 2), np.random.default_rng(seed))
        assert 0 <= info.vn_entropy(s) <= np.log2(6) + 1e-12


class TestMutualInfo:
    def test_bell(self):
        assert info.mutual_info(qmat.bell()) == pytest.approx(2.0, abs=1e-12)

    def test_classical(self):
        assert info.mutual_info(qmat.classical_corr()) == pytest.approx(1.0, abs=1e-12)

    def test_product(self, rng):
        s = qmat.product(qmat.random_state([2], rng), qmat.random_state([2], rng))
        assert info.mutual_info(s) == pytest.approx(0.0, abs=1e-12)

    def test_cut_validation(self):
        with pytest.raises(ValueError):
            info.mutual_info(qmat.bell(), ([0], [0]))

    def test_tripartite_cut(self, rng):
        s = qmat.random_state((2, 2, 2), rng)
        assert info.mutual_info(s, ([0, 1], [2])) >= -1e-9


class TestHolevo:
    def test_single(self, rng):
        assert info.holevo([(1.0, qmat.random_state([2], rng))]) == 0.0

    def test_orthogonal(self):
        ens = [(0.5, QState((2,), np.diag([1, 0]))), (0.5, QState((2,), np.diag([0, 1])))]
        assert info.holevo(ens) == pytest.approx(1.0)

    def test_nonorthogonal(self):
        plus = np.full((2, 2), 0.5)
        ens = [(0.5, QState((2,), np.diag([1, 0]))), (0.5, QState((2,), plus))]
        # h((1 + 1/sqrt 2) / 2), computed independently in oracles
        assert info.holevo(ens) == pytest.approx(0.600876, abs=1e-6)

    def test_mismatched_dims(self):
        with pytest.raises(ValueError, match="mismatched"):
            info.holevo([(0.5, qmat.bell()), (0.5, QState((4,), np.eye(4) / 4))])

    def test_probabilities(self):
        with pytest.raises(ValueError):
            info.holevo([(0.7, qmat.bell()), (0.7, qmat.bell())])


class TestClassicalCorr:
    def test_bell(self):
        j, basis = info.classical_corr(qmat.bell(), 1)
        assert j == pytest.approx(1.0, abs=1e-6)
        assert sum(basis.projectors) == pytest.approx(np.eye(2))

    def test_classical_state(self):
        j, basis = info.classical_corr(qmat.classical_corr(), 1)
        assert j == pytest.approx(1.0, abs=1e-6)
        # Z basis
        assert abs(basis.projectors[0][0, 0].real - 0.5) == pytest.approx(0.5, abs=1e-6)

    def test_product(self, rng):
        s = qmat.product(qmat.random_state([2], rng), qmat.random_state([2], rng))
        assert info.classical_corr(s, 1)[0] == pytest.approx(0.0, abs=1e-9)

    def test_supplied_bases_qutrit(self):
        # classical correlation between a qubit and a qutrit flag
        m = np.zeros((6, 6))
        m[0, 0] = m[4, 4] = 0.5  # |0,0> and |1,1>
        s = QState((2, 3), m)
        z3 = info.MeasurementBasis.computational(3)
        j, basis = info.classical_corr(s, 1, bases=[z3])
        assert j == pytest.approx(1.0)
        with pytest.raises(ValueError):
            info.classical_corr(s, 1)

    def test_refinement_never_worse_than_grid(self, rng):
        for _ in range(20):
            s = qmat.random_state((2, 2), rng)
            comps = info.pauli_components(s, 1)
            s_a = info.vn_entropy(qmat.partial_trace(s, [0]))
            res = optimize.grid_maximize(info._j_batch(comps, s_a), optimize.sphere_grid(), np.pi / 30)
            assert res.value >= res.grid_best


class TestDiscord:
    def test_bell(self):
        assert info.discord(qmat.bell(), 1).discord == pytest.approx(1.0, abs=1e-6)

    def test_classical(self):
        assert info.discord(qmat.classical_corr(), 1).discord == pytest.approx(0.0, abs=1e-9)

    def test_werner_half(self):
        # frozen from oracles.brute_discord (60 x 60 grid + Nelder-Mead)
        rep = info.discord(qmat.werner(0.5), 1)
        assert rep.discord == pytest.approx(0.2624832, abs=1e-4)
        assert rep.classical_corr == pytest.approx(0.1887219, abs=1e-4)

    def test_matches_brute_force_oracle(self, rng):
        for _ in range(5):
            s = qmat.random_state((2, 2), rng)
            d, j, mi = oracles.brute_discord(s.matrix, n=30)
            rep = info.discord(s, 1)
            assert rep.mutual_info == pytest.approx(mi, abs=1e-10)
            assert rep.discord == pytest.approx(d, abs=1e-4)

    def test_measuring_a(self):
        # swap symmetry: delta(B|A) of rho equals delta(A|B) of the swapped state
        rng = np.random.default_rng(3)
        s = qmat.random_state((2, 2), rng)
        swap = np.eye(4)[[0, 2, 1, 3]]
        swapped = QState((2, 2), swap @ s.matrix @ swap)
        assert info.discord(s, 0).discord == pytest.approx(info.discord(swapped, 1).discord, abs=1e-6)

    def test_report_invariants(self, rng):
        for _ in range(1000):
            s = qmat.random_state((2, 2), rng)
            rep = info.discord(s, 1)
            assert -1e-6 <= rep.classical_corr <= rep.mutual_info + 1e-6
            assert 0 <= rep.discord <= rep.mutual_info + 1e-6
            assert rep.discord == pytest.approx(rep.mutual_info - rep.classical_corr, abs=1e-12)


def random_cq_state(rng):
    """sum_b p_b rho_A^b x |b><b| in a random orthonormal basis of B."""
    p = rng.dirichlet([1, 1])
    u = qmat.random_unitary(2, rng)
    m = sum(pb * np.kron(qmat.random_density(2, rng), np.outer(u[:, b], u[:, b].conj()))
            for b, pb in enumerate(p))
    return QState((2, 2), m)


def test_cq_states_have_zero_discord(rng):
    for _ in range(100):
        assert info.discord(random_cq_state(rng), 1).discord <= 1e-4


@settings(max_examples=100)
@given(seeds)
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    s = qmat.random_state((2, 2), rng)
    u = np.kron(qmat.random_unitary(2, rng), qmat.random_unitary(2, rng))
    t = QState((2, 2), u @ s.matrix @ u.conj().T)
    assert abs(info.discord(s, 1).discord - info.discord(t, 1).discord) <= 2e-4


def test_basis_validation():
    with pytest.raises(ValueError):
        info.MeasurementBasis((np.eye(2),))
    with pytest.raises(ValueError):
        info.MeasurementBasis((np.diag([1, 0]), np.diag([1, 0])))
    b = info.MeasurementBasis.from_angles(1.0, 2.0)
    assert_allclose(sum(b.projectors), np.eye(2), atol=1e-12)
