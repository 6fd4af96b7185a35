import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from discordia import game, info, qmat
from discordia.qmat import I2, X, QState, UnitaryOp


def random_ensemble(rng, n=4, target=0):
    return game.EncodingEnsemble.uniform([qmat.random_unitary(2, rng) for _ in range(n)], target)


class TestEncode:
    def test_identity_only(self, rng):
        s = qmat.random_state((2, 2), rng)
        _, avg = game.encode(s, game.EncodingEnsemble.uniform([I2]))
        assert_allclose(avg.matrix, s.matrix, atol=1e-15)

    def test_one_time_pad_average(self):
        _, avg = game.encode(qmat.classical_corr(), game.bit_flip())
        assert_allclose(avg.matrix, np.eye(4) / 4, atol=1e-15)

    def test_pauli_twirl(self):
        codewords, avg = game.encode(qmat.bell(), game.pauli4())
        assert len(codewords) == 4
        assert_allclose(avg.matrix, np.eye(4) / 4, atol=1e-15)

    def test_dimension_mismatch(self):
        s = QState((3, 2), np.eye(6) / 6)
        with pytest.raises(ValueError):
            game.encode(s, game.pauli4())


class TestQuantities:
    def test_one_time_pad(self):
        assert game.iq(qmat.classical_corr(), game.bit_flip()) == pytest.approx(1.0, abs=1e-12)
        assert game.i0(qmat.classical_corr(), game.bit_flip()) == pytest.approx(0.0, abs=1e-12)
        assert game.ic(qmat.classical_corr(), game.bit_flip())[0] == pytest.approx(1.0, abs=1e-6)

    def test_dense_coding(self):
        b = qmat.bell()
        assert game.iq(b, game.pauli4()) == pytest.approx(2.0, abs=1e-12)
        assert game.i0(b, game.pauli4()) == pytest.approx(0.0, abs=1e-12)
        assert game.ic(b, game.pauli4())[0] == pytest.approx(1.0, abs=1e-6)

    def test_pure_a_memoryless(self, rng):
        s = qmat.product(QState((2,), np.diag([1.0, 0.0])), qmat.random_state([2], rng))
        assert game.i0(s, game.pauli4()) == pytest.approx(1.0, abs=1e-12)

    def test_single_unitary_encodes_nothing(self, rng):
        s = qmat.random_state((2, 2), rng)
        e = game.EncodingEnsemble(((1.0, UnitaryOp(qmat.random_unitary(2, rng), 0)),))
        assert game.iq(s, e) == pytest.approx(0.0, abs=1e-12)

    def test_product_ic_equals_i0(self, rng):
        s = qmat.product(qmat.random_state([2], rng), qmat.random_state([2], rng))
        assert game.ic(s, game.pauli4())[0] == pytest.approx(game.i0(s, game.pauli4()), abs=1e-9)

    def test_ic_matches_explicit_dephasing(self, rng):
        """I_c(basis) equals the Holevo quantity of explicitly dephased codewords."""
        s = qmat.random_state((2, 2), rng)
        e = random_ensemble(rng)
        val, basis = game.ic(s, e)
        deph = sum(np.kron(I2, P) @ s.matrix @ np.kron(I2, P) for P in basis.projectors)
        d = QState((2, 2), deph)
        codewords = [(p, qmat.apply_unitary(d, u)) for p, u in e.entries]
        assert info.holevo(codewords) == pytest.approx(val, abs=1e-10)


class TestRunGame:
    def test_bell_pauli4(self):
        r = game.run_game(qmat.bell(), game.pauli4())
        assert (r.i0, r.ic, r.iq) == pytest.approx((0, 1, 2), abs=2e-3)
        assert r.maximal and r.bounds_eq5_ok and r.bounds_eq6_ok
        assert r.delta_q == pytest.approx(r.iq - r.i0)
        for v in r.identity_deviations.values():
            assert abs(v) <= 2e-3

    def test_zero_discord_no_advantage(self):
        r = game.run_game(qmat.classical_corr(), game.pauli4())
        assert r.iq - r.ic == pytest.approx(0.0, abs=1e-6)
        assert r.discord_before == pytest.approx(0.0, abs=1e-9)

    def test_not_maximal(self, rng):
        s = qmat.product(QState((2,), np.diag([1.0, 0.0])), qmat.random_state([2], rng))
        r = game.run_game(s, game.EncodingEnsemble.uniform([I2]))
        assert not r.maximal and r.identity_deviations is None

    def test_maximal_flag_tracks_marginal_only(self):
        # Bell marginal is already I/2, so even the trivial ensemble is flagged;
        # the identities then fail because the encoded state keeps its correlations.
        r = game.run_game(qmat.bell(), game.EncodingEnsemble.uniform([I2]))
        assert r.maximal
        assert r.identity_deviations["iq_minus_i0_plus_mi"] == pytest.approx(-2.0)

    def test_json_serialisable(self):
        json.dumps(game.run_game(qmat.werner(0.4), game.pauli4()).to_json())

    def test_memory_ordering(self, rng):
        for _ in range(50):
            s = qmat.random_state((2, 2), rng)
            e = random_ensemble(rng)
            c = game.ic(s, e)[0]
            assert game.iq(s, e) >= c - 1e-9
            assert c >= game.i0(s, e) - 1e-9

    @pytest.mark.slow
    def test_bounds_on_random_states_pauli4(self, rng):
        for _ in range(200):
            r = game.run_game(qmat.random_state((2, 2), rng), game.pauli4())
            assert r.bounds_eq5_ok and r.bounds_eq6_ok

    def test_bell_diagonal_identities(self, rng):
        for _ in range(10):
            s = qmat.bell_diagonal(rng.dirichlet(np.ones(4)))
            r = game.run_game(s, game.pauli4())
            assert r.maximal
            assert abs(r.identity_deviations["ic_minus_i0_plus_j"]) <= 2e-3
            assert abs(r.identity_deviations["iq_minus_i0_plus_mi"]) <= 1e-9
            assert abs(r.identity_deviations["i0_minus_negentropy"]) <= 1e-9


class TestEnsembleJson:
    def test_round_trip(self, rng):
        e = random_ensemble(rng)
        back = game.EncodingEnsemble.from_json(json.loads(json.dumps(e.to_json())))
        assert np.array_equal(back.unitaries, e.unitaries)
        assert np.array_equal(back.probs, e.probs)

    def test_rejects_bad_probabilities(self):
        with pytest.raises(ValueError):
            game.EncodingEnsemble(((0.3, UnitaryOp(I2)), (0.3, UnitaryOp(X))))

    def test_rejects_mixed_targets(self):
        with pytest.raises(ValueError):
            game.EncodingEnsemble(((0.5, UnitaryOp(I2, 0)), (0.5, UnitaryOp(X, 1))))


class TestCertify:
    def test_quantum_bell(self):
        mi, ok = game.certify(qmat.bell(), "quantum_bell", 10_000, 7)
        assert mi == pytest.approx(2.0, abs=0.05) and ok

    def test_classical(self):
        mi, ok = game.certify(qmat.bell(), "classical", 10_000, 7)
        assert mi == pytest.approx(1.0, abs=0.05) and not ok

    def test_memoryless(self):
        mi, ok = game.certify(qmat.bell(), "memoryless", 10_000, 7)
        assert mi == pytest.approx(0.0, abs=0.05) and not ok

    def test_reproducible(self):
        a = game.simulate_certification(qmat.werner(0.8), "classical", 2000, 11)
        b = game.simulate_certification(qmat.werner(0.8), "classical", 2000, 11)
        assert np.array_equal(a.transcript, b.transcript)
        assert a.mi_estimate == b.mi_estimate

    def test_rejects_few_rounds(self):
        with pytest.raises(ValueError, match="rounds"):
            game.certify(qmat.bell(), "quantum_bell", 999, 0)

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            game.certify(qmat.bell(), "oracle", 1000, 0)

    def test_zero_discord_never_certifies(self, rng):
        for i in range(50):
            p = rng.dirichlet(np.ones(4))
            s = QState((2, 2), np.diag(p))
            _, ok = game.certify(s, "quantum_bell", 2000, i)
            assert not ok

    def test_povms_are_complete(self, rng):
        s = qmat.random_state((2, 2), rng)
        for strat in game.STRATEGIES:
            povm = game.strategy_povm(s, game.pauli4(), strat)
            assert_allclose(povm.sum(axis=0), np.eye(4), atol=1e-9)
