import numpy as np
import pytest

from ris_chest.channel import ChannelMatrix
from ris_chest.training import (
    TrainingConfig,
    dbm_to_watts,
    generate_pilots,
    ls_estimate,
    simulate_reception,
)


def make_channel(rng, rows=16, users=8, scale=1.0):
    e = scale * (rng.standard_normal((rows, users)) + 1j * rng.standard_normal((rows, users)))
    return ChannelMatrix(entries=e, row_index_map=np.arange(1, rows + 1))


class TestDbmToWatts:
    def test_30_dbm_is_one_watt(self):
        assert dbm_to_watts(30.0) == 1.0

    def test_0_dbm_is_milliwatt(self):
        assert dbm_to_watts(0.0) == pytest.approx(1e-3, rel=1e-12)

    def test_noise_floor(self):
        assert dbm_to_watts(-114.0) == pytest.approx(10.0 ** -14.4, rel=1e-12)
        assert dbm_to_watts(-114.0) == pytest.approx(3.981e-15, rel=1e-3)

    def test_neg_inf_is_zero(self):
        assert dbm_to_watts(float("-inf")) == 0.0


class TestGeneratePilots:
    def test_single_user(self):
        assert np.allclose(generate_pilots(1).phi, [[1.0]])

    def test_two_users_orthonormal(self):
        phi = generate_pilots(2).phi
        np.testing.assert_allclose(phi.T @ phi.conj(), np.eye(2), atol=1e-14)

    @pytest.mark.parametrize("m", [1, 2, 3, 8, 17, 64])
    def test_orthonormality(self, m):
        phi = generate_pilots(m).phi
        gram = phi.T @ phi.conj()
        assert np.max(np.abs(gram - np.eye(m))) <= 1e-12
        assert phi.shape == (m, m)  # tau_p = M

    def test_rejects_zero_users(self):
        with pytest.raises(ValueError):
            generate_pilots(0)


class TestSimulateReception:
    def test_noiseless_matches_signal_model(self):
        rng = np.random.default_rng(0)
        h = make_channel(rng)
        pilots = generate_pilots(8)
        cfg = TrainingConfig(p_ul_dbm=30.0, noise_dbm=float("-inf"), m_users=8)
        x = simulate_reception(h, pilots, cfg, rng)
        np.testing.assert_allclose(x, h.entries @ pilots.phi.T, atol=1e-14)

    def test_zero_channel_noise_variance(self):
        rng = np.random.default_rng(1)
        h = ChannelMatrix(entries=np.zeros((500, 8)), row_index_map=np.arange(1, 501))
        pilots = generate_pilots(8)
        cfg = TrainingConfig(p_ul_dbm=10.0, noise_dbm=-20.0, m_users=8)
        xs = [simulate_reception(h, pilots, cfg, rng) for _ in range(25)]
        var = np.mean([np.mean(np.abs(x) ** 2) for x in xs])  # 1e5 entries
        assert var == pytest.approx(dbm_to_watts(-20.0), rel=0.05)

    def test_sqrt_power_scaling(self):
        rng = np.random.default_rng(2)
        h = make_channel(rng)
        pilots = generate_pilots(8)
        quiet = float("-inf")
        x1 = simulate_reception(h, pilots, TrainingConfig(10.0, quiet, 8), rng)
        x4 = simulate_reception(h, pilots, TrainingConfig(10.0 + 10 * np.log10(4), quiet, 8), rng)
        np.testing.assert_allclose(x4, 2.0 * x1, rtol=1e-12)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(3)
        h = make_channel(rng, users=4)
        with pytest.raises(ValueError):
            simulate_reception(h, generate_pilots(8), TrainingConfig(10.0, -114.0, 8), rng)


class TestLsEstimate:
    def test_noiseless_exact_recovery(self):
        rng = np.random.default_rng(4)
        h = make_channel(rng)
        pilots = generate_pilots(8)
        cfg = TrainingConfig(p_ul_dbm=17.0, noise_dbm=float("-inf"), m_users=8)
        x = simulate_reception(h, pilots, cfg, rng)
        est = ls_estimate(x, pilots, cfg)
        err = np.linalg.norm(est.entries - h.entries) / np.linalg.norm(h.entries)
        assert err <= 1e-10

    def test_pure_noise_variance(self):
        # LS residual variance = sigma^2 / P_UL via the orthonormal projection
        rng = np.random.default_rng(5)
        zeros = ChannelMatrix(entries=np.zeros((500, 8)), row_index_map=np.arange(1, 501))
        pilots = generate_pilots(8)
        cfg = TrainingConfig(p_ul_dbm=10.0, noise_dbm=-30.0, m_users=8)
        sq = []
        for _ in range(25):
            x = simulate_reception(zeros, pilots, cfg, rng)
            sq.append(np.mean(np.abs(ls_estimate(x, pilots, cfg).entries) ** 2))
        expected = dbm_to_watts(-30.0) / dbm_to_watts(10.0)
        assert np.mean(sq) == pytest.approx(expected, rel=0.05)

    def test_round_trip_error_variance(self):
        rng = np.random.default_rng(6)
        pilots = generate_pilots(8)
        cfg = TrainingConfig(p_ul_dbm=10.0, noise_dbm=-114.0, m_users=8)
        errs = []
        for _ in range(25):
            h = make_channel(rng, rows=500, scale=1e-5)
            x = simulate_reception(h, pilots, cfg, rng)
            est = ls_estimate(x, pilots, cfg)
            errs.append(np.mean(np.abs(est.entries - h.entries) ** 2))
        expected = dbm_to_watts(-114.0) / dbm_to_watts(10.0)
        assert np.mean(errs) == pytest.approx(expected, rel=0.05)

    def test_unbiasedness(self):
        rng = np.random.default_rng(7)
        pilots = generate_pilots(4)
        cfg = TrainingConfig(p_ul_dbm=0.0, noise_dbm=0.0, m_users=4)
        h = make_channel(rng, rows=6, users=4)
        n_trials = 10_000
        acc = np.zeros((6, 4), dtype=complex)
        for _ in range(n_trials):
            x = simulate_reception(h, pilots, cfg, rng)
            acc += ls_estimate(x, pilots, cfg).entries - h.entries
        mean_err = acc / n_trials
        sigma2 = dbm_to_watts(0.0) / dbm_to_watts(0.0)
        std_err = np.sqrt(sigma2 / n_trials)
        assert np.max(np.abs(mean_err)) <= 3 * std_err * np.sqrt(2)

    def test_default_row_map(self):
        est = ls_estimate(np.zeros((3, 2)), generate_pilots(2),
                          TrainingConfig(30.0, -114.0, 2))
        assert list(est.row_index_map) == [1, 2, 3]
