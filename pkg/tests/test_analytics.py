import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doubleris.analytics import (
    EtaInputs,
    achievable_rate,
    channel_covariance,
    closed_form_rates,
    covariance_terms,
    eta_coefficients,
    eta_k,
    eta_k_optimal,
    general_hardening_sinr,
    sinr_lower_bound,
)
from doubleris.channel_model import SystemConfig, build_correlation_set, link_gains
from doubleris.correlation import BsCorrelationSpec, build_bs_correlation
from doubleris.exceptions import DegenerateEta, InvalidCf, SingularCovariance
from doubleris.rbd import optimal_phase_config, random_phase_config
from doubleris.stochastic import SeededRng

BASE = dict(beta_B1=2e-7, beta_B2=3e-9, beta_1k=np.array([4e-8, 1e-8]),
            beta_2k=np.array([5e-6, 2e-6]), beta_G=1.0e-11, N1=64, N2=49)


def inputs(varphi, v1, v2, **kw):
    d = dict(BASE, varphi=varphi, v1=v1, v2=v2)
    d.update(kw)
    return EtaInputs(**d)


class TestEta:
    def test_no_phase_information(self):
        # varphi = 0: phases are fully scrambled, v_i drop out
        x = inputs(0.0, 500.0, 300.0)
        b = BASE
        expected = (b["beta_B1"] * b["beta_2k"] * b["beta_G"] * b["N1"] * b["N2"]
                    + b["beta_B1"] * b["beta_1k"] * b["N1"] + b["beta_B2"] * b["beta_2k"] * b["N2"])
        np.testing.assert_allclose(eta_k(x), expected, rtol=1e-12)
        np.testing.assert_allclose(eta_k(x), eta_k(inputs(0.0, 1.0, 2.0)), rtol=1e-12)

    def test_perfect_phases(self):
        x = inputs(1.0, 500.0, 300.0)
        b = BASE
        expected = (b["beta_B1"] * b["beta_2k"] * b["beta_G"] * 500 * 300
                    + b["beta_B1"] * b["beta_1k"] * 500 + b["beta_B2"] * b["beta_2k"] * 300)
        np.testing.assert_allclose(eta_k(x), expected, rtol=1e-12)

    @given(st.floats(0, 1), st.floats(1, 4096), st.floats(1, 2401))
    @settings(max_examples=200, deadline=None)
    def test_term_oracle_agrees(self, varphi, v1, v2):
        x = inputs(varphi, v1, v2)
        total = sum(covariance_terms(x).values())
        np.testing.assert_allclose(eta_k(x), total, rtol=1e-12)

    @given(st.floats(0, 1), st.floats(1, 4096), st.floats(1, 2401))
    @settings(max_examples=200, deadline=None)
    def test_affine_decomposition(self, varphi, v1, v2):
        x = inputs(varphi, v1, v2)
        c0, c1, c2, c3 = eta_coefficients(x)
        for c in (c0, c1, c2, c3):
            assert np.all(np.asarray(c) >= 0)
        np.testing.assert_allclose(c0 * v1 * v2 + c1 * v1 + c2 * v2 + c3, eta_k(x), rtol=1e-12)

    @given(st.floats(0, 1))
    @settings(max_examples=100, deadline=None)
    def test_monotone_in_traces(self, varphi):
        lo = eta_k(inputs(varphi, 100.0, 100.0))
        assert np.all(eta_k(inputs(varphi, 101.0, 100.0)) >= lo)
        assert np.all(eta_k(inputs(varphi, 100.0, 101.0)) >= lo)

    def test_exponent_ordering(self):
        # The double path carries varphi^4 on v1 v2; halving varphi cuts that part by 16.
        kw = dict(beta_B2=0.0, beta_1k=np.zeros(2))
        big = 1e6
        r = eta_k(inputs(0.5, big, big, N1=1, N2=1, **kw)) / eta_k(inputs(1.0, big, big, N1=1, N2=1, **kw))
        np.testing.assert_allclose(r, 0.5 ** 4, rtol=1e-3)
        kw = dict(beta_G=0.0, beta_B2=0.0)
        r = eta_k(inputs(0.5, big, big, N1=1, **kw)) / eta_k(inputs(1.0, big, big, N1=1, **kw))
        np.testing.assert_allclose(r, 0.5 ** 2, rtol=1e-3)

    @pytest.mark.parametrize("bad", [-0.01, 1.01, float("nan")])
    def test_invalid_cf(self, bad):
        with pytest.raises(InvalidCf):
            eta_k(inputs(bad, 1.0, 1.0))

    def test_optimal_variant(self, tiny, tiny_corr):
        g = link_gains(tiny)
        x = EtaInputs.from_scenario(g, 0.7, tiny.N1, tiny.N2, 1.0, 1.0)
        cf = closed_form_rates(tiny, tiny_corr, optimal_phase_config(16, 16, c=1.3), varphi=0.7)
        np.testing.assert_allclose(
            eta_k_optimal(x, tiny_corr.tr_R1_2, tiny_corr.tr_R2_2), cf.eta, rtol=1e-12)

    def test_identity_correlation_ignores_phases(self):
        x = inputs(0.6, 64.0, 49.0)
        for seed in range(5):
            rng = np.random.default_rng(seed)
            th = rng.uniform(-np.pi, np.pi, 64)
            # R = I: v = sum |e^{j theta}|^2 = N
            v = float(np.sum(np.abs(np.exp(1j * th)) ** 2))
            np.testing.assert_allclose(eta_k(inputs(0.6, v, 49.0)), eta_k(x), rtol=1e-12)

    def test_optimal_eta_grows_as_spacing_shrinks(self):
        etas = []
        for eps in (0.05, 0.04, 0.03, 0.02, 0.01):
            c = SystemConfig.default().with_element_spacing(eps)
            corr = build_correlation_set(c)
            etas.append(closed_form_rates(c, corr, optimal_phase_config(100, 100)).eta)
        etas = np.array(etas)
        assert np.all(np.diff(etas, axis=0) >= -1e-12 * etas[:-1])


class TestSinrBound:
    def test_interference_limited(self):
        M, K = 64, 4
        sinr = sinr_lower_bound(1.0, float(K), M, float(M), 0.0, 1.0)
        assert sinr == pytest.approx(16.0)
        assert achievable_rate(sinr) == pytest.approx(math.log2(17), abs=1e-12)
        assert achievable_rate(sinr) == pytest.approx(4.0875, abs=1e-4)

    def test_single_user_uncorrelated(self):
        assert sinr_lower_bound(1.0, 1.0, 64, 64.0, 0.0, 3.0) == pytest.approx(64.0)

    def test_large_eta_limit(self):
        R = build_bs_correlation(BsCorrelationSpec(16, 0.6, 0.3))
        trR2 = float(np.trace(R @ R).real)
        s = sinr_lower_bound(0.25, 1.0, 16, trR2, 1e-13, 1e20)
        assert s == pytest.approx(0.25 * 256 / trR2, rel=1e-9)

    def test_noise_limited_scaling(self):
        a = sinr_lower_bound(1.0, 1.0, 16, 16.0, 1.0, 1e-9)
        b = sinr_lower_bound(1.0, 1.0, 16, 16.0, 1.0, 2e-9)
        assert b / a == pytest.approx(2.0, rel=1e-6)

    def test_broadcasts(self):
        out = sinr_lower_bound(np.array([0.1, 0.2]), 0.3, 8, 8.0, 1e-3, np.array([1.0, 2.0]))
        assert out.shape == (2,)

    @pytest.mark.parametrize("eta", [0.0, -1.0])
    def test_degenerate_eta(self, eta):
        with pytest.raises(DegenerateEta):
            sinr_lower_bound(1.0, 1.0, 4, 4.0, 1.0, eta)

    def test_rate_values(self):
        assert achievable_rate(0.0) == 0.0
        assert achievable_rate(1.0) == 1.0
        assert achievable_rate(3.0) == 2.0
        with pytest.raises(ValueError):
            achievable_rate(-0.5)


class TestGeneralHardening:
    def test_reduces_to_scalar_bound(self):
        R = build_bs_correlation(BsCorrelationSpec(12, 0.8, 0.4))
        etas = np.array([2e-9, 5e-10, 1e-9])
        powers = np.array([0.1, 0.05, 0.2])
        Psi = [channel_covariance(e, R) for e in etas]
        trR2 = float(np.trace(R @ R).real)
        for k in range(3):
            a = general_hardening_sinr(Psi, powers, 4e-13, k)
            b = sinr_lower_bound(powers[k], powers.sum(), 12, trR2, 4e-13, etas[k])
            assert a == pytest.approx(b, rel=1e-9)

    def test_orthogonal_users(self):
        P0 = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
        P1 = np.diag([0.0, 0.0, 1.0, 1.0]).astype(complex)
        s = general_hardening_sinr([P0, P1], np.array([1.0, 1.0]), 0.0, 0)
        # tr(P0)=2, only self term: 2 / (tr(P0^2)/tr(P0)) = 2
        assert s == pytest.approx(2.0)

    def test_singular(self):
        with pytest.raises(SingularCovariance):
            general_hardening_sinr([np.zeros((2, 2)), np.eye(2)], np.ones(2), 1.0, 1)

    def test_covariance_form(self):
        R = build_bs_correlation(BsCorrelationSpec(4, 0.5))
        np.testing.assert_allclose(channel_covariance(3.0, R), 3.0 * R)


@pytest.fixture(scope="module")
def base():
    return SystemConfig.default()


class TestScenarioInvariants:
    def _sum_rate(self, c):
        corr = build_correlation_set(c)
        return closed_form_rates(c, corr, optimal_phase_config(c.N1, c.N2)).sum_rate

    def test_decreasing_in_bs_correlation(self, base):
        rates = [self._sum_rate(base.replace(rho_magnitude=r)) for r in (0.0, 0.3, 0.6, 0.9)]
        assert all(a > b for a, b in zip(rates, rates[1:]))

    def test_non_decreasing_in_kappa(self, base):
        rates = [self._sum_rate(base.replace(kappa=k)) for k in (0.0, 0.5, 2.0, 8.0, 100.0)]
        assert all(b >= a for a, b in zip(rates, rates[1:]))

    def test_invariant_to_rho_phase(self, base):
        a = self._sum_rate(base)
        for ph in (0.5, 2.0, -1.0):
            assert self._sum_rate(base.replace(rho_phase=ph)) == pytest.approx(a, rel=1e-12)

    def test_optimal_beats_random(self, tiny, tiny_corr):
        best = closed_form_rates(tiny, tiny_corr, optimal_phase_config(16, 16)).sum_rate
        for s in range(50):
            ph = random_phase_config(16, 16, SeededRng(1, s))
            assert closed_form_rates(tiny, tiny_corr, ph).sum_rate <= best + 1e-12
