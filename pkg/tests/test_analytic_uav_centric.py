"""Tests for the UAV-centric closed forms.

The pinned-geometry oracle mirrors the conditional model: nearest neighbor at
exactly R, population tail beyond R, interference referenced to the cell
center, with its own inline SINR chain.
"""

import math

import numpy as np
import pytest

from uavnoma.analytic_uav_centric import (
    FAR,
    NEAR,
    coverage_cond_pair,
    coverage_pair,
    laplace_exponent_ucav,
    nearest_ring_exponent_series,
    nearest_ring_exponent_ucav,
    rayleigh_ring_exponent,
    tail_exponent_ucav,
    _placement_average,
)
from uavnoma.errors import DomainError
from uavnoma.laplace import conditional_coverage
from uavnoma.scenario import NOMA, OMA, NetworkConfig, NomaLink

DENSITY = 1.0 / (500.0**2 * math.pi)


def make_cfg(**kw):
    base = dict(
        uav_density=DENSITY,
        tx_power=1e-6,
        alpha_desired=3.5,
        uav_height=100.0,
        alpha_interf=4.0,
        m_desired=1,
        m_interf=1,
    )
    base.update(kw)
    return NetworkConfig(**base)


LINK = NomaLink(rate_near=1.5, rate_far=1.0, ipsic=0.0)


class TestConditionalExponent:
    def test_transform_is_one_at_zero(self):
        exponent = laplace_exponent_ucav(make_cfg(), 450.0)
        assert exponent.value_at(0.0) == 0.0
        assert exponent.transform_at(0.0) == 1.0

    @pytest.mark.parametrize("s", [1e2, 1e5, 1e8, 1e11])
    def test_ring_matches_rayleigh_elementary_form(self, s):
        cfg = make_cfg()
        R = 430.0
        general = nearest_ring_exponent_ucav(cfg, R).value_at(s)
        assert general == pytest.approx(rayleigh_ring_exponent(s, R, cfg), rel=1e-12)

    def test_ring_series_pins_binomial_coefficient(self):
        # x = 0.5: partial sums of the series must converge to the elementary
        # closed form; with the index shifted by two they must not
        cfg = make_cfg(m_interf=2)
        R = 430.0
        l_i = math.hypot(R, cfg.uav_height)
        s = 0.5 * cfg.m_interf * l_i**cfg.alpha_interf / cfg.tx_power
        exact = nearest_ring_exponent_ucav(cfg, R).value_at(s)
        value = nearest_ring_exponent_series(s, R, cfg, terms=120)
        assert value == pytest.approx(exact, rel=1e-10)
        shifted = sum(
            (-1.0) ** u * math.comb(cfg.m_interf + u + 1, u) * 0.5**u
            for u in range(120)
        )
        assert abs((l_i / R) * (1.0 - shifted) - exact) > 1e-3

    def test_ring_exponent_monotone_in_s(self):
        exponent = nearest_ring_exponent_ucav(make_cfg(m_interf=2), 500.0)
        values = [exponent.value_at(s) for s in np.logspace(0, 12, 25)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_ring_derivatives_match_finite_differences(self):
        cfg = make_cfg(m_interf=3)
        exponent = nearest_ring_exponent_ucav(cfg, 380.0)
        s0 = 5e8
        values, _ = exponent.derivatives(s0, 2)
        h = s0 * 1e-4
        f = exponent.value_at
        d1 = (f(s0 + h) - f(s0 - h)) / (2 * h)
        d2 = (f(s0 + h) - 2 * f(s0) + f(s0 - h)) / h**2
        assert values[1] == pytest.approx(d1, rel=1e-6)
        assert values[2] == pytest.approx(d2, rel=1e-4)

    def test_total_splits_into_parts(self):
        cfg = make_cfg(m_interf=2)
        R, s = 520.0, 3e9
        total = laplace_exponent_ucav(cfg, R).value_at(s)
        ring = nearest_ring_exponent_ucav(cfg, R).value_at(s)
        tail = tail_exponent_ucav(cfg, R).value_at(s)
        assert total == pytest.approx(ring + tail, rel=1e-12)


class TestCoverageCondPair:
    def test_role_domains_enforced(self):
        cfg = make_cfg()
        with pytest.raises(DomainError):
            coverage_cond_pair(200.0, 400.0, NEAR, cfg, LINK)
        with pytest.raises(DomainError):
            coverage_cond_pair(50.0, 400.0, FAR, cfg, LINK)

    def test_infeasible_sic_residue_is_zero_everywhere(self):
        cfg = make_cfg()
        bad = NomaLink(rate_near=1.5, rate_far=1.0, ipsic=0.5)
        for R in (200.0, 450.0, 900.0):
            for frac in (0.1, 0.6, 1.0):
                assert coverage_cond_pair(frac * R / 4.0, R, NEAR, cfg, bad) == 0.0

    def test_rayleigh_collapse(self):
        cfg = make_cfg()
        R, r = 480.0, 90.0
        value = coverage_cond_pair(r, R, NEAR, cfg, LINK)
        eps_w = 2.0**1.5 - 1.0
        eps_v = 1.0
        # perfect SIC: the cross event carries no intra-pair term at all
        m_star = max(eps_w / (cfg.tx_power * 0.4), eps_v / (cfg.tx_power * 0.6))
        d = math.hypot(r, cfg.uav_height)
        s = m_star * d**cfg.alpha_desired
        expected = math.exp(-s * cfg.noise_power) * laplace_exponent_ucav(
            cfg, R
        ).transform_at(s)
        assert value == pytest.approx(expected, rel=1e-10)

    def test_removing_ring_term_increases_coverage(self):
        cfg = make_cfg(m_desired=2)
        for R in (250.0, 480.0, 800.0):
            r = R / 5.0
            d = math.hypot(r, cfg.uav_height)
            from uavnoma.scenario import UAV_CENTRIC, thresholds

            coeff = thresholds(LINK, cfg, UAV_CENTRIC, NOMA).coeff("near_joint")
            with_ring = conditional_coverage(
                2, coeff, cfg.noise_power, d, cfg.alpha_desired,
                laplace_exponent_ucav(cfg, R),
            )
            without_ring = conditional_coverage(
                2, coeff, cfg.noise_power, d, cfg.alpha_desired,
                tail_exponent_ucav(cfg, R),
            )
            assert without_ring > with_ring

    def test_m2_against_pinned_geometry_oracle(self):
        cfg = make_cfg(m_desired=2)
        R = 450.0
        r = R / 5.0
        analytic = coverage_cond_pair(r, R, NEAR, cfg, LINK)
        oracle = _pinned_pair_oracle(cfg, LINK, r, R, NEAR, trials=1_000_000, seed=31)
        assert abs(analytic - oracle) < 0.01

    def test_far_role_m2_against_pinned_geometry_oracle(self):
        cfg = make_cfg(m_desired=2)
        R = 450.0
        r = 0.4 * R
        analytic = coverage_cond_pair(r, R, FAR, cfg, LINK)
        oracle = _pinned_pair_oracle(cfg, LINK, r, R, FAR, trials=500_000, seed=32)
        assert abs(analytic - oracle) < 0.01


def _pinned_pair_oracle(cfg, link, r, R, role, trials, seed):
    """Monte Carlo of the paired-user SIC chain with the nearest neighbor
    pinned at horizontal R and the tail population beyond R, both referenced
    to the cell center."""
    rng = np.random.default_rng(seed)
    height = cfg.uav_height
    l_i_sq = R * R + height * height
    d = math.hypot(r, height)
    pg = d**-cfg.alpha_desired
    eps_near = 2.0**link.rate_near - 1.0
    eps_far = 2.0**link.rate_far - 1.0
    mean_tail = cfg.uav_density * math.pi * (cfg.sim_disc_radius**2 - R * R)
    chunk = 10_000
    successes = 0
    done = 0
    while done < trials:
        n_trials = min(chunk, trials - done)
        counts = rng.poisson(mean_tail, n_trials)
        total = int(counts.sum())
        rad2 = rng.uniform(R * R, cfg.sim_disc_radius**2, total)
        gains = rng.standard_gamma(cfg.m_interf, total) / cfg.m_interf
        contrib = gains * (rad2 + height * height) ** (-cfg.alpha_interf / 2.0)
        cumulative = np.concatenate(([0.0], np.cumsum(contrib)))
        ends = np.cumsum(counts)
        tail = cumulative[ends] - cumulative[ends - counts]
        ring_gain = rng.standard_gamma(cfg.m_interf, n_trials) / cfg.m_interf
        interference = cfg.tx_power * (
            tail + ring_gain * l_i_sq ** (-cfg.alpha_interf / 2.0)
        )
        h_user = rng.standard_gamma(cfg.m_desired, n_trials) / cfg.m_desired
        received = h_user * pg * cfg.tx_power
        if role == NEAR:
            cross = received * link.pw_far / (
                cfg.noise_power
                + link.ipsic * received * link.pw_near
                + interference
            )
            own = received * link.pw_near / (
                cfg.noise_power + link.ipsic * received * link.pw_far + interference
            )
            ok = (cross > eps_far) & (own > eps_near)
        else:
            value = received * link.pw_far / (
                cfg.noise_power + received * link.pw_near + interference
            )
            ok = value > eps_far
        successes += int(np.sum(ok))
        done += n_trials
    return successes / trials


class TestCoveragePair:
    def test_placement_average_of_constant_is_one(self):
        for role in (NEAR, FAR):
            value = _placement_average(lambda r, R: 1.0, 400.0, role)
            assert value == pytest.approx(1.0, abs=1e-12)

    def test_infeasible_link_is_zero(self):
        cfg = make_cfg()
        bad = NomaLink(rate_near=1.5, rate_far=1.0, ipsic=0.5)
        assert coverage_pair(NEAR, cfg, bad, NOMA) == 0.0
        # far event infeasible when eps_far >= pw_far/pw_near
        worse = NomaLink(rate_near=0.5, rate_far=2.0, ipsic=0.0)
        assert coverage_pair(FAR, cfg, worse, NOMA) == 0.0

    def test_bounded_and_near_exceeds_far_at_equal_thresholds(self):
        # same rate both roles, perfect SIC: the near user stochastically
        # dominates in serving distance
        cfg = make_cfg()
        link = NomaLink(rate_near=0.8, rate_far=0.8, ipsic=0.0)
        near = coverage_pair(NEAR, cfg, link, NOMA)
        far = coverage_pair(FAR, cfg, link, NOMA)
        assert 0.0 <= far <= near <= 1.0

    def test_susceptible_to_sic_residue_while_user_centric_is_not(self):
        from uavnoma.analytic_user_centric import coverage_typical

        cfg_uav = make_cfg()
        cfg_user = make_cfg(alpha_desired=3.0)
        uav_link = NomaLink(rate_near=1.5, rate_far=1.0, ipsic=0.5)
        user_link = NomaLink(rate_near=1.0, rate_far=0.5, ipsic=0.5, fixed_user_dist=300.0)
        assert coverage_pair(NEAR, cfg_uav, uav_link, NOMA) == 0.0
        assert coverage_typical(cfg_user, user_link, NOMA) > 0.05

    def test_monotone_in_rate_and_ipsic(self):
        cfg = make_cfg()
        values = [
            coverage_pair(NEAR, cfg, NomaLink(rate_near=rw, rate_far=1.0, ipsic=0.1))
            for rw in (0.5, 1.0, 1.5)
        ]
        assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))
        values = [
            coverage_pair(NEAR, cfg, NomaLink(rate_near=1.0, rate_far=1.0, ipsic=b))
            for b in (0.0, 0.15, 0.3)
        ]
        assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))

    def test_oma_pair(self):
        cfg = make_cfg()
        near = coverage_pair(NEAR, cfg, LINK, OMA)
        far = coverage_pair(FAR, cfg, LINK, OMA)
        assert 0.0 < far < 1.0 and 0.0 < near < 1.0
