"""Tests for the user-centric closed forms.

The conditional-coverage oracle is a pinned-geometry Monte Carlo written
inline with its own SINR chain, independent of the package's engine.
"""

import math

import numpy as np
import pytest

from uavnoma.analytic_user_centric import (
    FAR,
    NEAR,
    OMA_CASE,
    coverage_cond,
    coverage_fixed,
    coverage_typical,
    laplace_exponent_uc,
    rayleigh_tail_exponent_2f1,
    rayleigh_tail_exponent_arctan,
)
from uavnoma.laplace import QUADRATURE, SERIES, RadialTailExponent
from uavnoma.scenario import NOMA, OMA, NetworkConfig, NomaLink, noise_from_bandwidth

DENSITY = 1.0 / (500.0**2 * math.pi)


def make_cfg(**kw):
    base = dict(
        uav_density=DENSITY,
        tx_power=1e-6,
        alpha_desired=3.0,
        noise_power=noise_from_bandwidth(300e3),
        uav_height=100.0,
        alpha_interf=4.0,
        m_desired=1,
        m_interf=1,
    )
    base.update(kw)
    return NetworkConfig(**base)


LINK = NomaLink(rate_near=1.0, rate_far=0.5, ipsic=0.0, fixed_user_dist=300.0)


class TestLaplaceExponent:
    def test_zero_argument(self):
        exponent = laplace_exponent_uc(make_cfg(), 316.23)
        assert exponent.value_at(0.0) == 0.0
        assert exponent.transform_at(0.0) == 1.0

    @pytest.mark.parametrize("s", np.logspace(2, 8, 13))
    def test_arctan_identity(self, s):
        cfg = make_cfg()
        dist = math.hypot(300.0, 100.0)
        general = laplace_exponent_uc(cfg, dist).value_at(float(s))
        special = rayleigh_tail_exponent_arctan(float(s), dist, cfg)
        assert general == pytest.approx(special, rel=1e-9)

    @pytest.mark.parametrize("alpha_interf", [3.0, 3.5, 4.0])
    def test_hypergeometric_identity(self, alpha_interf):
        cfg = make_cfg(alpha_interf=alpha_interf)
        dist = 250.0
        for s in (1e3, 1e6, 1e9):
            general = laplace_exponent_uc(cfg, dist).value_at(s)
            special = rayleigh_tail_exponent_2f1(s, dist, cfg)
            assert general == pytest.approx(special, rel=1e-8)

    def test_series_and_quadrature_agree(self):
        cfg = make_cfg(m_interf=2, alpha_interf=3.5)
        dist = 250.0
        exponent = laplace_exponent_uc(cfg, dist)
        for s in (1e2, 1e5, 1e7, 5e8):
            assert exponent.method_for(s) == SERIES
            series = exponent._series(s, 2)
            quadrature = exponent._quadrature(s, 2)
            for got, want in zip(series, quadrature):
                assert got == pytest.approx(want, rel=1e-8)

    def test_series_stress_grid_against_quadrature(self):
        # high z and high interference order force long alternating tails;
        # the series must either match quadrature or decline (fall back)
        rng = np.random.default_rng(99)
        cases = [
            (m_i, z, a_i, 260.0)
            for m_i in (1, 2, 3)
            for z in (0.05, 0.5, 0.9, 0.94)
            for a_i in (3.2, 4.0)
        ]
        cases += [
            (
                int(rng.integers(1, 4)),
                float(rng.uniform(0.01, 0.949)),
                float(rng.uniform(2.5, 4.0)),
                float(rng.uniform(110.0, 900.0)),
            )
            for _ in range(40)
        ]
        checked = 0
        for m_i, z, a_i, d0 in cases:
            exponent = RadialTailExponent(DENSITY, 1e-6, a_i, m_i, d0)
            s = z * m_i * d0**a_i / 1e-6
            series = exponent._series(s, 2)
            if series is None:
                continue
            quadrature = exponent._quadrature(s, 2)
            for got, want in zip(series, quadrature):
                assert got == pytest.approx(want, rel=1e-8)
            checked += 1
        assert checked >= len(cases) // 2

    def test_quadrature_fallback_beyond_series_radius(self):
        cfg = make_cfg(m_interf=2, alpha_interf=3.5)
        dist = 120.0
        exponent = laplace_exponent_uc(cfg, dist)
        s_big = 0.99 * cfg.m_interf * dist**cfg.alpha_interf / cfg.tx_power
        values, method = exponent.derivatives(s_big, 1)
        assert method == QUADRATURE
        assert values[0] > 0.0 and values[1] > 0.0

    def test_exponent_monotone_in_s(self):
        cfg = make_cfg(m_interf=3, alpha_interf=3.2)
        exponent = laplace_exponent_uc(cfg, 200.0)
        values = [exponent.value_at(s) for s in np.logspace(0, 10, 21)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert all(0.0 < math.exp(-v) <= 1.0 for v in values)

    def test_derivative_signs_alternate(self):
        # complete monotonicity of the transform: eta' > 0, eta'' < 0, eta''' > 0
        cfg = make_cfg(m_interf=2, m_desired=4)
        values, _ = laplace_exponent_uc(cfg, 300.0).derivatives(1e7, 3)
        assert values[1] > 0.0 and values[2] < 0.0 and values[3] > 0.0


class TestCoverageCond:
    def test_rayleigh_collapse(self):
        # m=1: coverage reduces to exp(-M sigma^2 d^a) * L(M d^a)
        cfg = make_cfg()
        r = 300.0
        value = coverage_cond(r, NEAR, cfg, LINK)
        eps_t, eps_f = 1.0, 2.0**0.5 - 1.0
        m_star = max(
            eps_t / (cfg.tx_power * 0.4),
            eps_f / (cfg.tx_power * (0.6 - eps_f * 0.4)),
        )
        dist = math.hypot(r, cfg.uav_height)
        s = m_star * dist**cfg.alpha_desired
        expected = math.exp(-s * cfg.noise_power) * laplace_exponent_uc(
            cfg, dist
        ).transform_at(s)
        assert value == pytest.approx(expected, rel=1e-10)

    def test_infeasible_coefficient_gives_zero(self):
        cfg = make_cfg()
        bad = NomaLink(rate_near=1.0, rate_far=0.5, ipsic=0.9, fixed_user_dist=300.0)
        assert coverage_cond(200.0, NEAR, cfg, bad) == 0.0

    def test_bounded(self):
        cfg = make_cfg(m_desired=3, m_interf=2)
        for r in (10.0, 150.0, 600.0, 2500.0):
            for case in (NEAR, FAR, OMA_CASE):
                assert 0.0 <= coverage_cond(r, case, cfg, LINK) <= 1.0

    def test_m2_against_pinned_geometry_oracle(self):
        cfg = make_cfg(m_desired=2)
        r = 300.0
        analytic = coverage_cond(r, NEAR, cfg, LINK)
        oracle = _pinned_near_case_oracle(cfg, LINK, r, trials=1_000_000, seed=2024)
        assert abs(analytic - oracle) < 0.01


def _pinned_near_case_oracle(cfg, link, r, trials, seed):
    """Monte Carlo of the near-case SIC chain with the serving UAV pinned at
    horizontal distance r; interferer field is the Poisson population beyond r."""
    rng = np.random.default_rng(seed)
    height = cfg.uav_height
    dist = math.hypot(r, height)
    pg = dist**-cfg.alpha_desired
    eps_own = 2.0**link.rate_near - 1.0
    eps_other = 2.0**link.rate_far - 1.0
    mean_count = cfg.uav_density * math.pi * (cfg.sim_disc_radius**2 - r**2)
    successes = 0
    chunk = 10_000
    done = 0
    while done < trials:
        n_trials = min(chunk, trials - done)
        counts = rng.poisson(mean_count, n_trials)
        total = int(counts.sum())
        rad2 = rng.uniform(r**2, cfg.sim_disc_radius**2, total)
        gains = rng.standard_gamma(cfg.m_interf, total) / cfg.m_interf
        contrib = gains * (rad2 + height**2) ** (-cfg.alpha_interf / 2.0)
        cumulative = np.concatenate(([0.0], np.cumsum(contrib)))
        ends = np.cumsum(counts)
        interference = cfg.tx_power * (cumulative[ends] - cumulative[ends - counts])
        h_t = rng.standard_gamma(cfg.m_desired, n_trials) / cfg.m_desired
        received = h_t * pg * cfg.tx_power
        cross = received * link.pw_far / (
            cfg.noise_power + received * link.pw_near + interference
        )
        own = received * link.pw_near / (
            cfg.noise_power + link.ipsic * received * link.pw_far + interference
        )
        successes += int(np.sum((cross > eps_other) & (own > eps_own)))
        done += n_trials
    return successes / trials


class TestCoverageTypical:
    def test_limits_reduce_to_single_branch(self):
        from scipy import integrate

        cfg = make_cfg()

        def pure_branch(case):
            pl = math.pi * cfg.uav_density
            value, _ = integrate.quad(
                lambda u: coverage_cond(math.sqrt(u / pl), case, cfg, LINK)
                * math.exp(-u),
                0.0,
                np.inf,
                epsabs=1e-8,
            )
            return value

        near_only = coverage_typical(cfg, NomaLink(fixed_user_dist=1e7), NOMA)
        far_only = coverage_typical(cfg, NomaLink(fixed_user_dist=1e-8), NOMA)
        assert near_only == pytest.approx(pure_branch(NEAR), abs=2e-5)
        assert far_only == pytest.approx(pure_branch(FAR), abs=2e-5)

    def test_fully_infeasible_link_is_zero(self):
        cfg = make_cfg()
        # rate high enough that both the far event and the near SIC chain fail
        bad = NomaLink(rate_near=2.0, rate_far=2.0, ipsic=1.0)
        assert coverage_typical(cfg, bad, NOMA) == 0.0

    def test_monotone_in_ipsic_and_rate(self):
        cfg = make_cfg()
        rates = [0.3, 0.8, 1.3, 1.8, 2.3]
        for beta_pair in [(0.0, 0.25), (0.25, 0.5), (0.5, 1.0)]:
            values = [
                coverage_typical(cfg, NomaLink(rate_near=1.0, ipsic=b), NOMA)
                for b in beta_pair
            ]
            assert values[1] <= values[0] + 1e-9
        values = [
            coverage_typical(cfg, NomaLink(rate_near=rt, ipsic=0.1), NOMA)
            for rt in rates
        ]
        assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))

    def test_bounded_on_sweep(self):
        cfg = make_cfg(m_desired=2)
        for dbm in (-60.0, -40.0, -20.0, 0.0):
            value = coverage_typical(
                make_cfg(m_desired=2, tx_power=10 ** (dbm / 10.0) / 1000.0), LINK, NOMA
            )
            assert 0.0 <= value <= 1.0

    def test_oma_uses_doubled_rate(self):
        cfg = make_cfg()
        oma = coverage_typical(cfg, LINK, OMA)
        assert 0.0 < oma <= 1.0


class TestCoverageFixed:
    def test_ipsic_independent_at_moderate_rates(self):
        # the SIC-chain coefficient of the fixed user is dominated by the
        # cross decode here, so the residue never binds
        cfg = make_cfg()
        values = [
            coverage_fixed(cfg, NomaLink(ipsic=b, fixed_user_dist=300.0), NOMA)
            for b in (0.0, 0.1, 0.3, 0.5)
        ]
        for v in values[1:]:
            assert v == pytest.approx(values[0], rel=1e-9)

    def test_vanishes_at_large_distance(self):
        cfg = make_cfg()
        assert coverage_fixed(cfg, NomaLink(fixed_user_dist=50_000.0), NOMA) < 1e-6

    def test_decreases_with_distance(self):
        cfg = make_cfg()
        values = [
            coverage_fixed(cfg, NomaLink(fixed_user_dist=d), NOMA)
            for d in (100.0, 300.0, 700.0, 1500.0)
        ]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_mid_range_against_pinned_oracle(self):
        cfg = make_cfg()
        analytic = coverage_fixed(cfg, LINK, NOMA)
        oracle = _pinned_fixed_user_oracle(cfg, LINK, trials=400_000, seed=77)
        assert abs(analytic - oracle) < 0.01


def _pinned_fixed_user_oracle(cfg, link, trials, seed):
    """Monte Carlo of the fixed user's coverage: full field, nearest-UAV
    serving distance drawn from its exact law, fixed user placed at r_k with
    uniform azimuth, interference from its own position with exclusion at its
    own serving distance."""
    rng = np.random.default_rng(seed)
    height, r_k = cfg.uav_height, link.fixed_user_dist
    dist_fixed = math.hypot(r_k, height)
    pg = dist_fixed**-cfg.alpha_desired
    eps_own = 2.0**link.rate_far - 1.0
    eps_cross = 2.0**link.rate_near - 1.0
    successes = 0
    for _ in range(trials):
        # serving distance of the typical user via inverse CDF
        r = math.sqrt(-math.log(rng.uniform()) / (math.pi * cfg.uav_density))
        n = rng.poisson(cfg.uav_density * math.pi * (cfg.sim_disc_radius**2 - r**2))
        rad = np.sqrt(rng.uniform(r**2, cfg.sim_disc_radius**2, n))
        theta = rng.uniform(0.0, 2.0 * math.pi, n)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        serving = np.array([r, 0.0])
        fixed_pos = serving + r_k * np.array([math.cos(phi), math.sin(phi)])
        dx = rad * np.cos(theta) - fixed_pos[0]
        dy = rad * np.sin(theta) - fixed_pos[1]
        d3_sq = dx * dx + dy * dy + height * height
        gains = rng.standard_gamma(cfg.m_interf, n) / cfg.m_interf
        include = d3_sq > dist_fixed**2
        interference = cfg.tx_power * float(
            np.sum(gains[include] * d3_sq[include] ** (-cfg.alpha_interf / 2.0))
        )
        h_f = rng.standard_gamma(cfg.m_desired) / cfg.m_desired
        received = h_f * pg * cfg.tx_power
        if r < r_k:
            # fixed user in the far role
            value = received * link.pw_far / (
                cfg.noise_power + received * link.pw_near + interference
            )
            ok = value > eps_own
        else:
            cross = received * link.pw_far / (
                cfg.noise_power + received * link.pw_near + interference
            )
            own = received * link.pw_near / (
                cfg.noise_power + link.ipsic * received * link.pw_far + interference
            )
            ok = (cross > eps_cross) and (own > eps_own)
        successes += bool(ok)
    return successes / trials
