"""Seeded Monte Carlo estimation of every coverage probability.

Reproducibility contract: each trial owns a counter-based random stream
(Philox keyed by the run seed, counter block = trial index), so estimates are
bit-identical no matter how trials are chunked or parallelized, and a rerun
with the same seed reproduces every draw.

Each run is split into two phases. The geometry phase draws everything that
does not depend on transmit power, rates, power split, or SIC quality: UAV
positions, user placement, fading, and the per-receiver interference sums at
unit transmit power. The evaluation phase applies a specific link/power
configuration to a finished batch, so parameter sweeps can reuse one batch
across all points that share geometry (same answer as re-simulating with the
same seed, at a fraction of the cost).

Paired SIC success is counted two ways on the shared fading draw: through
the two-SINR chain and through the max-coefficient threshold identity; a
disagreement raises immediately.

Interference conventions (mirroring the analytic conditioning):

* user-centric: each receiver sums over all non-serving UAVs strictly beyond
  its own 3-D serving distance, with distances measured from itself;
* UAV-centric: path loss of every interferer is referenced to the cell
  center; the nearest neighbor's horizontal distance is jittered uniformly
  within +-hole_halfwidth, mirroring the thin-ring evaluation of that term.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import DomainError
from .scenario import (
    NOMA,
    OMA,
    UAV_CENTRIC,
    USER_CENTRIC,
    NetworkConfig,
    NomaLink,
    thresholds,
)


@dataclass(frozen=True)
class CoverageEstimate:
    """One Monte Carlo coverage estimate with its 99% Wilson interval."""

    p_hat: float
    trials: int
    ci_low: float
    ci_high: float
    strategy: str
    user_role: str
    access: str
    seed: int


def wilson_interval(
    successes: int, trials: int, confidence: float = 0.99
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise DomainError("wilson_interval requires at least one trial")
    if not 0 <= successes <= trials:
        raise DomainError("successes must lie in [0, trials]")
    z = float(norm.ppf(0.5 * (1.0 + confidence)))
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    halfwidth = (
        z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    )
    return max(center - halfwidth, 0.0), min(center + halfwidth, 1.0)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    # one 2^128-block Philox counter window per trial
    return np.random.Generator(np.random.Philox(key=seed, counter=trial << 128))


def _check_seed(seed: int):
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be a 64-bit unsigned integer")


def _worker_ranges(trials: int, workers: int) -> list[range]:
    step = (trials + workers - 1) // workers
    return [range(lo, min(lo + step, trials)) for lo in range(0, trials, step)]


# ---------------------------------------------------------------------------
# user-centric strategy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UserCentricTrials:
    """Geometry/fading batch of the user-centric strategy (unit tx power)."""

    geometry_key: tuple
    seed: int
    serving_dist3d: np.ndarray  # 3-D distance typical user -> serving UAV
    interference_typical: np.ndarray  # sum g d^-aI at the typical user
    interference_fixed: np.ndarray  # sum g d^-aI at the fixed user
    gain_typical: np.ndarray
    gain_fixed: np.ndarray

    @property
    def trials(self) -> int:
        return len(self.serving_dist3d)


def _user_centric_geometry_key(cfg: NetworkConfig, fixed_user_dist: float) -> tuple:
    return (
        USER_CENTRIC,
        cfg.uav_density,
        cfg.sim_disc_radius,
        cfg.uav_height,
        cfg.m_desired,
        cfg.m_interf,
        cfg.alpha_interf,
        fixed_user_dist,
    )


def simulate_user_centric(
    cfg: NetworkConfig,
    fixed_user_dist: float,
    trials: int,
    seed: int,
    workers: int = 1,
) -> UserCentricTrials:
    """Run the geometry phase: typical user at the origin, serving UAV is the
    nearest, fixed user at ``fixed_user_dist`` from it at uniform azimuth."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    _check_seed(seed)
    height = cfg.uav_height
    mean_count = cfg.uav_density * math.pi * cfg.sim_disc_radius**2
    dist_fixed_sq = fixed_user_dist**2 + height**2
    half = cfg.alpha_interf / 2.0

    serving = np.empty(trials)
    j_typ = np.empty(trials)
    j_fix = np.empty(trials)
    h_typ = np.empty(trials)
    h_fix = np.empty(trials)

    def run_range(rows: range):
        for t in rows:
            rng = _trial_rng(seed, t)
            count = rng.poisson(mean_count)
            radii = cfg.sim_disc_radius * np.sqrt(rng.uniform(0.0, 1.0, count))
            angles = rng.uniform(0.0, 2.0 * math.pi, count)
            azimuth = rng.uniform(0.0, 2.0 * math.pi)
            h_t = rng.standard_gamma(cfg.m_desired) / cfg.m_desired
            h_f = rng.standard_gamma(cfg.m_desired) / cfg.m_desired
            g_t = rng.standard_gamma(cfg.m_interf, count) / cfg.m_interf
            g_f = rng.standard_gamma(cfg.m_interf, count) / cfg.m_interf
            if count == 0:
                serving[t] = math.inf
                j_typ[t] = j_fix[t] = 0.0
                h_typ[t] = h_fix[t] = 0.0
                continue
            nearest = int(np.argmin(radii))
            r = radii[nearest]
            # typical user at the origin: non-serving UAVs are all beyond r
            d3_typ_sq = radii**2 + height**2
            mask = np.arange(count) != nearest
            j_typ[t] = float(np.sum(g_t[mask] * d3_typ_sq[mask] ** -half))
            # fixed user hangs off the serving UAV; its exclusion is its own
            # serving distance
            fx = r * math.cos(angles[nearest]) + fixed_user_dist * math.cos(azimuth)
            fy = r * math.sin(angles[nearest]) + fixed_user_dist * math.sin(azimuth)
            dx = radii * np.cos(angles) - fx
            dy = radii * np.sin(angles) - fy
            d3_fix_sq = dx * dx + dy * dy + height**2
            mask_fix = mask & (d3_fix_sq > dist_fixed_sq)
            j_fix[t] = float(np.sum(g_f[mask_fix] * d3_fix_sq[mask_fix] ** -half))
            serving[t] = math.hypot(r, height)
            h_typ[t] = h_t
            h_fix[t] = h_f

    _dispatch(run_range, trials, workers)
    return UserCentricTrials(
        _user_centric_geometry_key(cfg, fixed_user_dist),
        seed,
        serving,
        j_typ,
        j_fix,
        h_typ,
        h_fix,
    )


def evaluate_user_centric(
    batch: UserCentricTrials, cfg: NetworkConfig, link: NomaLink, access: str
) -> tuple[int, int]:
    """Count typical/fixed coverage successes of one configuration point."""
    if batch.geometry_key != _user_centric_geometry_key(cfg, link.fixed_user_dist):
        raise DomainError("trial batch was simulated under different geometry")
    p, noise, alpha = cfg.tx_power, cfg.noise_power, cfg.alpha_desired
    dist_fixed = math.hypot(link.fixed_user_dist, cfg.uav_height)
    i_typ = p * batch.interference_typical
    i_fix = p * batch.interference_fixed
    near_case = batch.serving_dist3d < dist_fixed

    rx_typ = batch.gain_typical * batch.serving_dist3d**-alpha * p
    rx_fix = batch.gain_fixed * dist_fixed**-alpha * p

    ts = thresholds(link, cfg, USER_CENTRIC, access)
    ts_fixed = thresholds(link.with_swapped_rates(), cfg, USER_CENTRIC, access)

    if access == OMA:
        ok_typ = rx_typ / (noise + i_typ) > ts.eps_own
        ok_fix = rx_fix / (noise + i_fix) > ts_fixed.eps_own
        m_typ = np.full(batch.trials, ts.coeff("oma"))
        m_fix = np.full(batch.trials, ts_fixed.coeff("oma"))
    else:
        cross_t = rx_typ * link.pw_far / (noise + rx_typ * link.pw_near + i_typ)
        own_t = rx_typ * link.pw_near / (
            noise + link.ipsic * rx_typ * link.pw_far + i_typ
        )
        far_t = cross_t  # far role decodes its own signal with the same shape
        ok_typ = np.where(
            near_case,
            (cross_t > ts.eps_other) & (own_t > ts.eps_own),
            far_t > ts.eps_own,
        )
        cross_f = rx_fix * link.pw_far / (noise + rx_fix * link.pw_near + i_fix)
        own_f = rx_fix * link.pw_near / (
            noise + link.ipsic * rx_fix * link.pw_far + i_fix
        )
        ok_fix = np.where(
            near_case,
            cross_f > ts_fixed.eps_own,  # fixed in the far role
            (cross_f > ts_fixed.eps_other) & (own_f > ts_fixed.eps_own),
        )
        m_typ = np.where(near_case, ts.coeff("near_joint"), ts.coeff("far_own"))
        m_fix = np.where(
            near_case, ts_fixed.coeff("far_own"), ts_fixed.coeff("near_joint")
        )

    # max-coefficient identity on the shared fading draw
    id_typ = batch.gain_typical > m_typ * (noise + i_typ) * batch.serving_dist3d**alpha
    id_fix = batch.gain_fixed > m_fix * (noise + i_fix) * dist_fixed**alpha
    _check_identity(ok_typ, id_typ, "typical")
    _check_identity(ok_fix, id_fix, "fixed")
    return int(np.sum(ok_typ)), int(np.sum(ok_fix))


def run_user_centric(
    cfg: NetworkConfig,
    link: NomaLink,
    access: str,
    trials: int,
    seed: int,
    workers: int = 1,
) -> tuple[CoverageEstimate, CoverageEstimate]:
    """Estimate typical- and fixed-user coverage from fresh trials."""
    batch = simulate_user_centric(cfg, link.fixed_user_dist, trials, seed, workers)
    k_typ, k_fix = evaluate_user_centric(batch, cfg, link, access)
    return (
        _estimate(k_typ, trials, USER_CENTRIC, "typical", access, seed),
        _estimate(k_fix, trials, USER_CENTRIC, "fixed", access, seed),
    )


# ---------------------------------------------------------------------------
# UAV-centric strategy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UavCentricTrials:
    """Geometry/fading batch of the UAV-centric strategy (unit tx power)."""

    geometry_key: tuple
    seed: int
    neighbor_dist: np.ndarray  # horizontal distance to the nearest other UAV
    near_dist3d: np.ndarray
    far_dist3d: np.ndarray
    interference_near: np.ndarray
    interference_far: np.ndarray
    gain_near: np.ndarray
    gain_far: np.ndarray

    @property
    def trials(self) -> int:
        return len(self.neighbor_dist)


def _uav_centric_geometry_key(cfg: NetworkConfig) -> tuple:
    return (
        UAV_CENTRIC,
        cfg.uav_density,
        cfg.sim_disc_radius,
        cfg.uav_height,
        cfg.m_desired,
        cfg.m_interf,
        cfg.alpha_interf,
        cfg.hole_halfwidth,
    )


def simulate_uav_centric(
    cfg: NetworkConfig, trials: int, seed: int, workers: int = 1
) -> UavCentricTrials:
    """Geometry phase: serving UAV at the origin, neighbors form the
    interference field, paired users drawn from their placement densities."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    _check_seed(seed)
    height = cfg.uav_height
    mean_count = cfg.uav_density * math.pi * cfg.sim_disc_radius**2
    half = cfg.alpha_interf / 2.0

    neighbor = np.empty(trials)
    d_near = np.empty(trials)
    d_far = np.empty(trials)
    j_near = np.empty(trials)
    j_far = np.empty(trials)
    h_near = np.empty(trials)
    h_far = np.empty(trials)

    def run_range(rows: range):
        for t in rows:
            rng = _trial_rng(seed, t)
            count = rng.poisson(mean_count)
            radii = cfg.sim_disc_radius * np.sqrt(rng.uniform(0.0, 1.0, count))
            rng.uniform(0.0, 2.0 * math.pi, count)  # azimuths, isotropy unused
            u_near = rng.uniform()
            u_far = rng.uniform()
            h_w = rng.standard_gamma(cfg.m_desired) / cfg.m_desired
            h_v = rng.standard_gamma(cfg.m_desired) / cfg.m_desired
            g_w = rng.standard_gamma(cfg.m_interf, count) / cfg.m_interf
            g_v = rng.standard_gamma(cfg.m_interf, count) / cfg.m_interf
            jitter = rng.uniform(-cfg.hole_halfwidth, cfg.hole_halfwidth)
            if count == 0:
                # no neighbor inside the disc: the cell extends to the disc
                # edge and sees no interference
                big = cfg.sim_disc_radius
                neighbor[t] = big
                d_near[t] = math.hypot(0.25 * big * math.sqrt(u_near), height)
                d_far[t] = math.hypot(
                    0.25 * big * math.sqrt(1.0 + 3.0 * u_far), height
                )
                j_near[t] = j_far[t] = 0.0
                h_near[t] = h_w
                h_far[t] = h_v
                continue
            nearest = int(np.argmin(radii))
            big_r = radii[nearest]
            d3_sq = radii**2 + height**2
            ring_d3_sq = (big_r + jitter) ** 2 + height**2
            mask = np.arange(count) != nearest
            tail_w = float(np.sum(g_w[mask] * d3_sq[mask] ** -half))
            tail_v = float(np.sum(g_v[mask] * d3_sq[mask] ** -half))
            j_near[t] = tail_w + g_w[nearest] * ring_d3_sq**-half
            j_far[t] = tail_v + g_v[nearest] * ring_d3_sq**-half
            neighbor[t] = big_r
            d_near[t] = math.hypot(0.25 * big_r * math.sqrt(u_near), height)
            d_far[t] = math.hypot(
                0.25 * big_r * math.sqrt(1.0 + 3.0 * u_far), height
            )
            h_near[t] = h_w
            h_far[t] = h_v

    _dispatch(run_range, trials, workers)
    return UavCentricTrials(
        _uav_centric_geometry_key(cfg),
        seed,
        neighbor,
        d_near,
        d_far,
        j_near,
        j_far,
        h_near,
        h_far,
    )


def evaluate_uav_centric(
    batch: UavCentricTrials, cfg: NetworkConfig, link: NomaLink, access: str
) -> tuple[int, int]:
    """Count near/far-user coverage successes of one configuration point."""
    if batch.geometry_key != _uav_centric_geometry_key(cfg):
        raise DomainError("trial batch was simulated under different geometry")
    p, noise, alpha = cfg.tx_power, cfg.noise_power, cfg.alpha_desired
    i_near = p * batch.interference_near
    i_far = p * batch.interference_far
    rx_near = batch.gain_near * batch.near_dist3d**-alpha * p
    rx_far = batch.gain_far * batch.far_dist3d**-alpha * p
    ts = thresholds(link, cfg, UAV_CENTRIC, access)

    if access == OMA:
        ok_near = rx_near / (noise + i_near) > ts.eps_own
        ok_far = rx_far / (noise + i_far) > ts.eps_other
        m_near = ts.coeff("oma")
        m_far = ts.coeff("oma_far")
    else:
        # the cross decode at the near user keeps the SIC residue term
        cross = rx_near * link.pw_far / (
            noise + link.ipsic * rx_near * link.pw_near + i_near
        )
        own = rx_near * link.pw_near / (
            noise + link.ipsic * rx_near * link.pw_far + i_near
        )
        ok_near = (cross > ts.eps_other) & (own > ts.eps_own)
        ok_far = rx_far * link.pw_far / (noise + rx_far * link.pw_near + i_far) > ts.eps_other
        m_near = ts.coeff("near_joint")
        m_far = ts.coeff("far_own")

    id_near = batch.gain_near > m_near * (noise + i_near) * batch.near_dist3d**alpha
    id_far = batch.gain_far > m_far * (noise + i_far) * batch.far_dist3d**alpha
    _check_identity(ok_near, id_near, "near")
    _check_identity(ok_far, id_far, "far")
    return int(np.sum(ok_near)), int(np.sum(ok_far))


def run_uav_centric(
    cfg: NetworkConfig,
    link: NomaLink,
    access: str,
    trials: int,
    seed: int,
    workers: int = 1,
) -> tuple[CoverageEstimate, CoverageEstimate]:
    """Estimate near- and far-user coverage from fresh trials."""
    batch = simulate_uav_centric(cfg, trials, seed, workers)
    k_near, k_far = evaluate_uav_centric(batch, cfg, link, access)
    return (
        _estimate(k_near, trials, UAV_CENTRIC, "near", access, seed),
        _estimate(k_far, trials, UAV_CENTRIC, "far", access, seed),
    )


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------


def _dispatch(run_range, trials: int, workers: int):
    # Contiguous ranges into disjoint array slots; per-trial streams make the
    # split invisible in the results. Threads mostly express the deterministic
    # pooling contract; throughput parallelism belongs at the sweep-point
    # level (process pool in the CLI).
    if workers <= 1:
        run_range(range(trials))
        return
    ranges = _worker_ranges(trials, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run_range, ranges))


def _check_identity(chain: np.ndarray, identity: np.ndarray, label: str):
    mismatches = int(np.sum(chain != identity))
    if mismatches:
        raise RuntimeError(
            f"SIC chain and max-coefficient identity disagree on {mismatches} "
            f"{label} trials"
        )


def _estimate(
    successes: int, trials: int, strategy: str, role: str, access: str, seed: int
) -> CoverageEstimate:
    low, high = wilson_interval(successes, trials)
    return CoverageEstimate(
        successes / trials, trials, low, high, strategy, role, access, seed
    )
