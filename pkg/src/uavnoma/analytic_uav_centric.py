"""Closed-form coverage of the UAV-centric association strategy.

The typical UAV sits at the origin with its nearest neighbor at horizontal
distance R; it serves a near user drawn from the disc of radius R/4 and a far
user from the ring R/4..R/2. Conditioned on R the interference splits into
the neighbor itself, handled as a thin-ring term at 3-D distance
l_I = sqrt(R^2 + h^2) with weight l_I / R, and the population beyond it,
which reuses the radial-tail exponent with lower limit l_I. Unconditional
coverage is the double integral over the user-placement density and the
nearest-neighbor law.

The thin-ring construction is a limit device; the implementation always uses
its closed elementary form, and the binomial-series expansion of the ring
term is kept only as a validation path (``nearest_ring_exponent_series``).
"""

from __future__ import annotations

import math

from scipy import integrate

from .errors import DomainError, NumericalError
from .laplace import (
    NearestRingExponent,
    RadialTailExponent,
    SumExponent,
    conditional_coverage,
)
from .scenario import NOMA, OMA, UAV_CENTRIC, NetworkConfig, NomaLink, thresholds

NEAR = "near"
FAR = "far"

_INNER_ABS_TOL = 1e-7
_OUTER_ABS_TOL = 1e-6
_U_CUTOFF = 46.0


def tail_exponent_ucav(cfg: NetworkConfig, R: float) -> RadialTailExponent:
    """Exponent of the interferers beyond the nearest neighbor (3-D lower limit)."""
    l_i = math.hypot(R, cfg.uav_height)
    return RadialTailExponent(
        cfg.uav_density, cfg.tx_power, cfg.alpha_interf, cfg.m_interf, l_i
    )


def nearest_ring_exponent_ucav(cfg: NetworkConfig, R: float) -> NearestRingExponent:
    """Exponent of the nearest interfering UAV at horizontal distance R."""
    l_i = math.hypot(R, cfg.uav_height)
    return NearestRingExponent(
        l_i / R, cfg.tx_power, cfg.alpha_interf, cfg.m_interf, l_i
    )


def laplace_exponent_ucav(cfg: NetworkConfig, R: float) -> SumExponent:
    """Total conditional exponent: nearest neighbor plus the population tail."""
    if R <= 0.0:
        raise DomainError("R must be positive")
    return SumExponent([nearest_ring_exponent_ucav(cfg, R), tail_exponent_ucav(cfg, R)])


def rayleigh_ring_exponent(s: float, R: float, cfg: NetworkConfig) -> float:
    """Elementary ring exponent for Rayleigh interference links:

        eta(s) = (l_I / R) * s P / (l_I^aI + s P).

    Valid only for m_interf = 1.
    """
    l_i = math.hypot(R, cfg.uav_height)
    sp = s * cfg.tx_power
    return (l_i / R) * sp / (l_i**cfg.alpha_interf + sp)


def nearest_ring_exponent_series(
    s: float, R: float, cfg: NetworkConfig, terms: int
) -> float:
    """Binomial-series form of the ring exponent, kept as a validation path:

        eta(s) = (l_I/R) (1 - sum_U (-1)^U C(mI+U-1, U) x^U),
        x = s P / (mI l_I^aI), |x| < 1.

    C(mI+U-1, U) is the coefficient whose partial sums converge to
    (1+x)^(-mI); see tests for the numerical pin.
    """
    l_i = math.hypot(R, cfg.uav_height)
    x = s * cfg.tx_power / (cfg.m_interf * l_i**cfg.alpha_interf)
    partial = sum(
        (-1.0) ** u * math.comb(cfg.m_interf + u - 1, u) * x**u for u in range(terms)
    )
    return (l_i / R) * (1.0 - partial)


def _pair_coefficient(ts, role: str, access: str) -> float:
    if role == NEAR:
        return ts.coeff("near_joint") if access == NOMA else ts.coeff("oma")
    if role == FAR:
        return ts.coeff("far_own") if access == NOMA else ts.coeff("oma_far")
    raise DomainError(f"unknown role {role!r}")


def coverage_cond_pair(
    r: float,
    R: float,
    role: str,
    cfg: NetworkConfig,
    link: NomaLink,
    access: str = NOMA,
) -> float:
    """Coverage of one paired user conditioned on its radius and on R.

    The near role requires r <= R/4 and runs the SIC chain; the far role
    requires R/4 <= r <= R/2 and decodes directly. Infeasible power
    allocation gives exactly 0.
    """
    if role == NEAR and not 0.0 <= r <= 0.25 * R + 1e-9:
        raise DomainError(f"near user requires r <= R/4, got r={r}, R={R}")
    if role == FAR and not 0.25 * R - 1e-9 <= r <= 0.5 * R + 1e-9:
        raise DomainError(f"far user requires R/4 <= r <= R/2, got r={r}, R={R}")
    ts = thresholds(link, cfg, UAV_CENTRIC, access)
    coeff = _pair_coefficient(ts, role, access)
    return conditional_coverage(
        cfg.m_desired,
        coeff,
        cfg.noise_power,
        math.hypot(r, cfg.uav_height),
        cfg.alpha_desired,
        laplace_exponent_ucav(cfg, R),
    )


def _radius_at(R: float, role: str, quantile: float) -> float:
    # inverse CDF of the user-placement densities: near 32r/R^2 on [0, R/4],
    # far 32r/(3R^2) on [R/4, R/2]
    if role == NEAR:
        return 0.25 * R * math.sqrt(quantile)
    return 0.25 * R * math.sqrt(1.0 + 3.0 * quantile)


def _placement_average(cond_fn, R: float, role: str) -> float:
    """Average a conditional quantity over the user-placement density.

    Substituting the placement CDF turns the weighted radial integral into a
    plain integral over the unit interval, so a constant averages to itself
    exactly.
    """
    value, err = integrate.quad(
        lambda v: cond_fn(_radius_at(R, role, v), R),
        0.0,
        1.0,
        epsabs=_INNER_ABS_TOL,
        epsrel=1e-6,
        limit=100,
        full_output=1,
    )[:2]
    if err > 1e-4:
        raise NumericalError("placement average quadrature out of tolerance", err)
    return value


def coverage_pair(
    role: str, cfg: NetworkConfig, link: NomaLink, access: str = NOMA
) -> float:
    """Unconditional coverage of the near or far paired user.

    Inner integral over the user placement given R, outer over the
    nearest-neighbor law via the substitution u = pi lam R^2.
    """
    if access not in (NOMA, OMA):
        raise DomainError(f"unknown access {access!r}")
    ts = thresholds(link, cfg, UAV_CENTRIC, access)
    coeff = _pair_coefficient(ts, role, access)
    if not math.isfinite(coeff):
        return 0.0
    m = cfg.m_desired

    def cond(r: float, R: float) -> float:
        return conditional_coverage(
            m,
            coeff,
            cfg.noise_power,
            math.hypot(r, cfg.uav_height),
            cfg.alpha_desired,
            laplace_exponent_ucav(cfg, R),
        )

    pl = math.pi * cfg.uav_density

    def outer(u: float) -> float:
        R = math.sqrt(u / pl)
        if R <= 0.0:
            return 0.0
        return _placement_average(cond, R, role) * math.exp(-u)

    value, err = integrate.quad(
        outer, 0.0, _U_CUTOFF, epsabs=_OUTER_ABS_TOL, epsrel=1e-5, limit=200,
        full_output=1,
    )[:2]
    if err > 1e-4:
        raise NumericalError("coverage quadrature out of tolerance", err)
    return min(max(value, 0.0), 1.0)
