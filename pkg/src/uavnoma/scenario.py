"""Deployment configuration, unit conversion, and NOMA threshold algebra.

Everything downstream (closed-form coverage and Monte Carlo alike) consumes
the immutable value types defined here. All internal computation is in linear
units (watts, meters); dBm appears only at I/O boundaries.

Infeasible decode coefficients are represented by the ``INFEASIBLE`` sentinel
(+inf) rather than an exception: power/rate sweeps legitimately cross the
feasibility boundary, and an infinite coefficient makes the corresponding
coverage probability exactly zero downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Mapping

from .errors import DomainError

INFEASIBLE = math.inf

USER_CENTRIC = "user_centric"
UAV_CENTRIC = "uav_centric"
NOMA = "noma"
OMA = "oma"


def dbm_to_watts(dbm: float) -> float:
    """Convert a power in dBm to watts."""
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts: float) -> float:
    """Convert a power in watts to dBm."""
    if watts <= 0.0:
        raise DomainError(f"watts_to_dbm requires positive power, got {watts}")
    return 10.0 * math.log10(watts) + 30.0


def noise_from_bandwidth(bw_hz: float) -> float:
    """Thermal noise power in watts for a given bandwidth: -174 + 10 log10(BW) dBm."""
    if bw_hz <= 0.0:
        raise DomainError(f"bandwidth must be positive, got {bw_hz}")
    return dbm_to_watts(-174.0 + 10.0 * math.log10(bw_hz))


@dataclass(frozen=True)
class NetworkConfig:
    """Physical and deployment parameters of the aerial cellular network.

    uav_density        aerial base stations per m^2 of ground plane
    uav_height         flight height in meters (>= 1 m so path gain stays finite)
    tx_power           per-UAV transmit power in watts
    alpha_desired      path-loss exponent of the serving link
    alpha_interf       path-loss exponent of interfering links (> 2)
    m_desired          integer Nakagami fading order of the serving link
    m_interf           integer Nakagami fading order of interfering links
    noise_power        AWGN power in watts
    sim_disc_radius    Monte Carlo deployment disc radius in meters
    hole_halfwidth     half-width of the annulus used to evaluate the nearest
                       interferer in the UAV-centric Monte Carlo, in meters
    user_density       optional ground-user density; carried for scene
                       illustration only, no coverage quantity depends on it
    """

    uav_density: float
    tx_power: float
    alpha_desired: float
    noise_power: float = noise_from_bandwidth(300e3)
    uav_height: float = 100.0
    alpha_interf: float = 4.0
    m_desired: int = 1
    m_interf: int = 1
    sim_disc_radius: float = 10_000.0
    hole_halfwidth: float = 0.1
    user_density: float | None = None

    def __post_init__(self):
        if self.uav_density <= 0.0:
            raise DomainError("uav_density must be positive")
        if self.tx_power <= 0.0 or self.noise_power <= 0.0:
            raise DomainError("powers must be strictly positive")
        if self.uav_height < 1.0:
            raise DomainError("uav_height must be at least 1 m")
        if self.alpha_interf <= 2.0:
            raise DomainError("alpha_interf must exceed 2 (finite interference)")
        if self.alpha_desired < 2.0:
            raise DomainError("alpha_desired must be at least 2")
        if self.m_desired < 1 or self.m_desired != int(self.m_desired):
            raise DomainError("m_desired must be a positive integer")
        if self.m_interf < 1 or self.m_interf != int(self.m_interf):
            raise DomainError("m_interf must be a positive integer")
        if self.sim_disc_radius <= 0.0 or self.hole_halfwidth <= 0.0:
            raise DomainError("simulation geometry must be positive")

    @property
    def delta_interf(self) -> float:
        """2 / alpha_interf; always < 1 by construction."""
        return 2.0 / self.alpha_interf


@dataclass(frozen=True)
class NomaLink:
    """Power split, target rates, and SIC quality of one NOMA pair.

    pw_far / pw_near   power fractions of the far-role and near-role user;
                       they must sum to 1
    rate_near          target rate (BPCU) of the near user; in the
                       user-centric strategy this is the typical user's rate
    rate_far           target rate of the far user; user-centric: the rate of
                       the fixed user already attached to the serving UAV
    ipsic              residual fraction of the cancelled signal left by
                       imperfect SIC (0 = perfect, 1 = failed/no SIC)
    fixed_user_dist    horizontal distance of the fixed user from the serving
                       UAV in meters (user-centric strategy only)
    """

    pw_far: float = 0.6
    pw_near: float = 0.4
    rate_near: float = 1.0
    rate_far: float = 0.5
    ipsic: float = 0.0
    fixed_user_dist: float = 300.0

    def __post_init__(self):
        if not math.isclose(self.pw_far + self.pw_near, 1.0, rel_tol=0, abs_tol=1e-12):
            raise DomainError("power fractions must sum to 1")
        if self.pw_far <= 0.0 or self.pw_near <= 0.0:
            raise DomainError("power fractions must be strictly positive")
        if not 0.0 <= self.ipsic <= 1.0:
            raise DomainError("ipsic must lie in [0, 1]")
        if self.rate_near <= 0.0 or self.rate_far <= 0.0:
            raise DomainError("target rates must be positive")
        if self.fixed_user_dist <= 0.0:
            raise DomainError("fixed_user_dist must be positive")

    def with_swapped_rates(self) -> "NomaLink":
        """Rates seen from the partner user's perspective (power split kept)."""
        return replace(self, rate_near=self.rate_far, rate_far=self.rate_near)


def sinr_threshold(rate: float, access: str = NOMA) -> float:
    """Linear SINR threshold for a target rate: 2^R - 1, or 2^(2R) - 1 under
    orthogonal access where the pair shares the block in equal time slots."""
    if access == NOMA:
        return 2.0**rate - 1.0
    if access == OMA:
        return 2.0 ** (2.0 * rate) - 1.0
    raise DomainError(f"unknown access {access!r}")


@dataclass(frozen=True)
class ThresholdSet:
    """Linear thresholds plus the decode coefficients of one analysis subject.

    A decode coefficient M turns an SINR condition into the fading condition
    ``gain > M * (noise + interference) * dist3d^alpha``; INFEASIBLE (inf)
    marks a coefficient whose denominator is non-positive, which forces the
    associated coverage probability to exactly zero.

    Coefficient names:
      near_own        own-signal decode at the near-role user after SIC, with
                      the ipSIC residue in the denominator
      near_cross      partner-signal decode ahead of SIC, as used by the
                      closed forms (no residue term)
      near_cross_sic  same decode event but with the residue term the
                      UAV-centric near user's cross SINR carries
      near_joint      max(near_own, near_cross): the shared-fading joint event
      far_own         own-signal decode at the far-role user
      oma             orthogonal-access coefficient of the near subject
      oma_far         orthogonal-access coefficient of the far subject
    """

    eps_own: float
    eps_other: float
    decode_coeffs: Mapping[str, float]

    def coeff(self, name: str) -> float:
        return self.decode_coeffs[name]

    def is_feasible(self, name: str) -> bool:
        return math.isfinite(self.decode_coeffs[name])


def _coefficient(eps: float, denominator: float) -> float:
    return eps / denominator if denominator > 0.0 else INFEASIBLE


def thresholds(
    link: NomaLink, cfg: NetworkConfig, strategy: str, access: str = NOMA
) -> ThresholdSet:
    """Decode coefficients of the analysis subject for one strategy/access.

    The subject is the typical user (user-centric) or the near/far pair
    (UAV-centric). Infeasible power allocation, e.g. an SIC residue larger
    than the near user's own power share, yields INFEASIBLE coefficients
    rather than an error.
    """
    if strategy not in (USER_CENTRIC, UAV_CENTRIC):
        raise DomainError(f"unknown strategy {strategy!r}")
    p, beta = cfg.tx_power, link.ipsic
    eps_own = sinr_threshold(link.rate_near, access)
    eps_other = sinr_threshold(link.rate_far, access)
    oma_near = sinr_threshold(link.rate_near, OMA) / p
    oma_far = sinr_threshold(link.rate_far, OMA) / p

    if access == OMA:
        far_own = eps_own / p if strategy == USER_CENTRIC else eps_other / p
        coeffs = {
            "near_joint": eps_own / p,
            "far_own": far_own,
            "oma": oma_near,
            "oma_far": oma_far,
        }
        return ThresholdSet(eps_own, eps_other, MappingProxyType(coeffs))

    near_own = _coefficient(eps_own, p * (link.pw_near - beta * eps_own * link.pw_far))
    near_cross = _coefficient(eps_other, p * (link.pw_far - eps_other * link.pw_near))
    near_cross_sic = near_cross
    if strategy == UAV_CENTRIC:
        # the UAV-centric cross SINR keeps a residue term in its denominator;
        # the joint coefficient must use this form or the shared-fading event
        # it encodes would not be the one the SINR chain tests
        near_cross_sic = _coefficient(
            eps_other, p * (link.pw_far - beta * eps_other * link.pw_near)
        )
        far_own = near_cross
    else:
        far_own = _coefficient(eps_own, p * (link.pw_far - eps_own * link.pw_near))
    coeffs = {
        "near_own": near_own,
        "near_cross": near_cross,
        "near_cross_sic": near_cross_sic,
        "near_joint": max(near_own, near_cross_sic),
        "far_own": far_own,
        "oma": oma_near,
        "oma_far": oma_far,
    }
    return ThresholdSet(eps_own, eps_other, MappingProxyType(coeffs))
