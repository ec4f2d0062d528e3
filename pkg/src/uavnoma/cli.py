"""Command-line front end: single points, parameter sweeps, and cross-checks.

Subcommands
-----------
analytic   one configuration point through the closed forms
mc         one configuration point through seeded Monte Carlo
sweep      iterate one axis from a config file and write a CSV
validate   run the internal cross-check suite (exit nonzero on any failure)

Configs are JSON with ``network``, ``link``, and (for sweeps) ``sweep``
sections; dBm values are accepted at this boundary only and converted to
watts once. Sweep points are dispatched to a process pool whose size comes
from UAVNOMA_THREADS (default: all cores); output rows keep input order.

Exit codes: 0 success, 1 validation failure, 2 malformed configuration,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import analytic_uav_centric, analytic_user_centric
from .errors import DomainError, NumericalError
from .laplace import conditional_coverage
from .montecarlo import run_uav_centric, run_user_centric
from .scenario import (
    NOMA,
    OMA,
    UAV_CENTRIC,
    USER_CENTRIC,
    NetworkConfig,
    NomaLink,
    dbm_to_watts,
    noise_from_bandwidth,
    thresholds,
)

CSV_COLUMNS = (
    "strategy,access,user_role,axis,value,p_analytic,p_mc,ci_low,ci_high,trials,seed"
)

SWEEP_AXES = (
    "tx_power_dbm",
    "rate_near",
    "rate_far",
    "ipsic",
    "uav_density",
    "fixed_user_dist",
    "power_split_far",
)

_STRATEGY_NAMES = {"user-centric": USER_CENTRIC, "uav-centric": UAV_CENTRIC}


class ConfigError(Exception):
    """Configuration file problem; the message carries the field path."""


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]
    strategy: str
    access: str
    mode: str  # analytic | mc | both
    trials: int
    seed: int

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep.axis: unknown axis {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep.values: must be non-empty")
        if any(not math.isfinite(v) for v in self.values):
            raise ConfigError("sweep.values: all values must be finite")
        if self.mode not in ("analytic", "mc", "both"):
            raise ConfigError(f"sweep.mode: unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ConfigError("sweep.trials: must be at least 1")


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def _take(section: dict, path: str, key: str, kind, default):
    if key not in section:
        if default is None:
            raise ConfigError(f"{path}.{key}: required field is missing")
        return default
    value = section.pop(key)
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(
            f"{path}.{key}: expected {kind.__name__}, got {value!r}"
        ) from None


def _reject_unknown(section: dict, path: str):
    if section:
        name = sorted(section)[0]
        raise ConfigError(f"{path}.{name}: unknown field")


def parse_network(section: dict) -> NetworkConfig:
    section = dict(section)
    noise_watts = None
    if "noise_watts" in section:
        noise_watts = _take(section, "network", "noise_watts", float, None)
    elif "noise_dbm" in section:
        noise_watts = dbm_to_watts(_take(section, "network", "noise_dbm", float, None))
    else:
        noise_watts = noise_from_bandwidth(
            _take(section, "network", "noise_bandwidth_hz", float, 300e3)
        )
    kwargs = dict(
        uav_density=_take(
            section, "network", "uav_density_per_m2", float, 1.0 / (500.0**2 * math.pi)
        ),
        tx_power=dbm_to_watts(_take(section, "network", "tx_power_dbm", float, -30.0)),
        alpha_desired=_take(section, "network", "alpha_desired", float, 3.0),
        noise_power=noise_watts,
        uav_height=_take(section, "network", "uav_height_m", float, 100.0),
        alpha_interf=_take(section, "network", "alpha_interf", float, 4.0),
        m_desired=_take(section, "network", "m_desired", int, 1),
        m_interf=_take(section, "network", "m_interf", int, 1),
        sim_disc_radius=_take(section, "network", "sim_disc_radius_m", float, 10_000.0),
        hole_halfwidth=_take(section, "network", "hole_halfwidth_m", float, 0.1),
    )
    if "user_density_per_m2" in section:
        kwargs["user_density"] = _take(
            section, "network", "user_density_per_m2", float, None
        )
    _reject_unknown(section, "network")
    try:
        return NetworkConfig(**kwargs)
    except DomainError as exc:
        raise ConfigError(f"network: {exc}") from None


def parse_link(section: dict) -> NomaLink:
    section = dict(section)
    pw_far = _take(section, "link", "power_split_far", float, 0.6)
    kwargs = dict(
        pw_far=pw_far,
        pw_near=1.0 - pw_far,
        rate_near=_take(section, "link", "rate_near_bpcu", float, 1.0),
        rate_far=_take(section, "link", "rate_far_bpcu", float, 0.5),
        ipsic=_take(section, "link", "ipsic", float, 0.0),
        fixed_user_dist=_take(section, "link", "fixed_user_dist_m", float, 300.0),
    )
    _reject_unknown(section, "link")
    try:
        return NomaLink(**kwargs)
    except DomainError as exc:
        raise ConfigError(f"link: {exc}") from None


def parse_sweep(section: dict) -> SweepSpec:
    section = dict(section)
    strategy = _take(section, "sweep", "strategy", str, "user-centric")
    if strategy not in _STRATEGY_NAMES:
        raise ConfigError(f"sweep.strategy: unknown strategy {strategy!r}")
    access = _take(section, "sweep", "access", str, NOMA)
    if access not in (NOMA, OMA):
        raise ConfigError(f"sweep.access: unknown access {access!r}")
    values = _take(section, "sweep", "values", list, None)
    try:
        values = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError("sweep.values: expected a list of numbers") from None
    spec = SweepSpec(
        axis=_take(section, "sweep", "axis", str, None),
        values=values,
        strategy=_STRATEGY_NAMES[strategy],
        access=access,
        mode=_take(section, "sweep", "mode", str, "both"),
        trials=_take(section, "sweep", "trials", int, 10_000),
        seed=_take(section, "sweep", "seed", int, 0),
    )
    _reject_unknown(section, "sweep")
    return spec


def load_config(path: str) -> dict:
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(raw) - {"network", "link", "sweep"}
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown top-level section")
    return raw


def apply_axis(
    cfg: NetworkConfig, link: NomaLink, axis: str, value: float
) -> tuple[NetworkConfig, NomaLink]:
    try:
        if axis == "tx_power_dbm":
            return replace(cfg, tx_power=dbm_to_watts(value)), link
        if axis == "uav_density":
            return replace(cfg, uav_density=value), link
        if axis == "rate_near":
            return cfg, replace(link, rate_near=value)
        if axis == "rate_far":
            return cfg, replace(link, rate_far=value)
        if axis == "ipsic":
            return cfg, replace(link, ipsic=value)
        if axis == "fixed_user_dist":
            return cfg, replace(link, fixed_user_dist=value)
        if axis == "power_split_far":
            return cfg, replace(link, pw_far=value, pw_near=1.0 - value)
    except DomainError as exc:
        raise ConfigError(f"sweep.values: {value!r} on axis {axis}: {exc}") from None
    raise ConfigError(f"unknown axis {axis!r}")


# ---------------------------------------------------------------------------
# point evaluation
# ---------------------------------------------------------------------------


def _analytic_pair(cfg, link, strategy, access) -> dict[str, float]:
    if strategy == USER_CENTRIC:
        return {
            "typical": analytic_user_centric.coverage_typical(cfg, link, access),
            "fixed": analytic_user_centric.coverage_fixed(cfg, link, access),
        }
    return {
        "near": analytic_uav_centric.coverage_pair(
            analytic_uav_centric.NEAR, cfg, link, access
        ),
        "far": analytic_uav_centric.coverage_pair(
            analytic_uav_centric.FAR, cfg, link, access
        ),
    }


def _mc_pair(cfg, link, strategy, access, trials, seed):
    runner = run_user_centric if strategy == USER_CENTRIC else run_uav_centric
    estimates = runner(cfg, link, access, trials, seed)
    return {est.user_role: est for est in estimates}


def _strategy_label(strategy: str) -> str:
    return "user-centric" if strategy == USER_CENTRIC else "uav-centric"


def evaluate_point(
    cfg: NetworkConfig, link: NomaLink, spec: SweepSpec, value: float
) -> list[dict]:
    cfg, link = apply_axis(cfg, link, spec.axis, value)
    analytic = (
        _analytic_pair(cfg, link, spec.strategy, spec.access)
        if spec.mode in ("analytic", "both")
        else {}
    )
    mc = (
        _mc_pair(cfg, link, spec.strategy, spec.access, spec.trials, spec.seed)
        if spec.mode in ("mc", "both")
        else {}
    )
    roles = ("typical", "fixed") if spec.strategy == USER_CENTRIC else ("near", "far")
    rows = []
    for role in roles:
        estimate = mc.get(role)
        rows.append(
            {
                "strategy": _strategy_label(spec.strategy),
                "access": spec.access,
                "user_role": role,
                "axis": spec.axis,
                "value": value,
                "p_analytic": analytic.get(role),
                "p_mc": estimate.p_hat if estimate else None,
                "ci_low": estimate.ci_low if estimate else None,
                "ci_high": estimate.ci_high if estimate else None,
                "trials": spec.trials if estimate else None,
                "seed": spec.seed if estimate else None,
            }
        )
    return rows


def _sweep_task(payload):
    cfg, link, spec, value = payload
    return evaluate_point(cfg, link, spec, value)


def worker_count() -> int:
    env = os.environ.get("UAVNOMA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"UAVNOMA_THREADS: expected an integer, got {env!r}")
    return os.cpu_count() or 1


def run_sweep(cfg: NetworkConfig, link: NomaLink, spec: SweepSpec, out_path: str):
    payloads = [(cfg, link, spec, value) for value in spec.values]
    workers = min(worker_count(), len(payloads))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_task, payloads))
    else:
        results = [_sweep_task(p) for p in payloads]
    with open(out_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS.split(","))
        for rows in results:
            for row in rows:
                writer.writerow(_format_row(row))


def _format_row(row: dict) -> list[str]:
    def number(x):
        if x is None:
            return ""
        if isinstance(x, int):
            return str(x)
        return f"{x:.10g}"

    return [
        row["strategy"],
        row["access"],
        row["user_role"],
        row["axis"],
        number(row["value"]),
        number(row["p_analytic"]),
        number(row["p_mc"]),
        number(row["ci_low"]),
        number(row["ci_high"]),
        number(row["trials"]),
        number(row["seed"]),
    ]


def _warn_infeasible(cfg, link, strategy, access):
    ts = thresholds(link, cfg, strategy, access)
    bad = [name for name in ("near_joint", "far_own") if not ts.is_feasible(name)]
    for name in bad:
        role = "near/SIC chain" if name == "near_joint" else "far decode"
        print(
            f"warning: {role} coefficient is infeasible for this power "
            "allocation; the affected coverage is exactly zero",
            file=sys.stderr,
        )


# ---------------------------------------------------------------------------
# validation suite
# ---------------------------------------------------------------------------


def _validate_checks(quick: bool, seed: int):
    density = 1.0 / (500.0**2 * math.pi)
    cfg = NetworkConfig(
        uav_density=density, tx_power=1e-6, alpha_desired=3.0, m_interf=1
    )

    def special_case_identity():
        worst = 0.0
        for dist in (150.0, 450.0, 1200.0):
            for s in np.logspace(2.0, 8.0, 13):
                general = analytic_user_centric.laplace_exponent_uc(
                    cfg, dist
                ).value_at(float(s))
                closed = analytic_user_centric.rayleigh_tail_exponent_arctan(
                    float(s), dist, cfg
                )
                worst = max(worst, abs(general - closed) / closed)
        return worst, 1e-8

    def ring_identity():
        worst = 0.0
        for R in (220.0, 470.0, 900.0):
            for s in np.logspace(2.0, 10.0, 9):
                general = analytic_uav_centric.nearest_ring_exponent_ucav(
                    cfg, R
                ).value_at(float(s))
                closed = analytic_uav_centric.rayleigh_ring_exponent(float(s), R, cfg)
                worst = max(worst, abs(general - closed) / closed)
        return worst, 1e-12

    def series_vs_quadrature():
        rich = NetworkConfig(
            uav_density=density,
            tx_power=1e-6,
            alpha_desired=3.0,
            m_interf=2,
            alpha_interf=3.5,
        )
        worst = 0.0
        exponent = analytic_user_centric.laplace_exponent_uc(rich, 300.0)
        for s in (1e3, 1e6, 1e8):
            series = exponent._series(s, 2)
            quad = exponent._quadrature(s, 2)
            for a, b in zip(series, quad):
                worst = max(worst, abs(a - b) / abs(b))
        return worst, 1e-8

    def derivative_finite_differences():
        rng = np.random.default_rng(seed)
        worst = 0.0
        draws = 5 if quick else 20
        for _ in range(draws):
            dist = rng.uniform(150.0, 900.0)
            s0 = rng.uniform(0.3, 3.0) * dist**4 / (1e-6) * 1e-3
            exponent = analytic_user_centric.laplace_exponent_uc(cfg, dist)
            transform = lambda s: math.exp(-exponent.value_at(s))
            etas = exponent.derivatives(s0, 1).values
            analytic_d1 = -etas[1] * math.exp(-etas[0])
            h = s0 * 1e-5
            fd = (transform(s0 + h) - transform(s0 - h)) / (2.0 * h)
            worst = max(worst, abs(analytic_d1 - fd) / abs(fd))
        return worst, 1e-4

    def analytic_vs_mc_user_centric():
        trials = 20_000 if quick else 100_000
        link = NomaLink(rate_near=1.0, rate_far=0.5, ipsic=0.0, fixed_user_dist=300.0)
        est, est_fixed = run_user_centric(cfg, link, NOMA, trials, seed)
        gap = abs(est.p_hat - analytic_user_centric.coverage_typical(cfg, link, NOMA))
        gap_fixed = abs(
            est_fixed.p_hat - analytic_user_centric.coverage_fixed(cfg, link, NOMA)
        )
        return max(gap, gap_fixed), 0.02

    def analytic_vs_mc_uav_centric():
        trials = 20_000 if quick else 100_000
        cfg_uav = replace(cfg, alpha_desired=3.5)
        link = NomaLink(rate_near=1.5, rate_far=1.0, ipsic=0.0)
        near, far = run_uav_centric(cfg_uav, link, NOMA, trials, seed)
        gap_near = abs(
            near.p_hat
            - analytic_uav_centric.coverage_pair(
                analytic_uav_centric.NEAR, cfg_uav, link, NOMA
            )
        )
        gap_far = abs(
            far.p_hat
            - analytic_uav_centric.coverage_pair(
                analytic_uav_centric.FAR, cfg_uav, link, NOMA
            )
        )
        return max(gap_near, gap_far), 0.02

    def ring_series_coefficient():
        R = 430.0
        l_i = math.hypot(R, cfg.uav_height)
        s = 0.5 * l_i**cfg.alpha_interf / cfg.tx_power
        exact = analytic_uav_centric.nearest_ring_exponent_ucav(cfg, R).value_at(s)
        series = analytic_uav_centric.nearest_ring_exponent_series(s, R, cfg, 120)
        return abs(series - exact) / exact, 1e-9

    return [
        ("closed-form identity (arctan vs general)", special_case_identity),
        ("nearest-ring identity (elementary vs general)", ring_identity),
        ("series vs quadrature exponent", series_vs_quadrature),
        ("transform derivative vs finite differences", derivative_finite_differences),
        ("nearest-ring binomial series", ring_series_coefficient),
        ("analytic vs MC, user-centric", analytic_vs_mc_user_centric),
        ("analytic vs MC, UAV-centric", analytic_vs_mc_uav_centric),
    ]


def run_validation(quick: bool, seed: int) -> int:
    failures = 0
    for name, check in _validate_checks(quick, seed):
        achieved, bound = check()
        ok = achieved <= bound
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {achieved:.3e} <= {bound:.0e}")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavnoma",
        description="Coverage probability of NOMA aerial-base-station networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="JSON configuration path")
        p.add_argument(
            "--strategy", choices=sorted(_STRATEGY_NAMES), help="association strategy"
        )
        p.add_argument("--access", choices=[NOMA, OMA], help="multiple-access mode")

    p_analytic = sub.add_parser("analytic", help="closed-form coverage of one point")
    common(p_analytic)

    p_mc = sub.add_parser("mc", help="Monte Carlo coverage of one point")
    common(p_mc)
    p_mc.add_argument("--trials", type=int, help="number of trials")
    p_mc.add_argument("--seed", type=int, help="64-bit unsigned seed")

    p_sweep = sub.add_parser("sweep", help="run the sweep of a config file")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--trials", type=int, help="override sweep.trials")
    p_sweep.add_argument("--seed", type=int, help="override sweep.seed")

    p_val = sub.add_parser("validate", help="run the cross-check suite")
    p_val.add_argument("--quick", action="store_true", help="reduced trial counts")
    p_val.add_argument("--seed", type=int, default=20_240_601)
    return parser


def _point_spec(raw: dict, args, mode: str) -> SweepSpec:
    sweep_section = raw.get("sweep", {})
    spec = parse_sweep({**sweep_section, "axis": "ipsic", "values": [0.0]})
    strategy = args.strategy or _strategy_label(spec.strategy)
    access = args.access or spec.access
    trials = getattr(args, "trials", None) or spec.trials
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = spec.seed
    return SweepSpec(
        axis=spec.axis,
        values=spec.values,
        strategy=_STRATEGY_NAMES[strategy],
        access=access,
        mode=mode,
        trials=trials,
        seed=seed,
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return run_validation(args.quick, args.seed)

        raw = load_config(args.config)
        cfg = parse_network(raw.get("network", {}))
        link = parse_link(raw.get("link", {}))

        if args.command == "sweep":
            spec = parse_sweep(raw.get("sweep", {}))
            if args.trials:
                spec = replace(spec, trials=args.trials)
            if args.seed is not None:
                spec = replace(spec, seed=args.seed)
            run_sweep(cfg, link, spec, args.out)
            print(f"wrote {args.out}: {len(spec.values)} points")
            return 0

        mode = "analytic" if args.command == "analytic" else "mc"
        spec = _point_spec(raw, args, mode)
        ipsic = link.ipsic
        _warn_infeasible(cfg, link, spec.strategy, spec.access)
        rows = evaluate_point(cfg, link, spec, ipsic)
        print(f"strategy={_strategy_label(spec.strategy)} access={spec.access}")
        for row in rows:
            if mode == "analytic":
                print(f"{row['user_role']}: p={row['p_analytic']:.6f}")
            else:
                print(
                    f"{row['user_role']}: p={row['p_mc']:.6f} "
                    f"ci99=[{row['ci_low']:.6f}, {row['ci_high']:.6f}] "
                    f"trials={row['trials']} seed={row['seed']}"
                )
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, DomainError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
