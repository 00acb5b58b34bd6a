"""Scenario files, parameter sweeps, validation runs and CSV output.

Scenario files are JSON objects whose keys carry their units. Every key is
optional; missing ones fall back to the reference scenario::

    {
      "scale": "reference",           # or "desk" (M = 16, 8 x 8 surfaces)
      "num_bs_antennas": 64,
      "wavelength_m": 0.1,
      "ris1": {"n_vertical": 10, "n_horizontal": 10,
               "element_spacing_m": 0.025,
               "element_height_m": 0.025, "element_width_m": 0.025},
      "ris2": {...},
      "bs_position_m": [0, 0],
      "ris1_position_m": [0, 15],
      "ris2_position_m": [60, 15],
      "num_users": 4,                 # users on (50, 0) -> (70, 0)
      "user_positions_m": [[50, 0], ...],
      "path_loss_exponent": 2.7,
      "noise_power_dbm": -94,
      "total_power_dbm": 20,
      "user_powers_w": null,          # null -> equal split
      "kappa": 4,
      "bs_correlation": {"rho_magnitude": 0.8, "rho_phase_rad": 0},
      "trials": 10000,
      "seed": 0                       # default from $DOUBLERIS_SEED, else 0
    }

Sweep CSV columns, in order: sweep_value, user_index, rate_closed_form,
rate_mc, rate_mc_stderr, eta_k, v1, v2, config_digest. Monte Carlo columns
are empty in closed-form mode.
"""

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import montecarlo
from .analytics import closed_form_rates
from .channel_model import (
    SystemConfig,
    build_correlation_set,
    config_digest,
    default_user_positions,
    link_gains,
)
from .correlation import RisGeometry
from .exceptions import DoubleRisError, RangeError, SchemaError
from .rbd import optimal_phase_config, random_phase_config, rbd_check
from .stochastic import SeededRng

SEED_ENV_VAR = "DOUBLERIS_SEED"

CSV_COLUMNS = (
    "sweep_value", "user_index", "rate_closed_form", "rate_mc", "rate_mc_stderr",
    "eta_k", "v1", "v2", "config_digest",
)

SWEEP_PARAMETERS = ("total_power_dbm", "rho_magnitude", "kappa", "M", "element_spacing")

_RIS_KEYS = {
    "n_vertical": int, "n_horizontal": int, "element_spacing_m": float,
    "element_height_m": float, "element_width_m": float,
}
_TOP_KEYS = {
    "scale": str, "num_bs_antennas": int, "wavelength_m": float, "ris1": dict, "ris2": dict,
    "bs_position_m": list, "ris1_position_m": list, "ris2_position_m": list,
    "num_users": int, "user_positions_m": list, "path_loss_exponent": float,
    "noise_power_dbm": float, "total_power_dbm": float, "user_powers_w": (list, type(None)),
    "kappa": float, "bs_correlation": dict, "trials": int, "seed": int,
}
_CORR_KEYS = {"rho_magnitude": float, "rho_phase_rad": float}


def _check_type(path, value, kind):
    kinds = kind if isinstance(kind, tuple) else (kind,)
    if float in kinds and isinstance(value, int) and not isinstance(value, bool):
        return value
    if isinstance(value, bool) or not isinstance(value, kinds):
        names = "/".join("null" if k is type(None) else k.__name__ for k in kinds)
        raise SchemaError(path, f"expected {names}, got {type(value).__name__}")
    return value


def _check_keys(path, obj, allowed):
    for key in obj:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise SchemaError(where, "unknown field")
        _check_type(f"{path}.{key}" if path else key, obj[key], allowed[key])


def _point(path, value):
    if len(value) != 2:
        raise SchemaError(path, "expected [x, y]")
    for i, v in enumerate(value):
        _check_type(f"{path}[{i}]", v, float)
    return (float(value[0]), float(value[1]))


def _positive(path, value):
    if not math.isfinite(value) or value <= 0:
        raise RangeError(path, f"must be positive, got {value}")
    return value


def scenario_from_dict(data):
    """Build a :class:`SystemConfig` from a parsed scenario object."""
    if not isinstance(data, dict):
        raise SchemaError("<root>", "scenario must be a JSON object")
    _check_keys("", data, _TOP_KEYS)

    scale = data.get("scale", "reference")
    if scale not in ("reference", "desk"):
        raise RangeError("scale", "must be 'reference' or 'desk'")
    base = SystemConfig.default() if scale == "reference" else SystemConfig.desk_scale()

    wavelength = _positive("wavelength_m", float(data.get("wavelength_m", base.wavelength)))

    def ris(name, default):
        spec = data.get(name, {})
        _check_keys(name, spec, _RIS_KEYS)
        spacing = spec.get("element_spacing_m", wavelength / 4)
        height = spec.get("element_height_m", wavelength / 4)
        width = spec.get("element_width_m", wavelength / 4)
        nv = spec.get("n_vertical", default.n_vertical)
        nh = spec.get("n_horizontal", default.n_horizontal)
        for key, value in (("n_vertical", nv), ("n_horizontal", nh)):
            if value < 1:
                raise RangeError(f"{name}.{key}", "must be >= 1")
        for key, value in (("element_spacing_m", spacing), ("element_height_m", height),
                           ("element_width_m", width)):
            _positive(f"{name}.{key}", float(value))
        return RisGeometry(nv, nh, float(spacing), wavelength, float(height), float(width))

    corr = data.get("bs_correlation", {})
    _check_keys("bs_correlation", corr, _CORR_KEYS)
    rho_mag = float(corr.get("rho_magnitude", base.rho_magnitude))
    if not 0.0 <= rho_mag <= 1.0:
        raise RangeError("bs_correlation.rho_magnitude", f"|rho| must lie in [0, 1], got {rho_mag}")

    if "user_positions_m" in data:
        users = tuple(_point(f"user_positions_m[{i}]", _check_type(f"user_positions_m[{i}]", u, list))
                      for i, u in enumerate(data["user_positions_m"]))
        if "num_users" in data and data["num_users"] != len(users):
            raise SchemaError("num_users", "does not match the number of user positions")
    else:
        K = data.get("num_users", base.K)
        if K < 1:
            raise RangeError("num_users", "must be >= 1")
        users = default_user_positions(K)
    if not users:
        raise RangeError("user_positions_m", "at least one user is required")

    powers = data.get("user_powers_w")
    if powers is not None:
        powers = tuple(float(_check_type(f"user_powers_w[{i}]", p, float)) for i, p in enumerate(powers))

    M = data.get("num_bs_antennas", base.M)
    if M < 1:
        raise RangeError("num_bs_antennas", "must be >= 1")
    kappa = float(data.get("kappa", base.kappa))
    if not math.isfinite(kappa) or kappa < 0:
        raise RangeError("kappa", "must be finite and >= 0")
    trials = data.get("trials", base.trials)
    if trials < 1:
        raise RangeError("trials", "must be >= 1")
    seed = data.get("seed")
    if seed is None:
        seed = int(os.environ.get(SEED_ENV_VAR, base.seed))

    try:
        return SystemConfig(
            M=M,
            ris1=ris("ris1", base.ris1),
            ris2=ris("ris2", base.ris2),
            bs_position=_point("bs_position_m", data.get("bs_position_m", base.bs_position)),
            ris1_position=_point("ris1_position_m", data.get("ris1_position_m", base.ris1_position)),
            ris2_position=_point("ris2_position_m", data.get("ris2_position_m", base.ris2_position)),
            user_positions=users,
            alpha=_positive("path_loss_exponent", float(data.get("path_loss_exponent", base.alpha))),
            noise_power_dbm=float(data.get("noise_power_dbm", base.noise_power_dbm)),
            total_power_dbm=float(data.get("total_power_dbm", base.total_power_dbm)),
            user_powers_w=powers,
            kappa=kappa,
            rho_magnitude=rho_mag,
            rho_phase=float(corr.get("rho_phase_rad", base.rho_phase)),
            trials=trials,
            seed=seed,
        )
    except (RangeError, SchemaError):
        raise
    except DoubleRisError as exc:
        raise RangeError("<scenario>", str(exc)) from exc


def load_scenario(path):
    """Read a JSON scenario file; missing fields take reference values.

    Raises
    ------
    SchemaError
        Malformed JSON, unknown field or wrong type (``.path`` names it).
    RangeError
        A value outside its domain, e.g. ``|rho| > 1``.
    """
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise SchemaError("<root>", f"invalid JSON: {exc}") from exc
    return scenario_from_dict(data)


def apply_parameter(config, name, value):
    """Copy of ``config`` with one sweepable parameter changed."""
    if name == "total_power_dbm":
        return config.replace(total_power_dbm=float(value), user_powers_w=None)
    if name == "rho_magnitude":
        if not 0.0 <= value <= 1.0:
            raise RangeError("rho_magnitude", f"|rho| must lie in [0, 1], got {value}")
        return config.replace(rho_magnitude=float(value))
    if name == "kappa":
        if not math.isfinite(value) or value < 0:
            raise RangeError("kappa", f"must be finite and >= 0, got {value}")
        return config.replace(kappa=float(value))
    if name == "M":
        if value != int(value) or value < 1:
            raise RangeError("M", f"must be a positive integer, got {value}")
        return config.replace(M=int(value))
    if name == "element_spacing":
        if not math.isfinite(value) or value <= 0:
            raise RangeError("element_spacing", f"must be positive, got {value}")
        return config.with_element_spacing(float(value))
    raise SchemaError("param", f"unknown sweep parameter {name!r}; choose from {SWEEP_PARAMETERS}")


@dataclass(frozen=True)
class SweepSpec:
    param: str
    grid: tuple
    base: SystemConfig

    def __post_init__(self):
        if self.param not in SWEEP_PARAMETERS:
            raise SchemaError("param", f"unknown sweep parameter {self.param!r}")
        if len(self.grid) == 0:
            raise RangeError("grid", "grid must not be empty")
        object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))
        for v in self.grid:
            apply_parameter(self.base, self.param, v)

    def configs(self):
        return [apply_parameter(self.base, self.param, v) for v in self.grid]


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    user_index: int
    rate_closed_form: float
    rate_mc: float | None
    rate_mc_stderr: float | None
    eta_k: float
    v1: float
    v2: float
    config_digest: str


def _point_rows(value, config, samples):
    corr = build_correlation_set(config)
    phases = optimal_phase_config(config.N1, config.N2)
    cf = closed_form_rates(config, corr, phases)
    if samples is True:
        samples = montecarlo.simulate(config, corr, phases)
    mc = se = [None] * config.K
    if samples is not None:
        mc, se = montecarlo.ergodic_rate_estimate(config, corr, phases, samples=samples)
    digest = config_digest(config)
    return [
        SweepRow(value, k, float(cf.rate[k]),
                 None if mc[k] is None else float(mc[k]),
                 None if se[k] is None else float(se[k]),
                 float(cf.eta[k]), cf.v1, cf.v2, digest)
        for k in range(config.K)
    ]


def run_sweep(spec, mode="closed", workers=1):
    """Evaluate every grid point under the optimal (equal-phase) design.

    Parameters
    ----------
    spec : SweepSpec
    mode : {"closed", "mc", "both"}
        ``closed`` fills only the closed-form columns; ``mc`` and ``both``
        also run the Monte Carlo (``spec.base.trials`` trials, common seed
        across grid points).
    workers : int
        Grid points evaluated concurrently; output does not depend on it.

    Returns
    -------
    list of SweepRow, ordered by grid position then user.
    """
    if mode not in ("closed", "mc", "both"):
        raise SchemaError("mode", "must be one of closed, mc, both")
    configs = spec.configs()
    run_mc = mode != "closed"

    shared = None
    if run_mc and spec.param == "total_power_dbm":
        # channels and beam gains do not depend on transmit power
        base = configs[0]
        shared = montecarlo.simulate(base, build_correlation_set(base),
                                     optimal_phase_config(base.N1, base.N2), workers=workers)

    def job(i):
        samples = shared if shared is not None else (True if run_mc else None)
        return _point_rows(spec.grid[i], configs[i], samples)

    indices = range(len(configs))
    if workers > 1 and shared is None and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(job, indices))
    else:
        blocks = [job(i) for i in indices]
    return [row for block in blocks for row in block]


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def rows_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


@dataclass
class ValidationReport:
    config_digest: str
    trials: int
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def verdicts(self):
        return {c.name: c.passed for c in self.checks}

    def format(self):
        lines = [f"validation of scenario {self.config_digest} ({self.trials} trials)"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"  [{status}] {c.name}: measured {c.measured:.4g} "
                         f"(tolerance {c.tolerance:.4g}) {c.detail}".rstrip())
        lines.append("all checks passed" if self.passed else "some checks FAILED")
        return "\n".join(lines)


def _rel_fro(A, B):
    return float(np.linalg.norm(A - B) / np.linalg.norm(B))


def covariance_errors(config, corr, phases, trials, gains=None, workers=1, seed=None):
    """Per-user ``||C_hat - eta_k R_B||_F / ||eta_k R_B||_F``."""
    gains = link_gains(config) if gains is None else gains
    eta = closed_form_rates(config, corr, phases, gains).eta
    s = montecarlo.simulate(config, corr, phases, trials, seed, gains=gains, workers=workers)
    return np.array([
        _rel_fro(montecarlo.covariance_from_samples(s, k), eta[k] * corr.R_B)
        for k in range(config.K)
    ]), s


def validate(config, trials=None, samples=1000, workers=1):
    """Run the Monte Carlo and sampling checks for one scenario.

    Checks: sample covariance against ``eta_k R_B`` (all paths, double
    reflection only, single reflections only; 10 %), moment-estimated
    bound against the closed form (5 %), ergodic rate not below the
    closed-form bound minus two standard errors, equal-phase optimality
    over ``samples`` random designs, and, when ``kappa = 0``, that the
    phase design has no effect.
    """
    trials = config.trials if trials is None else int(trials)
    corr = build_correlation_set(config)
    phases = optimal_phase_config(config.N1, config.N2)
    gains = link_gains(config)
    report = ValidationReport(config_digest(config), trials)

    err, s = covariance_errors(config, corr, phases, trials, gains, workers)
    report.checks.append(Check("covariance_all_paths", bool(np.all(err <= 0.10)), float(err.max()), 0.10))
    for name, variant in (("covariance_double_only", gains.double_reflection_only()),
                          ("covariance_single_only", gains.single_reflection_only())):
        e, _ = covariance_errors(config, corr, phases, trials, variant, workers)
        report.checks.append(Check(name, bool(np.all(e <= 0.10)), float(e.max()), 0.10))

    cf = closed_form_rates(config, corr, phases, gains)
    mb = montecarlo.moment_bound_from_samples(s, config.powers, config.noise_power)
    gap = np.abs(mb.sinr - cf.sinr) / cf.sinr
    gap_max = float(np.max(gap)) if np.all(mb.valid) else float("inf")
    report.checks.append(Check("moment_bound_vs_closed_form", gap_max <= 0.05, gap_max, 0.05))

    mean, se = montecarlo.ergodic_rate_estimate(config, corr, phases, samples=s)
    margin = float(np.min(mean - cf.rate + 2 * se))
    report.checks.append(Check("ergodic_not_below_bound", margin >= 0, margin, 0.0,
                               "(min of mc - bound + 2 se)"))

    rc = rbd_check(config, corr, samples)
    excess = max(rc.max_v1_excess, rc.max_v2_excess, rc.max_sum_rate_excess)
    report.checks.append(Check("equal_phase_optimality", rc.passed, excess, 1e-9))

    if config.kappa == 0:
        rates = [
            closed_form_rates(config, corr, random_phase_config(
                config.N1, config.N2, SeededRng(config.seed, i)), gains).rate
            for i in range(min(samples, 100))
        ]
        diff = float(max(np.max(np.abs(r - cf.rate)) for r in rates))
        report.checks.append(Check("rbd_irrelevant_closed_form", diff <= 1e-12, diff, 1e-12))
        alt = random_phase_config(config.N1, config.N2, SeededRng(config.seed, 10**6))
        m2, se2 = montecarlo.ergodic_rate_estimate(config, corr, alt, trials, config.seed + 1,
                                                   workers=workers)
        z = float(np.max(np.abs(mean - m2) / np.sqrt(se ** 2 + se2 ** 2)))
        report.checks.append(Check("rbd_irrelevant_mc", z <= 3.0, z, 3.0, "(combined standard errors)"))
    return report
