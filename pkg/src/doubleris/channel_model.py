"""Scenario description, large-scale gains and small-scale channel draws.

The effective downlink channel of user k is

    h_k = H_B1 T1 G T2 q_2k + H_B1 T1 q_1k + H_B2 T2 q_2k

where ``Ti = diag(exp(1j * (theta_i + noise_i)))`` combines the configured
RIS phases with Von Mises phase noise. The BS -> RIS 2 -> RIS 1 -> user path
and direct BS-user links are not modelled.
"""

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .correlation import BsCorrelationSpec, CorrelationSet, RisGeometry
from .exceptions import CoincidentNodes, DimensionMismatch, InvalidDistance, RangeError
from .stochastic import PhaseNoiseModel, sample_complex_gaussian


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def default_user_positions(K):
    """K users evenly spaced on the segment (50, 0) -> (70, 0)."""
    if K == 1:
        return ((50.0, 0.0),)
    return tuple((50.0 + 20.0 * k / (K - 1), 0.0) for k in range(K))


def _square_ris(n_side, wavelength, spacing=None, size=None):
    spacing = wavelength / 4 if spacing is None else spacing
    size = wavelength / 4 if size is None else size
    return RisGeometry(n_side, n_side, spacing, wavelength, size, size)


@dataclass(frozen=True)
class SystemConfig:
    """Complete double-RIS downlink scenario.

    Positions are 2D coordinates in meters, powers are given in dBm (or in
    watts for the optional per-user split ``user_powers_w``).
    """

    M: int
    ris1: RisGeometry
    ris2: RisGeometry
    bs_position: tuple
    ris1_position: tuple
    ris2_position: tuple
    user_positions: tuple
    alpha: float = 2.7
    noise_power_dbm: float = -94.0
    total_power_dbm: float = 20.0
    user_powers_w: tuple | None = None
    kappa: float = 4.0
    rho_magnitude: float = 0.8
    rho_phase: float = 0.0
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.M < 1:
            raise RangeError("M", "must be >= 1")
        if len(self.user_positions) < 1:
            raise RangeError("user_positions", "at least one user is required")
        if self.ris1.wavelength != self.ris2.wavelength:
            raise RangeError("wavelength", "both surfaces must share one wavelength")
        if not 0.0 <= self.rho_magnitude <= 1.0:
            raise RangeError("rho_magnitude", "must lie in [0, 1]")
        if not math.isfinite(self.kappa) or self.kappa < 0:
            raise RangeError("kappa", "must be finite and >= 0")
        if self.alpha <= 0:
            raise RangeError("alpha", "must be positive")
        if self.trials < 1:
            raise RangeError("trials", "must be positive")
        if self.user_powers_w is not None:
            p = np.asarray(self.user_powers_w, dtype=float)
            if p.shape != (self.K,) or np.any(p < 0):
                raise RangeError("user_powers_w", "need one nonnegative power per user")
            if p.sum() > self.total_power * (1 + 1e-12):
                raise RangeError("user_powers_w", "sum of user powers exceeds total power")

    @classmethod
    def default(cls, **overrides):
        """Reference scenario: M = 64, two 10 x 10 surfaces, K = 4."""
        wavelength = 0.1
        K = overrides.pop("K", 4)
        base = dict(
            M=64,
            ris1=_square_ris(10, wavelength),
            ris2=_square_ris(10, wavelength),
            bs_position=(0.0, 0.0),
            ris1_position=(0.0, 15.0),
            ris2_position=(60.0, 15.0),
            user_positions=default_user_positions(K),
        )
        base.update(overrides)
        return cls(**base)

    @classmethod
    def desk_scale(cls, **overrides):
        """Reduced scenario used for validation: M = 16, two 8 x 8 surfaces."""
        wavelength = 0.1
        base = dict(M=16, ris1=_square_ris(8, wavelength), ris2=_square_ris(8, wavelength))
        base.update(overrides)
        return cls.default(**base)

    @property
    def K(self):
        return len(self.user_positions)

    @property
    def N1(self):
        return self.ris1.num_elements

    @property
    def N2(self):
        return self.ris2.num_elements

    @property
    def wavelength(self):
        return self.ris1.wavelength

    @property
    def noise_power(self):
        return dbm_to_watts(self.noise_power_dbm)

    @property
    def total_power(self):
        return dbm_to_watts(self.total_power_dbm)

    @property
    def powers(self):
        """Per-user transmit powers in watts (equal split by default)."""
        if self.user_powers_w is not None:
            return np.asarray(self.user_powers_w, dtype=float)
        return np.full(self.K, self.total_power / self.K)

    @property
    def bs_correlation(self):
        return BsCorrelationSpec(self.M, self.rho_magnitude, self.rho_phase)

    @property
    def phase_noise(self):
        return PhaseNoiseModel(self.kappa)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def with_element_spacing(self, spacing):
        """Same scenario with both surfaces at a new element spacing.

        Element size (and hence the path gains) is left unchanged.
        """
        return self.replace(
            ris1=dataclasses.replace(self.ris1, element_spacing=spacing),
            ris2=dataclasses.replace(self.ris2, element_spacing=spacing),
        )

    def with_users(self, K):
        """Same scenario with K users at the default positions."""
        return self.replace(user_positions=default_user_positions(K), user_powers_w=None)

    def to_dict(self):
        """JSON-ready dictionary using the scenario-file field names."""

        def ris(g):
            return {
                "n_vertical": g.n_vertical,
                "n_horizontal": g.n_horizontal,
                "element_spacing_m": g.element_spacing,
                "element_height_m": g.element_height,
                "element_width_m": g.element_width,
            }

        return {
            "num_bs_antennas": self.M,
            "wavelength_m": self.wavelength,
            "ris1": ris(self.ris1),
            "ris2": ris(self.ris2),
            "bs_position_m": list(self.bs_position),
            "ris1_position_m": list(self.ris1_position),
            "ris2_position_m": list(self.ris2_position),
            "user_positions_m": [list(p) for p in self.user_positions],
            "path_loss_exponent": self.alpha,
            "noise_power_dbm": self.noise_power_dbm,
            "total_power_dbm": self.total_power_dbm,
            "user_powers_w": None if self.user_powers_w is None else list(self.user_powers_w),
            "kappa": self.kappa,
            "bs_correlation": {"rho_magnitude": self.rho_magnitude, "rho_phase_rad": self.rho_phase},
            "trials": self.trials,
            "seed": self.seed,
        }


def config_digest(config):
    """Short SHA-256 digest of the canonical JSON form of a scenario."""
    blob = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def build_correlation_set(config):
    return CorrelationSet.build(config.bs_correlation, config.ris1, config.ris2)


def path_gain(distance, alpha, area):
    """Large-scale gain ``distance**(-alpha) * area``.

    Pass ``area = A**2`` (or ``A1 * A2``) for the RIS-to-RIS link.
    """
    distance = np.asarray(distance, dtype=float)
    if np.any(~np.isfinite(distance)) or np.any(distance <= 0):
        raise InvalidDistance("distances must be positive")
    if area <= 0:
        raise InvalidDistance("element area must be positive")
    return distance ** (-alpha) * area


@dataclass(frozen=True)
class Distances:
    d_B1: float
    d_B2: float
    d_12: float
    d_1k: np.ndarray
    d_2k: np.ndarray


def derive_geometry(config):
    """Euclidean distances between BS, both surfaces and every user."""

    def dist(a, b):
        return math.hypot(a[0] - b[0], a[1] - b[1])

    users = config.user_positions
    table = Distances(
        d_B1=dist(config.bs_position, config.ris1_position),
        d_B2=dist(config.bs_position, config.ris2_position),
        d_12=dist(config.ris1_position, config.ris2_position),
        d_1k=np.array([dist(config.ris1_position, u) for u in users]),
        d_2k=np.array([dist(config.ris2_position, u) for u in users]),
    )
    scalars = {"d_B1": table.d_B1, "d_B2": table.d_B2, "d_12": table.d_12}
    for name, value in scalars.items():
        if value == 0:
            raise CoincidentNodes(f"{name} is zero")
    for name in ("d_1k", "d_2k"):
        if np.any(getattr(table, name) == 0):
            raise CoincidentNodes(f"a user coincides with a surface ({name})")
    return table


@dataclass(frozen=True)
class LinkGains:
    """Per-link large-scale gains. ``beta_1k``/``beta_2k`` have one entry per user."""

    beta_B1: float
    beta_B2: float
    beta_G: float
    beta_1k: np.ndarray
    beta_2k: np.ndarray

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def double_reflection_only(self):
        """Gains with both single-reflection links switched off."""
        return self.replace(beta_B2=0.0, beta_1k=np.zeros_like(self.beta_1k))

    def single_reflection_only(self):
        """Gains with the RIS-to-RIS link switched off."""
        return self.replace(beta_G=0.0)


def link_gains(config):
    d = derive_geometry(config)
    A1 = config.ris1.element_area
    A2 = config.ris2.element_area
    return LinkGains(
        beta_B1=float(path_gain(d.d_B1, config.alpha, A1)),
        beta_B2=float(path_gain(d.d_B2, config.alpha, A2)),
        beta_G=float(path_gain(d.d_12, config.alpha, A1 * A2)),
        beta_1k=path_gain(d.d_1k, config.alpha, A1),
        beta_2k=path_gain(d.d_2k, config.alpha, A2),
    )


@dataclass(frozen=True)
class PhaseConfig:
    """Deterministic RIS phase vectors in radians."""

    theta_1: np.ndarray
    theta_2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta_1", np.asarray(self.theta_1, dtype=float))
        object.__setattr__(self, "theta_2", np.asarray(self.theta_2, dtype=float))

    @property
    def reflection_1(self):
        return np.exp(1j * self.theta_1)

    @property
    def reflection_2(self):
        return np.exp(1j * self.theta_2)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of every small-scale link.

    ``q_1`` is N1 x K and ``q_2`` is N2 x K; column k belongs to user k.
    """

    H_B1: np.ndarray
    H_B2: np.ndarray
    G: np.ndarray
    q_1: np.ndarray
    q_2: np.ndarray


def draw_channels(config, corr, rng, gains=None):
    """Draw one correlated Rayleigh realization of all links.

    Draw order is fixed (H_B1, H_B2, G, q_1, q_2) so a given substream
    always yields the same realization.
    """
    if gains is None:
        gains = link_gains(config)
    M, N1, N2, K = config.M, config.N1, config.N2, config.K
    if corr.M != M or corr.N1 != N1 or corr.N2 != N2:
        raise DimensionMismatch("correlation set does not match the scenario")
    Hw1 = sample_complex_gaussian(M, N1, rng)
    Hw2 = sample_complex_gaussian(M, N2, rng)
    Gw = sample_complex_gaussian(N1, N2, rng)
    qw1 = sample_complex_gaussian(N1, K, rng)
    qw2 = sample_complex_gaussian(N2, K, rng)
    SB, S1, S2 = corr.sqrt_R_B, corr.sqrt_R_1, corr.sqrt_R_2
    return ChannelRealization(
        H_B1=math.sqrt(gains.beta_B1) * (SB @ Hw1 @ S1),
        H_B2=math.sqrt(gains.beta_B2) * (SB @ Hw2 @ S2),
        G=math.sqrt(gains.beta_G) * (S1 @ Gw @ S2),
        q_1=(S1 @ qw1) * np.sqrt(gains.beta_1k),
        q_2=(S2 @ qw2) * np.sqrt(gains.beta_2k),
    )


def effective_channel(real, phases, noise_1, noise_2, k=None):
    """Effective M-vector channel of user ``k`` (all users as M x K if None).

    ``noise_1`` and ``noise_2`` are the phase-noise angles on each surface;
    they add to the configured phases before exponentiation.
    """
    N1, N2 = real.G.shape
    noise_1 = np.asarray(noise_1, dtype=float)
    noise_2 = np.asarray(noise_2, dtype=float)
    if (phases.theta_1.shape != (N1,) or phases.theta_2.shape != (N2,)
            or noise_1.shape != (N1,) or noise_2.shape != (N2,)):
        raise DimensionMismatch("phase or noise vector length does not match the surfaces")
    t1 = np.exp(1j * (phases.theta_1 + noise_1))[:, None]
    t2 = np.exp(1j * (phases.theta_2 + noise_2))[:, None]
    q1 = real.q_1 if k is None else real.q_1[:, [k]]
    q2 = real.q_2 if k is None else real.q_2[:, [k]]
    a2 = t2 * q2
    h = real.H_B1 @ (t1 * (real.G @ a2 + q1)) + real.H_B2 @ a2
    return h if k is None else h[:, 0]
