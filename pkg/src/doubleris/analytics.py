"""Closed-form channel statistics and the hardening lower bound on the rate.

Every user's channel covariance is a scalar multiple of the BS correlation,
``Psi_k = eta_k * R_B``. ``eta_k`` collects the path gains, the RIS
correlation energies ``v_i = tr(R_i Theta_i R_i Theta_i^H)`` and the phase
noise attenuation ``varphi = I1(kappa)/I0(kappa)``. Functions here take
traces rather than matrices so sweeps never pay O(N^3) per point.
"""

from dataclasses import dataclass

import numpy as np

from .channel_model import link_gains
from .correlation import phase_weighted_trace
from .exceptions import DegenerateEta, InvalidCf, SingularCovariance
from .stochastic import vm_cf


@dataclass(frozen=True)
class EtaInputs:
    """Scalars entering ``eta_k``.

    ``beta_1k`` and ``beta_2k`` may be arrays (one entry per user); the
    result then broadcasts. ``v1``/``v2`` are the phase-weighted traces
    ``tr(R_i R_i_bar)``.
    """

    beta_B1: float
    beta_B2: float
    beta_1k: np.ndarray
    beta_2k: np.ndarray
    beta_G: float
    varphi: float
    N1: int
    N2: int
    v1: float
    v2: float

    @classmethod
    def from_scenario(cls, gains, varphi, N1, N2, v1, v2):
        return cls(gains.beta_B1, gains.beta_B2, gains.beta_1k, gains.beta_2k,
                   gains.beta_G, varphi, N1, N2, v1, v2)


def _check_cf(varphi):
    if not 0.0 <= varphi <= 1.0:
        raise InvalidCf(f"varphi must lie in [0, 1], got {varphi}")


def eta_coefficients(inputs):
    """Coefficients (c0, c1, c2, c3) with ``eta = c0 v1 v2 + c1 v1 + c2 v2 + c3``.

    All four are nonnegative for ``0 <= varphi <= 1``, which is why the
    phase designs of the two surfaces decouple.
    """
    x = inputs
    _check_cf(x.varphi)
    p2 = x.varphi ** 2
    p4 = x.varphi ** 4
    double = x.beta_B1 * np.asarray(x.beta_2k) * x.beta_G
    single1 = x.beta_B1 * np.asarray(x.beta_1k)
    single2 = x.beta_B2 * np.asarray(x.beta_2k)
    c0 = double * p4
    c1 = double * (p2 - p4) * x.N2 + single1 * p2
    c2 = double * (p2 - p4) * x.N1 + single2 * p2
    c3 = (double * (1 - p2) ** 2 * x.N1 * x.N2
          + single1 * (1 - p2) * x.N1 + single2 * (1 - p2) * x.N2)
    return c0, c1, c2, c3


def eta_k(inputs):
    """Channel strength ``eta_k`` for arbitrary RIS phases.

    Raises
    ------
    InvalidCf
        If ``varphi`` is outside [0, 1].
    """
    x = inputs
    _check_cf(x.varphi)
    p2 = x.varphi ** 2
    p4 = x.varphi ** 4
    beta_1k = np.asarray(x.beta_1k, dtype=float)
    beta_2k = np.asarray(x.beta_2k, dtype=float)
    double = x.beta_B1 * beta_2k * x.beta_G * (
        x.v2 * (p4 * x.v1 + (p2 - p4) * x.N1)
        + x.N2 * ((p2 - p4) * x.v1 + (1 - p2) ** 2 * x.N1)
    )
    single = (x.beta_B1 * beta_1k * (p2 * x.v1 + (1 - p2) * x.N1)
              + x.beta_B2 * beta_2k * (p2 * x.v2 + (1 - p2) * x.N2))
    return double + single


def eta_k_optimal(inputs, tr_R1_2, tr_R2_2):
    """``eta_k`` under the optimal (equal-phase) design, where ``v_i = tr(R_i^2)``."""
    return eta_k(EtaInputs(
        inputs.beta_B1, inputs.beta_B2, inputs.beta_1k, inputs.beta_2k, inputs.beta_G,
        inputs.varphi, inputs.N1, inputs.N2, tr_R1_2, tr_R2_2,
    ))


def sinr_lower_bound(p_k, total_power, M, tr_RB2, noise_power, eta):
    """Hardening-bound SINR ``p_k M^2 / (tr(R_B^2) sum_l p_l + M sigma^2 / eta_k)``.

    ``total_power`` is the sum of the allocated user powers. Broadcasts over
    users.
    """
    eta = np.asarray(eta, dtype=float)
    if np.any(eta <= 0):
        raise DegenerateEta("eta_k must be positive")
    if M < 1:
        raise ValueError("M must be >= 1")
    return p_k * M ** 2 / (tr_RB2 * total_power + M * noise_power / eta)


def achievable_rate(sinr):
    """Rate in bit/s/Hz, ``log2(1 + sinr)``."""
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0):
        raise ValueError("sinr must be nonnegative")
    out = np.log2(1.0 + sinr)
    return float(out) if out.ndim == 0 else out


def channel_covariance(eta, R_B):
    """Closed-form channel covariance ``Psi_k = eta_k R_B``."""
    return float(eta) * np.asarray(R_B)


def general_hardening_sinr(Psi, powers, noise_power, k):
    """Hardening-bound SINR of user ``k`` from arbitrary channel covariances.

    Evaluates ``p_k tr(Psi_k) / (sum_l p_l tr(Psi_k Psi_l)/tr(Psi_l) + sigma^2)``
    for MRT precoding normalized by ``sqrt(tr(Psi_l))``.

    Parameters
    ----------
    Psi : sequence of (M, M) arrays
        Covariance of every user's channel.
    powers : array_like
        Per-user transmit powers.
    noise_power : float
    k : int
        User index.
    """
    traces = np.array([np.trace(P).real for P in Psi])
    if np.any(traces <= 0):
        raise SingularCovariance("every covariance needs a positive trace")
    Pk = np.asarray(Psi[k])
    interference = sum(
        p * np.sum(Pk * np.asarray(P).T).real / t for p, P, t in zip(powers, Psi, traces)
    )
    return powers[k] * traces[k] / (interference + noise_power)


@dataclass(frozen=True)
class ClosedFormRates:
    eta: np.ndarray
    sinr: np.ndarray
    rate: np.ndarray
    v1: float
    v2: float
    varphi: float

    @property
    def sum_rate(self):
        return float(np.sum(self.rate))


def closed_form_rates(config, corr, phases, gains=None, varphi=None):
    """Per-user eta, SINR bound and rate for a scenario and phase design.

    ``varphi`` overrides the value implied by ``config.kappa``.
    """
    if gains is None:
        gains = link_gains(config)
    if varphi is None:
        varphi = vm_cf(config.kappa)
    v1 = phase_weighted_trace(corr.R_1, phases.theta_1)
    v2 = phase_weighted_trace(corr.R_2, phases.theta_2)
    eta = np.atleast_1d(eta_k(EtaInputs.from_scenario(gains, varphi, config.N1, config.N2, v1, v2)))
    p = config.powers
    sinr = sinr_lower_bound(p, p.sum(), config.M, corr.tr_RB2, config.noise_power, eta)
    return ClosedFormRates(eta, sinr, np.log2(1.0 + sinr), v1, v2, varphi)


def covariance_terms(inputs):
    """Scalar weights of ``R_B`` contributed by each reflection path.

    Built the long way round: the double-reflection weight goes through the
    intermediate quantities ``A`` (phase-aligned part at RIS 2) and ``B``
    (phase-scrambled part), and is then mixed with ``varphi^2``. The sum of
    the three weights equals :func:`eta_k`; keeping this separate route
    gives an independent check of the expanded expression.
    """
    x = inputs
    _check_cf(x.varphi)
    p2 = x.varphi ** 2
    at_ris1 = p2 * x.v1 + (1 - p2) * x.N1
    A = x.beta_B1 * x.beta_G * x.v2 * at_ris1
    B = x.beta_B1 * x.beta_G * x.N2 * at_ris1
    beta_1k = np.asarray(x.beta_1k, dtype=float)
    beta_2k = np.asarray(x.beta_2k, dtype=float)
    return {
        "double": beta_2k * (p2 * A + (1 - p2) * B),
        "single_1": x.beta_B1 * beta_1k * at_ris1,
        "single_2": x.beta_B2 * beta_2k * (p2 * x.v2 + (1 - p2) * x.N2),
    }
