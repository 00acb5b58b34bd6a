"""Reflect-beamforming design for the two surfaces.

With statistical CSI only, the rate bound depends on the RIS phases through
``v_i = tr(R_i Theta_i R_i Theta_i^H)``, and ``eta_k`` is increasing in both.
Each ``v_i`` is maximized by giving every element of surface i the same
phase, so no iterative optimizer is needed; this module builds that design,
random baselines, and the diagnostics that check the claim.
"""

from dataclasses import dataclass

import numpy as np

from .analytics import EtaInputs, closed_form_rates, eta_coefficients
from .channel_model import PhaseConfig, link_gains
from .stochastic import SeededRng, _generator


def optimal_phase_config(N1, N2, c=0.0):
    """All-equal phases ``c`` on both surfaces (``c = 0`` gives identity)."""
    return PhaseConfig(np.full(N1, float(c)), np.full(N2, float(c)))


def random_phase_config(N1, N2, rng):
    """I.i.d. uniform phases in [-pi, pi] on both surfaces."""
    if isinstance(rng, int):
        rng = SeededRng(rng)
    gen = _generator(rng)
    return PhaseConfig(gen.uniform(-np.pi, np.pi, N1), gen.uniform(-np.pi, np.pi, N2))


@dataclass(frozen=True)
class DesignEvaluation:
    """Objective values of one phase design and the rates they lead to.

    ``coefficients`` are (c0, c1, c2, c3) per user such that
    ``eta = c0 v1 v2 + c1 v1 + c2 v2 + c3``.
    """

    v1: float
    v2: float
    eta: np.ndarray
    sinr: np.ndarray
    rate: np.ndarray
    coefficients: tuple
    coefficients_nonnegative: bool
    affine_residual: float

    @property
    def sum_rate(self):
        return float(np.sum(self.rate))


def evaluate_design(config, corr, phases, varphi=None, gains=None):
    """Evaluate a phase design under the closed-form bound.

    Parameters
    ----------
    varphi : float, optional
        Override the phase-noise constant implied by ``config.kappa``.
    """
    if gains is None:
        gains = link_gains(config)
    cf = closed_form_rates(config, corr, phases, gains, varphi)
    inputs = EtaInputs.from_scenario(gains, cf.varphi, config.N1, config.N2, cf.v1, cf.v2)
    c0, c1, c2, c3 = (np.broadcast_to(c, cf.eta.shape) for c in eta_coefficients(inputs))
    rebuilt = c0 * cf.v1 * cf.v2 + c1 * cf.v1 + c2 * cf.v2 + c3
    residual = float(np.max(np.abs(rebuilt - cf.eta) / cf.eta))
    nonneg = bool(all(np.all(c >= 0) for c in (c0, c1, c2, c3)))
    return DesignEvaluation(cf.v1, cf.v2, cf.eta, cf.sinr, cf.rate, (c0, c1, c2, c3), nonneg, residual)


@dataclass(frozen=True)
class RbdCheck:
    samples: int
    max_v1_excess: float
    max_v2_excess: float
    max_sum_rate_excess: float
    optimal_sum_rate: float
    best_random_sum_rate: float

    @property
    def passed(self):
        return (self.max_v1_excess <= 1e-9 and self.max_v2_excess <= 1e-9
                and self.max_sum_rate_excess <= 1e-9)


def rbd_check(config, corr, samples=1000, seed=None):
    """Compare the equal-phase design against ``samples`` random designs.

    Excesses are ``random - optimal``; a positive value would contradict
    the optimality of equal phases.
    """
    seed = config.seed if seed is None else seed
    gains = link_gains(config)
    best = evaluate_design(config, corr, optimal_phase_config(config.N1, config.N2), gains=gains)
    ex_v1 = ex_v2 = ex_rate = -np.inf
    best_random = -np.inf
    for s in range(samples):
        ev = evaluate_design(
            config, corr, random_phase_config(config.N1, config.N2, SeededRng(seed, s)), gains=gains
        )
        ex_v1 = max(ex_v1, ev.v1 - corr.tr_R1_2)
        ex_v2 = max(ex_v2, ev.v2 - corr.tr_R2_2)
        ex_rate = max(ex_rate, ev.sum_rate - best.sum_rate)
        best_random = max(best_random, ev.sum_rate)
    return RbdCheck(samples, float(ex_v1), float(ex_v2), float(ex_rate), best.sum_rate, float(best_random))
