"""Monte Carlo estimation of rates, hardening bounds and channel covariances.

Fading and phase noise are redrawn every trial. Trial ``t`` always draws
from substream ``SeededRng(seed, t)``, so results are identical however the
trials are split across worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytics import closed_form_rates
from .channel_model import config_digest, draw_channels, effective_channel, link_gains
from .exceptions import DegenerateEta, DimensionMismatch
from .stochastic import SeededRng, sample_von_mises

CHUNK_SIZE = 256


def mrt_precoder(h, eta, M):
    """MRT precoder ``conj(h) / sqrt(M * eta)``.

    The normalizer is the statistical ``E{||h||^2} = M * eta``, not the
    instantaneous norm. ``h`` may be an M-vector or an M x K matrix with one
    ``eta`` per column.
    """
    eta = np.asarray(eta, dtype=float)
    if np.any(eta <= 0):
        raise DegenerateEta("eta_k must be positive")
    return np.conj(h) / np.sqrt(M * eta)


def beam_gains(channels, precoders):
    """K x K matrix with entry (k, l) equal to ``h_k^T w_l`` (no conjugation)."""
    return np.asarray(channels).T @ np.asarray(precoders)


def _sinr_from_gains(X, powers, noise_power):
    # X[..., k, l] = h_k^T w_l
    power = np.abs(X) ** 2 * powers
    signal = np.diagonal(power, axis1=-2, axis2=-1)
    interference = power.sum(axis=-1) - signal
    with np.errstate(divide="ignore"):
        return signal / (interference + noise_power)


def instantaneous_sinr(channels, precoders, powers, noise_power, k=None):
    """Instantaneous SINR of user ``k`` (all users if None).

    ``channels`` and ``precoders`` are M x K with column l belonging to user l.
    """
    channels = np.asarray(channels)
    precoders = np.asarray(precoders)
    if channels.shape != precoders.shape or channels.ndim != 2:
        raise DimensionMismatch("channels and precoders must both be M x K")
    powers = np.asarray(powers, dtype=float)
    sinr = _sinr_from_gains(beam_gains(channels, precoders), powers, noise_power)
    return sinr if k is None else float(sinr[k])


@dataclass(frozen=True)
class TrialResult:
    index: int
    sinr: np.ndarray
    rate: np.ndarray


@dataclass(frozen=True)
class LinkSamples:
    """Per-trial effective channels and MRT beam gains.

    ``channels`` is T x M x K; ``gains[t, k, l] = h_k^T w_l`` in trial t.
    Neither depends on transmit or noise power, so one set of samples
    serves a whole power sweep.
    """

    channels: np.ndarray
    gains: np.ndarray
    eta: np.ndarray
    seed: int

    @property
    def trials(self):
        return self.channels.shape[0]

    def sinr(self, powers, noise_power):
        """T x K instantaneous SINRs."""
        return _sinr_from_gains(self.gains, np.asarray(powers, dtype=float), noise_power)

    def trial(self, t, powers, noise_power):
        sinr = self.sinr(powers, noise_power)[t]
        return TrialResult(t, sinr, np.log2(1.0 + sinr))


def _simulate_range(config, corr, phases, gains, seed, start, stop, channels):
    model = config.phase_noise
    for t in range(start, stop):
        rng = SeededRng(seed, t)
        real = draw_channels(config, corr, rng, gains)
        noise_1 = sample_von_mises(model, config.N1, rng)
        noise_2 = sample_von_mises(model, config.N2, rng)
        channels[t] = effective_channel(real, phases, noise_1, noise_2)


def simulate(config, corr, phases, trials=None, seed=None, gains=None, workers=1):
    """Run ``trials`` independent realizations and collect the channels.

    Parameters
    ----------
    config : SystemConfig
    corr : CorrelationSet
    phases : PhaseConfig
    trials, seed : int, optional
        Default to ``config.trials`` and ``config.seed``.
    gains : LinkGains, optional
        Override the scenario's large-scale gains (e.g. to switch off links).
    workers : int
        Worker threads; the result does not depend on this value.
    """
    trials = config.trials if trials is None else int(trials)
    seed = config.seed if seed is None else int(seed)
    if trials < 1:
        raise ValueError("trials must be positive")
    if gains is None:
        gains = link_gains(config)
    eta = closed_form_rates(config, corr, phases, gains).eta

    channels = np.empty((trials, config.M, config.K), dtype=complex)
    bounds = [(s, min(s + CHUNK_SIZE, trials)) for s in range(0, trials, CHUNK_SIZE)]
    args = (config, corr, phases, gains, seed)
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_simulate_range, *args, s, e, channels) for s, e in bounds]
            for f in futures:
                f.result()
    else:
        for s, e in bounds:
            _simulate_range(*args, s, e, channels)

    W = mrt_precoder(channels, eta, config.M)
    gains_tkl = np.einsum("tmk,tml->tkl", channels, W)
    return LinkSamples(channels, gains_tkl, eta, seed)


def _samples(config, corr, phases, trials, seed, samples, workers, gains=None):
    if samples is not None:
        return samples
    return simulate(config, corr, phases, trials, seed, gains=gains, workers=workers)


def ergodic_rate_estimate(config, corr, phases, trials=None, seed=None, *,
                          samples=None, workers=1):
    """Sample mean of ``log2(1 + SINR_k)`` and its standard error, per user."""
    s = _samples(config, corr, phases, trials, seed, samples, workers)
    rates = np.log2(1.0 + s.sinr(config.powers, config.noise_power))
    mean = rates.mean(axis=0)
    stderr = rates.std(axis=0, ddof=1) / math.sqrt(s.trials) if s.trials > 1 else np.zeros_like(mean)
    return mean, stderr


@dataclass(frozen=True)
class MomentBound:
    """Hardening bound evaluated with sample moments.

    ``valid[k]`` is False where sampling noise drove the denominator to zero
    or below; ``sinr`` and ``rate`` are NaN there.
    """

    sinr: np.ndarray
    rate: np.ndarray
    valid: np.ndarray


def moment_bound_from_samples(samples, powers, noise_power):
    powers = np.asarray(powers, dtype=float)
    mean_gain = samples.gains.mean(axis=0)
    mean_sq = (np.abs(samples.gains) ** 2).mean(axis=0)
    signal = powers * np.abs(np.diagonal(mean_gain)) ** 2
    denom = mean_sq @ powers - signal + noise_power
    valid = denom > 0
    sinr = np.where(valid, signal / np.where(valid, denom, 1.0), np.nan)
    return MomentBound(sinr, np.log2(1.0 + sinr), valid)


def moment_bound_estimate(config, corr, phases, trials=None, seed=None, *,
                          samples=None, workers=1):
    """Hardening bound with the expectations replaced by sample averages.

    ``p_k |E{h_k^T w_k}|^2 / (sum_l p_l E{|h_k^T w_l|^2} - p_k |E{h_k^T w_k}|^2 + sigma^2)``
    """
    s = _samples(config, corr, phases, trials, seed, samples, workers)
    return moment_bound_from_samples(s, config.powers, config.noise_power)


def covariance_from_samples(samples, k):
    h = samples.channels[:, :, k]
    C = h.T @ h.conj() / samples.trials
    return 0.5 * (C + C.conj().T)


def covariance_estimate(config, corr, phases, trials=None, seed=None, k=0, *,
                        gains=None, samples=None, workers=1):
    """Sample covariance ``mean(h_k h_k^H)`` of user ``k``'s channel (Hermitian)."""
    s = _samples(config, corr, phases, trials, seed, samples, workers, gains)
    return covariance_from_samples(s, k)


@dataclass(frozen=True)
class RateReport:
    """Closed-form bound next to its Monte Carlo counterparts, per user."""

    rate_closed_form: np.ndarray
    rate_mc: np.ndarray
    rate_mc_stderr: np.ndarray
    rate_moment_bound: np.ndarray
    sinr_closed_form: np.ndarray
    sinr_moment_bound: np.ndarray
    moment_bound_valid: np.ndarray
    eta: np.ndarray
    v1: float
    v2: float
    trials: int
    config_digest: str


def rate_report(config, corr, phases, trials=None, seed=None, *, samples=None, workers=1):
    cf = closed_form_rates(config, corr, phases)
    s = _samples(config, corr, phases, trials, seed, samples, workers)
    mean, stderr = ergodic_rate_estimate(config, corr, phases, samples=s)
    mb = moment_bound_from_samples(s, config.powers, config.noise_power)
    return RateReport(
        rate_closed_form=cf.rate,
        rate_mc=mean,
        rate_mc_stderr=stderr,
        rate_moment_bound=mb.rate,
        sinr_closed_form=cf.sinr,
        sinr_moment_bound=mb.sinr,
        moment_bound_valid=mb.valid,
        eta=cf.eta,
        v1=cf.v1,
        v2=cf.v2,
        trials=s.trials,
        config_digest=config_digest(config),
    )
