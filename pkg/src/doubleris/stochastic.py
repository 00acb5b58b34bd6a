"""Random draws (complex Gaussian fading, Von Mises phase noise) and the
Von Mises characteristic-function constant.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidKappa

_SERIES_MAX_KAPPA = 15.0
_CF_MAX_KAPPA = 1e3


def _bessel_ratio_series(kappa):
    # I1/I0 from the two power series sum_m (k/2)^(2m+p) / (m! (m+p)!)
    x = 0.25 * kappa * kappa
    term0 = 1.0
    term1 = 0.5 * kappa
    s0 = term0
    s1 = term1
    m = 0
    while True:
        m += 1
        term0 *= x / (m * m)
        term1 *= x / (m * (m + 1))
        s0 += term0
        s1 += term1
        if term0 < 1e-17 * s0 and term1 < 1e-17 * s1:
            break
    return s1 / s0


def _bessel_ratio_cf(kappa):
    # I_n/I_{n-1} = 1 / (2n/k + I_{n+1}/I_n), evaluated with modified Lentz
    tiny = 1e-300
    f = tiny
    C = f
    D = 0.0
    n = 0
    while True:
        n += 1
        b = 2.0 * n / kappa
        D = b + D
        D = tiny if D == 0.0 else D
        C = b + 1.0 / C
        C = tiny if C == 0.0 else C
        D = 1.0 / D
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            return f


def _bessel_ratio_asymptotic(kappa):
    # Hankel expansion of I1/I0; next term is about -0.41 / kappa^5
    y = 1.0 / kappa
    return 1.0 - y * (0.5 + y * (0.125 + y * (0.125 + y * 25.0 / 128.0)))


def vm_cf(kappa):
    """Characteristic-function constant ``I1(kappa) / I0(kappa)``.

    This is ``E[exp(1j * x)]`` for zero-mean Von Mises noise ``x`` with
    concentration ``kappa``. Power series up to ``kappa = 15``, continued
    fraction up to 1e3 and the large-argument expansion beyond, so no
    individual (overflowing) Bessel value is ever formed.

    Examples
    --------
    >>> vm_cf(0.0)
    0.0
    >>> round(vm_cf(4.0), 5)
    0.86352
    """
    kappa = float(kappa)
    if not math.isfinite(kappa) or kappa < 0:
        raise InvalidKappa(f"kappa must be finite and >= 0, got {kappa}")
    if kappa == 0.0:
        return 0.0
    if kappa <= _SERIES_MAX_KAPPA:
        return _bessel_ratio_series(kappa)
    if kappa <= _CF_MAX_KAPPA:
        return _bessel_ratio_cf(kappa)
    return _bessel_ratio_asymptotic(kappa)


@dataclass(frozen=True)
class PhaseNoiseModel:
    """Zero-mean Von Mises phase noise with concentration ``kappa``."""

    kappa: float
    varphi: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "varphi", vm_cf(self.kappa))


class SeededRng:
    """Reproducible random substream identified by ``(seed, stream_id)``.

    Each Monte Carlo trial gets its own stream id, so results do not depend
    on how trials are scheduled across workers.
    """

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence([self.seed & 0xFFFFFFFFFFFFFFFF, self.stream_id])
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, stream_id={self.stream_id})"


def _generator(rng):
    if isinstance(rng, SeededRng):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be a SeededRng or numpy Generator")


def sample_von_mises(model, count, rng):
    """Draw ``count`` i.i.d. Von Mises(0, kappa) angles in [-pi, pi].

    Best & Fisher (1979) wrapped-Cauchy rejection sampler. ``kappa = 0`` (or
    below 1e-8, where the envelope degenerates) falls back to the uniform
    distribution.
    """
    if not isinstance(model, PhaseNoiseModel):
        model = PhaseNoiseModel(model)
    gen = _generator(rng)
    count = int(count)
    if count < 0:
        raise ValueError("count must be >= 0")
    kappa = model.kappa
    if kappa < 1e-8:
        return gen.uniform(-np.pi, np.pi, size=count)

    tau = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (tau - math.sqrt(2.0 * tau)) / (2.0 * kappa)
    r = (1.0 + rho * rho) / (2.0 * rho)

    out = np.empty(count)
    filled = 0
    while filled < count:
        need = count - filled
        # acceptance is at least ~65.6% for every kappa
        n = max(16, int(need * 1.6))
        u1, u2, u3 = gen.random((3, n))
        z = np.cos(np.pi * u1)
        f = (1.0 + r * z) / (r + z)
        c = kappa * (r - f)
        with np.errstate(divide="ignore", invalid="ignore"):
            accept = (c * (2.0 - c) - u2 > 0) | (np.log(c / u2) + 1.0 - c >= 0)
        f = np.clip(f[accept], -1.0, 1.0)
        theta = np.sign(u3[accept] - 0.5) * np.arccos(f)
        take = min(need, theta.size)
        out[filled:filled + take] = theta[:take]
        filled += take
    return out


def sample_complex_gaussian(rows, cols, rng):
    """rows x cols matrix of i.i.d. CN(0, 1) entries."""
    gen = _generator(rng)
    if rows < 1 or cols < 1:
        raise ValueError("dimensions must be positive")
    z = gen.standard_normal((2, rows, cols))
    return (z[0] + 1j * z[1]) * math.sqrt(0.5)
