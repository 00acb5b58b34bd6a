"""Spatial correlation at the base station and at the two surfaces.

The BS uses the exponential (Kronecker) model for a uniform linear array;
each RIS uses the isotropic-scattering sinc model for a planar rectangular
grid. The sinc convention is the normalized one, ``sinc(x) = sin(pi x)/(pi x)``
(numpy's :func:`numpy.sinc`), so elements half a wavelength apart are
uncorrelated.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch, InvalidCorrelation, InvalidGeometry
from .matrix_core import hermitian_psd_sqrt, is_hermitian


@dataclass(frozen=True)
class BsCorrelationSpec:
    """Exponential correlation ``rho = rho_magnitude * exp(1j * rho_phase)``."""

    M: int
    rho_magnitude: float = 0.0
    rho_phase: float = 0.0

    def __post_init__(self):
        if int(self.M) < 1:
            raise InvalidCorrelation(f"M must be >= 1, got {self.M}")
        if not 0.0 <= self.rho_magnitude <= 1.0:
            raise InvalidCorrelation(f"|rho| must lie in [0, 1], got {self.rho_magnitude}")

    @property
    def rho(self):
        return self.rho_magnitude * np.exp(1j * self.rho_phase)


@dataclass(frozen=True)
class RisGeometry:
    """Rectangular RIS with ``n_vertical x n_horizontal`` elements.

    Lengths are in meters. ``element_height`` and ``element_width`` only
    enter the path gain (through the element area); the correlation depends
    on ``element_spacing`` and ``wavelength``.
    """

    n_vertical: int
    n_horizontal: int
    element_spacing: float
    wavelength: float
    element_height: float
    element_width: float

    def __post_init__(self):
        if self.n_vertical < 1 or self.n_horizontal < 1:
            raise InvalidGeometry("element counts must be positive")
        for name in ("element_spacing", "wavelength", "element_height", "element_width"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidGeometry(f"{name} must be positive, got {value}")

    @property
    def num_elements(self):
        return self.n_vertical * self.n_horizontal

    @property
    def element_area(self):
        return self.element_height * self.element_width

    def element_positions(self):
        """(N, 2) array of (horizontal, vertical) coordinates in meters.

        Column-major enumeration: element ``l = v + n_vertical * h`` sits at
        ``(h * spacing, v * spacing)``.
        """
        h, v = np.divmod(np.arange(self.num_elements), self.n_vertical)
        return np.column_stack([h, v]) * self.element_spacing


def build_bs_correlation(spec):
    """M x M BS correlation with ``[R]_ij = rho**(j - i)`` for ``i <= j``.

    Entries below the diagonal are the conjugates of the mirrored ones.
    """
    if not isinstance(spec, BsCorrelationSpec):
        raise InvalidCorrelation("expected a BsCorrelationSpec")
    idx = np.arange(spec.M)
    lag = idx[None, :] - idx[:, None]
    upper = spec.rho_magnitude ** np.abs(lag) * np.exp(1j * spec.rho_phase * np.abs(lag))
    R = np.where(lag >= 0, upper, upper.conj())
    return R


def build_ris_correlation(geom):
    """N x N sinc correlation ``sinc(2 * distance / wavelength)`` of one RIS."""
    if not isinstance(geom, RisGeometry):
        raise InvalidGeometry("expected a RisGeometry")
    pos = geom.element_positions()
    dist = np.sqrt(np.sum((pos[:, None, :] - pos[None, :, :]) ** 2, axis=-1))
    return np.sinc(2.0 * dist / geom.wavelength)


def all_ones_correlation(n):
    """Fully correlated n x n matrix (every entry one).

    Physically unreachable; kept as the upper extreme for tr(R^2) = n^2.
    """
    return np.ones((n, n))


def phase_weighted_trace(R, theta):
    """Phase-weighted correlation energy ``tr(R Theta R Theta^H)``.

    With ``Theta = diag(exp(1j * theta))`` this equals
    ``sum_{n,l} |R_nl|^2 exp(1j * (theta_l - theta_n))``, evaluated here as
    the quadratic form ``a^H |R|^2 a`` with ``a = exp(1j * theta)``.
    """
    R = np.asarray(R)
    theta = np.asarray(theta, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1] or theta.shape != (R.shape[0],):
        raise DimensionMismatch(
            f"R of shape {R.shape} incompatible with theta of shape {theta.shape}"
        )
    a = np.exp(1j * theta)
    value = np.vdot(a, (np.abs(R) ** 2) @ a)
    scale = max(1.0, abs(value))
    if abs(value.imag) > 1e-9 * scale:
        raise DimensionMismatch("phase-weighted trace is not real; is R Hermitian?")
    return float(value.real)


@dataclass(frozen=True, eq=False)
class CorrelationSet:
    """Correlation matrices of the BS and both surfaces with their square roots.

    ``tr_RB2``, ``tr_R1_2`` and ``tr_R2_2`` cache ``tr(R^2)`` for the three
    matrices; the closed-form rate only ever needs these scalars.
    """

    R_B: np.ndarray
    R_1: np.ndarray
    R_2: np.ndarray
    sqrt_R_B: np.ndarray = field(repr=False)
    sqrt_R_1: np.ndarray = field(repr=False)
    sqrt_R_2: np.ndarray = field(repr=False)
    tr_RB2: float
    tr_R1_2: float
    tr_R2_2: float

    @classmethod
    def from_matrices(cls, R_B, R_1, R_2):
        mats = [np.asarray(R) for R in (R_B, R_1, R_2)]
        for name, R in zip(("R_B", "R_1", "R_2"), mats):
            if not is_hermitian(R):
                raise InvalidCorrelation(f"{name} is not Hermitian")
            n = R.shape[0]
            if abs(np.trace(R).real - n) > 1e-9 * n:
                raise InvalidCorrelation(f"{name} must have trace {n}")
        roots = [hermitian_psd_sqrt(R) for R in mats]
        # |R|^2 summed is tr(R R^H) = tr(R^2) for Hermitian R
        traces = [float(np.sum(np.abs(R) ** 2)) for R in mats]
        for R in mats:
            R.setflags(write=False)
        for S in roots:
            S.setflags(write=False)
        return cls(*mats, *roots, *traces)

    @classmethod
    def build(cls, bs, ris1, ris2):
        return cls.from_matrices(
            build_bs_correlation(bs), build_ris_correlation(ris1), build_ris_correlation(ris2)
        )

    @property
    def M(self):
        return self.R_B.shape[0]

    @property
    def N1(self):
        return self.R_1.shape[0]

    @property
    def N2(self):
        return self.R_2.shape[0]
