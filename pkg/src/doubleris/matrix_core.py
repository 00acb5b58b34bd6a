"""Small complex linear-algebra helpers shared by the channel and rate code."""

import numpy as np

from .exceptions import DimensionMismatch, IndefiniteMatrix, NotHermitian

HERMITIAN_RTOL = 1e-12


def is_hermitian(R, rtol=HERMITIAN_RTOL):
    """Return True if ``R`` is square and equals its conjugate transpose.

    The tolerance is relative to the largest entry magnitude (absolute for
    matrices whose entries are all below one).
    """
    R = np.asarray(R)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(R), initial=0.0)))
    return bool(np.max(np.abs(R - R.conj().T), initial=0.0) <= rtol * scale)


def hermitian_psd_sqrt(R, clamp_tol=None):
    """Hermitian square root of a positive semidefinite matrix.

    Uses an eigendecomposition so that singular (rank-deficient) matrices,
    such as sinc correlation matrices with sub-half-wavelength spacing, are
    handled. Eigenvalues in ``[-clamp_tol, 0)`` are clamped to zero.

    Parameters
    ----------
    R : array_like, shape (n, n)
        Hermitian positive semidefinite matrix.
    clamp_tol : float, optional
        Largest negative eigenvalue magnitude tolerated. Defaults to
        ``1e-10 * max(|eigenvalue|)``.

    Returns
    -------
    S : ndarray, shape (n, n)
        Hermitian matrix with ``S @ S == R`` up to round-off.

    Raises
    ------
    NotHermitian
        If ``R`` is not square or not Hermitian.
    IndefiniteMatrix
        If an eigenvalue is below ``-clamp_tol``.

    Examples
    --------
    >>> hermitian_psd_sqrt(np.diag([4.0, 9.0])).real
    array([[2., 0.],
           [0., 3.]])
    """
    R = np.asarray(R)
    if not is_hermitian(R):
        raise NotHermitian("matrix is not square Hermitian")
    w, V = np.linalg.eigh(R)
    if clamp_tol is None:
        clamp_tol = 1e-10 * max(float(np.max(np.abs(w), initial=0.0)), np.finfo(float).tiny)
    if w.size and w.min() < -clamp_tol:
        raise IndefiniteMatrix(f"eigenvalue {w.min():.3e} below -{clamp_tol:.3e}")
    w = np.clip(w, 0.0, None)
    S = (V * np.sqrt(w)) @ V.conj().T
    S = 0.5 * (S + S.conj().T)
    if np.isrealobj(R):
        S = S.real
    return S


def trace_product(A, B):
    """tr(A @ B) without forming the product.

    ``A`` is m x n and ``B`` is n x m; the trace is the sum of the
    elementwise product of ``A`` and ``B.T``.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 2 or B.ndim != 2 or A.shape != B.shape[::-1]:
        raise DimensionMismatch(f"cannot take tr(AB) for shapes {A.shape} and {B.shape}")
    return np.sum(A * B.T)
