"""Complex dense matrix primitives: Gram sums and stable log-determinants.

All routines accept stacked arrays; leading axes are treated as batch axes.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ConfigurationError, ValidationError

HERMITIAN_ATOL = 1e-12
PSD_ATOL = 1e-10


def _magnitude(a: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0


def check_hermitian_psd(a, name: str = "matrix") -> np.ndarray:
    """Validate a square Hermitian PSD matrix and return it as complex128.

    Tolerances are absolute for entries of order one and scale with the
    largest entry magnitude otherwise.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigurationError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    mag = _magnitude(a)
    diag = np.diagonal(a)
    if np.count_nonzero(a) == np.count_nonzero(diag):
        # diagonal matrix: the spectrum is the diagonal itself
        if np.any(diag.imag != 0):
            raise ValidationError(f"{name} is not Hermitian")
        if diag.size and diag.real.min() < -PSD_ATOL * mag:
            raise ValidationError(f"{name} is not positive semi-definite")
        return a
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_ATOL * mag:
        raise ValidationError(f"{name} is not Hermitian")
    if a.size and np.linalg.eigvalsh(a).min() < -PSD_ATOL * mag:
        raise ValidationError(f"{name} is not positive semi-definite")
    return a


def gram_batch(h: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Sum over the user axis of ``H_t Q_t H_t^H``.

    ``h`` has shape (..., k, n_r, n_t) and ``q`` (k, n_t, n_t). The result,
    shape (..., n_r, n_r), is Hermitian to the last bit.
    """
    hq = h @ q
    g = np.einsum("...kij,...klj->...il", hq, h.conj())
    return 0.5 * (g + np.swapaxes(g, -1, -2).conj())


def gram_sum(channels: Sequence, covariances: Sequence, n_r: int | None = None) -> np.ndarray:
    """Return ``sum_t H_t Q_t H_t^H`` for lists of channels and covariances.

    ``n_r`` fixes the output size when the lists are empty.
    """
    if len(channels) != len(covariances):
        raise ConfigurationError(
            f"{len(channels)} channels but {len(covariances)} covariances")
    if not channels:
        if n_r is None:
            raise ConfigurationError("n_r is required for an empty Gram sum")
        return np.zeros((n_r, n_r), dtype=np.complex128)
    hs = [np.asarray(h, dtype=np.complex128) for h in channels]
    rows, cols = hs[0].shape
    if n_r is not None and rows != n_r:
        raise ConfigurationError(f"channels have {rows} rows, expected {n_r}")
    qs = []
    for k, (h, q) in enumerate(zip(hs, covariances)):
        if h.shape != (rows, cols):
            raise ConfigurationError(f"channel {k} has shape {h.shape}, expected {(rows, cols)}")
        q = check_hermitian_psd(q, f"covariance {k}")
        if q.shape != (cols, cols):
            raise ConfigurationError(f"covariance {k} has shape {q.shape}, expected {(cols, cols)}")
        qs.append(q)
    return gram_batch(np.stack(hs), np.stack(qs))


def logdet_eye_plus_batch(g: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Batched ``log det(I + scale*G)`` via Cholesky, no input validation."""
    g = np.asarray(g)
    n = g.shape[-1]
    if n == 0:
        return np.zeros(g.shape[:-2])
    m = scale * g + np.eye(n)
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise ValidationError("I + scale*G is not positive definite") from exc
    diag = np.real(np.diagonal(chol, axis1=-2, axis2=-1))
    return 2.0 * np.sum(np.log(diag), axis=-1)


def logdet_eye_plus(g, scale: float = 1.0) -> float:
    """``log det(I + scale*G)`` in nats for a Hermitian PSD ``G``."""
    if not scale > 0:
        raise ValidationError(f"scale must be positive, got {scale}")
    g = np.asarray(g, dtype=np.complex128)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ConfigurationError(f"G must be square, got shape {g.shape}")
    if np.max(np.abs(g - g.conj().T), initial=0.0) > HERMITIAN_ATOL * _magnitude(g):
        raise ValidationError("G is not Hermitian")
    return float(logdet_eye_plus_batch(g, scale))


def logdet_eye_plus_eig(g, scale: float = 1.0) -> float:
    """Eigenvalue route for ``log det(I + scale*G)``; kept as a cross-check."""
    lam = np.linalg.eigvalsh(np.asarray(g, dtype=np.complex128))
    return float(np.sum(np.log1p(scale * lam)))
