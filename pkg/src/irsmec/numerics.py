"""Hermitian linear algebra and seeded random streams.

Thin, validated wrappers around numpy used by every other module. All
eigen-decompositions go through :func:`eig_hermitian` so that symmetrization
and ordering conventions live in exactly one place.
"""

from dataclasses import dataclass
from hashlib import sha256

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "HermitianEig",
    "SeedStreams",
    "dominant_eigvec",
    "eig_hermitian",
    "psd_project",
    "sample_cgauss",
]


def _as_square(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix contains non-finite entries")
    return a


@dataclass(frozen=True)
class HermitianEig:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending."""

    eigenvalues: np.ndarray   # (n,), real, descending
    eigenvectors: np.ndarray  # (n, n), column i pairs with eigenvalues[i]


def eig_hermitian(a):
    """Eigen-decompose a (nearly) Hermitian matrix.

    The input is symmetrized as (A + Aᴴ)/2 before the decomposition, which
    removes the skew-Hermitian round-off that accumulates when matrices are
    assembled from products. Eigenvalues are returned in descending order.
    """
    a = _as_square(a)
    a = 0.5 * (a + a.conj().T)
    vals, vecs = np.linalg.eigh(a)
    return HermitianEig(vals[::-1].copy(), vecs[:, ::-1].copy())


def psd_project(a):
    """Project a Hermitian matrix onto the PSD cone (Frobenius-nearest).

    Clips negative eigenvalues at zero and reassembles; for a Hermitian
    argument this is the unique nearest PSD matrix in Frobenius norm.
    """
    dec = eig_hermitian(a)
    clipped = np.maximum(dec.eigenvalues, 0.0)
    return (dec.eigenvectors * clipped) @ dec.eigenvectors.conj().T


def dominant_eigvec(a):
    """Unit-norm eigenvector and eigenvalue for the largest eigenvalue of a
    Hermitian matrix. Returns (vector, eigenvalue)."""
    dec = eig_hermitian(a)
    v = dec.eigenvectors[:, 0]
    return v / np.linalg.norm(v), float(dec.eigenvalues[0])


def sample_cgauss(n, covariance, rng):
    """Draw one circularly-symmetric complex Gaussian vector ~ CN(0, covariance).

    covariance must be Hermitian PSD (small negative eigenvalues within
    round-off are clipped). Real and imaginary parts of a CN(0, s) entry each
    carry variance s/2.
    """
    cov = _as_square(covariance)
    if cov.shape[0] != n:
        raise DimensionError(f"covariance is {cov.shape}, expected ({n}, {n})")
    dec = eig_hermitian(cov)
    scale = max(1.0, float(dec.eigenvalues[0]))
    if dec.eigenvalues[-1] < -1e-10 * scale:
        raise DomainError("covariance is not PSD")
    root = dec.eigenvectors * np.sqrt(np.maximum(dec.eigenvalues, 0.0))
    u = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return root @ u


def _label_key(label):
    # Stable 64-bit key for a stream label (hash() is salted per process).
    return int.from_bytes(sha256(label.encode("utf-8")).digest()[:8], "little")


class SeedStreams:
    """Named, independent random streams derived from one integer seed.

    Streams are counter-based (Philox) and keyed by (seed, label), so any
    consumer that asks for the same label gets an identical, freshly-rewound
    generator. Conventional labels: "fading" for channel draws,
    "randomization" for rank-one recovery, "init" for initial points.
    """

    def __init__(self, seed):
        self.seed = int(seed)

    def stream(self, label):
        """Return a fresh numpy Generator for this (seed, label) pair."""
        ss = np.random.SeedSequence([self.seed, _label_key(label)])
        return np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"SeedStreams(seed={self.seed})"
