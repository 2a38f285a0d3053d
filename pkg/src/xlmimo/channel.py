"""Non-stationary correlated channel generation and block assembly.

Channel vectors are h = sqrt(w) .* hbar with hbar ~ CN(0, Theta), where
Theta = D^{1/2} R D^{1/2} restricted to per-subarray diagonal blocks; D is
the 0/1 visibility indicator and R the spatial correlation matrix.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (AssemblyError, ConfigurationError, ModelError,
                     UnsupportedTopologyError)
from .geometry import ArrayGeometry, UserLayout

PSD_CLAMP = 1e-12
PSD_NEG_TOL = 1e-10


def path_loss(d, omega: float, nu: float) -> np.ndarray:
    """Per-antenna large-scale power gain w = omega * d^(-nu)."""
    if omega <= 0:
        raise ConfigurationError(f"omega must be positive, got {omega}")
    if nu < 0:
        raise ConfigurationError(f"nu must be nonnegative, got {nu}")
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("all distances must be positive")
    return omega * d ** (-nu)


def build_correlation(geometry, rho: float) -> np.ndarray:
    """Exponential correlation matrix R[i, j] = rho^|i-j| (Hermitian Toeplitz)."""
    if not 0.0 <= rho < 1.0:
        raise ConfigurationError(f"rho must lie in [0, 1), got {rho}")
    M = geometry if isinstance(geometry, (int, np.integer)) else geometry.M
    return scipy.linalg.toeplitz(rho ** np.arange(M)).astype(float)


def psd_sqrt(mat: np.ndarray, neg_tol: float = PSD_NEG_TOL,
             clamp: float = PSD_CLAMP) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition with rank handling.

    Eigenvalues below `clamp` are zeroed; eigenvalues below -neg_tol raise.
    """
    vals, vecs = np.linalg.eigh(mat)
    scale = max(1.0, float(vals[-1]) if vals.size else 1.0)
    if vals.size and vals[0] < -neg_tol * scale:
        raise ModelError(
            f"covariance not PSD: min eigenvalue {vals[0]:.3e}")
    vals = np.where(vals < clamp, 0.0, vals)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


@dataclass(frozen=True)
class CovarianceModel:
    """Per-user covariance: correlation R, visibility mask, block-diagonal Theta."""

    R: np.ndarray
    visible: np.ndarray          # (M,) boolean
    theta: np.ndarray            # (M, M) block-diagonal masked covariance
    theta_blocks: tuple          # S blocks of shape (M_s, M_s)

    @classmethod
    def build(cls, R: np.ndarray, visible: np.ndarray,
              geometry: ArrayGeometry) -> "CovarianceModel":
        visible = np.asarray(visible, dtype=bool)
        d = visible.astype(float)
        # D is 0/1 diagonal, so D^{1/2} = D.
        masked = R * np.outer(d, d)
        blocks = []
        theta = np.zeros_like(masked, dtype=masked.dtype)
        for s in range(geometry.S):
            idx = geometry.subarray_indices(s)
            block = masked[np.ix_(idx, idx)]
            blocks.append(block)
            theta[np.ix_(idx, idx)] = block
        return cls(R=R, visible=visible, theta=theta, theta_blocks=tuple(blocks))


@dataclass(frozen=True)
class ChannelRealization:
    """Block channel matrices for the S=3, L=2 topology plus the stacked H."""

    H1: np.ndarray  # (M_1, K_1) subarray 1 x group 1
    Hc: np.ndarray  # (M_c, K)   central subarray x all users
    H2: np.ndarray  # (M_2, K_2) subarray 2 x group 2
    H: np.ndarray   # (M, K) stacked with exact zero blocks

    @property
    def K1(self) -> int:
        return self.H1.shape[1]

    @property
    def K2(self) -> int:
        return self.H2.shape[1]

    @property
    def K(self) -> int:
        return self.Hc.shape[1]

    def blocks(self):
        return self.H1, self.Hc, self.H2

    def scaled(self, factor: float) -> "ChannelRealization":
        return assemble_blocks(self.H1 * factor, self.Hc * factor,
                               self.H2 * factor)


def assemble_blocks(H1: np.ndarray, Hc: np.ndarray,
                    H2: np.ndarray) -> ChannelRealization:
    """Stack the three channel blocks into the M x K matrix with zero blocks."""
    M1, K1 = H1.shape
    Mc, K = Hc.shape
    M2, K2 = H2.shape
    if K != K1 + K2:
        raise AssemblyError(
            f"central block has {K} columns, expected K1+K2 = {K1 + K2}")
    H = np.zeros((M1 + Mc + M2, K), dtype=complex)
    H[:M1, :K1] = H1
    H[M1:M1 + Mc, :] = Hc
    H[M1 + Mc:, K1:] = H2
    return ChannelRealization(H1=np.asarray(H1, dtype=complex),
                              Hc=np.asarray(Hc, dtype=complex),
                              H2=np.asarray(H2, dtype=complex), H=H)


def extract_blocks(H: np.ndarray, M1: int, Mc: int, K1: int):
    """Inverse of assemble_blocks: pull (H1, Hc, H2) back out of the stack."""
    H1 = H[:M1, :K1]
    Hc = H[M1:M1 + Mc, :]
    H2 = H[M1 + Mc:, K1:]
    return H1, Hc, H2


def assemble_from_user_channels(h_users: np.ndarray, geometry: ArrayGeometry,
                                layout: UserLayout) -> ChannelRealization:
    """Assemble per-user full-array channel vectors into the block layout.

    Antennas structurally invisible to a user's group (subarray 2 for group 0
    users and vice versa) are dropped, producing the exact zero blocks.
    """
    if geometry.S != 3 or layout.L != 2:
        raise UnsupportedTopologyError(
            f"block assembly defined only for S=3, L=2; "
            f"got S={geometry.S}, L={layout.L}")
    sub = [geometry.subarray_indices(s) for s in range(3)]
    g1 = layout.users_in_group(0)
    g2 = layout.users_in_group(1)
    H1 = h_users[np.ix_(g1, sub[0])].T
    Hc = h_users[:, sub[1]].T
    H2 = h_users[np.ix_(g2, sub[2])].T
    return assemble_blocks(H1, Hc, H2)


def sample_user_channel(rng: np.random.Generator, cov: CovarianceModel,
                        w: np.ndarray, geometry: ArrayGeometry) -> np.ndarray:
    """Draw one user's length-M channel: h = sqrt(w) .* Theta_s^{1/2} z per block."""
    M = geometry.M
    h = np.zeros(M, dtype=complex)
    sqrt_w = np.sqrt(np.asarray(w, dtype=float))
    for s in range(geometry.S):
        idx = geometry.subarray_indices(s)
        A = psd_sqrt(cov.theta_blocks[s])
        z = (rng.standard_normal(len(idx))
             + 1j * rng.standard_normal(len(idx))) / np.sqrt(2.0)
        h[idx] = sqrt_w[idx] * (A @ z)
    return h


def sample_channel(rng: np.random.Generator, covs, W: np.ndarray,
                   geometry: ArrayGeometry,
                   layout: UserLayout) -> ChannelRealization:
    """Draw all K user channels and assemble the block matrix.

    `covs` is a length-K sequence of CovarianceModel, `W` the (K, M) matrix of
    large-scale gains.
    """
    W = np.asarray(W, dtype=float)
    h_users = np.empty((layout.K, geometry.M), dtype=complex)
    for k in range(layout.K):
        h_users[k] = sample_user_channel(rng, covs[k], W[k], geometry)
    return assemble_from_user_channels(h_users, geometry, layout)
