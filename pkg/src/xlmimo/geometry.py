"""Physical ULA construction, subarray partition, user drop and visibility regions.

The base-station array lies along one edge of the square cell, from (0, 0)
towards (N, 0); users live in the square [0, cell_side]^2.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, GeometryInfeasibleError

# Engineering convention (c = 3e8 m/s) rather than the CODATA value; the
# Table-I aperture N = 23.0610 m maps to M = 99 either way.
C_LIGHT = 3.0e8

DEFAULT_MAX_RETRIES = 10_000


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array split into S contiguous subarrays."""

    M: int
    S: int
    spacing: float
    positions: np.ndarray  # (M,) antenna positions along the array axis [m]
    N: float               # physical array length, M * spacing [m]
    subarray_of: np.ndarray  # (M,) antenna index -> subarray index in 0..S-1

    @property
    def M_s(self) -> int:
        return self.M // self.S

    def subarray_indices(self, s: int) -> np.ndarray:
        return np.nonzero(self.subarray_of == s)[0]


@dataclass(frozen=True)
class UserLayout:
    """Planar user positions, logical grouping, and user-antenna distances."""

    K: int
    L: int
    group_of: np.ndarray     # (K,) user -> group index in 0..L-1
    positions_2d: np.ndarray  # (K, 2) [m]
    distances: np.ndarray    # (K, M) Euclidean user-antenna distances [m]

    @property
    def K_l(self) -> int:
        return self.K // self.L

    def users_in_group(self, l: int) -> np.ndarray:
        return np.nonzero(self.group_of == l)[0]


@dataclass(frozen=True)
class VisibilityRegion:
    """Interval of the array over which a user's channel is nonzero."""

    center: float
    length: float
    visible: np.ndarray  # (M,) boolean mask, diagonal of the indicator matrix


def build_geometry(M: int, S: int, carrier_hz: float,
                   spacing_wavelengths: float = 2.0) -> ArrayGeometry:
    """Build the ULA with wavelength-derived spacing and a contiguous partition."""
    if M <= 0 or S <= 0:
        raise ConfigurationError(f"M and S must be positive, got M={M}, S={S}")
    if M % S != 0:
        raise ConfigurationError(
            f"antenna count M={M} is not divisible by subarray count S={S}")
    if carrier_hz <= 0:
        raise ConfigurationError(f"carrier frequency must be positive, got {carrier_hz}")
    if spacing_wavelengths <= 0:
        raise ConfigurationError(
            f"antenna spacing must be positive, got {spacing_wavelengths} wavelengths")
    wavelength = C_LIGHT / carrier_hz
    spacing = spacing_wavelengths * wavelength
    positions = np.arange(M) * spacing
    subarray_of = np.repeat(np.arange(S), M // S)
    return ArrayGeometry(M=M, S=S, spacing=spacing, positions=positions,
                         N=M * spacing, subarray_of=subarray_of)


def antennas_for_length(N: float, S: int, spacing: float) -> int:
    """Largest multiple of S whose aperture M*spacing does not exceed N."""
    if N <= 0 or spacing <= 0 or S <= 0:
        raise ConfigurationError(
            f"need positive N, S, spacing; got N={N}, S={S}, spacing={spacing}")
    m_max = int(np.floor(N / spacing + 1e-9))
    M = (m_max // S) * S
    if M <= 0:
        raise ConfigurationError(
            f"aperture N={N} m too short for S={S} subarrays at spacing {spacing} m")
    return M


def drop_users(rng: np.random.Generator, K: int, L: int, cell_side: float,
               min_dist: float, geometry: ArrayGeometry,
               max_retries: int = DEFAULT_MAX_RETRIES) -> UserLayout:
    """Place K users uniformly in the cell, at least min_dist from every antenna.

    Users are assigned to groups in contiguous index blocks (first K/L users
    form group 0, and so on).
    """
    if cell_side <= 0:
        raise ConfigurationError(f"cell_side must be positive, got {cell_side}")
    if K <= 0 or L <= 0 or K % L != 0:
        raise ConfigurationError(f"user count K={K} is not divisible by L={L}")
    diagonal = np.hypot(cell_side, cell_side)
    if min_dist >= diagonal:
        raise ConfigurationError(
            f"min_dist={min_dist} m exceeds the cell diagonal {diagonal:.3f} m")

    positions = np.empty((K, 2))
    distances = np.empty((K, geometry.M))
    ax = geometry.positions
    for k in range(K):
        for _ in range(max_retries):
            p = rng.uniform(0.0, cell_side, size=2)
            d = np.hypot(p[0] - ax, p[1])
            if d.min() >= min_dist:
                positions[k] = p
                distances[k] = d
                break
        else:
            raise GeometryInfeasibleError(
                f"could not place user {k} at min_dist={min_dist} m "
                f"after {max_retries} attempts")
    group_of = np.repeat(np.arange(L), K // L)
    return UserLayout(K=K, L=L, group_of=group_of,
                      positions_2d=positions, distances=distances)


def sample_vr(rng: np.random.Generator, geometry: ArrayGeometry,
              mu_l: float, sigma_l: float,
              interpretation: str = "log-mean",
              required: np.ndarray | None = None,
              max_retries: int = DEFAULT_MAX_RETRIES) -> VisibilityRegion:
    """Sample a visibility region: center uniform on [0, N], log-normal length.

    `interpretation` selects how mu_l parameterizes the log-normal law:
    "log-mean" treats it as the mean of log-length, "linear-mean" as the
    linear-scale mean length.  When `required` is given, draws are rejected
    until the region covers at least one antenna of that mask (e.g. the
    subarrays actually serving the user's group), so no user ends up with an
    all-zero effective channel.
    """
    if sigma_l <= 0:
        raise ConfigurationError(f"sigma_l must be positive, got {sigma_l}")
    if interpretation == "log-mean":
        mu = mu_l
    elif interpretation == "linear-mean":
        if mu_l <= 0:
            raise ConfigurationError(
                f"linear-mean VR length must be positive, got {mu_l}")
        mu = np.log(mu_l) - 0.5 * sigma_l ** 2
    else:
        raise ConfigurationError(
            f"unknown VR interpretation {interpretation!r}; "
            "expected 'log-mean' or 'linear-mean'")

    pos = geometry.positions
    needed = np.ones(geometry.M, dtype=bool) if required is None else required
    if not needed.any():
        raise ConfigurationError("required mask excludes every antenna")
    for _ in range(max_retries):
        center = rng.uniform(0.0, geometry.N)
        length = rng.lognormal(mean=mu, sigma=sigma_l)
        lo = max(0.0, center - length / 2.0)
        hi = min(geometry.N, center + length / 2.0)
        visible = (pos >= lo) & (pos <= hi)
        # An all-invisible draw would zero the user's effective channel row;
        # resample until the region reaches an antenna that can serve them.
        if (visible & needed).any():
            return VisibilityRegion(center=center, length=length, visible=visible)
    raise GeometryInfeasibleError(
        f"no visible antenna after {max_retries} VR draws")
