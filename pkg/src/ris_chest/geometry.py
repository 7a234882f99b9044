"""RIS element geometry and the spatial correlation / covariance model.

The RIS is a uniform planar array (UPA) with L_h horizontal and L_v vertical
elements lying in the y-z plane. Element a (1-based) sits at

    u_a = [0, i(a) * d_h, j(a) * d_v],   i(a) = (a-1) mod L_h,
                                         j(a) = floor((a-1) / L_h).

Under isotropic scattering the normalized spatial correlation between two
elements is sinc(2 * ||u_a - u_b|| / lambda), which gives a rank-deficient
correlation matrix for sub-half-wavelength spacing. The channel covariance is
K = A * mu * R with element area A and large-scale coefficient mu; its
principal square root feeds the coloring transform in the channel module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NotPositiveSemidefiniteError(ValueError):
    """Raised when a matrix that must be PSD has eigenvalues below tolerance."""


def default_rank_tol(shape) -> float:
    """Relative singular-value threshold: 1e3 * max(dim) * machine epsilon.

    Looser than numpy's matrix_rank default by the 1e3 factor so that ranks of
    the sinc correlation family are stable against round-off in the square
    root; exposed in config for sensitivity reporting.
    """
    return 1e3 * max(shape) * np.finfo(float).eps


@dataclass(frozen=True)
class RisGeometry:
    """UPA dimensions, element spacing and carrier wavelength (all in meters)."""

    l_h: int
    l_v: int
    d_h: float
    d_v: float
    wavelength: float

    def __post_init__(self):
        if self.l_h < 1 or self.l_v < 1:
            raise ValueError(f"element counts must be >= 1, got {self.l_h}x{self.l_v}")
        if self.d_h <= 0 or self.d_v <= 0:
            raise ValueError("element spacings must be positive")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")

    @property
    def n_elements(self) -> int:
        return self.l_h * self.l_v

    @property
    def element_area(self) -> float:
        return self.d_h * self.d_v


def element_position(a: int, geom: RisGeometry) -> np.ndarray:
    """Position vector u_a of the a-th RIS element, a = 1..L (1-based).

    The first coordinate is always 0 (the array lies in the y-z plane).
    """
    if not 1 <= a <= geom.n_elements:
        raise ValueError(f"element index {a} out of range 1..{geom.n_elements}")
    i = (a - 1) % geom.l_h
    j = (a - 1) // geom.l_h
    return np.array([0.0, i * geom.d_h, j * geom.d_v])


def _all_positions(geom: RisGeometry) -> np.ndarray:
    """(L, 3) array of element positions in 1-based index order."""
    idx = np.arange(geom.n_elements)
    pos = np.zeros((geom.n_elements, 3))
    pos[:, 1] = (idx % geom.l_h) * geom.d_h
    pos[:, 2] = (idx // geom.l_h) * geom.d_v
    return pos


def build_correlation(geom: RisGeometry) -> np.ndarray:
    """Normalized L x L spatial correlation matrix R.

    [R]_{a,b} = sinc(2 ||u_a - u_b|| / lambda). np.sinc evaluates
    sin(pi x)/(pi x) with an exact 1 at x = 0, so the diagonal is exactly 1.
    The pairwise distances are bitwise symmetric under broadcasting (negation
    is exact in floating point), hence R is bitwise symmetric.
    """
    pos = _all_positions(geom)
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    return np.sinc(2.0 * dist / geom.wavelength)


def matrix_sqrt_psd(
    m: np.ndarray, clamp_tol: float = 1e-10, truncate_tol: float | None = None
) -> np.ndarray:
    """Principal square root of a real symmetric PSD matrix.

    Uses the symmetric eigendecomposition rather than Cholesky because the
    sinc correlation matrix is rank deficient. Eigenvalues in
    [-clamp_tol * lambda_max, 0] are treated as round-off and clamped to 0;
    anything below that raises NotPositiveSemidefiniteError. When
    truncate_tol is given, eigenvalues below truncate_tol * lambda_max are
    also zeroed so the square root has the same numerical rank as the input
    (the square root would otherwise lift sub-tolerance eigenvalues above the
    rank threshold).
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    w, v = np.linalg.eigh(m)
    w_max = max(w[-1], 0.0)
    if w[0] < -clamp_tol * w_max:
        raise NotPositiveSemidefiniteError(
            f"matrix is not PSD: min eigenvalue {w[0]:.3e} "
            f"< -{clamp_tol:.1e} * max eigenvalue {w_max:.3e}"
        )
    w = np.clip(w, 0.0, None)
    if truncate_tol is not None:
        w[w < truncate_tol * w_max] = 0.0
    s = (v * np.sqrt(w)) @ v.T
    return 0.5 * (s + s.T)


@dataclass(frozen=True)
class CorrelationModel:
    """Correlation matrix R plus covariance K = A * mu * R and its square root."""

    geometry: RisGeometry
    r: np.ndarray
    large_scale: float
    k: np.ndarray
    k_sqrt: np.ndarray

    @property
    def n_elements(self) -> int:
        return self.r.shape[0]


def build_covariance(
    geom: RisGeometry,
    mu: float,
    r: np.ndarray | None = None,
    clamp_tol: float = 1e-10,
) -> CorrelationModel:
    """Assemble the covariance model K = A * mu * R with its PSD square root.

    R defaults to build_correlation(geom); pass r explicitly to reuse a
    precomputed matrix across models.
    """
    if mu <= 0:
        raise ValueError("large-scale coefficient mu must be positive")
    if r is None:
        r = build_correlation(geom)
    if r.shape != (geom.n_elements, geom.n_elements):
        raise ValueError(
            f"correlation matrix shape {r.shape} does not match L={geom.n_elements}"
        )
    k = geom.element_area * mu * r
    k_sqrt = matrix_sqrt_psd(k, clamp_tol=clamp_tol, truncate_tol=default_rank_tol(k.shape))
    return CorrelationModel(geometry=geom, r=r, large_scale=mu, k=k, k_sqrt=k_sqrt)
