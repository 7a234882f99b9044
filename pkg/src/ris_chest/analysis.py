"""Numerical rank, rank-CDF statistics over random placements, and NMSE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import select_active
from .geometry import RisGeometry, build_covariance, default_rank_tol

__all__ = [
    "RankSample", "NmseRecord", "default_rank_tol",
    "numerical_rank", "rank_cdf_experiment", "nmse",
]


@dataclass(frozen=True)
class RankSample:
    """Numerical rank of one sub-covariance-factor realization."""

    l_act: int
    total_l: int
    rank: int
    singular_values: np.ndarray

    def __post_init__(self):
        if not 0 <= self.rank <= min(self.l_act, self.total_l):
            raise ValueError("rank outside 0..min(L_act, L)")


@dataclass(frozen=True)
class NmseRecord:
    """One trial's NMSE for one estimator at one sweep point."""

    estimator_name: str
    l_act: int
    p_ul_dbm: float
    trial_seed: int
    nmse: float

    def __post_init__(self):
        if self.nmse < 0:
            raise ValueError("nmse must be nonnegative")


def numerical_rank(m: np.ndarray, rel_tol: float | None = None) -> int:
    """Count of singular values above rel_tol * sigma_max."""
    m = np.asarray(m)
    if m.size == 0:
        raise ValueError("matrix is empty")
    s = np.linalg.svd(m, compute_uv=False)
    if rel_tol is None:
        rel_tol = default_rank_tol(m.shape)
    return int(np.count_nonzero(s > rel_tol * s[0]))


def _square_geometry(total_l: int, d_frac: float, wavelength: float) -> RisGeometry:
    """Square UPA for a given total element count (must be a perfect square)."""
    side = int(round(np.sqrt(total_l)))
    if side * side != total_l:
        raise ValueError(f"rank experiments use square UPAs; L={total_l} is not a square")
    return RisGeometry(
        l_h=side, l_v=side, d_h=d_frac * wavelength, d_v=d_frac * wavelength,
        wavelength=wavelength,
    )


def rank_cdf_experiment(
    pairs,
    placements: int,
    rng: np.random.Generator,
    d_frac: float = 0.125,
    wavelength: float = 1.0,
    rel_tol: float | None = None,
):
    """Empirical rank CDF of the active-row covariance factor per (L_act, L) pair.

    For each pair, `placements` random active sets are drawn; the covariance
    uses A * mu = 1 (element area folded into mu) so K = R. Returns a list of
    dicts with the raw ranks and the empirical CDF over observed rank values.
    """
    results = []
    for l_act, total_l in pairs:
        if l_act > total_l:
            raise ValueError(f"L_act={l_act} exceeds L={total_l}")
        geom = _square_geometry(total_l, d_frac, wavelength)
        model = build_covariance(geom, mu=1.0 / geom.element_area)
        ranks = np.empty(placements, dtype=np.int64)
        for t in range(placements):
            act = select_active(total_l, l_act, "random-uniform", rng)
            k_act_sqrt = model.k_sqrt[act.indices - 1, :]
            ranks[t] = numerical_rank(k_act_sqrt, rel_tol=rel_tol)
        values, counts = np.unique(ranks, return_counts=True)
        cdf = np.cumsum(counts) / placements
        results.append(
            {
                "l_act": l_act,
                "l_total": total_l,
                "ranks": ranks,
                "cdf_values": values,
                "cdf": cdf,
            }
        )
    return results


def nmse(h_true, h_est, return_flags: bool = False):
    """Per-row normalized squared error averaged over RIS elements.

    (1/L') sum_l ||H(l,:) - Hhat(l,:)||^2 / ||H(l,:)||^2, where zero-norm true
    rows are excluded from both sum and divisor (and flagged). Raises if every
    true row is zero.
    """
    t = np.asarray(getattr(h_true, "entries", h_true))
    e = np.asarray(getattr(h_est, "entries", h_est))
    if t.shape != e.shape:
        raise ValueError(f"shape mismatch: {t.shape} vs {e.shape}")
    row_power = np.sum(np.abs(t) ** 2, axis=1)
    valid = row_power > 0
    if not np.any(valid):
        raise ValueError("NMSE undefined: all true rows have zero norm")
    err = np.sum(np.abs(t - e) ** 2, axis=1)
    value = float(np.mean(err[valid] / row_power[valid]))
    flags = ()
    if not np.all(valid):
        flags = (f"nmse-zero-rows-excluded:{int(np.sum(~valid))}",)
    if return_flags:
        return value, flags
    return value
