"""Correlated Rayleigh UE-RIS channel synthesis and large-scale attenuation.

Channels are drawn with the coloring transform H = K^{1/2} Z, where Z has
i.i.d. CN(0, 1) entries and each column of H is one UE's channel. Columns are
mutually independent; the row covariance of every column equals K.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import CorrelationModel


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex channel coefficients, one row per RIS element, one column per UE.

    row_index_map holds the 1-based global RIS element index of each row, so a
    sub-channel (rows restricted to the active elements) remembers where its
    rows came from. flags carries trial-level anomalies (e.g. degenerate
    combinations) without aborting a campaign.
    """

    entries: np.ndarray
    row_index_map: np.ndarray
    flags: tuple = ()

    def __post_init__(self):
        entries = np.asarray(self.entries)
        rim = np.asarray(self.row_index_map, dtype=np.int64)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "row_index_map", rim)
        if entries.ndim != 2 or entries.shape[1] < 1:
            raise ValueError(f"expected a 2-D matrix with >= 1 column, got {entries.shape}")
        if rim.shape != (entries.shape[0],):
            raise ValueError("row_index_map length must equal the row count")
        if len(np.unique(rim)) != len(rim):
            raise ValueError("row_index_map contains duplicate element indices")
        if len(rim) and (rim.min() < 1):
            raise ValueError("row_index_map entries are 1-based and must be >= 1")

    @property
    def n_rows(self) -> int:
        return self.entries.shape[0]

    @property
    def n_users(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance path loss: reference attenuation at 1 m plus an exponent."""

    ref_loss_db: float = 30.0
    exponent: float = 2.2
    distance_m: float = 20.0

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ValueError("distance must be positive")
        if self.exponent < 0:
            raise ValueError("path-loss exponent must be nonnegative")


def large_scale_coefficient(p: PathLossParams) -> float:
    """Linear-power large-scale coefficient mu = 10^(-ref/10) * d^(-exponent)."""
    return 10.0 ** (-p.ref_loss_db / 10.0) * p.distance_m ** (-p.exponent)


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """i.i.d. CN(0, variance) samples; real and imaginary parts each carry variance/2."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channels(
    model: CorrelationModel, m_users: int, rng: np.random.Generator
) -> ChannelMatrix:
    """Draw an L x M correlated Rayleigh channel H = K^{1/2} Z.

    Each column is an independent CN(0, K) vector; determinism follows from
    the caller-supplied generator.
    """
    if m_users < 1:
        raise ValueError("m_users must be >= 1")
    l_total = model.n_elements
    z = complex_normal(rng, (l_total, m_users))
    h = model.k_sqrt @ z
    return ChannelMatrix(entries=h, row_index_map=np.arange(1, l_total + 1))


def extract_rows(h: ChannelMatrix, idx) -> ChannelMatrix:
    """Sub-channel restricted to the given 1-based global element indices.

    idx may be an ActiveSet or any sequence of indices; rows come out in the
    given order and the row map records their global indices.
    """
    indices = np.asarray(getattr(idx, "indices", idx), dtype=np.int64)
    lookup = {int(g): i for i, g in enumerate(h.row_index_map)}
    rows = []
    for g in indices:
        if int(g) not in lookup:
            raise ValueError(f"element index {int(g)} not present in this channel matrix")
        rows.append(lookup[int(g)])
    return ChannelMatrix(entries=h.entries[rows, :], row_index_map=indices, flags=h.flags)
