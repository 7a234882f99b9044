"""Orthonormal pilot training at the active RIS elements and the LS estimate.

All M UEs transmit simultaneously for tau_p = M slots using orthonormal
sequences (columns of Phi, with Phi^T Phi^* = I_M). The active elements stack
their received samples into

    X = sqrt(P_UL) * H_act * Phi^T + N,      N ~ i.i.d. CN(0, sigma^2),

and the least-squares sub-channel estimate is (1/sqrt(P_UL)) * X * Phi^*,
which equals H_act plus residual noise with per-entry variance sigma^2/P_UL.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelMatrix, complex_normal


@dataclass(frozen=True)
class PilotMatrix:
    """tau_p x M pilot matrix; column m is UE m's sequence."""

    phi: np.ndarray

    @property
    def n_users(self) -> int:
        return self.phi.shape[1]

    @property
    def tau_p(self) -> int:
        return self.phi.shape[0]


@dataclass(frozen=True)
class TrainingConfig:
    """Uplink pilot power and RIS-side noise level, both in dBm.

    noise_dbm = -inf models the exactly noiseless case.
    """

    p_ul_dbm: float
    noise_dbm: float
    m_users: int

    def __post_init__(self):
        if self.m_users < 1:
            raise ValueError("m_users must be >= 1")


def dbm_to_watts(x: float) -> float:
    """10^((x - 30)/10); -inf maps to exactly 0 W."""
    return float(10.0 ** ((x - 30.0) / 10.0))


def generate_pilots(m_users: int) -> PilotMatrix:
    """Minimum-length (tau_p = M) orthonormal pilots from a scaled DFT matrix.

    Phi = F / sqrt(M) with F the M x M DFT matrix satisfies Phi^T Phi^* = I_M
    for any M.
    """
    if m_users < 1:
        raise ValueError("m_users must be >= 1")
    t = np.arange(m_users)
    f = np.exp(-2j * np.pi * np.outer(t, t) / m_users)
    return PilotMatrix(phi=f / np.sqrt(m_users))


def simulate_reception(
    h_act: ChannelMatrix,
    pilots: PilotMatrix,
    cfg: TrainingConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Stacked received samples X = sqrt(P_UL) H_act Phi^T + N (L_act x tau_p)."""
    if pilots.n_users != h_act.n_users or pilots.n_users != cfg.m_users:
        raise ValueError("pilot / channel / config user counts disagree")
    p_ul = dbm_to_watts(cfg.p_ul_dbm)
    sigma2 = dbm_to_watts(cfg.noise_dbm)
    signal = np.sqrt(p_ul) * h_act.entries @ pilots.phi.T
    noise = complex_normal(rng, signal.shape, variance=sigma2) if sigma2 > 0 else 0.0
    return signal + noise


def ls_estimate(
    x: np.ndarray,
    pilots: PilotMatrix,
    cfg: TrainingConfig,
    row_index_map=None,
) -> ChannelMatrix:
    """Least-squares sub-channel estimate (1/sqrt(P_UL)) X Phi^*.

    Thanks to pilot orthonormality this is unbiased with i.i.d. CN(0,
    sigma^2/P_UL) residual entries. row_index_map defaults to 1..L_act for
    standalone use; pass the active set's indices inside a campaign.
    """
    p_ul = dbm_to_watts(cfg.p_ul_dbm)
    est = (x @ np.conj(pilots.phi)) / np.sqrt(p_ul)
    if row_index_map is None:
        row_index_map = np.arange(1, est.shape[0] + 1)
    return ChannelMatrix(entries=est, row_index_map=row_index_map)
