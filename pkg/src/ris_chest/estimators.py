"""Channel estimators: correlation-weighted linear combination plus baselines.

The proposed estimator reconstructs each passive element's row of the full
channel as a weighted combination of the M most correlated active rows of the
LS sub-channel estimate, using signed exponential weights

    w(r) = sign(r) * exp(alpha * |r|),

then rescales the combined row to the sample-mean norm of the selected rows.
Baselines: random CN(0,1) combination coefficients, and OMP sparse recovery
over a UPA steering-vector dictionary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelMatrix, complex_normal
from .geometry import RisGeometry


@dataclass(frozen=True)
class ActiveSet:
    """Ordered 1-based global indices of the active RIS elements."""

    indices: np.ndarray
    policy: str = "random-uniform"

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indices", idx)
        if idx.ndim != 1 or len(idx) < 1:
            raise ValueError("active set must hold at least one index")
        if len(np.unique(idx)) != len(idx):
            raise ValueError("active set contains duplicate indices")
        if idx.min() < 1:
            raise ValueError("active-set indices are 1-based and must be >= 1")

    @property
    def n_active(self) -> int:
        return len(self.indices)


def select_active(
    total_l: int, l_act: int, policy: str = "random-uniform", rng: np.random.Generator | None = None
) -> ActiveSet:
    """Choose L_act of L elements, either uniformly at random or on a stride grid."""
    if not 1 <= l_act <= total_l:
        raise ValueError(f"l_act must be in 1..{total_l}, got {l_act}")
    if policy == "random-uniform":
        if rng is None:
            raise ValueError("random-uniform placement requires an rng")
        idx = np.sort(rng.choice(total_l, size=l_act, replace=False)) + 1
    elif policy == "uniform-grid":
        stride = total_l // l_act
        idx = 1 + stride * np.arange(l_act)
    else:
        raise ValueError(f"unknown placement policy {policy!r}")
    return ActiveSet(indices=idx, policy=policy)


@dataclass(frozen=True)
class SelectionPlan:
    """Per-passive-element row selection and combination weights.

    Row p of each array corresponds to passive element passive_indices[p]:
    local_rows are 0-based row positions within the active sub-channel,
    global_indices the matching 1-based RIS indices (ranked by descending
    |correlation|, ties broken by smaller global index), and weights the
    signed exponential combination coefficients.
    """

    passive_indices: np.ndarray
    local_rows: np.ndarray
    global_indices: np.ndarray
    weights: np.ndarray
    alpha: float


@dataclass(frozen=True)
class EstimatorParams:
    """Tunables: exponential weight coefficient and OMP dictionary settings."""

    alpha: float = 5.0
    omp_sparsity: int = 20
    dict_az: int = 32
    dict_el: int = 32

    def __post_init__(self):
        if self.omp_sparsity < 1:
            raise ValueError("OMP sparsity must be >= 1")
        if self.dict_az < 1 or self.dict_el < 1:
            raise ValueError("dictionary grid sizes must be >= 1")


def plan_selection(
    r: np.ndarray, act: ActiveSet, m_users: int, alpha: float
) -> SelectionPlan:
    """Rank active elements by |correlation| for every passive element.

    For each passive element the M active indices with the largest absolute
    correlation are kept (smaller global index wins ties) and given weights
    sign(r) * exp(alpha * |r|), with a zero weight for exactly zero
    correlation.
    """
    l_total = r.shape[0]
    if act.n_active < m_users:
        raise ValueError(
            f"need L_act >= M for row selection, got L_act={act.n_active}, M={m_users}"
        )
    active = act.indices
    passive = np.setdiff1d(np.arange(1, l_total + 1), active)
    corr = r[np.ix_(passive - 1, active - 1)]
    # lexsort: primary key descending |corr|, secondary key ascending global index
    order = np.lexsort((np.broadcast_to(active, corr.shape), -np.abs(corr)), axis=1)
    top = order[:, :m_users]
    rows_idx = np.arange(len(passive))[:, None]
    chosen_corr = corr[rows_idx, top]
    weights = np.sign(chosen_corr) * np.exp(alpha * np.abs(chosen_corr))
    return SelectionPlan(
        passive_indices=passive,
        local_rows=top,
        global_indices=active[top],
        weights=weights,
        alpha=alpha,
    )


def _passthrough_active(h_tilde_act: ChannelMatrix, act: ActiveSet, total_l: int) -> np.ndarray:
    """L x M output with active rows copied from the LS estimate, zeros elsewhere."""
    out = np.zeros((total_l, h_tilde_act.n_users), dtype=complex)
    lookup = {int(g): i for i, g in enumerate(h_tilde_act.row_index_map)}
    for g in act.indices:
        out[g - 1, :] = h_tilde_act.entries[lookup[int(g)], :]
    return out


def estimate_proposed(
    h_tilde_act: ChannelMatrix,
    plan: SelectionPlan,
    act: ActiveSet,
    total_l: int,
    counters: dict | None = None,
) -> ChannelMatrix:
    """Weighted-linear-combination estimate of the full L x M channel.

    Active rows pass through the LS estimate unchanged. Each passive row is
    the weighted combination of its planned rows, rescaled so its norm equals
    the sample mean of the selected rows' norms. A zero-norm combination
    (probability zero under continuous noise) yields a zero row and a flag.
    """
    m = h_tilde_act.n_users
    out = _passthrough_active(h_tilde_act, act, total_l)
    flags = list(h_tilde_act.flags)
    sel = h_tilde_act.entries[plan.local_rows]          # (P, M, M_users)
    combo = np.einsum("pm,pmu->pu", plan.weights, sel)
    row_norms = np.linalg.norm(sel, axis=2)             # (P, M)
    n_factor = row_norms.mean(axis=1)                   # (P,)
    combo_norm = np.linalg.norm(combo, axis=1)
    if counters is not None:
        counters["mac"] = counters.get("mac", 0) + 2 * len(plan.passive_indices) * m * m
    for p, ell in enumerate(plan.passive_indices):
        if combo_norm[p] == 0.0:
            flags.append(f"degenerate-combination:element={int(ell)}")
            continue
        out[ell - 1, :] = n_factor[p] * combo[p] / combo_norm[p]
    return ChannelMatrix(
        entries=out, row_index_map=np.arange(1, total_l + 1), flags=tuple(flags)
    )


def estimate_random_baseline(
    h_tilde_act: ChannelMatrix,
    act: ActiveSet,
    total_l: int,
    rng: np.random.Generator,
) -> ChannelMatrix:
    """Random-coefficient baseline: M random active rows, CN(0,1) coefficients.

    Active rows pass through the LS estimate, matching the proposed
    estimator's convention.
    """
    m = h_tilde_act.n_users
    if act.n_active < m:
        raise ValueError(
            f"need L_act >= M for row selection, got L_act={act.n_active}, M={m}"
        )
    out = _passthrough_active(h_tilde_act, act, total_l)
    passive = np.setdiff1d(np.arange(1, total_l + 1), act.indices)
    for ell in passive:
        rows = rng.choice(act.n_active, size=m, replace=False)
        coeffs = complex_normal(rng, m)
        out[ell - 1, :] = coeffs @ h_tilde_act.entries[rows, :]
    return ChannelMatrix(
        entries=out, row_index_map=np.arange(1, total_l + 1), flags=h_tilde_act.flags
    )


def build_upa_dictionary(geom: RisGeometry, n_az: int, n_el: int) -> np.ndarray:
    """L x (n_az * n_el) dictionary of unit-norm UPA steering vectors.

    Azimuth and elevation directions are sampled uniformly in sine space
    [-1, 1); the column for grid point (q, s) sits at index q * n_el + s and
    its element-a entry is (1/sqrt(L)) exp(j (2 pi / lambda) u_a . k(q, s)).
    Broadside (0, 0) gives the all-ones reference column.
    """
    if n_az < 1 or n_el < 1:
        raise ValueError("dictionary grid sizes must be >= 1")
    l_total = geom.n_elements
    idx = np.arange(l_total)
    y = (idx % geom.l_h) * geom.d_h
    z = (idx // geom.l_h) * geom.d_v
    sin_az = -1.0 + 2.0 * np.arange(n_az) / n_az
    sin_el = -1.0 + 2.0 * np.arange(n_el) / n_el
    phase = (2 * np.pi / geom.wavelength) * (
        y[:, None, None] * sin_az[None, :, None] + z[:, None, None] * sin_el[None, None, :]
    )
    d = np.exp(1j * phase).reshape(l_total, n_az * n_el) / np.sqrt(l_total)
    return d


def estimate_omp_baseline(
    h_tilde_act: ChannelMatrix,
    act: ActiveSet,
    dictionary: np.ndarray,
    p: int,
    counters: dict | None = None,
) -> ChannelMatrix:
    """OMP compressed-sensing baseline over a steering-vector dictionary.

    Per UE column: greedily select p atoms by maximal residual correlation
    against the row-subselected dictionary, refit all selected gains by least
    squares each iteration, then extend the estimate to every RIS element
    through the full dictionary. A selection that makes the sub-dictionary
    rank deficient is dropped, flagged, and excluded from further selection.
    """
    if p < 1:
        raise ValueError("sparsity p must be >= 1")
    if p > act.n_active:
        raise ValueError(f"sparsity p={p} exceeds L_act={act.n_active}")
    l_total = dictionary.shape[0]
    n_atoms = dictionary.shape[1]
    a_obs = dictionary[act.indices - 1, :]
    flags = list(h_tilde_act.flags)
    out = np.zeros((l_total, h_tilde_act.n_users), dtype=complex)
    for u in range(h_tilde_act.n_users):
        y = h_tilde_act.entries[:, u]
        residual = y.copy()
        selected: list[int] = []
        banned: set[int] = set()
        gains = np.zeros(0, dtype=complex)
        while len(selected) < p:
            corr = np.abs(a_obs.conj().T @ residual)
            if counters is not None:
                counters["inner_products"] = counters.get("inner_products", 0) + n_atoms
            for j in selected:
                corr[j] = -1.0
            for j in banned:
                corr[j] = -1.0
            atom = int(np.argmax(corr))
            if corr[atom] < 0:
                break
            trial = selected + [atom]
            sub = a_obs[:, trial]
            g, _, rank, _ = np.linalg.lstsq(sub, y, rcond=None)
            if rank < len(trial):
                banned.add(atom)
                flags.append(f"omp-rank-deficient:atom={atom},user={u}")
                continue
            selected = trial
            gains = g
            residual = y - sub @ gains
        if selected:
            out[:, u] = dictionary[:, selected] @ gains
    return ChannelMatrix(
        entries=out, row_index_map=np.arange(1, l_total + 1), flags=tuple(flags)
    )
