"""Experiment orchestration: configs, Monte-Carlo campaigns, CSV persistence.

Campaigns mirror the three headline experiments: the rank CDF of the
active-row covariance factor, NMSE versus the number of active elements, and
NMSE versus uplink pilot power. Each trial derives its own random stream from
(master_seed, experiment, sweep point, trial index), so results are bitwise
independent of worker count and scheduling.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import __version__
from .analysis import nmse, numerical_rank
from .channel import PathLossParams, extract_rows, large_scale_coefficient, sample_channels
from .estimators import (
    build_upa_dictionary,
    estimate_omp_baseline,
    estimate_proposed,
    estimate_random_baseline,
    plan_selection,
    select_active,
)
from .geometry import RisGeometry, build_covariance
from .training import TrainingConfig, generate_pilots, ls_estimate, simulate_reception

SPEED_OF_LIGHT = 299_792_458.0

EXPERIMENTS = ("nmse-vs-active", "nmse-vs-power", "rank-cdf")
_EXPERIMENT_ID = {name: i + 1 for i, name in enumerate(EXPERIMENTS)}

TRIAL_COLUMNS = (
    "experiment", "estimator", "l_act", "p_ul_dbm", "l_total",
    "m_users", "trial", "seed", "value", "flags",
)
AGG_COLUMNS = ("experiment", "estimator", "sweep_value", "mean", "std_err", "n_trials")
CDF_COLUMNS = ("experiment", "l_act", "l_total", "rank", "cdf")


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat, human-editable experiment description; defaults match the stock
    desk-scale scenario (16x16 RIS at lambda/8 spacing, 3.5 GHz, 8 UEs)."""

    l_h: int = 16
    l_v: int = 16
    d_h_frac: float = 0.125           # element spacing as a fraction of lambda
    d_v_frac: float = 0.125
    carrier_ghz: float = 3.5
    m_users: int = 8
    ref_loss_db: float = 30.0
    pathloss_exp: float = 2.2
    distance_m: float = 20.0
    noise_dbm: float = -114.0
    alpha: float = 5.0
    omp_p: tuple = (10, 20)
    dict_az: int | None = None        # defaults to 2 * l_h
    dict_el: int | None = None        # defaults to 2 * l_v
    estimators: tuple = ("proposed", "random")
    placement: str = "random-uniform"
    l_act_list: tuple = (8, 16, 32, 64)
    p_ul_dbm: float = 10.0            # fixed power for the l_act sweep
    p_ul_dbm_list: tuple = (0.0, 10.0, 20.0, 30.0)
    l_act: int = 16                   # fixed count for the power sweep
    rank_pairs: tuple = ((4, 16), (8, 64), (16, 256), (128, 256))
    rank_rel_tol: float | None = None
    trials: int = 500
    master_seed: int = 12345
    out_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.m_users < 1:
            raise ValueError("m_users must be >= 1")
        for name in ("omp_p", "estimators", "l_act_list", "p_ul_dbm_list", "rank_pairs"):
            object.__setattr__(self, name, tuple(
                tuple(x) if isinstance(x, (list, tuple)) else x
                for x in getattr(self, name)
            ))
        if not self.l_act_list or not self.p_ul_dbm_list or not self.rank_pairs:
            raise ValueError("sweep lists must be nonempty")
        for est in self.estimators:
            if est not in ("proposed", "random", "omp"):
                raise ValueError(f"unknown estimator {est!r}")
        if self.placement not in ("random-uniform", "uniform-grid"):
            raise ValueError(f"unknown placement policy {self.placement!r}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / (self.carrier_ghz * 1e9)

    @property
    def geometry(self) -> RisGeometry:
        lam = self.wavelength
        return RisGeometry(
            l_h=self.l_h, l_v=self.l_v,
            d_h=self.d_h_frac * lam, d_v=self.d_v_frac * lam, wavelength=lam,
        )

    @property
    def estimator_names(self) -> tuple:
        names = []
        for est in self.estimators:
            if est == "omp":
                names.extend(f"omp-p{p}" for p in self.omp_p)
            else:
                names.append(est)
        return tuple(names)

    @classmethod
    def from_file(cls, path: str, **overrides) -> "ExperimentConfig":
        with open(path) as f:
            raw = yaml.safe_load(f) or {}
        if not isinstance(raw, dict):
            raise ValueError(f"config file {path} must hold a flat key-value mapping")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**raw)


@dataclass
class CampaignResult:
    """Per-trial rows plus recomputable aggregates and run metadata."""

    name: str
    value_column: str                 # "nmse" or "rank"
    trial_rows: list = field(default_factory=list)
    agg_rows: list = field(default_factory=list)
    cdf_rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _fmt(x) -> str:
    """Shortest round-trip decimal form; deterministic across platforms."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def trial_seed_sequence(cfg: ExperimentConfig, experiment: str, point_idx: int,
                        trial_idx: int) -> np.random.SeedSequence:
    """Splittable per-trial seed derived from the master seed and trial coordinates."""
    return np.random.SeedSequence(
        entropy=(cfg.master_seed, _EXPERIMENT_ID[experiment], point_idx, trial_idx)
    )


# Shared per-worker context; built once per process by the pool initializer
# (or inline when workers == 1). Everything in it is immutable.
_CTX: dict = {}


def _build_nmse_context(cfg: ExperimentConfig) -> dict:
    geom = cfg.geometry
    mu = large_scale_coefficient(PathLossParams(
        ref_loss_db=cfg.ref_loss_db, exponent=cfg.pathloss_exp, distance_m=cfg.distance_m,
    ))
    model = build_covariance(geom, mu=mu)
    pilots = generate_pilots(cfg.m_users)
    ctx = {"cfg": cfg, "geom": geom, "model": model, "pilots": pilots, "dictionary": None}
    if any(n.startswith("omp") for n in cfg.estimator_names):
        n_az = cfg.dict_az if cfg.dict_az is not None else 2 * cfg.l_h
        n_el = cfg.dict_el if cfg.dict_el is not None else 2 * cfg.l_v
        ctx["dictionary"] = build_upa_dictionary(geom, n_az, n_el)
    return ctx


def _init_nmse_worker(cfg: ExperimentConfig):
    _CTX.clear()
    _CTX.update(_build_nmse_context(cfg))


def _nmse_trial(task):
    """One Monte-Carlo trial: fresh placement, channel, noise; all estimators."""
    experiment, point_idx, trial_idx, l_act, p_ul_dbm = task
    cfg: ExperimentConfig = _CTX["cfg"]
    model = _CTX["model"]
    pilots = _CTX["pilots"]
    total_l = model.n_elements
    ss = trial_seed_sequence(cfg, experiment, point_idx, trial_idx)
    seed = int(ss.generate_state(1, np.uint64)[0])
    rng = np.random.default_rng(ss)
    base = {
        "experiment": experiment, "l_act": l_act, "p_ul_dbm": _fmt(float(p_ul_dbm)),
        "l_total": total_l, "m_users": cfg.m_users, "trial": trial_idx, "seed": seed,
    }
    rows = []
    try:
        act = select_active(total_l, l_act, cfg.placement, rng)
        h_true = sample_channels(model, cfg.m_users, rng)
        tcfg = TrainingConfig(p_ul_dbm=p_ul_dbm, noise_dbm=cfg.noise_dbm,
                              m_users=cfg.m_users)
        x = simulate_reception(extract_rows(h_true, act), pilots, tcfg, rng)
        h_tilde = ls_estimate(x, pilots, tcfg, row_index_map=act.indices)
    except Exception as exc:  # noqa: BLE001 - crash isolation per trial
        for name in cfg.estimator_names:
            rows.append({**base, "estimator": name, "value": "",
                         "flags": f"error:{type(exc).__name__}:{exc}"})
        return rows
    for name in cfg.estimator_names:
        try:
            if name == "proposed":
                plan = plan_selection(model.r, act, cfg.m_users, cfg.alpha)
                h_hat = estimate_proposed(h_tilde, plan, act, total_l)
            elif name == "random":
                h_hat = estimate_random_baseline(h_tilde, act, total_l, rng)
            else:
                p = int(name.split("omp-p", 1)[1])
                h_hat = estimate_omp_baseline(h_tilde, act, _CTX["dictionary"], p)
            value, nmse_flags = nmse(h_true, h_hat, return_flags=True)
            flags = ";".join((*h_hat.flags, *nmse_flags))
            rows.append({**base, "estimator": name, "value": _fmt(value), "flags": flags})
        except Exception as exc:  # noqa: BLE001
            rows.append({**base, "estimator": name, "value": "",
                         "flags": f"error:{type(exc).__name__}:{exc}"})
    return rows


def _run_tasks(tasks, worker_fn, initializer, cfg: ExperimentConfig):
    """Execute trials, merging results deterministically by task order."""
    if cfg.workers == 1:
        initializer(cfg)
        return [worker_fn(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(
        max_workers=cfg.workers, initializer=initializer, initargs=(cfg,)
    ) as pool:
        chunk = max(1, len(tasks) // (8 * cfg.workers))
        return list(pool.map(worker_fn, tasks, chunksize=chunk))


def _aggregate(trial_rows, sweep_key):
    """Group-by (estimator, sweep value) means; failed trials are skipped."""
    groups: dict = {}
    order = []
    for row in trial_rows:
        if row["value"] == "":
            continue
        key = (row["estimator"], row[sweep_key])
        if key not in groups:
            groups[key] = []
            order.append((key, row["experiment"]))
        groups[key].append(float(row["value"]))
    agg = []
    for (estimator, sweep_value), experiment in order:
        vals = np.array(groups[(estimator, sweep_value)])
        std_err = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
        agg.append({
            "experiment": experiment, "estimator": estimator,
            "sweep_value": _fmt(sweep_value), "mean": _fmt(float(vals.mean())),
            "std_err": _fmt(std_err), "n_trials": len(vals),
        })
    return agg


def _run_nmse_campaign(cfg: ExperimentConfig, experiment: str, points) -> CampaignResult:
    tasks = [
        (experiment, point_idx, trial_idx, l_act, p_ul)
        for point_idx, (l_act, p_ul) in enumerate(points)
        for trial_idx in range(cfg.trials)
    ]
    per_trial = _run_tasks(tasks, _nmse_trial, _init_nmse_worker, cfg)
    trial_rows = [row for rows in per_trial for row in rows]
    sweep_key = "l_act" if experiment == "nmse-vs-active" else "p_ul_dbm"
    result = CampaignResult(name=experiment.replace("-", "_"), value_column="nmse")
    result.trial_rows = trial_rows
    result.agg_rows = _aggregate(trial_rows, sweep_key)
    result.meta = {"config": dataclasses.asdict(cfg), "experiment": experiment,
                   "version": __version__}
    return result


def run_nmse_vs_active(cfg: ExperimentConfig) -> CampaignResult:
    """NMSE sweep over the number of active elements at fixed pilot power."""
    points = [(l_act, cfg.p_ul_dbm) for l_act in cfg.l_act_list]
    return _run_nmse_campaign(cfg, "nmse-vs-active", points)


def run_nmse_vs_power(cfg: ExperimentConfig) -> CampaignResult:
    """NMSE sweep over uplink pilot power at a fixed active-element count."""
    points = [(cfg.l_act, p_ul) for p_ul in cfg.p_ul_dbm_list]
    return _run_nmse_campaign(cfg, "nmse-vs-power", points)


def _init_rank_worker(cfg: ExperimentConfig):
    _CTX.clear()
    _CTX.update({"cfg": cfg, "models": {}})


def _rank_trial(task):
    experiment, point_idx, trial_idx, l_act, total_l = task
    cfg: ExperimentConfig = _CTX["cfg"]
    models = _CTX["models"]
    if total_l not in models:
        side = int(round(np.sqrt(total_l)))
        if side * side != total_l:
            raise ValueError(f"rank experiments use square UPAs; L={total_l}")
        lam = cfg.wavelength
        geom = RisGeometry(l_h=side, l_v=side, d_h=cfg.d_h_frac * lam,
                           d_v=cfg.d_v_frac * lam, wavelength=lam)
        # A * mu forced to 1 so K = R, the stock rank-CDF setting
        models[total_l] = build_covariance(geom, mu=1.0 / geom.element_area)
    model = models[total_l]
    ss = trial_seed_sequence(cfg, experiment, point_idx, trial_idx)
    seed = int(ss.generate_state(1, np.uint64)[0])
    rng = np.random.default_rng(ss)
    base = {"experiment": experiment, "l_act": l_act, "p_ul_dbm": "",
            "l_total": total_l, "m_users": cfg.m_users, "trial": trial_idx,
            "seed": seed, "estimator": "rank"}
    try:
        act = select_active(total_l, l_act, "random-uniform", rng)
        rank = numerical_rank(model.k_sqrt[act.indices - 1, :], rel_tol=cfg.rank_rel_tol)
        return [{**base, "value": str(rank), "flags": ""}]
    except Exception as exc:  # noqa: BLE001
        return [{**base, "value": "", "flags": f"error:{type(exc).__name__}:{exc}"}]


def run_rank_cdf(cfg: ExperimentConfig) -> CampaignResult:
    """Empirical rank CDF of the active-row covariance factor per (L_act, L) pair."""
    experiment = "rank-cdf"
    tasks = [
        (experiment, point_idx, trial_idx, l_act, total_l)
        for point_idx, (l_act, total_l) in enumerate(cfg.rank_pairs)
        for trial_idx in range(cfg.trials)
    ]
    per_trial = _run_tasks(tasks, _rank_trial, _init_rank_worker, cfg)
    trial_rows = [row for rows in per_trial for row in rows]
    result = CampaignResult(name="rank_cdf", value_column="rank")
    result.trial_rows = trial_rows
    # CDF table per (L_act, L) pair, recomputable from the trial rows
    for l_act, total_l in cfg.rank_pairs:
        ranks = np.array([
            int(r["value"]) for r in trial_rows
            if r["l_act"] == l_act and r["l_total"] == total_l and r["value"] != ""
        ])
        values, counts = np.unique(ranks, return_counts=True)
        cdf = np.cumsum(counts) / len(ranks)
        for v, c in zip(values, cdf):
            result.cdf_rows.append({
                "experiment": experiment, "l_act": l_act, "l_total": total_l,
                "rank": int(v), "cdf": _fmt(float(c)),
            })
    # agg rows give the mean rank per pair; sweep value identifies the pair
    for pair_idx, (l_act, total_l) in enumerate(cfg.rank_pairs):
        vals = np.array([
            int(r["value"]) for r in trial_rows
            if r["l_act"] == l_act and r["l_total"] == total_l and r["value"] != ""
        ], dtype=float)
        if len(vals) == 0:
            continue
        std_err = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
        result.agg_rows.append({
            "experiment": experiment, "estimator": "rank",
            "sweep_value": f"{l_act}of{total_l}", "mean": _fmt(float(vals.mean())),
            "std_err": _fmt(std_err), "n_trials": len(vals),
        })
    result.meta = {"config": dataclasses.asdict(cfg), "experiment": experiment,
                   "version": __version__}
    return result


def _write_table(path: str, columns, rows, value_column: str):
    header = [value_column if c == "value" else c for c in columns]
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(row[c]) for c in columns))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def write_csv(result: CampaignResult, out_dir: str) -> dict:
    """Persist a campaign: <name>_trials.csv, <name>_agg.csv, <name>_meta.txt
    (plus <name>_cdf.csv for rank campaigns). Returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    try:
        trials_path = os.path.join(out_dir, f"{result.name}_trials.csv")
        _write_table(trials_path, TRIAL_COLUMNS, result.trial_rows, result.value_column)
        paths["trials"] = trials_path
        agg_path = os.path.join(out_dir, f"{result.name}_agg.csv")
        _write_table(agg_path, AGG_COLUMNS, result.agg_rows, "")
        paths["agg"] = agg_path
        if result.cdf_rows:
            cdf_path = os.path.join(out_dir, f"{result.name}_cdf.csv")
            _write_table(cdf_path, CDF_COLUMNS, result.cdf_rows, "")
            paths["cdf"] = cdf_path
        meta_path = os.path.join(out_dir, f"{result.name}_meta.txt")
        with open(meta_path, "w", encoding="utf-8") as f:
            f.write(yaml.safe_dump(result.meta, sort_keys=True))
        paths["meta"] = meta_path
    except OSError as exc:
        raise OSError(f"failed writing campaign output under {out_dir}: {exc}") from exc
    return paths


def run_experiment(cfg: ExperimentConfig, experiment: str) -> CampaignResult:
    runners = {
        "nmse-vs-active": run_nmse_vs_active,
        "nmse-vs-power": run_nmse_vs_power,
        "rank-cdf": run_rank_cdf,
    }
    if experiment not in runners:
        raise ValueError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")
    return runners[experiment](cfg)
