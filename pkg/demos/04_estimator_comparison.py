"""
End-to-end estimator comparison
===============================

Walks one full trial by hand (placement, channel draw, pilot reception, LS
sub-channel estimate, extrapolation to the passive elements), then runs a
small Monte-Carlo sweep through the campaign harness and prints the mean
NMSE of the proposed estimator against the random-coefficient and OMP
baselines.
"""

import numpy as np

from ris_chest import (
    ExperimentConfig,
    TrainingConfig,
    build_covariance,
    build_upa_dictionary,
    estimate_omp_baseline,
    estimate_proposed,
    estimate_random_baseline,
    extract_rows,
    generate_pilots,
    large_scale_coefficient,
    ls_estimate,
    nmse,
    plan_selection,
    run_nmse_vs_active,
    sample_channels,
    select_active,
    simulate_reception,
)
from ris_chest.channel import PathLossParams

# One trial, step by step -----------------------------------------------------
cfg = ExperimentConfig()
geom = cfg.geometry
mu = large_scale_coefficient(PathLossParams())
model = build_covariance(geom, mu=mu)
rng = np.random.default_rng(99)

m_users, l_act = cfg.m_users, 16
act = select_active(geom.n_elements, l_act, "random-uniform", rng)
h_true = sample_channels(model, m_users, rng)
pilots = generate_pilots(m_users)
tcfg = TrainingConfig(p_ul_dbm=10.0, noise_dbm=-114.0, m_users=m_users)
x = simulate_reception(extract_rows(h_true, act), pilots, tcfg, rng)
h_tilde = ls_estimate(x, pilots, tcfg, row_index_map=act.indices)

plan = plan_selection(model.r, act, m_users, alpha=5.0)
proposed = estimate_proposed(h_tilde, plan, act, geom.n_elements)
random_est = estimate_random_baseline(h_tilde, act, geom.n_elements, rng)
dictionary = build_upa_dictionary(geom, 2 * geom.l_h, 2 * geom.l_v)
omp = estimate_omp_baseline(h_tilde, act, dictionary, p=10)

print(f"single trial, L_act = {l_act} of {geom.n_elements}, P_UL = 10 dBm:")
print(f"  proposed           NMSE = {nmse(h_true, proposed):.4f}")
print(f"  random coefficient NMSE = {nmse(h_true, random_est):.4f}")
print(f"  OMP (p = 10)       NMSE = {nmse(h_true, omp):.4f}")

# A small campaign through the harness ---------------------------------------
sweep_cfg = ExperimentConfig(
    l_act_list=(8, 16, 32), trials=100,
    estimators=("proposed", "random", "omp"), omp_p=(10,),
    master_seed=7, workers=4,
)
result = run_nmse_vs_active(sweep_cfg)
print(f"\nmean NMSE over {sweep_cfg.trials} trials per point:")
print(f"{'L_act':>6} " + "".join(f"{name:>12}" for name in sweep_cfg.estimator_names))
for l_act in sweep_cfg.l_act_list:
    means = {
        a["estimator"]: float(a["mean"])
        for a in result.agg_rows if a["sweep_value"] == str(l_act)
    }
    # OMP needs p <= L_act; points where it cannot run show up as flagged
    # trials with no aggregate
    cells = "".join(
        f"{means[n]:>12.4f}" if n in means else f"{'--':>12}"
        for n in sweep_cfg.estimator_names
    )
    print(f"{l_act:>6} {cells}")
print(
    "\nThe proposed estimator improves steadily with more active elements; "
    "random coefficients barely move."
)
