"""
Correlated Rayleigh channels via the coloring transform
=======================================================

Draws UE-RIS channels as H = K^(1/2) Z, then checks two statistical
fingerprints against theory: the empirical column covariance converges to K,
and the squared norms of two element rows correlate as the square of their
spatial correlation.
"""

import numpy as np

from ris_chest import RisGeometry, build_covariance, sample_channels

lam = 299_792_458.0 / 3.5e9
geom = RisGeometry(l_h=8, l_v=8, d_h=lam / 8, d_v=lam / 8, wavelength=lam)
model = build_covariance(geom, mu=1.0 / geom.element_area)
rng = np.random.default_rng(2024)

# Empirical covariance over many independent columns
n_samples = 50_000
h = sample_channels(model, n_samples, rng)
cov = h.entries @ h.entries.conj().T / n_samples
err = np.linalg.norm(cov - model.k) / np.linalg.norm(model.k)
print(f"covariance check over {n_samples} draws: relative Frobenius error {err:.4f}")

# Squared-norm correlation law: corr(|H(a,:)|^2, |H(b,:)|^2) = R_ab^2
n_draws, m_users = 10_000, 8
h = sample_channels(model, m_users * n_draws, rng)
norms2 = (np.abs(h.entries.reshape(64, n_draws, m_users)) ** 2).sum(axis=2)
print(f"\nsquared-norm correlation over {n_draws} draws of {m_users}-user channels:")
print(f"{'pair':>10} {'R_ab':>8} {'R_ab^2':>8} {'measured':>9}")
for a, b in [(0, 1), (0, 2), (0, 4), (0, 9), (10, 53)]:
    rho = np.corrcoef(norms2[a], norms2[b])[0, 1]
    print(f"  ({a + 1:3d},{b + 1:3d}) {model.r[a, b]:+8.4f} {model.r[a, b] ** 2:8.4f} {rho:9.4f}")
