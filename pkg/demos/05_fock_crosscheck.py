"""Gaussian route vs truncated-basis oracle on a short stroke: moment and
entropy discrepancies along the stroke, plus the two-measurement work
distribution at mid-stroke.

Uses gamma=2 with a modest truncation so the whole script runs in seconds;
the CLI command `superotto oracle-check` does the same at the default
operating point."""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import superotto as so
from superotto import fock_oracle as fo

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

params = so.OscillatorParams()
tau = 2.0 * so.cutoff_time(1.0, 0.25)
spec = so.StrokeSpec.from_gamma(params, 2.0, tau)
cfg = fo.FockConfig(dim=128, basis_omega=fo.geometric_basis(spec))

times = np.linspace(0.0, spec.tau, 5)
table = fo.discrepancy_table(params, spec, times, cfg)
print(f"gamma = 2, tau = {tau:.4f}, fock dim = {cfg.dim}")
print("worst Gaussian-vs-Fock discrepancy per quantity:")
for key, val in sorted(table["max_discrepancy"].items()):
    print(f"  {key:12s} {val:.3e}")

# work distribution at mid-stroke from the same propagator snapshots
U = fo.propagate(params, spec, spec.tau / 2, cfg)
dist = fo.work_distribution(params, spec, spec.tau / 2, cfg, U=U)
m1 = fo.moment(dist, 1)
std = np.sqrt(fo.moment(dist, 2) - m1**2)
print(f"\nmid-stroke two-measurement moments: <W> = {m1:.6f}, std = {std:.6f}")
print(f"Gaussian route:                     <W> = "
      f"{so.mean_work_sta(params, spec, spec.tau / 2):.6f}, std = "
      f"{so.work_std(params, spec, spec.tau / 2):.6f}")

keep = dist.prob > 1e-12
fig, ax = plt.subplots(figsize=(5.2, 3.8))
ax.vlines(dist.w[keep], 0.0, dist.prob[keep], color="C0", lw=1.2)
ax.set(xlabel="work atom", ylabel="probability", yscale="log",
       title=f"work distribution at t = tau/2 (atoms > 1e-12)")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "05_work_distribution.png"), dpi=150)
print("wrote", os.path.join(OUT, "05_work_distribution.png"))
