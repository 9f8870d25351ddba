"""Four-stroke engine bookkeeping: the default operating point, the engine
window in cold-bath temperature, and the speed-limit bound on power."""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import superotto as so

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

params = so.OscillatorParams()

cyc = so.CycleSpec(omega0=1.0, omega_f=1.0 / 16.0, beta_hot=1.0,
                   beta_cold=20.0, tau1=10.0, tau3=10.0)
rep = so.run_superadiabatic_cycle(cyc, params)
print("default cycle (omega_f = omega0/16, beta = 1, beta_cold = 20, tau = 10):")
print(f"  w1 = {rep.w1:+.6f}   q2 = {rep.q2:+.6f}")
print(f"  w3 = {rep.w3:+.6f}   q4 = {rep.q4:+.6f}")
print(f"  net work   = {rep.net_work:+.6f}  (engine: {rep.is_engine})")
print(f"  efficiency = {rep.efficiency:.6f}  (Otto closed form "
      f"{rep.otto_efficiency_closed_form}, Carnot {1 - 1 / 20})")
print(f"  power = {rep.power:.6e}, speed-limit bound = {rep.qsl_bound:.6e}")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 3.6))

# engine window: net work vs cold-bath inverse temperature
bcs = np.linspace(2.0, 40.0, 150)
net = [so.run_superadiabatic_cycle(
    so.CycleSpec(omega0=1.0, omega_f=1.0 / 16.0, beta_hot=1.0,
                 beta_cold=float(b), tau1=10.0, tau3=10.0), params).net_work
    for b in bcs]
ax1.plot(bcs, net, "C0-")
ax1.axhline(0.0, color="k", lw=0.6)
ax1.axvline(16.0, color="C3", lw=0.8, ls="--")
ax1.annotate("engine threshold\nbeta_c = beta omega0/omega_f", (16.5, 0.02),
             fontsize=7)
ax1.set(xlabel="beta_cold", ylabel="net work", title="engine window")

# power and its bound vs stroke duration
taus = np.linspace(8.2, 40.0, 40)
pows, bounds = [], []
for t in taus:
    r = so.run_superadiabatic_cycle(
        so.CycleSpec(omega0=1.0, omega_f=1.0 / 16.0, beta_hot=1.0,
                     beta_cold=20.0, tau1=float(t), tau3=float(t)), params)
    pows.append(r.power)
    bounds.append(r.qsl_bound)
ax2.plot(taus, pows, "C0-", label="power")
ax2.plot(taus, bounds, "C1--", label="speed-limit bound")
ax2.set(xlabel="tau (each work stroke)", ylabel="power",
        title="bound stays above the power", yscale="log")
ax2.legend(fontsize=8)
fig.tight_layout()
fig.savefig(os.path.join(OUT, "04_otto_cycle.png"), dpi=150)
print("wrote", os.path.join(OUT, "04_otto_cycle.png"))
