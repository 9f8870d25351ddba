"""Engineered expansion protocol: scaling factor and the frequency profile
it requires, including a sub-cutoff case where the trap inverts."""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import superotto as so

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

params = so.OscillatorParams()
gamma = 4.0
tau_c = so.cutoff_time(params.omega0, params.omega0 / gamma**2)
print(f"gamma = {gamma}, cutoff time tau_c = {tau_c:.6f}")
print(f"(gamma = 2 for comparison: tau_c = {so.cutoff_time(1.0, 0.25):.6f})")

fig, (ax_b, ax_w) = plt.subplots(1, 2, figsize=(9.5, 3.6))
for tau, style in [(4.0, "C3--"), (10.0, "C0-"), (20.0, "C2-")]:
    spec = so.StrokeSpec.from_gamma(params, gamma, tau)
    s = np.linspace(0.0, 1.0, 400)
    b = so.scaling_factor(spec, s * tau)[0]
    w2 = so.frequency_squared(spec, s * tau)
    label = f"tau = {tau:g}" + (" (< tau_c)" if tau < tau_c else "")
    ax_b.plot(s, b, style, label=label)
    ax_w.plot(s, w2, style, label=label)
    print(f"tau = {tau:5.1f}: min omega^2 = {w2.min():+.4f}"
          + ("  <- inverted trap" if w2.min() < 0 else ""))

ax_b.set(xlabel="t / tau", ylabel="b(t)", title="scaling factor")
ax_w.set(xlabel="t / tau", ylabel="omega^2(t)", title="engineered frequency")
ax_w.axhline(0.0, color="k", lw=0.6)
ax_b.legend(fontsize=8)
fig.tight_layout()
fig.savefig(os.path.join(OUT, "01_protocol.png"), dpi=150)
print("wrote", os.path.join(OUT, "01_protocol.png"))

# round trip: integrate the Ermakov equation driven by the engineered
# omega^2(t) and compare against the closed-form polynomial
spec = so.StrokeSpec.from_gamma(params, gamma, 10.0)
sol = so.ermakov_forward(spec)
ts = np.linspace(0.0, spec.tau, 501)
err = np.max(np.abs(sol(ts)[0] - so.scaling_factor(spec, ts)[0]))
print(f"Ermakov round-trip sup error over the stroke: {err:.3e}")
