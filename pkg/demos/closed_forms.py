"""Gallery of the closed-form oracles used to validate the simulator."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gkp_breeding import binomial_gaussian, cat_fidelity, closed_form_pmax, closed_form_pn

fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))

ts = np.linspace(0.01, 120, 600)
for n in (2, 6, 10, 16):
    axes[0].semilogy(ts, [closed_form_pn(n, t) for t in ts], label=f"n={n}")
    axes[0].plot(4 * n, closed_form_pmax(n), "k.", ms=8)
axes[0].set_xlabel("t")
axes[0].set_ylabel("P(n)")
axes[0].set_title("heralding probability (dots: maxima at t = 4n)")
axes[0].legend(fontsize=8)

ns = np.arange(1, 41)
axes[1].plot(ns, [1 - cat_fidelity(n) for n in ns], "o-", label="1 - F_n")
axes[1].plot(ns, 0.03 / ns, "--", label="0.03/n")
axes[1].set_yscale("log")
axes[1].set_xlabel("n")
axes[1].set_title("two-peak approximation infidelity")
axes[1].legend()

big_n = 24
ls = np.arange(big_n + 1)
exact = np.array([binomial_gaussian(big_n, int(l))[0] for l in ls])
approx = np.array([binomial_gaussian(big_n, int(l))[1] for l in ls])
axes[2].plot(ls, exact, "o", label="binomial")
axes[2].plot(ls, approx, "-", label="Gaussian envelope")
axes[2].set_xlabel("l")
axes[2].set_title(f"envelope approximation, N={big_n}")
axes[2].legend()

fig.tight_layout()
fig.savefig("demo_closed_forms.png", dpi=140)
print("wrote demo_closed_forms.png")
