"""The semigroup kernel: negative lobes and gradient-norm scalings.

The kernel of the linear part is not a probability density: it develops
negative lobes (failure of the maximum principle), which is what lets
constant states destabilize.  Its gradient norms blow up at small time at
the pure-diffusion rates t^{-3/4} (L2) and t^{-1/2} (L1); the fitted
envelope constants K0 and K1 feed the Picard step-size control.
"""

import numpy as np

from fowler import grad_kernel_norms, kernel_field, make_grid, semigroup_residual

grid = make_grid(8192, 40.0)

for t in (0.1, 0.5):
    snap = kernel_field(t, grid)
    print(f"K(t={t}): mass = {snap.mass:.12f}, min = {snap.field.values.min():+.4f}")

print(f"semigroup residual K(0.1)*K(0.4) vs K(0.5): "
      f"{semigroup_residual(0.1, 0.4, grid):.2e}")

times = np.logspace(-4, 0, 17)
fit = grad_kernel_norms(times, grid)
print(f"log-log slopes over the smallest decade: "
      f"L2 {fit.slope_l2:+.4f} (heat: -3/4), L1 {fit.slope_l1:+.4f} (heat: -1/2)")
print(f"envelope constants: K0 = {fit.K0:.4f}, K1 = {fit.K1:.4f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    for t, color in ((0.1, "tab:red"), (0.5, "tab:blue")):
        snap = kernel_field(t, grid)
        ax1.plot(grid.points, snap.field.values, color=color, label=f"t = {t}")
    ax1.set_xlim(-6, 6)
    ax1.axhline(0, color="k", lw=0.8)
    ax1.set_xlabel("x")
    ax1.set_ylabel("K(t, x)")
    ax1.legend()

    ax2.loglog(fit.times, fit.l2_grad, "o-", label="$\\|\\partial_x K\\|_{L^2}$")
    ax2.loglog(fit.times, fit.l1_grad, "s-", label="$\\|\\partial_x K\\|_{L^1}$")
    ax2.loglog(fit.times, fit.l2_grad[0] * (fit.times / fit.times[0]) ** -0.75,
               "k:", lw=1, label="$t^{-3/4}$, $t^{-1/2}$")
    ax2.loglog(fit.times, fit.l1_grad[0] * (fit.times / fit.times[0]) ** -0.5,
               "k:", lw=1)
    ax2.set_xlabel("t")
    ax2.legend()
    fig.tight_layout()
    fig.savefig("demos_kernel_gallery.png", dpi=120)
    print("wrote demos_kernel_gallery.png")
except ImportError:
    print("matplotlib not installed; skipping the figure")
