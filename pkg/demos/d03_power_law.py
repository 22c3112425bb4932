"""
Is a degree distribution a power law?
=====================================

Fit a discrete power law by maximum likelihood, choose x_min by the KS scan,
and estimate a goodness-of-fit p-value by semi-parametric bootstrap.
"""

import numpy as np

from syscallnet.powerlaw import power_law_test, sample_power_law

rng = np.random.default_rng(0)
heavy = sample_power_law(2.5, 5, 3000, rng)
fit = power_law_test(heavy, n_bootstrap=200, seed=1)
print(f"power law:  x_min={fit.x_min} alpha={fit.alpha:.3f} KS={fit.ks_statistic:.4f} "
      f"p={fit.p_value:.2f} plausible={fit.plausible}")

# a light (geometric) tail for contrast
light = 1 + rng.geometric(0.3, 3000)
fit = power_law_test(light, n_bootstrap=200, seed=1)
print(f"geometric:  x_min={fit.x_min} alpha={fit.alpha:.3f} KS={fit.ks_statistic:.4f} "
      f"p={fit.p_value:.2f} plausible={fit.plausible}")

# with x_min free the scan can retreat far into a light tail, where a steep
# power law fits a handful of points; watch n_tail and alpha above
print(fit.to_json())
