"""Sampling random unitaries through the Euler-angle route.

Draws a batch of matrices with the angle sampler, checks the first-entry
law |U_11|^2 ~ Beta(1, n-1) against the independent QR construction, and
prints the per-entry second moments. With matplotlib installed it also
saves a histogram comparing the two routes.
"""

import math

import numpy as np

from mubsearch.hurwitz import qr_haar_sample, sample_unitaries

N = 4
COUNT = 20_000
rng = np.random.default_rng(2024)

vectors, mats = sample_unitaries(N, COUNT, rng)
print(f"drew {COUNT} unitaries of size {N} ({vectors.shape[1]} angles each)")

# every entry should average to 1/n in squared modulus
moments = np.mean(np.abs(mats) ** 2, axis=0)
se = math.sqrt((N - 1) / (N * N * (N + 1)) / COUNT)
print(f"mean |U_ij|^2: target {1 / N:.5f}, "
      f"range [{moments.min():.5f}, {moments.max():.5f}], "
      f"standard error {se:.2e}")

ours = np.abs(mats[:, 0, 0]) ** 2
oracle = np.array([abs(qr_haar_sample(N, rng)[0, 0]) ** 2
                   for _ in range(COUNT)])
print(f"|U_11|^2 mean: angles {ours.mean():.5f}, qr {oracle.mean():.5f}, "
      f"exact {1 / N:.5f}")

# Beta(1, n-1) has cdf 1 - (1-x)^(n-1); compare a few quantiles
for q in (0.25, 0.5, 0.9):
    exact = 1.0 - (1.0 - q) ** (1.0 / (N - 1))
    print(f"quantile {q:.2f}: angles {np.quantile(ours, q):.5f}, "
          f"qr {np.quantile(oracle, q):.5f}, beta law {exact:.5f}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed, skipping the histogram")
else:
    bins = np.linspace(0, 1, 60)
    plt.hist(ours, bins=bins, density=True, alpha=0.6, label="angle sampler")
    plt.hist(oracle, bins=bins, density=True, histtype="step",
             label="qr oracle")
    x = np.linspace(0, 1, 400)
    plt.plot(x, (N - 1) * (1 - x) ** (N - 2), "k--", label="beta(1, n-1)")
    plt.xlabel("|U_11|^2")
    plt.ylabel("density")
    plt.legend()
    plt.tight_layout()
    plt.savefig("haar_first_entry.png", dpi=120)
    print("wrote haar_first_entry.png")
