"""The two search engines on classic test problems."""

import numpy as np

from mubsearch.hurwitz import sample_haar_vector
from mubsearch.objective import MubObjective
from mubsearch.optim import (
    AnnealingConfig,
    NelderMeadConfig,
    nelder_mead,
    simulated_annealing,
)


def rosenbrock(v):
    return float(100.0 * (v[1] - v[0] ** 2) ** 2 + (1.0 - v[0]) ** 2)


def tilted_well(v):
    return float((v[0] ** 2 - 1.0) ** 2 + 0.3 * v[0])


x, f, trace = nelder_mead(rosenbrock, np.array([-1.2, 1.0]))
print(f"nelder-mead on rosenbrock: f={f:.2e} at ({x[0]:.6f}, {x[1]:.6f}), "
      f"{trace.evaluations} evaluations")

# the simplex dives into whichever basin it starts in; from +1 it stays there
x, f, _ = nelder_mead(tilted_well, np.array([1.0]))
print(f"nelder-mead on the tilted well from +1: x={x[0]:+.4f} (local)")

# annealing crosses the barrier while the temperature is still high
cfg = AnnealingConfig(proposals_per_step=3000, max_evals=300_000, target=-1.0)
x, f, _ = simulated_annealing(tilted_well, np.array([1.0]), cfg, rng=0)
print(f"annealing on the tilted well from +1:  x={x[0]:+.4f} (global)")

# a two-basis problem in dimension 2 is easy enough for the simplex alone
obj = MubObjective(2, 2)
rng = np.random.default_rng(5)
x0 = sample_haar_vector(2, rng)
x, f, trace = nelder_mead(obj, x0, NelderMeadConfig())
print(f"d=2 m=2 from a random start: {obj(x0):.4f} -> {f:.2e} "
      f"in {trace.evaluations} evaluations")
