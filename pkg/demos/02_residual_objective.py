"""What the residual objective measures, on sets where the answer is known."""

import numpy as np

from mubsearch.constructions import fourier_matrix, prime_mub_set
from mubsearch.hurwitz import compose_unitary_from_vector, sample_haar_vector
from mubsearch.objective import (
    MubObjective,
    pair_residual,
    residual_report,
    verify_mub,
)

rng = np.random.default_rng(7)

# the complete set for a prime dimension sits at an exact zero
bs = prime_mub_set(5)
report = residual_report(bs)
print(f"prime construction d=5: {bs.m} bases, "
      f"residual total {report.total:.3e}")

ok, _ = verify_mub(bs)
print(f"verify_mub: {'MU set' if ok else 'not an MU set'}")

# two copies of the same basis are maximally biased: the closed form is d-1
eye = np.eye(5, dtype=np.complex128)
print(f"identity pair residual: {pair_residual(eye, eye):.12f} "
      f"(closed form {5 - 1})")

# the Fourier matrix is unbiased to the identity in every dimension,
# prime or not
f6 = fourier_matrix(6)
print(f"identity/Fourier pair residual at d=6: "
      f"{pair_residual(np.eye(6, dtype=np.complex128), f6):.3e}")

# a random pair of bases lands at a residual of order one
u = compose_unitary_from_vector(sample_haar_vector(6, rng), 6)
v = compose_unitary_from_vector(sample_haar_vector(6, rng), 6)
print(f"random pair residual at d=6: {pair_residual(u, v):.4f}")

# the optimizer-facing callable maps flat angle vectors to the same number
obj = MubObjective(6, 3)
x = np.concatenate([sample_haar_vector(6, rng) for _ in range(obj.n_free)])
print(f"d=6 m=3 objective at a random point: {obj(x):.4f} "
      f"({obj.n_vars} free angles)")

# gauge fixing removes one basis without changing the residual landscape:
# multiplying every basis by a fixed unitary on the left is invisible
w = compose_unitary_from_vector(sample_haar_vector(6, rng), 6)
before = pair_residual(u, v)
after = pair_residual(w @ u, w @ v)
print(f"left-multiplication invariance: {abs(before - after):.2e}")
