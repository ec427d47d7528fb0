"""The nonsmooth value objective is a step function of beta. On small
samples we can find its exact maximum by enumeration and see how the
smoothed estimate compares."""
import numpy as np

from otr import (GAUSSIAN_CDF, estimate_regime, exact_nonsmooth_argmax, nonsmooth_objective,
                 SimulationSpec, generate_dataset)
from otr._rng import stream

spec = SimulationSpec("s1", n=150)
data, _ = generate_dataset(spec, stream(3, 0))
# the enumeration is cubic in n for three columns, so drop x3
data = data.drop_columns(["x3"])

beta_exact, m_exact = exact_nonsmooth_argmax(data)
est = estimate_regime(data, GAUSSIAN_CDF)
print("exact maximizer :", np.round(beta_exact, 3), " M_n =", round(m_exact, 4))
print("smoothed fit    :", np.round(est.beta, 3), " M_n =",
      round(nonsmooth_objective(data, est.beta), 4))

# Random directions never beat the enumeration
rng = np.random.default_rng(1)
trials = [nonsmooth_objective(data, b) for b in rng.standard_normal((2000, 3))]
print("best of 2000 random directions:", round(max(trials), 4))

# The exact maximizer overfits: compare the two rules on fresh draws.
X = np.column_stack([np.ones(20000), rng.standard_normal((20000, 2))])
print("agreement of the two rules:", np.mean((X @ beta_exact > 0) == (X @ est.beta > 0)))
