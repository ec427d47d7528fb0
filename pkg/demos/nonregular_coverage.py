"""Value intervals when part of the population is indifferent to treatment.

In settings s4 and s5 the covariate x1 is discrete, and x'beta = 0 on a set
of positive probability (a quarter and a half of the population). The
optimal rule is not unique there, yet the value interval keeps its level.
"""
from otr import BootstrapConfig, SimulationSpec, run_coverage_study
from otr.simulate import nonregular_mass
from otr._rng import stream

for setting in ("s4", "s5"):
    spec = SimulationSpec(setting, n=500, replicates=60, seed=11,
                          bootstrap=BootstrapConfig(200))
    mass = nonregular_mass(spec, 100000, stream(0, 2))
    m = run_coverage_study(spec)
    print(f"{setting}: boundary mass {mass:.2f}")
    print(f"   true optimal value {m.true_value:.3f}, random policy {m.random_value:.3f}")
    print(f"   value CI coverage {m.value_coverage:.2f}, average length {m.value_avg_length:.3f}")
    print(f"   covers the random-policy value in {m.random_policy_coverage:.0%} of runs")
