"""Trade-offs and sensitivities.

Across scenarios the adaptive outcomes trace a frontier between trip time
and freshness deviation. Sweeping the correction factor and the ambient
noise level replays the same random draws at every grid point, so the
differences are driven by the parameter rather than sampling noise.
"""

# %%
from freshroute.analysis import adaptive_outcomes, paired_trend_holds, pareto_frontier, sweep_beta, sweep_tau
from freshroute.scenarios import experiment_instance

instance = experiment_instance(seed=3)
front = pareto_frontier(adaptive_outcomes(instance, instance.scenarios))
for o in front:
    print(f"scenario {o.scenario_id:2d}: {o.trip_hours:6.2f} h, deviation {o.freshness_deviation:6.2f}")

# %% Correction strength
beta = sweep_beta(instance, [0.0, 0.1, 0.2, 0.3, 0.4, 0.5], replications=200, seed=1)
for b, d, life in zip(beta.grid, beta.mean_deviation, beta.mean_final_shelf_life):
    print(f"beta {b:.1f}: deviation {d:6.2f}, shelf life {life:5.2f} d")
print("non-increasing at 99%:", all(paired_trend_holds(beta.deviations, "decreasing")))

# %% Ambient noise
tau = sweep_tau(instance, [0.25, 0.5, 1.0, 1.5, 2.0], replications=200, seed=1)
for s, d, life in zip(tau.grid, tau.mean_deviation, tau.mean_final_shelf_life):
    print(f"sigma {s:.2f}: deviation {d:6.2f}, shelf life {life:5.2f} d")
