"""Four planning models and the adaptive policy on one synthetic instance.

Ten stops, four products, fifty disturbance scenarios. Each static model
plans with a different view of travel time: nominal, worst case, scenario
average, or mean plus a variance penalty. The hours column is the tour time
under that view.
"""

# %%
from freshroute.analysis import compare_models, comparison_csv
from freshroute.scenarios import experiment_instance

instance = experiment_instance(seed=7)
rows = compare_models(instance)
print(comparison_csv(rows))

# %% Ordering across a batch of seeds
hits = 0
for seed in range(20):
    det, rob, sto, dro = (r.total_hours for r in compare_models(experiment_instance(seed))[:4])
    hits += det <= sto <= dro <= rob
print(f"det <= stochastic <= DRO <= robust on {hits}/20 seeds")
