"""From a logger export to a shelf-life estimate.

Loggers export one CSV per tag. The parser is strict: a bad row rejects the
file. The profile is measured in hours since trip start.
"""

# %%
from datetime import datetime, timezone

from freshroute.analysis import product_reference
from freshroute.ingest import emit_sensor_csv, log_to_profile, parse_sensor_csv, synthetic_sensor_log
from freshroute.kinetics import shelf_life_over_profile, time_weighted_mean
from freshroute.scenarios import default_catalog

start = datetime(2024, 5, 1, 6, 0, tzinfo=timezone.utc)
text = emit_sensor_csv(synthetic_sensor_log("TAG-17", start, 48, seed=4, base_temperature=13.0))
print(text.splitlines()[:3])

# %%
log = parse_sensor_csv(text)
profile = log_to_profile(log)
banana = default_catalog()[1]
print(f"{len(log)} records over {profile.duration:.2f} h, mean {time_weighted_mean(profile):.2f} C")
print(f"banana shelf life: {shelf_life_over_profile(product_reference(banana), banana.q10, profile):.2f} d")

# %% A duplicated reading is rejected with its line number
broken = text.replace(text.splitlines()[3], text.splitlines()[2])
try:
    parse_sensor_csv(broken)
except ValueError as exc:
    print("rejected:", exc)
