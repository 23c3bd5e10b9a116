"""Shelf life under warmer-than-ideal transit.

Apples keep about 30 days at 5 C. A route that averages a little above that
costs a few days; one that drifts further costs more.
"""

# %%
from freshroute.kinetics import (
    ArrheniusParams,
    Q10Params,
    ShelfLifeRef,
    TemperatureProfile,
    arrhenius_shelf_life,
    q10_shelf_life,
    shelf_life_by_rate_integration,
    shelf_life_over_profile,
)

apple = ShelfLifeRef.from_celsius(30.0, 5.0)
q10 = Q10Params(2.0)

for temp in (5.0, 6.23, 8.68):
    print(f"mean transit {temp:5.2f} C -> {q10_shelf_life(apple, q10, temp):6.2f} days")

# %% The ratio between a well-corrected and a drifting route
ratio = q10_shelf_life(apple, q10, 6.23) / q10_shelf_life(apple, q10, 8.68)
print(f"corrected route keeps {100 * (ratio - 1):.1f}% more shelf life")

# %% A logged profile: average first, then one Q10 evaluation
profile = TemperatureProfile((0.0, 1.0, 2.0, 3.0), (5.0, 7.5, 9.0, 6.0))
print("time-weighted:", round(shelf_life_over_profile(apple, q10, profile), 3), "days")
# integrating the decay rate instead charges more for the peak
print("rate-integrated:", round(shelf_life_by_rate_integration(apple, q10, profile), 3), "days")

# %% Arrhenius form, for products with a measured activation energy
ref = ShelfLifeRef(720.0, 278.15)  # hours at 5 C
arr = ArrheniusParams(preexponential_factor=5e9, activation_energy=6.0e4)
for kelvin in (278.15, 283.15, 288.15):
    print(f"{kelvin - 273.15:4.1f} C -> {arrhenius_shelf_life(ref, arr, kelvin):7.1f} h")
