"""Parameter sets of the six reference runs fig-a ... fig-f.

Each run fixes p, q, m, N, mu1, mu2 and eps; ``reference`` holds the
expected Omega and the approximate blow-up (or final) time.  The mass terms
are set to zero (largest admissible discriminant); neither the region
formulas nor the ODE model depend on them.
"""

from __future__ import annotations

_AB = dict(N=1, m=1.0, mu1=4.0, mu2=2.0, nu1_sq=0.0, nu2_sq=0.0, p=2.0, q=1.5)
_CD = dict(N=1, m=1.0, mu1=0.0, mu2=2.0, nu1_sq=0.0, nu2_sq=0.0, p=2.0, q=1.5)
_EF = dict(N=2, m=1.0, mu1=3.0, mu2=5.0, nu1_sq=0.0, nu2_sq=0.0, p=2.0, q=1.25)

PRESETS = {
    "fig-a": {"params": {**_AB, "eps": 0.1}, "eps_list": [0.1, 0.01], "reference": {"omega": 0.75, "time": 37.0}},
    "fig-b": {"params": {**_AB, "eps": 0.01}, "eps_list": [0.1, 0.01], "reference": {"omega": 0.75, "time": 990.0}},
    "fig-c": {"params": {**_CD, "eps": 0.1}, "eps_list": [0.1, 0.01], "reference": {"omega": 2.0, "time": 8.0}},
    "fig-d": {"params": {**_CD, "eps": 0.01}, "eps_list": [0.1, 0.01], "reference": {"omega": 2.0, "time": 26.0}},
    "fig-e": {"params": {**_EF, "eps": 0.1}, "eps_list": [0.1, 0.01], "reference": {"omega": 0.0, "time": 960.0}},
    "fig-f": {"params": {**_EF, "eps": 0.01}, "eps_list": [0.1, 0.01], "reference": {"omega": 0.0, "time": 9600.0}},
}

# integrator settings shared by every preset
PRESET_DEFAULTS = {
    "horizon": 1e6,
    "thresholds": [1e6, 1e8, 1e10],
    "tolerances": [1e-8, 1e-12],
    "R": 1.0,
}
