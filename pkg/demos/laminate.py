"""Effective conductivity of striped two-material layouts.

Across the stripes heat sees the harmonic mean, along them the arithmetic
mean; any other arrangement of the same volume sits in between.

    python3 demos/laminate.py
"""

from radopt.diagnostics import laminate_bounds_check

print("theta   layers   across      harmonic   along       arithmetic")
for theta in (0.25, 0.5, 0.75):
    for layers in (8, 64):
        r = laminate_bounds_check(1.0, 10.0, theta, layers=layers)
        print(f"{theta:5.2f}   {layers:6d}   {r.kappa_perp:.6f}   {r.harmonic:.6f}   {r.kappa_par:.6f}   {r.arithmetic:.6f}")
