"""Interface balance laws: Rankine-Hugoniot speeds, a surfactant on an
expanding sphere, and one balance read in three, two and one dimension."""

import numpy as np

from surfcalc.balance import (State1D, classical_speed, interface_jump_residuals, jump_state,
                              shock_speed_1d)
from surfcalc.scenarios import classical_plane, reduction_chain, surfactant_sphere

u = np.array([[0.5, 0.5]])
spec = classical_plane()
w = classical_speed(jump_state(spec, 0.0, u))
print(f"plane between psi=1 (v=0.5) and psi=3 (v=-0.2): shock speed {float(np.squeeze(w)):+.3f}")
for dw in (0.0, 0.1):
    res = interface_jump_residuals(classical_plane(speed=float(np.squeeze(w)) + dw), 0.0, u)
    print(f"  speed offset {dw:.1f}: residuals " +
          ", ".join(f"{k} {float(np.squeeze(v)):+.3f}" for k, v in res.items()))

res = interface_jump_residuals(surfactant_sphere(), 0.4, np.array([[1.0, 1.0], [2.0, 3.0]]))
print("\nsurfactant c/R^2 on a sphere growing at rate 0.5: worst residual per form")
for k, v in res.items():
    print(f"  {k:11s} {np.max(np.abs(v)):.1e}")

chain = reduction_chain()
print("\none balance as a surface, a curve and a point (three points along the front):")
for k, v in chain.items():
    print(f"  {k:8s} " + "  ".join(f"{x:+.12f}" for x in v))

print("\n1D shocks: density 1 -> 2 with v 2 -> 0.5 moves at",
      shock_speed_1d(State1D(1.0, 2.0), State1D(2.0, 0.5)))
print("Burgers 1 -> 0 moves at", shock_speed_1d(State1D(1.0, 0.5), State1D(0.0, 0.0)))
