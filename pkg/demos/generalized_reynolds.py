"""A material volume cut by an interface that moves through the material.
The rate of change of the total picks up an interface term, and a pillbox
around the interface shows the volume part vanishing as it thins."""

from surfcalc import moving
from surfcalc.transport import (curved_interface_scenario, pillbox_sweep, planar_cube_scenario,
                                verify_generalized_reynolds)

cube = planar_cube_scenario(speed=0.2, psi1=1.0, psi2=3.0)
rep = verify_generalized_reynolds(cube, 0.0, tol=1e-12)
print("unit cube, densities 1 below and 3 above a plane rising at 0.2")
print(f"  FD {rep.lhs:+.12f}; expected -w [[psi]] area = -0.4")
for k, v in rep.rhs.items():
    print(f"  {k:14s} {v:+.12f}")

sc = curved_interface_scenario(flow=moving.nonlinear_shear_flow(0.5))
rep = verify_generalized_reynolds(sc, 0.2)
print(f"\ncurved interface in a shear flow: FD {rep.lhs:+.10f}, rel residual {rep.rel_residual:.1e}")

print("\npillbox of half-width eps around the interface")
print("  eps        volume part     interface part")
for row in pillbox_sweep(sc, 0.2, [1e-1, 1e-2, 1e-3, 1e-4]):
    print(f"  {row['eps']:.0e}    {row['volume']:+.3e}      {row['interface']:+.6f}")
