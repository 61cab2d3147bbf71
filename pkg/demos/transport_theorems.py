"""Time derivative of a surface integral on moving surfaces, computed by
finite differences and by the five integrand forms of the surface
transport theorem."""

import numpy as np

from surfcalc import moving
from surfcalc.fields import coordinate, constant, polynomial
from surfcalc.transport import verify_reynolds, unit_cube, verify_surface_transport


def show(rep):
    print(f"{rep.scenario}: d/dt integral by FD = {rep.lhs:.10f}")
    for form, value in rep.rhs.items():
        print(f"    {form:17s} {value:.10f}")
    print(f"    spread between forms {rep.form_spread:.1e}, passed {rep.passed}")


c = 0.5
show(verify_surface_transport(moving.expand_sphere(1.0, c), constant(1.0), 0.0))
print(f"    closed form 8 pi R c = {8 * np.pi * c:.10f}\n")
show(verify_surface_transport(moving.wave_graph(), coordinate(3), 0.2))
print()
show(verify_surface_transport(moving.wave_graph(), polynomial(), 0.2))
print()
# a rigid rotation about x3 leaves this integral fixed, so every form must vanish
show(verify_surface_transport(moving.rotate_sphere(0.8), polynomial(), 0.3))

print("\nReynolds transport on a unit cube carried by a swirling flow")
rep = verify_reynolds(moving.swirl_flow(), polynomial(), unit_cube(), 0.4, tol=1e-8)
print(f"  FD {rep.lhs:.10f}  " + "  ".join(f"{k} {v:.10f}" for k, v in rep.rhs.items()))
