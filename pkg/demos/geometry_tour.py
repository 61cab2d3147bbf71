"""Walk through the frame of a torus: metric, curvature and the surface
divergence of the normal, then integrate to recover the area and total
mean curvature."""

import numpy as np

from surfcalc import geometry
from surfcalc.fields import NormalField, surface_divergence
from surfcalc.quadrature import integrate_surface

R, r = 2.0, 0.5
torus = geometry.torus(R, r)
u = np.array([[0.0, 0.0], [0.0, np.pi / 2], [0.0, np.pi]])
fr = geometry.frame_at(torus, u)

print("torus R=2, r=0.5 at the outer equator, the top and the inner equator")
for k in range(len(u)):
    print(f"  u={u[k]}  x={np.round(fr.point[k], 4)}")
    print(f"    metric diag {np.round(np.diag(fr.metric[k]), 4)}  sqrt g {fr.sqrt_g[k]:.4f}")
    print(f"    mean curvature {fr.mean_curvature[k]:+.5f}  "
          f"closed form {geometry.torus_mean_curvature(R, r, u[k, 1]):+.5f}")
    print(f"    div nu {surface_divergence(NormalField(), torus, u[k]):+.5f}  (= -2 mean curvature)")

area = integrate_surface(torus, 1.0, rule=32)
print(f"\narea {area:.12f}   4 pi^2 R r = {4 * np.pi ** 2 * R * r:.12f}")
total = integrate_surface(torus, lambda f: f.mean_curvature, rule=32)
print(f"integral of mean curvature {total:.3e}   closed form -2 pi^2 R = {-2 * np.pi ** 2 * R:.3e}")
