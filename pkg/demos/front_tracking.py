"""Track a single interface between two constant states and watch the
conservation ledger: bulk total plus point density stays fixed."""

from surfcalc.front_tracking import SIMULATIONS, make_simulation, simulate_interface_1d

print(f"{'preset':18s} {'speed':>7s} {'p(1)':>8s} {'psi_p(1)':>9s} {'max drift':>10s}")
for name in sorted(SIMULATIONS):
    res = simulate_interface_1d(make_simulation(name))
    print(f"{name:18s} {res.speed:+7.3f} {res.p[-1]:+8.4f} {res.psi_p[-1]:+9.4f} "
          f"{res.max_drift:10.1e}")

res = simulate_interface_1d(make_simulation("prescribed_speed"))
print("\nprescribed speed: the point density absorbs the flux imbalance")
for row in list(res.rows())[::250]:
    print("  " + "  ".join(f"{k}={v:+.4f}" for k, v in row.items()))
