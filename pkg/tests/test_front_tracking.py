import csv

import numpy as np
import pytest

from surfcalc.balance import State1D
from surfcalc.errors import CFLViolation, ContractViolation, InterfaceLeavesDomain, UnknownCatalogEntry
from surfcalc.front_tracking import SIMULATIONS, Simulation1D, make_simulation, simulate_interface_1d


@pytest.mark.parametrize("name", sorted(SIMULATIONS))
def test_ledger_is_constant(name):
    res = simulate_interface_1d(make_simulation(name))
    assert len(res.t) == 1001
    assert res.max_drift <= 1e-12
    assert np.allclose(res.ledger, res.ledger[0], atol=1e-11)


def test_contact_moves_with_velocity():
    res = simulate_interface_1d(make_simulation("contact"))
    assert res.speed == 1.0
    assert np.allclose(res.p, -1.0 + res.t)
    assert np.all(res.psi_p == 0)


def test_density_shock_front():
    res = simulate_interface_1d(make_simulation("density_shock", dt=2.0 ** -10, t_end=1000 * 2.0 ** -10))
    assert np.array_equal(res.p, -res.t)


def test_prescribed_speed_absorbs_imbalance():
    res = simulate_interface_1d(make_simulation("prescribed_speed"))
    left, right = SIMULATIONS["prescribed_speed"]["left"], SIMULATIONS["prescribed_speed"]["right"]
    rate = 0.3 * (right.psi - left.psi) - (right.flux - left.flux)
    assert np.isclose(res.point_rate, rate)
    assert np.allclose(res.psi_p, rate * res.t)
    assert res.max_drift <= 1e-12


def test_cfl_and_domain_errors():
    with pytest.raises(CFLViolation):
        simulate_interface_1d(make_simulation("density_shock", dt=0.1))
    with pytest.raises(InterfaceLeavesDomain):
        simulate_interface_1d(make_simulation("density_shock", t_end=10.0))
    with pytest.raises(InterfaceLeavesDomain):
        Simulation1D(State1D(1.0), State1D(2.0), p0=9.0)
    with pytest.raises(ContractViolation):
        simulate_interface_1d(make_simulation("contact", t_end=0.0105))
    with pytest.raises(UnknownCatalogEntry):
        make_simulation("rarefaction")


def test_write_csv(tmp_path):
    res = simulate_interface_1d(make_simulation("point_source", t_end=0.01))
    path = tmp_path / "series.csv"
    res.write_csv(path)
    rows = list(csv.DictReader(open(path)))
    assert list(rows[0]) == ["t", "p", "psi_p", "total", "drift"]
    assert len(rows) == 11
    assert float(rows[-1]["t"]) == pytest.approx(0.01)
