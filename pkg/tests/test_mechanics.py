import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from packisc.mechanics import (
    GAS_CONSTANT,
    ForceParams,
    MechState,
    gas_force,
    internal_pressure,
    nominal_force,
    rupture_moles,
    soc_force,
    update_rupture,
)

P = ForceParams()


def test_nominal_force_at_reference_temperature():
    assert nominal_force(P.t0_ref, 0.4, P) == pytest.approx(P.f0 + soc_force(0.4, P), abs=1e-12)


def test_thermal_term_ten_degrees():
    assert nominal_force(35.0, 0.5, P) - nominal_force(25.0, 0.5, P) == pytest.approx(20.6, abs=1e-9)


def test_soc_polynomial_full_range_is_156_newton():
    assert soc_force(1.0, P) - soc_force(0.0, P) == pytest.approx(156.0, abs=1.0)


def test_soc_polynomial_monotone_on_unit_interval():
    f = np.polyval(P.soc_poly, np.linspace(0.0, 1.0, 1001))
    assert np.all(np.diff(f) > 0)


def test_preload_is_thirty_percent_rule():
    # The 156 N swing is ~30 % of the force of the fully discharged cell.
    total = nominal_force(P.t0_ref, 0.0, P)
    assert 156.0 / total == pytest.approx(0.30, abs=0.01)


def test_nominal_force_soc_domain():
    with pytest.raises(ValueError):
        nominal_force(25.0, 1.2, P)


def test_force_params_need_nine_coefficients():
    with pytest.raises(ValueError):
        ForceParams(soc_poly=(1.0, 2.0))


def test_gas_force_zero_without_gas():
    assert gas_force(0.0, 298.15, P) == 0.0


def test_gas_force_square_root_scaling():
    assert gas_force(4e-4, 298.15, P) == pytest.approx(2 * gas_force(1e-4, 298.15, P), rel=1e-12)


def test_gas_force_hand_value():
    p = ForceParams(k_eq=2e6)
    assert gas_force(5e-3, 298.15, p) == pytest.approx(math.sqrt(2e6 * 5e-3 * 8.314 * 298.15), rel=1e-12)
    assert gas_force(5e-3, 298.15, p) == pytest.approx(4978.8, abs=0.1)


def test_internal_pressure_zero_without_gas():
    assert internal_pressure(0.0, 298.15, P) == 0.0


def test_pressure_at_vent_threshold():
    p = ForceParams(a_cell=1e-3)
    n = 3448.0**2 / (p.k_eq * GAS_CONSTANT * 298.15)
    assert internal_pressure(n, 298.15, p) == pytest.approx(3.448e6, rel=1e-12)
    assert rupture_moles(298.15, p) == pytest.approx(n, rel=1e-12)


@given(
    n=st.floats(1e-9, 1e-1),
    t=st.floats(250.0, 400.0),
    k_eq=st.floats(1e5, 1e8),
    a=st.floats(1e-4, 1e-1),
)
def test_pressure_times_area_equals_gas_force(n, t, k_eq, a):
    p = ForceParams(k_eq=k_eq, a_cell=a)
    assert internal_pressure(n, t, p) * a == pytest.approx(gas_force(n, t, p), rel=1e-12)


@given(n1=st.floats(0.0, 1e-2), n2=st.floats(0.0, 1e-2))
def test_gas_force_monotone(n1, n2):
    lo, hi = sorted((n1, n2))
    assert gas_force(lo, 298.15, P) <= gas_force(hi, 298.15, P)


def test_rupture_below_threshold_unchanged():
    s = MechState(f_gas=100.0)
    assert update_rupture(s, P.p_vent * 0.999, 11.0, P) is s


def test_rupture_inclusive_threshold():
    s = update_rupture(MechState(f_gas=3448.0), P.p_vent, 11.5, P)
    assert s.ruptured and s.rupture_time == 11.5 and s.f_gas == 0.0


def test_rupture_is_latched():
    s = update_rupture(MechState(), P.p_vent * 2, 11.5, P)
    assert update_rupture(s, P.p_vent * 3, 12.0, P).rupture_time == 11.5
    assert update_rupture(s, 0.0, 12.0, P).ruptured


def test_force_trajectory_around_rupture(quiet_scenario):
    from packisc.scenario import run

    res = run(quiet_scenario)
    t = res.series.array("t")
    f_gas = res.series.array("f_gas")
    f_true = res.series.array("f_true")
    t_r = res.summary["rupture_time"]
    pre = t < t_r
    assert np.all(np.diff(f_gas[pre]) >= 0)
    assert np.all(f_gas[~pre] == 0.0)
    # Drop at the first post-rupture frame is the gas force that was there;
    # the nominal part only moves by the SOC drift of one frame.
    k = int(np.argmax(~pre))
    nominal_jump = (f_true[k] - f_gas[k]) - (f_true[k - 1] - f_gas[k - 1])
    assert f_true[k - 1] - f_true[k] == pytest.approx(f_gas[k - 1] - nominal_jump, abs=1e-9)
    assert abs(nominal_jump) < 0.1


def test_prefault_force_within_fitted_band(full_cycle_healthy):
    p = ForceParams()
    f = full_cycle_healthy.series.array("f_true")
    band = np.polyval(p.soc_poly, np.linspace(0, 1, 1001))
    assert f.min() >= p.f0 + band.min() - 1e-9
    assert f.max() <= p.f0 + band.max() + 1e-9
