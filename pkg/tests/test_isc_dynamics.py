import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from packisc.isc_dynamics import (
    IntegrationError,
    IscState,
    ThermalParams,
    co2_generated,
    heat_sources,
    sei_rate,
    step,
)

P = ThermalParams()
R_SHORT = 0.025
I_FAULT = 163.6  # ~ default scenario short current


def euler_oracle(params, t_cell, schedule, dt):
    """Fine explicit Euler on the raw ODE, written independently of ``step``."""
    T, x = t_cell, params.x_sei_0
    out = [(T, x)]
    for i_sh in schedule:
        k = params.a_sei * x * math.exp(-params.e_sei / (params.k_b * T)) if x > 0 else 0.0
        q = i_sh**2 * R_SHORT + params.m_an_isc * params.h_sei * k + (t_cell - T) / params.r_c
        T, x = T + dt * q / params.c_p, max(x - dt * k, 0.0)
        out.append((T, x))
    return np.array(out)


def rk4_trajectory(params, t_cell, schedule, dt):
    s = IscState.initial(params, t_cell)
    out = [(s.t_isc, s.x_sei, s.n_co2)]
    for i_sh in schedule:
        s = step(s, i_sh, R_SHORT, params, dt)
        out.append((s.t_isc, s.x_sei, s.n_co2))
    return np.array(out)


def fault_schedule(dt, duration=2.0, on=0.4):
    n = int(round(duration / dt))
    n_on = int(round(on / dt))
    return [I_FAULT] * n_on + [0.0] * (n - n_on)


def test_sei_rate_zero_when_depleted():
    assert sei_rate(0.0, 500.0, P) == 0.0


def test_sei_rate_freezes_out_at_low_temperature():
    rates = [abs(sei_rate(0.15, T, P)) for T in (100.0, 50.0, 30.0, 5.0)]
    assert rates[0] > rates[1] > rates[2] > rates[3]
    assert rates[-1] == 0.0


def test_sei_rate_arrhenius_ratio():
    T = 400.0
    ratio = sei_rate(0.1, T + 10.0, P) / sei_rate(0.1, T, P)
    assert ratio == pytest.approx(math.exp(P.e_sei / P.k_b * (1 / T - 1 / (T + 10))), rel=1e-12)


@given(x=st.floats(1e-6, 1.0), t1=st.floats(250.0, 900.0), t2=st.floats(250.0, 900.0))
def test_sei_rate_magnitude_monotone_in_temperature(x, t1, t2):
    lo, hi = sorted((t1, t2))
    assert sei_rate(x, lo, P) <= 0.0
    assert abs(sei_rate(x, hi, P)) >= abs(sei_rate(x, lo, P))


def test_heat_sources():
    assert heat_sources(0.0, R_SHORT, 0.0, P) == (0.0, 0.0)
    q_ohm, _ = heat_sources(100.0, 0.025, 0.0, P)
    assert q_ohm == pytest.approx(250.0, rel=1e-12)
    _, q_sei = heat_sources(0.0, R_SHORT, -0.01, P)
    assert q_sei == pytest.approx(P.m_an_isc * P.h_sei * 0.01) and q_sei > 0


def test_co2_generated_examples():
    assert co2_generated(P.x_sei_0, P) == 0.0
    p = ThermalParams(m_an_isc=7.2, m_c6=72.0, x_sei_0=0.15)
    assert co2_generated(0.0, p) == pytest.approx(7.2 * 0.15 / 144, rel=1e-12)
    assert co2_generated(0.0, p) == pytest.approx(7.5e-3, rel=1e-12)
    assert co2_generated(0.075, p) == pytest.approx(0.5 * co2_generated(0.0, p), rel=1e-12)
    with pytest.raises(ValueError):
        co2_generated(0.2, p)


@pytest.mark.parametrize("field,value", [("c_p", 0.0), ("r_c", -1.0), ("x_sei_0", 1.5), ("x_sei_0", 0.0)])
def test_thermal_params_invariants(field, value):
    with pytest.raises(ValueError):
        ThermalParams(**{field: value})


def test_equilibrium_is_fixed_point():
    s = IscState(t_isc=298.15, x_sei=1e-12, n_co2=co2_generated(1e-12, P), t_cell=298.15)
    s1 = step(s, 0.0, R_SHORT, P, 0.1)
    assert s1.t_isc == pytest.approx(s.t_isc, abs=1e-12)
    assert s1.x_sei == pytest.approx(s.x_sei, abs=1e-20)


def test_ohmic_heating_raises_temperature():
    s = IscState.initial(P)
    assert step(s, 10.0, R_SHORT, P, 1e-3).t_isc > s.t_isc


def test_rk4_matches_fine_euler_oracle():
    dt = 1e-3
    rk = rk4_trajectory(P, 298.15, fault_schedule(dt), dt)
    eu = euler_oracle(P, 298.15, fault_schedule(dt / 100), dt / 100)[::100]
    assert rk.shape[0] == eu.shape[0]
    dev_T = np.max(np.abs(rk[:, 0] - eu[:, 0]) / eu[:, 0])
    dev_x = np.max(np.abs(rk[:, 1] - eu[:, 1]) / eu[:, 1])
    assert dev_T <= 1e-3
    assert dev_x <= 1e-3


def test_energy_bookkeeping():
    dt = 1e-3
    sched = fault_schedule(dt)
    traj = rk4_trajectory(P, 298.15, sched, dt)
    T, x = traj[:, 0], traj[:, 1]
    e_ohm = sum(i * i * R_SHORT * dt for i in sched)
    e_sei = P.m_an_isc * P.h_sei * (x[0] - x[-1])
    loss = (T - 298.15) / P.r_c
    e_loss = float(np.sum(0.5 * (loss[1:] + loss[:-1]) * dt))
    stored = P.c_p * (T[-1] - T[0])
    assert stored == pytest.approx(e_ohm + e_sei - e_loss, rel=1e-3)


def test_relaxes_with_thermal_time_constant():
    s = IscState(t_isc=298.15 + 50.0, x_sei=P.x_sei_0, n_co2=0.0, t_cell=298.15)
    tau = P.c_p * P.r_c
    temps = []
    for _ in range(2000):
        s = step(s, 0.0, R_SHORT, P, 1e-2)
        temps.append(s.t_isc)
    assert all(b < a for a, b in zip(temps, temps[1:]))
    expected = 298.15 + 50.0 * math.exp(-20.0 / tau)
    assert temps[-1] - 298.15 == pytest.approx(expected - 298.15, rel=1e-3)


@settings(max_examples=30, deadline=None)
@given(
    currents=st.lists(st.floats(0.0, 250.0), min_size=5, max_size=60),
    dt=st.sampled_from([1e-3, 2e-3, 5e-3]),
)
def test_sei_consumed_and_gas_accumulated_monotonically(currents, dt):
    s = IscState.initial(P)
    for i in currents:
        s1 = step(s, i, R_SHORT, P, dt)
        assert 0.0 <= s1.x_sei <= s.x_sei <= P.x_sei_0
        assert s1.n_co2 >= s.n_co2 >= 0.0
        s = s1


def test_blow_up_raises():
    # dt far beyond the thermal time constant makes RK4 diverge.
    s = IscState(t_isc=1000.0, x_sei=0.0, n_co2=co2_generated(0.0, P), t_cell=298.15)
    with pytest.raises(IntegrationError):
        for _ in range(500):
            s = step(s, 0.0, R_SHORT, P, 100.0)


def test_rejects_nonpositive_dt():
    with pytest.raises(ValueError):
        step(IscState.initial(P), 0.0, R_SHORT, P, 0.0)
