"""Thermal and SEI-decomposition dynamics of the short-circuit region.

Only the small region around the short is resolved; the bulk of the cell is
held at a constant temperature. SEI decomposition heats the region and
releases CO2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

BOLTZMANN = 1.380649e-23  # J/K


class IntegrationError(RuntimeError):
    """The ISC state became non-finite, usually because dt was too large."""


@dataclass(frozen=True)
class ThermalParams:
    """Parameters of the ISC-region thermal and SEI kinetics model.

    Kinetic constants are the usual SEI-decomposition values for graphite
    anodes (frequency factor 1.667e15 1/s, activation energy 1.35e5 J/mol,
    enthalpy 257 J/g, initial fraction 0.15). The region's heat capacity,
    thermal resistance and anode mass are a calibration for a 4.5 Ah pouch
    cell and are the knobs tuned by ``scripts/calibrate.py``.

    Attributes:
        c_p: Heat capacity of the ISC region, J/K.
        r_c: Thermal resistance between ISC region and bulk cell, K/W.
        h_sei: SEI decomposition enthalpy, J/g.
        m_an_isc: Anode mass inside the ISC region, g.
        a_sei: Frequency factor, 1/s.
        e_sei: Activation energy per molecule, J.
        k_b: Boltzmann constant, J/K.
        x_sei_0: Initial Li fraction in the SEI.
        m_c6: Molar mass of C6, g/mol.
    """

    c_p: float = 1.7215
    r_c: float = 5.0
    h_sei: float = 257.0
    m_an_isc: float = 2.0
    a_sei: float = 1.667e15
    e_sei: float = 2.2417e-19  # 1.35e5 J/mol per molecule
    k_b: float = BOLTZMANN
    x_sei_0: float = 0.15
    m_c6: float = 72.06

    def __post_init__(self) -> None:
        for name in ("c_p", "r_c", "h_sei", "m_an_isc", "a_sei", "e_sei", "k_b", "m_c6"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.x_sei_0 <= 1.0:
            raise ValueError(f"x_sei_0 must lie in (0, 1], got {self.x_sei_0}")


@dataclass(frozen=True)
class IscState:
    """ISC-region state. Temperatures in kelvin."""

    t_isc: float
    x_sei: float
    n_co2: float
    t_cell: float

    @classmethod
    def initial(cls, params: ThermalParams, t_cell: float = 298.15) -> IscState:
        return cls(t_isc=t_cell, x_sei=params.x_sei_0, n_co2=0.0, t_cell=t_cell)


def sei_rate(x_sei: float, t_isc: float, params: ThermalParams) -> float:
    """Rate of change of the SEI fraction, 1/s (never positive)."""
    if x_sei <= 0.0 or t_isc <= 0.0:
        return 0.0
    return -params.a_sei * x_sei * math.exp(-params.e_sei / (params.k_b * t_isc))


def heat_sources(
    i_short: float, r_short: float, sei_rate_val: float, params: ThermalParams
) -> tuple[float, float]:
    """Return ``(q_ohmic, q_sei)`` in watts."""
    q_ohmic = i_short * i_short * r_short
    q_sei = -params.m_an_isc * params.h_sei * sei_rate_val
    return q_ohmic, q_sei


def co2_generated(x_sei: float, params: ThermalParams) -> float:
    """Moles of CO2 released once the SEI fraction has dropped to ``x_sei``."""
    if x_sei > params.x_sei_0:
        raise ValueError(f"x_sei={x_sei} exceeds x_sei_0={params.x_sei_0}")
    if x_sei < 0.0:
        raise ValueError(f"x_sei must be non-negative, got {x_sei}")
    return params.m_an_isc * (params.x_sei_0 - x_sei) / (2.0 * params.m_c6)


def derivatives(
    t_isc: float, x_sei: float, t_cell: float, i_short: float, r_short: float, params: ThermalParams
) -> tuple[float, float]:
    """Right-hand side ``(dT/dt, dx/dt)`` of the ISC-region ODE."""
    dx = sei_rate(max(x_sei, 0.0), t_isc, params)
    q_ohmic, q_sei = heat_sources(i_short, r_short, dx, params)
    dT = (q_sei + q_ohmic + (t_cell - t_isc) / params.r_c) / params.c_p
    return dT, dx


def step(state: IscState, i_short: float, r_short: float, params: ThermalParams, dt: float) -> IscState:
    """Advance the ISC state by one classical RK4 step of length ``dt``.

    ``i_short`` is held constant over the step.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    T0, x0, tc = state.t_isc, state.x_sei, state.t_cell

    k1T, k1x = derivatives(T0, x0, tc, i_short, r_short, params)
    k2T, k2x = derivatives(T0 + 0.5 * dt * k1T, x0 + 0.5 * dt * k1x, tc, i_short, r_short, params)
    k3T, k3x = derivatives(T0 + 0.5 * dt * k2T, x0 + 0.5 * dt * k2x, tc, i_short, r_short, params)
    k4T, k4x = derivatives(T0 + dt * k3T, x0 + dt * k3x, tc, i_short, r_short, params)

    T1 = T0 + dt / 6.0 * (k1T + 2.0 * k2T + 2.0 * k3T + k4T)
    x1 = x0 + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    if not (math.isfinite(T1) and math.isfinite(x1)) or T1 <= 0.0:
        raise IntegrationError(f"ISC state blew up (T={T1}, x={x1}) with dt={dt}")
    # SEI can only be consumed; RK4 overshoot near depletion is clipped.
    x1 = min(max(x1, 0.0), x0)
    return replace(state, t_isc=T1, x_sei=x1, n_co2=co2_generated(x1, params))
