"""Cell expansion force, internal gas pressure and vent rupture."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

GAS_CONSTANT = 8.314  # J/(mol K)

# 8th-order fit of expansion force vs SOC, highest power first (N).
# Regenerate with scripts/fit_force_poly.py.
DEFAULT_SOC_POLY: tuple[float, ...] = (
    -4442.586878,
    17299.95593,
    -27015.6854,
    21245.80699,
    -8807.598561,
    2378.169835,
    -882.4529538,
    380.3851371,
    -0.009148225704,
)


@dataclass(frozen=True)
class ForceParams:
    """Expansion-force model parameters.

    Attributes:
        alpha: Thermal expansion rate, N/degC.
        t0_ref: Reference temperature for the thermal term, degC.
        f0: Preload force, N.
        soc_poly: Nine polynomial coefficients of the SOC term, highest power first.
        k_eq: Equivalent spring constant of the constrained stack, N/m.
        a_cell: Cell face area the gas pressure acts on, m^2.
        p_vent: Vent opening pressure, Pa.
    """

    alpha: float = 2.06
    t0_ref: float = 25.0
    f0: float = 520.0
    soc_poly: tuple[float, ...] = DEFAULT_SOC_POLY
    k_eq: float = 7.68e6
    a_cell: float = 1.0e-3
    p_vent: float = 3.448e6

    def __post_init__(self) -> None:
        for name in ("alpha", "k_eq", "a_cell", "p_vent"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        poly = tuple(float(c) for c in self.soc_poly)
        if len(poly) != 9:
            raise ValueError(f"soc_poly needs 9 coefficients, got {len(poly)}")
        object.__setattr__(self, "soc_poly", poly)


@dataclass(frozen=True)
class MechState:
    f_gas: float = 0.0
    ruptured: bool = False
    rupture_time: float | None = None


def soc_force(soc: float, params: ForceParams) -> float:
    return float(np.polyval(params.soc_poly, soc))


def thermal_force(temp: float, params: ForceParams) -> float:
    return params.alpha * (temp - params.t0_ref)


def nominal_force(temp: float, soc: float, params: ForceParams) -> float:
    """Healthy-cell expansion force at ``temp`` (degC) and ``soc``."""
    if not 0.0 <= soc <= 1.0:
        raise ValueError(f"soc must lie in [0, 1], got {soc}")
    return thermal_force(temp, params) + soc_force(soc, params) + params.f0


def gas_force(n_co2: float, t_cell: float, params: ForceParams) -> float:
    """Extra stack force from ``n_co2`` mol of trapped gas at ``t_cell`` K.

    Ideal gas in the swelled gap ``a_cell * dx`` balanced by the stack
    spring ``k_eq * dx``; eliminating ``dx`` leaves ``sqrt(k_eq n R T)``.
    """
    if n_co2 < 0:
        raise ValueError(f"n_co2 must be non-negative, got {n_co2}")
    return math.sqrt(params.k_eq * n_co2 * GAS_CONSTANT * t_cell)


def internal_pressure(n_co2: float, t_cell: float, params: ForceParams) -> float:
    if n_co2 <= 0:
        return 0.0
    return gas_force(n_co2, t_cell, params) / params.a_cell


def update_rupture(state: MechState, pressure: float, t: float, params: ForceParams) -> MechState:
    """Latch a rupture once ``pressure`` reaches the vent pressure (inclusive)."""
    if state.ruptured or pressure < params.p_vent:
        return state
    return replace(state, f_gas=0.0, ruptured=True, rupture_time=t)


def rupture_moles(t_cell: float, params: ForceParams) -> float:
    """Gas inventory at which the vent opens."""
    f_vent = params.p_vent * params.a_cell
    return f_vent * f_vent / (params.k_eq * GAS_CONSTANT * t_cell)
