"""1D finite-volume CO2 transport along the pack vent-gas duct.

The duct is modelled with the rupture area as cross-section: the vent gas
leaves the cell through ``a_rupture`` and is pushed down the duct as a slug
of width ``v0 * t0``. Concentrations are in ppm on cell centres; the outlet
face is pinned to ambient, the inlet face is a wall.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from packisc.mechanics import GAS_CONSTANT

PPM = 1.0e6


class CFLError(ValueError):
    """Requested time step violates the positivity bound of the scheme."""


@dataclass(frozen=True)
class DuctConfig:
    """Geometry and transport properties of the vent duct.

    Attributes:
        length: Duct length, m.
        n_cells_grid: Number of finite-volume cells.
        d_coeff: CO2 diffusivity in air, m^2/s.
        h_ch: Vent channel height, m; the source is spread over ``[0, h_ch]``.
        a_rupture: Rupture area, m^2.
        c_ambient: Ambient concentration, ppm.
        t_gas: Mean vent-gas temperature, K.
        p_atm: Ambient pressure, Pa.
        outlet: ``"dirichlet"`` for the open pack outlet, ``"closed"`` for a
            sealed test domain.
    """

    length: float = 0.5
    n_cells_grid: int = 128
    d_coeff: float = 14.2e-6
    h_ch: float = 5.0e-3
    a_rupture: float = 1.139e-4
    c_ambient: float = 400.0
    t_gas: float = 400.0
    p_atm: float = 101325.0
    outlet: str = "dirichlet"

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if self.n_cells_grid < 16:
            raise ValueError(f"n_cells_grid must be >= 16, got {self.n_cells_grid}")
        if self.d_coeff < 0:
            raise ValueError(f"d_coeff must be non-negative, got {self.d_coeff}")
        for name in ("h_ch", "a_rupture", "t_gas", "p_atm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.outlet not in ("dirichlet", "closed"):
            raise ValueError(f"outlet must be 'dirichlet' or 'closed', got {self.outlet!r}")

    @property
    def dx(self) -> float:
        return self.length / self.n_cells_grid

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells_grid) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return np.arange(self.n_cells_grid + 1) * self.dx

    @property
    def molar_volume(self) -> float:
        """Ideal-gas molar volume at vent conditions, m^3/mol."""
        return GAS_CONSTANT * self.t_gas / self.p_atm

    def ppm_to_mol(self, ppm_metres: float) -> float:
        """Convert an integral of ppm over duct length into moles."""
        return ppm_metres / PPM * self.a_rupture / self.molar_volume


@dataclass(frozen=True)
class VentEvent:
    """One venting episode starting at the rupture.

    Attributes:
        t_start: Rupture time, s.
        t0: Venting duration, s.
        v0: Vent-gas velocity, m/s.
        r_src: Volumetric source rate, mol/(m^3 s).
        n_co2_total: Vented CO2, mol.
        t_gas: Vent-gas temperature, K.
        p_atm: Ambient pressure, Pa.
    """

    t_start: float
    t0: float
    v0: float
    r_src: float
    n_co2_total: float
    t_gas: float = 400.0
    p_atm: float = 101325.0

    def __post_init__(self) -> None:
        if self.t0 <= 0:
            raise ValueError(f"t0 must be positive, got {self.t0}")
        if self.v0 < 0 or self.r_src < 0:
            raise ValueError("v0 and r_src must be non-negative")

    @classmethod
    def from_rupture(cls, n_co2: float, t_start: float, duct: DuctConfig, t0: float = 1.5) -> VentEvent:
        v0 = initial_vent_velocity(n_co2, duct.t_gas, duct.p_atm, duct.a_rupture, t0)
        r = n_co2 / (duct.a_rupture * duct.h_ch * t0)
        return cls(t_start=t_start, t0=t0, v0=v0, r_src=r, n_co2_total=n_co2, t_gas=duct.t_gas, p_atm=duct.p_atm)

    def venting(self, t: float) -> bool:
        return self.t_start <= t < self.t_start + self.t0


@dataclass(frozen=True)
class GasField:
    c: np.ndarray
    t: float = 0.0

    @classmethod
    def ambient(cls, duct: DuctConfig, t: float = 0.0) -> GasField:
        return cls(c=np.full(duct.n_cells_grid, duct.c_ambient), t=t)


def initial_vent_velocity(n_co2: float, t_gas: float, p_atm: float, a_rupture: float, t0: float) -> float:
    """Mean vent velocity of ``n_co2`` mol expelled through ``a_rupture`` in ``t0`` s."""
    if min(n_co2, t_gas, p_atm, a_rupture, t0) <= 0:
        raise ValueError("all inputs to initial_vent_velocity must be positive")
    return n_co2 * GAS_CONSTANT * t_gas / (p_atm * a_rupture * t0)


def vent_velocity_at(x, t: float, ev: VentEvent | None):
    """Gas velocity at position(s) ``x``: ``v0`` inside the moving slug, else 0."""
    x = np.asarray(x, dtype=float)
    if ev is None or t < ev.t_start:
        v = np.zeros_like(x)
    else:
        tau = t - ev.t_start
        inside = (x > ev.v0 * (tau - ev.t0)) & (x < ev.v0 * tau)
        v = np.where(inside, ev.v0, 0.0)
    return float(v) if v.ndim == 0 else v


def source_rate(ev: VentEvent | None, duct: DuctConfig, t: float | None = None) -> float:
    """Source strength in ppm/s inside the injection region.

    ``ev.r_src`` (mol per m^3 of injection volume ``a_rupture * h_ch`` per s)
    is converted with the vent-gas molar volume. With ``t`` given, returns 0
    outside the venting window.
    """
    if ev is None or (t is not None and not ev.venting(t)):
        return 0.0
    return ev.r_src * duct.molar_volume * PPM


def _source_weights(duct: DuctConfig) -> np.ndarray:
    # Fraction of each cell covered by [0, h_ch], normalised so sum(w * dx) == h_ch.
    faces = duct.faces
    overlap = np.clip(np.minimum(faces[1:], duct.h_ch) - faces[:-1], 0.0, None)
    return overlap / duct.dx


def max_stable_dt(v_max: float, duct: DuctConfig) -> float:
    """Largest dt keeping every update coefficient non-negative."""
    dx = duct.dx
    # The outlet cell sees a half-cell diffusive distance, hence 3D.
    rate = abs(v_max) / dx + 3.0 * duct.d_coeff / dx**2
    return np.inf if rate == 0 else 1.0 / rate


def stable_dt(ev: VentEvent | None, duct: DuctConfig) -> float:
    v = ev.v0 if ev is not None else 0.0
    dt = 0.5 * max_stable_dt(v, duct)
    return dt if np.isfinite(dt) else 1.0


def transport_step(field: GasField, ev: VentEvent | None, duct: DuctConfig, dt: float) -> GasField:
    """Advance the concentration field by one explicit step.

    Upwind advection with face velocities from the vent slug, central
    diffusion, the vent source spread over the inlet region, a wall at the
    inlet and ambient concentration held at the outlet face.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    v_max = ev.v0 if ev is not None else 0.0
    if dt > max_stable_dt(v_max, duct) * (1.0 + 1e-12):
        raise CFLError(f"dt={dt:g} exceeds stability bound {max_stable_dt(v_max, duct):g}")

    c = field.c
    dx = duct.dx
    D = duct.d_coeff
    t_mid = field.t + 0.5 * dt

    v_face = vent_velocity_at(duct.faces, t_mid, ev)
    flux = np.zeros(duct.n_cells_grid + 1)
    # Interior faces: upwind (v >= 0 always) plus central diffusion.
    flux[1:-1] = v_face[1:-1] * c[:-1] - D * (c[1:] - c[:-1]) / dx
    if duct.outlet == "dirichlet":
        flux[-1] = v_face[-1] * c[-1] - D * (duct.c_ambient - c[-1]) / (0.5 * dx)

    c_new = c - dt / dx * (flux[1:] - flux[:-1])

    if ev is not None:
        # Exact time overlap with the venting window, so injected mass does
        # not depend on how steps align with the event.
        lo = max(field.t, ev.t_start)
        hi = min(field.t + dt, ev.t_start + ev.t0)
        if hi > lo:
            c_new = c_new + source_rate(ev, duct) * (hi - lo) * _source_weights(duct)

    return replace(field, c=c_new, t=field.t + dt)


def advance(field: GasField, ev: VentEvent | None, duct: DuctConfig, t_target: float) -> GasField:
    """Sub-step the field up to ``t_target`` with stable steps."""
    remaining = t_target - field.t
    if remaining <= 1e-12:
        return field
    n = int(np.ceil(remaining / stable_dt(ev, duct) - 1e-9))
    dt = remaining / max(n, 1)
    for _ in range(max(n, 1)):
        field = transport_step(field, ev, duct, dt)
    return replace(field, t=t_target)


def outlet_concentration(field: GasField, sensor_x: float | None = None, duct: DuctConfig | None = None) -> float:
    """Concentration at the sensor; defaults to the last cell before the outlet."""
    if sensor_x is None:
        return float(field.c[-1])
    duct = duct or DuctConfig(n_cells_grid=len(field.c))
    if not 0.0 <= sensor_x <= duct.length:
        raise ValueError(f"sensor_x must lie in [0, {duct.length}], got {sensor_x}")
    return float(np.interp(sensor_x, duct.centers, field.c))


def total_mass(field: GasField, duct: DuctConfig) -> float:
    """Integral of concentration over the duct, ppm * m."""
    return float(np.sum(field.c) * duct.dx)
