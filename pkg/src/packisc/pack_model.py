"""Equivalent-circuit model of ``n`` parallel cells with one shorted cell.

Currents follow the discharge-positive convention throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# NMC-like open-circuit voltage table, (soc, volts). Representative, not fitted.
DEFAULT_OCV_CURVE: tuple[tuple[float, float], ...] = (
    (0.00, 3.000),
    (0.05, 3.300),
    (0.10, 3.450),
    (0.20, 3.560),
    (0.30, 3.630),
    (0.40, 3.690),
    (0.50, 3.750),
    (0.60, 3.830),
    (0.70, 3.920),
    (0.80, 4.010),
    (0.90, 4.100),
    (1.00, 4.200),
)


@dataclass(frozen=True)
class PackConfig:
    """Electrical description of a parallel-connected cell group.

    Attributes:
        n_parallel: Number of cells in parallel.
        capacity: Per-cell capacity in Ah.
        r_cell: Cell impedance at 1 kHz in ohm.
        ocv_curve: Ordered ``(soc, volts)`` pairs spanning SOC 0 to 1.
    """

    n_parallel: int = 50
    capacity: float = 4.5
    r_cell: float = 0.003
    ocv_curve: tuple[tuple[float, float], ...] = DEFAULT_OCV_CURVE
    _soc_knots: np.ndarray = field(init=False, repr=False, compare=False)
    _volt_knots: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if int(self.n_parallel) != self.n_parallel or self.n_parallel < 1:
            raise ValueError(f"n_parallel must be a positive integer, got {self.n_parallel}")
        if self.capacity <= 0:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        if self.r_cell <= 0:
            raise ValueError(f"r_cell must be positive, got {self.r_cell}")
        curve = tuple((float(s), float(v)) for s, v in self.ocv_curve)
        if len(curve) < 2:
            raise ValueError("ocv_curve needs at least two points")
        socs = np.array([p[0] for p in curve])
        volts = np.array([p[1] for p in curve])
        if socs[0] != 0.0 or socs[-1] != 1.0:
            raise ValueError("ocv_curve must span soc 0 to 1")
        if np.any(np.diff(socs) <= 0):
            raise ValueError("ocv_curve soc values must be strictly increasing")
        if np.any(np.diff(volts) <= 0):
            raise ValueError("ocv_curve voltages must be strictly increasing")
        object.__setattr__(self, "ocv_curve", curve)
        object.__setattr__(self, "_soc_knots", socs)
        object.__setattr__(self, "_volt_knots", volts)


@dataclass(frozen=True)
class PackState:
    soc: float
    t: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "soc", min(max(float(self.soc), 0.0), 1.0))


@dataclass(frozen=True)
class ShortSpec:
    """A hard internal short in one cell.

    Attributes:
        r_short: Short-path resistance in ohm.
        t_trigger: Time the short closes, s.
        t_disconnect_after: Time until the short path burns open, s.
    """

    r_short: float = 0.025
    t_trigger: float = 10.0
    t_disconnect_after: float = 0.4

    def __post_init__(self) -> None:
        if self.r_short <= 0:
            raise ValueError(f"r_short must be positive, got {self.r_short}")
        if self.t_disconnect_after <= 0:
            raise ValueError(f"t_disconnect_after must be positive, got {self.t_disconnect_after}")

    @property
    def t_disconnect(self) -> float:
        return self.t_trigger + self.t_disconnect_after

    def active(self, t: float) -> bool:
        return self.t_trigger <= t < self.t_disconnect


def ocv(soc: float, config: PackConfig) -> float:
    """Open-circuit voltage by linear interpolation of ``config.ocv_curve``."""
    if not 0.0 <= soc <= 1.0:
        raise ValueError(f"soc must lie in [0, 1], got {soc}")
    return float(np.interp(soc, config._soc_knots, config._volt_knots))


def short_current(soc: float, short: ShortSpec, config: PackConfig, t: float) -> float:
    """Current through the short path; zero outside the active window.

    The other ``n - 1`` cells and the shorted cell itself all feed the short
    through their own ``r_cell``, so the source seen by ``r_short`` is the
    pack OCV behind ``r_cell / n``.
    """
    if not short.active(t):
        return 0.0
    n = config.n_parallel
    return n * ocv(soc, config) / (config.r_cell + n * short.r_short)


def terminal_voltage(soc: float, i_short: float, config: PackConfig, i_load: float = 0.0) -> float:
    """Pack terminal voltage.

    Args:
        soc: State of charge of the parallel group.
        i_short: Short-circuit current, A.
        config: Pack description.
        i_load: Optional pack load current, A (discharge positive).
    """
    return ocv(soc, config) - (i_short + i_load) / config.n_parallel * config.r_cell


def coulomb_count_step(soc: float, current: float, dt: float, capacity: float) -> float:
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    soc_next = soc - current * dt / (3600.0 * capacity)
    return min(max(soc_next, 0.0), 1.0)
