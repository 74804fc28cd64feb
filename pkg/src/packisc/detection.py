"""Force-residual observer, gas fault value and two-channel alarm fusion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable

from packisc.mechanics import ForceParams, nominal_force
from packisc.pack_model import PackConfig, coulomb_count_step
from packisc.sensing import SensorFrame


class StreamError(ValueError):
    """Frames handed to the detector are not time-ordered."""


class Decision(str, Enum):
    NORMAL = "normal"
    WARNING = "warning"
    ISC_ALERT = "isc_alert"


@dataclass(frozen=True)
class ObserverState:
    """Internals of the expansion-force observer.

    Attributes:
        theta_hat: Estimated fault force, N.
        soc_hat: Coulomb-counted SOC estimate.
        l_gain: Observer gain, 1/s.
    """

    theta_hat: float = 0.0
    soc_hat: float = 1.0
    l_gain: float = 0.2025

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta_hat):
            raise ValueError("theta_hat must be finite")
        if not 0.0 <= self.soc_hat <= 1.0:
            raise ValueError(f"soc_hat must lie in [0, 1], got {self.soc_hat}")
        if self.l_gain <= 0:
            raise ValueError(f"l_gain must be positive, got {self.l_gain}")


@dataclass(frozen=True)
class Thresholds:
    eps_f: float = 100.0
    eps_g: float = 2000.0
    g_normal: float = 400.0
    window: float = 30.0

    def __post_init__(self) -> None:
        if self.eps_f <= 0 or self.eps_g <= 0:
            raise ValueError("eps_f and eps_g must be positive")
        if self.window < 0:
            raise ValueError("window must be non-negative")


def estimated_force(obs: ObserverState, temp: float, force_params: ForceParams) -> float:
    return nominal_force(temp, obs.soc_hat, force_params) + obs.theta_hat


def observer_step(
    obs: ObserverState,
    frame: SensorFrame,
    force_params: ForceParams,
    dt: float,
    pack: PackConfig | None = None,
) -> ObserverState:
    """One observer update on a new frame.

    The SOC estimate is Coulomb-counted from the measured pack current, then
    the fault-force estimate relaxes towards the force residual. The
    residual is held over the frame interval and the lag is integrated
    exactly, so a constant residual reproduces ``rho * (1 - exp(-L t))``.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    pack = pack or PackConfig()
    soc_hat = coulomb_count_step(obs.soc_hat, frame.i_meas / pack.n_parallel, dt, pack.capacity)
    obs = replace(obs, soc_hat=soc_hat)
    residual = frame.f_meas - estimated_force(obs, frame.t_meas, force_params)
    gain = -math.expm1(-obs.l_gain * dt)
    return replace(obs, theta_hat=obs.theta_hat + gain * residual)


def gas_fault_value(g_meas: float, thresholds: Thresholds) -> float:
    """CO2 excess over the normal atmospheric level, ppm."""
    return g_meas - thresholds.g_normal


def force_alarm(theta_hat: float, thresholds: Thresholds) -> bool:
    return abs(theta_hat) > thresholds.eps_f


def gas_alarm(g_fault: float, thresholds: Thresholds) -> bool:
    return g_fault > thresholds.eps_g


def _combine(force: bool, gas: bool) -> Decision:
    if force and gas:
        return Decision.ISC_ALERT
    if force or gas:
        return Decision.WARNING
    return Decision.NORMAL


def fuse(theta_hat: float, g_fault: float, thresholds: Thresholds) -> Decision:
    """Instantaneous two-channel decision table."""
    return _combine(force_alarm(theta_hat, thresholds), gas_alarm(g_fault, thresholds))


class FusionDetector:
    """Stateful fusion over time.

    A channel counts as alarming for ``thresholds.window`` seconds after it
    last crossed its threshold, so a force alarm followed by a gas alarm
    inside the window confirms an ISC. Once confirmed the alert is latched.
    """

    def __init__(self, thresholds: Thresholds):
        self.thresholds = thresholds
        self.last_force: float | None = None
        self.last_gas: float | None = None
        self.first_force: float | None = None
        self.first_gas: float | None = None
        self.alert_time: float | None = None
        self.decision = Decision.NORMAL

    def _recent(self, last: float | None, t: float) -> bool:
        return last is not None and t - last <= self.thresholds.window

    def update(self, t: float, theta_hat: float, g_fault: float) -> Decision:
        if force_alarm(theta_hat, self.thresholds):
            self.last_force = t
            if self.first_force is None:
                self.first_force = t
        if gas_alarm(g_fault, self.thresholds):
            self.last_gas = t
            if self.first_gas is None:
                self.first_gas = t
        if self.decision is not Decision.ISC_ALERT:
            self.decision = _combine(self._recent(self.last_force, t), self._recent(self.last_gas, t))
            if self.decision is Decision.ISC_ALERT:
                self.alert_time = t
        return self.decision


@dataclass
class DetectionRow:
    t: float
    theta_hat: float
    g_fault: float
    decision: Decision


@dataclass
class DetectionLog:
    rows: list[DetectionRow] = field(default_factory=list)
    transitions: list[tuple[float, Decision]] = field(default_factory=list)
    first_force_alarm: float | None = None
    first_gas_alarm: float | None = None
    alert_time: float | None = None

    @property
    def final_decision(self) -> Decision:
        return self.rows[-1].decision if self.rows else Decision.NORMAL

    def summary(self) -> dict:
        return {
            "first_force_alarm": self.first_force_alarm,
            "first_gas_alarm": self.first_gas_alarm,
            "alert_time": self.alert_time,
            "final_decision": self.final_decision.value,
            "transitions": [[t, d.value] for t, d in self.transitions],
        }


class StreamDetector:
    """Observer plus fusion driven frame by frame."""

    def __init__(
        self,
        force_params: ForceParams,
        thresholds: Thresholds,
        obs: ObserverState,
        pack: PackConfig | None = None,
    ):
        self.force_params = force_params
        self.thresholds = thresholds
        self.obs = obs
        self.pack = pack or PackConfig()
        self.fusion = FusionDetector(thresholds)
        self.log = DetectionLog()
        self._t_prev: float | None = None

    def push(self, frame: SensorFrame) -> DetectionRow:
        if self._t_prev is not None:
            if frame.t <= self._t_prev:
                raise StreamError(f"frame at t={frame.t} does not follow t={self._t_prev}")
            self.obs = observer_step(self.obs, frame, self.force_params, frame.t - self._t_prev, self.pack)
        self._t_prev = frame.t
        g_fault = gas_fault_value(frame.g_meas, self.thresholds)
        prev = self.fusion.decision
        decision = self.fusion.update(frame.t, self.obs.theta_hat, g_fault)
        if decision is not prev:
            self.log.transitions.append((frame.t, decision))
        row = DetectionRow(frame.t, self.obs.theta_hat, g_fault, decision)
        self.log.rows.append(row)
        self.log.first_force_alarm = self.fusion.first_force
        self.log.first_gas_alarm = self.fusion.first_gas
        self.log.alert_time = self.fusion.alert_time
        return row


def detect_stream(
    frames: Iterable[SensorFrame],
    force_params: ForceParams,
    thresholds: Thresholds,
    obs: ObserverState | None = None,
    pack: PackConfig | None = None,
) -> DetectionLog:
    """Run the detector over time-ordered frames and return its event log.

    The first frame initialises the observer clock; it is classified but not
    integrated.
    """
    det = StreamDetector(force_params, thresholds, obs or ObserverState(), pack)
    for frame in frames:
        det.push(frame)
    return det.log
