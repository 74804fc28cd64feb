"""Scenario configuration, drive-cycle ingestion and the coupled simulation loop."""

from __future__ import annotations

import copy
import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from packisc import gas_transport as gt
from packisc import isc_dynamics as isc
from packisc import mechanics as mech
from packisc.detection import Decision, ObserverState, StreamDetector, Thresholds
from packisc.pack_model import PackConfig, ShortSpec, coulomb_count_step, short_current, terminal_voltage
from packisc.sensing import NoiseSource, NoiseSpec, SensorFrame, sample

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_SCENARIO = DATA_DIR / "default_scenario.yaml"
KELVIN = 273.15

SERIES_COLUMNS = (
    "t",
    "soc_true",
    "soc_hat",
    "i_true",
    "i_meas",
    "i_short",
    "v_true",
    "v_healthy",
    "v_meas",
    "t_isc_c",
    "t_meas",
    "f_gas",
    "f_true",
    "f_meas",
    "c_outlet",
    "g_meas",
    "theta_hat",
    "g_fault",
    "decision",
)


class ConfigError(ValueError):
    """Scenario file or drive cycle is malformed or inconsistent."""


# ----------------------------------------------------------------------
# Configuration
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Numerics:
    """Time stepping.

    Attributes:
        frame_dt: Sensor sampling interval, s.
        dt_fault: ISC integrator step inside the fault window, s.
        dt_nominal: ISC integrator step elsewhere, s.
        fault_window: Length of the fine-step window after the trigger, s.
    """

    frame_dt: float = 0.1
    dt_fault: float = 1e-3
    dt_nominal: float = 0.1
    fault_window: float = 10.0

    def __post_init__(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"numerics.{f.name} must be positive")


@dataclass(frozen=True)
class Scenario:
    pack: PackConfig = field(default_factory=PackConfig)
    short: ShortSpec | None = field(default_factory=ShortSpec)
    thermal: isc.ThermalParams = field(default_factory=isc.ThermalParams)
    mechanics: mech.ForceParams = field(default_factory=mech.ForceParams)
    duct: gt.DuctConfig = field(default_factory=gt.DuctConfig)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    thresholds: Thresholds = field(default_factory=Thresholds)
    numerics: Numerics = field(default_factory=Numerics)
    drive_cycle: Path | None = None
    drive_cycle_scale: float = 1.0
    t_end: float = 30.0
    initial_soc: float = 0.9
    ambient_c: float = 25.0
    l_gain: float = 0.2025
    vent_duration: float = 1.5
    output: Path = Path("out")

    def __post_init__(self) -> None:
        if self.t_end <= 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not 0.0 <= self.initial_soc <= 1.0:
            raise ValueError(f"initial_soc must lie in [0, 1], got {self.initial_soc}")
        if self.vent_duration <= 0:
            raise ValueError("vent_duration must be positive")

    @property
    def healthy(self) -> bool:
        return self.short is None


_SECTIONS = {
    "pack": PackConfig,
    "short": ShortSpec,
    "thermal": isc.ThermalParams,
    "mechanics": mech.ForceParams,
    "duct": gt.DuctConfig,
    "noise": NoiseSpec,
    "thresholds": Thresholds,
    "numerics": Numerics,
}
_SCALARS = ("t_end", "initial_soc", "ambient_c", "l_gain", "vent_duration", "drive_cycle_scale")


def _build_section(name: str, cls, values: Any):
    if not isinstance(values, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    known = {f.name for f in fields(cls) if f.init}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {sorted(unknown)}")
    kwargs = dict(values)
    defaults = {f.name: f.default for f in fields(cls) if f.init}
    for key, val in kwargs.items():
        # YAML 1.1 reads "1e6" as a string, so coerce by the field's default type.
        default = defaults[key]
        try:
            if isinstance(default, float):
                kwargs[key] = float(val)
            elif isinstance(default, int) and not isinstance(default, bool):
                if float(val) != int(float(val)):
                    raise ValueError
                kwargs[key] = int(float(val))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"'{name}.{key}' has invalid value {val!r}") from exc
    if name == "pack" and "ocv_curve" in kwargs:
        try:
            kwargs["ocv_curve"] = tuple((float(s), float(v)) for s, v in kwargs["ocv_curve"])
        except (TypeError, ValueError) as exc:
            raise ConfigError("'pack.ocv_curve' must be a list of [soc, volts] pairs") from exc
    if name == "mechanics" and "soc_poly" in kwargs:
        kwargs["soc_poly"] = tuple(float(c) for c in kwargs["soc_poly"])
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"section '{name}': {exc}") from exc


def scenario_from_dict(raw: dict, base_dir: Path | None = None) -> Scenario:
    """Build a :class:`Scenario` from a parsed config mapping.

    Relative file paths resolve against ``base_dir``.
    """
    if not isinstance(raw, dict):
        raise ConfigError("scenario file must contain a mapping")
    base_dir = base_dir or Path.cwd()
    known = set(_SECTIONS) | set(_SCALARS) | {"drive_cycle", "output"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")

    kwargs: dict[str, Any] = {}
    for name, cls in _SECTIONS.items():
        if name not in raw:
            continue
        if name == "short" and raw[name] is None:
            kwargs["short"] = None
            continue
        kwargs[name] = _build_section(name, cls, raw[name])
    for name in _SCALARS:
        if name in raw:
            try:
                kwargs[name] = float(raw[name])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"'{name}' must be a number") from exc
    if raw.get("drive_cycle") is not None:
        path = Path(raw["drive_cycle"])
        kwargs["drive_cycle"] = path if path.is_absolute() else base_dir / path
    if "output" in raw:
        kwargs["output"] = Path(raw["output"])
    try:
        scenario = Scenario(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if scenario.drive_cycle is not None and not scenario.drive_cycle.is_file():
        raise ConfigError(f"drive cycle not found: {scenario.drive_cycle}")
    return scenario


def read_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return raw if raw is not None else {}


def load_scenario(path: str | Path = DEFAULT_SCENARIO) -> Scenario:
    path = Path(path)
    return scenario_from_dict(read_config(path), base_dir=path.parent)


def set_dotted(raw: dict, key: str, value: Any) -> dict:
    """Return a deep copy of ``raw`` with ``a.b.c`` set to ``value``."""
    out = copy.deepcopy(raw)
    node = out
    parts = key.split(".")
    for part in parts[:-1]:
        if node.get(part) is None:
            node[part] = {}
        node = node[part]
        if not isinstance(node, dict):
            raise ConfigError(f"'{key}' does not address a config section")
    node[parts[-1]] = value
    return out


# ----------------------------------------------------------------------
# Drive cycle
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class DriveCycle:
    """Pack current profile, linearly interpolated and repeated past its end."""

    t: np.ndarray
    current: np.ndarray

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    def __call__(self, t: float) -> float:
        if self.duration > 0:
            t = self.t[0] + (t - self.t[0]) % self.duration
        return float(np.interp(t, self.t, self.current))

    def scaled(self, factor: float) -> DriveCycle:
        return DriveCycle(self.t, self.current * factor)

    def per_cell(self, n_parallel: int) -> DriveCycle:
        return self.scaled(1.0 / n_parallel)


def load_drive_cycle(path: str | Path) -> DriveCycle:
    """Read a ``t_s,current_a`` CSV of pack-level current."""
    path = Path(path)
    ts: list[float] = []
    cur: list[float] = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ConfigError(f"cannot read drive cycle {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t_s", "current_a"]:
            raise ConfigError(f"{path}:1: expected header 't_s,current_a', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                t, i = float(row[0]), float(row[1])
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from exc
            if not (math.isfinite(t) and math.isfinite(i)):
                raise ConfigError(f"{path}:{lineno}: non-finite value")
            if ts and t <= ts[-1]:
                raise ConfigError(f"{path}:{lineno}: time {t} is not increasing")
            ts.append(t)
            cur.append(i)
    if len(ts) < 2:
        raise ConfigError(f"{path}: need at least two samples")
    return DriveCycle(np.array(ts), np.array(cur))


# ----------------------------------------------------------------------
# Simulation
# ----------------------------------------------------------------------


@dataclass
class TimeSeries:
    columns: dict[str, list] = field(default_factory=lambda: {c: [] for c in SERIES_COLUMNS})

    def __len__(self) -> int:
        return len(self.columns["t"])

    def append(self, row: dict) -> None:
        for c in SERIES_COLUMNS:
            self.columns[c].append(row[c])

    def array(self, name: str) -> np.ndarray:
        return np.asarray(self.columns[name], dtype=float)


@dataclass
class RunResult:
    series: TimeSeries
    summary: dict
    profiles: list[tuple[float, np.ndarray]] | None = None
    x_centers: np.ndarray | None = None


class _Plant:
    """True pack physics advanced between sensor frames."""

    def __init__(self, sc: Scenario, load: DriveCycle | None):
        self.sc = sc
        self.load = load
        self.t = 0.0
        self.soc = sc.initial_soc
        self.soc_healthy = sc.initial_soc
        self.t_cell = sc.ambient_c + KELVIN
        self.isc = isc.IscState.initial(sc.thermal, self.t_cell)
        self.mech = mech.MechState()
        self.vent: gt.VentEvent | None = None
        self.gas = gt.GasField.ambient(sc.duct)

    def pack_current(self, t: float) -> float:
        return self.load(t) if self.load is not None else 0.0

    def i_short(self, t: float) -> float:
        if self.sc.short is None:
            return 0.0
        return short_current(self.soc, self.sc.short, self.sc.pack, t)

    def _breakpoints(self, t0: float, t1: float) -> list[float]:
        pts = [t0, t1]
        sh = self.sc.short
        if sh is not None:
            for tb in (sh.t_trigger, sh.t_disconnect, sh.t_trigger + self.sc.numerics.fault_window):
                if t0 < tb < t1:
                    pts.append(tb)
        return sorted(pts)

    def _in_fault_window(self, t: float) -> bool:
        sh = self.sc.short
        return sh is not None and sh.t_trigger <= t < sh.t_trigger + self.sc.numerics.fault_window

    def advance(self, t1: float) -> None:
        sc = self.sc
        pts = self._breakpoints(self.t, t1)
        for a, b in zip(pts[:-1], pts[1:]):
            dt_max = sc.numerics.dt_fault if self._in_fault_window(a) else sc.numerics.dt_nominal
            n = max(int(math.ceil((b - a) / dt_max - 1e-9)), 1)
            dt = (b - a) / n
            # Short state is constant over [a, b) by construction of the breakpoints.
            active = sc.short is not None and sc.short.active(a)
            r_short = sc.short.r_short if sc.short is not None else 1.0
            # The ISC region only exists once the short has closed.
            has_isc = sc.short is not None and a >= sc.short.t_trigger
            for k in range(n):
                t = a + k * dt
                i_sh = self.i_short(t) if active else 0.0
                i_load_cell = self.pack_current(t) / sc.pack.n_parallel
                if has_isc:
                    self.isc = isc.step(self.isc, i_sh, r_short, sc.thermal, dt)
                self.soc = coulomb_count_step(
                    self.soc, i_load_cell + i_sh / sc.pack.n_parallel, dt, sc.pack.capacity
                )
                self.soc_healthy = coulomb_count_step(self.soc_healthy, i_load_cell, dt, sc.pack.capacity)
                self._update_mechanics(t + dt)
        self.gas = gt.advance(self.gas, self.vent, sc.duct, t1)
        self.t = t1

    def _update_mechanics(self, t: float) -> None:
        if self.mech.ruptured:
            return
        p = mech.internal_pressure(self.isc.n_co2, self.t_cell, self.sc.mechanics)
        self.mech = mech.update_rupture(self.mech, p, t, self.sc.mechanics)
        if self.mech.ruptured:
            self.vent = gt.VentEvent.from_rupture(self.isc.n_co2, t, self.sc.duct, self.sc.vent_duration)
            logger.info("cell vented at t=%.3f s with %.3g mol CO2", t, self.isc.n_co2)
        else:
            self.mech = replace(self.mech, f_gas=mech.gas_force(self.isc.n_co2, self.t_cell, self.sc.mechanics))

    def truth(self, t: float) -> dict:
        sc = self.sc
        i_pack = self.pack_current(t)
        i_sh = self.i_short(t)
        f_true = mech.nominal_force(sc.ambient_c, self.soc, sc.mechanics) + self.mech.f_gas
        return {
            "t": t,
            "soc_true": self.soc,
            "i_true": i_pack,
            "i_short": i_sh,
            "v_true": terminal_voltage(self.soc, i_sh, sc.pack, i_pack),
            "v_healthy": terminal_voltage(self.soc_healthy, 0.0, sc.pack, i_pack),
            "t_isc_c": self.isc.t_isc - KELVIN,
            "f_gas": self.mech.f_gas,
            "f_true": f_true,
            "c_outlet": gt.outlet_concentration(self.gas),
        }


def _load_profile(sc: Scenario) -> DriveCycle | None:
    if sc.drive_cycle is None:
        return None
    return load_drive_cycle(sc.drive_cycle).scaled(sc.drive_cycle_scale)


def run(sc: Scenario, profile_dump: bool = False, load: DriveCycle | None = None) -> RunResult:
    """Simulate the scenario and run the detector on its telemetry.

    Physics sub-steps run between 10 Hz sensor frames; every frame is sampled
    with noise and fed to the detector. Frames cover ``[0, t_end)``.
    """
    load = load if load is not None else _load_profile(sc)
    plant = _Plant(sc, load)
    noise = NoiseSource(sc.noise.seed)
    detector = StreamDetector(
        sc.mechanics, sc.thresholds, ObserverState(soc_hat=sc.initial_soc, l_gain=sc.l_gain), sc.pack
    )
    series = TimeSeries()
    profiles: list[tuple[float, np.ndarray]] | None = [] if profile_dump else None
    min_conc = math.inf

    n_frames = max(int(round(sc.t_end / sc.numerics.frame_dt)), 1)
    for k in range(n_frames):
        t = round(k * sc.numerics.frame_dt, 9)
        if k > 0:
            plant.advance(t)
        truth = plant.truth(t)
        frame = sample(
            SensorFrame(t, truth["v_true"], truth["i_true"], sc.ambient_c, truth["f_true"], truth["c_outlet"]),
            sc.noise,
            noise,
        )
        row = detector.push(frame)
        truth.update(
            soc_hat=detector.obs.soc_hat,
            i_meas=frame.i_meas,
            v_meas=frame.v_meas,
            t_meas=frame.t_meas,
            f_meas=frame.f_meas,
            g_meas=frame.g_meas,
            theta_hat=row.theta_hat,
            g_fault=row.g_fault,
            decision=row.decision.value,
        )
        series.append(truth)
        min_conc = min(min_conc, float(plant.gas.c.min()))
        if profiles is not None:
            profiles.append((t, plant.gas.c.copy()))

    log = detector.log
    theta = series.array("theta_hat")
    c_out = series.array("c_outlet")
    summary = {
        "healthy": sc.healthy,
        "seed": sc.noise.seed,
        "t_end": sc.t_end,
        "n_frames": len(series),
        "rupture_time": plant.mech.rupture_time,
        "vented_n_co2": plant.vent.n_co2_total if plant.vent else None,
        "vent_velocity": plant.vent.v0 if plant.vent else None,
        "peak_theta_hat": float(np.max(np.abs(theta))) if len(theta) else 0.0,
        "peak_outlet_ppm": float(np.max(c_out)) if len(c_out) else sc.duct.c_ambient,
        "min_concentration_ppm": min_conc,
        "peak_t_isc_c": float(np.max(series.array("t_isc_c"))) if len(series) else None,
        **log.summary(),
    }
    return RunResult(series, summary, profiles, sc.duct.centers if profile_dump else None)


# ----------------------------------------------------------------------
# Output
# ----------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return repr(float(v))


def write_series(series: TimeSeries, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_COLUMNS)
        for k in range(len(series)):
            w.writerow([_fmt(series.columns[c][k]) for c in SERIES_COLUMNS])


def read_series(path: str | Path) -> TimeSeries:
    series = TimeSeries()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SERIES_COLUMNS:
            raise ConfigError(f"{path}: unexpected columns {reader.fieldnames}")
        for row in reader:
            series.append({c: row[c] if c == "decision" else float(row[c]) for c in SERIES_COLUMNS})
    return series


def emit(result: RunResult, out_dir: str | Path) -> dict[str, Path]:
    """Write ``timeseries.csv``, ``summary.json`` and, if recorded, ``gas_profile.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"timeseries": out_dir / "timeseries.csv", "summary": out_dir / "summary.json"}
    write_series(result.series, paths["timeseries"])
    with open(paths["summary"], "w") as fh:
        json.dump(result.summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if result.profiles is not None:
        paths["profile"] = out_dir / "gas_profile.csv"
        with open(paths["profile"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t"] + [f"x_{x:.6f}" for x in result.x_centers])
            for t, c in result.profiles:
                w.writerow([repr(float(t))] + [repr(float(v)) for v in c])
    return paths
