"""Noisy, saturated sensor frames from true simulation values.

Each channel draws from its own PCG64 stream spawned from the master seed
(``numpy.random.SeedSequence``), so adding or dropping a channel never shifts
another channel's noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FORCE_SATURATION = 3560.0  # N
CHANNELS = ("v", "i", "t", "f", "g")


@dataclass(frozen=True)
class NoiseSpec:
    sigma_v: float = 5e-3
    sigma_i: float = 5e-3
    sigma_t: float = 0.5
    sigma_f: float = 8.9
    sigma_g: float = 30.0
    seed: int = 0

    def __post_init__(self) -> None:
        for ch in CHANNELS:
            if getattr(self, f"sigma_{ch}") < 0:
                raise ValueError(f"sigma_{ch} must be non-negative")


@dataclass(frozen=True)
class SensorFrame:
    """One 10 Hz telemetry sample.

    Attributes:
        t: Time, s.
        v_meas: Pack terminal voltage, V.
        i_meas: Pack current, A (discharge positive).
        t_meas: Cell surface temperature, degC.
        f_meas: Stack expansion force, N.
        g_meas: CO2 at the duct outlet, ppm.
    """

    t: float
    v_meas: float
    i_meas: float
    t_meas: float
    f_meas: float
    g_meas: float


def saturate_force(f: float) -> float:
    return min(max(f, 0.0), FORCE_SATURATION)


class NoiseSource:
    """Per-channel Gaussian streams derived from one seed."""

    def __init__(self, seed: int):
        children = np.random.SeedSequence(seed).spawn(len(CHANNELS))
        self._rngs = {ch: np.random.Generator(np.random.PCG64(ss)) for ch, ss in zip(CHANNELS, children)}

    def draw(self, channel: str, size=None):
        """Standard-normal draw(s) from ``channel``'s stream."""
        return self._rngs[channel].standard_normal(size)


def sample(truth: SensorFrame, spec: NoiseSpec, rng: NoiseSource) -> SensorFrame:
    """Corrupt one true frame with zero-mean Gaussian noise and clamp it.

    ``truth`` carries true values in the measured fields. Every channel is
    drawn on every call, including zero-sigma ones, so streams stay aligned.
    """
    return SensorFrame(
        t=truth.t,
        v_meas=truth.v_meas + spec.sigma_v * float(rng.draw("v")),
        i_meas=truth.i_meas + spec.sigma_i * float(rng.draw("i")),
        t_meas=truth.t_meas + spec.sigma_t * float(rng.draw("t")),
        f_meas=saturate_force(truth.f_meas + spec.sigma_f * float(rng.draw("f"))),
        g_meas=max(truth.g_meas + spec.sigma_g * float(rng.draw("g")), 0.0),
    )
