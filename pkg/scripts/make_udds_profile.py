"""Generate the bundled representative UDDS pack-current profile.

The speed trace is a coarse reconstruction of the UDDS schedule: 1369 s of
micro-trips with the long 91 km/h excursion early on, an urban tail of short
stop-and-go trips and idles in between. Speed is turned into pack current with
a simple road-load model for a mid-size EV whose module is 96 series groups of
the 50-parallel cell block. Representative data, not the official schedule.
"""

import argparse
from pathlib import Path

import numpy as np

# (idle_s, accel_s, cruise_s, decel_s, peak_kmh)
MICRO_TRIPS = [
    (20, 25, 80, 25, 50),
    (15, 40, 80, 30, 91),
    (20, 15, 25, 15, 40),
    (18, 12, 20, 14, 35),
    (25, 15, 35, 15, 45),
    (20, 10, 15, 10, 30),
    (15, 14, 40, 16, 48),
    (30, 12, 20, 12, 38),
    (18, 16, 30, 16, 52),
    (20, 10, 12, 10, 28),
    (25, 14, 28, 15, 42),
    (18, 12, 22, 12, 36),
    (20, 15, 30, 15, 46),
    (16, 10, 14, 10, 30),
    (22, 13, 26, 14, 40),
    (20, 12, 18, 12, 34),
    (18, 14, 24, 14, 44),
]
DURATION = 1369

MASS = 1800.0  # kg
C_RR = 0.010
CDA = 0.70  # m^2
RHO_AIR = 1.2
G = 9.81
DRIVE_EFF = 0.90
REGEN_EFF = 0.60
AUX_POWER = 500.0  # W
PACK_VOLTAGE = 96 * 3.7


def speed_trace() -> np.ndarray:
    v = []
    for idle, acc, cruise, dec, peak in MICRO_TRIPS:
        vp = peak / 3.6
        v += [0.0] * idle
        v += list(vp * 0.5 * (1 - np.cos(np.pi * np.arange(1, acc + 1) / acc)))
        # gentle speed oscillation while cruising
        v += list(vp * (1 + 0.05 * np.sin(2 * np.pi * np.arange(cruise) / 23.0)))
        v += list(vp * 0.5 * (1 + np.cos(np.pi * np.arange(1, dec + 1) / dec)))
    v = np.array(v[:DURATION])
    return np.concatenate([v, np.zeros(DURATION + 1 - len(v))])


def pack_current(v: np.ndarray) -> np.ndarray:
    a = np.gradient(v)
    moving = v > 0.1
    f_trac = MASS * a + moving * (MASS * G * C_RR + 0.5 * RHO_AIR * CDA * v**2)
    p_wheel = f_trac * v
    p_batt = np.where(p_wheel >= 0, p_wheel / DRIVE_EFF, p_wheel * REGEN_EFF) + AUX_POWER
    return p_batt / PACK_VOLTAGE


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parents[1] / "src" / "packisc" / "data" / "udds_pack_current.csv",
    )
    args = ap.parse_args()
    v = speed_trace()
    i = pack_current(v)
    with open(args.out, "w") as fh:
        fh.write("t_s,current_a\n")
        for t, cur in enumerate(i):
            fh.write(f"{t},{cur:.3f}\n")
    print(f"wrote {args.out}: {len(i)} samples, peak {i.max():.1f} A, min {i.min():.1f} A, mean {i.mean():.2f} A")


if __name__ == "__main__":
    main()
