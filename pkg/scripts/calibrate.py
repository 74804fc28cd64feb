"""Calibrate the free parameters of the default fault scenario.

Targets: vent opens 1.5 s after the trigger, vent velocity 0.12 m/s, and the
noiseless fault-force estimate, linearly interpolated between 10 Hz frames,
crosses the force threshold 0.65 s after the trigger, so the first frame
above threshold is at +0.7 s with margin on both sides.

Tunes, in order: ISC-region heat capacity (rupture time), rupture area
(vent velocity, closed form), observer gain (alarm time). Prints the values
to paste into the default scenario file.
"""

import argparse
import math
from dataclasses import replace

from scipy.optimize import brentq

from packisc.gas_transport import GAS_CONSTANT
from packisc.scenario import DEFAULT_SCENARIO, load_scenario, run
from packisc.sensing import NoiseSpec

RUPTURE_DELAY = 1.5
VENT_VELOCITY = 0.12
FORCE_CROSS_DELAY = 0.65


def quiet(sc, **kw):
    return replace(sc, noise=NoiseSpec(0, 0, 0, 0, 0, sc.noise.seed), **kw)


def rupture_delay(sc, c_p):
    res = run(quiet(sc, thermal=replace(sc.thermal, c_p=c_p), t_end=sc.short.t_trigger + 3.0))
    t = res.summary["rupture_time"]
    return (t if t is not None else math.inf) - sc.short.t_trigger


def theta_cross(sc, l_gain):
    res = run(quiet(sc, l_gain=l_gain, t_end=sc.short.t_trigger + 2.0))
    t = res.series.array("t")
    th = res.series.array("theta_hat")
    eps = sc.thresholds.eps_f
    for k in range(1, len(t)):
        if th[k] > eps >= th[k - 1]:
            return t[k - 1] + (eps - th[k - 1]) / (th[k] - th[k - 1]) * (t[k] - t[k - 1]) - sc.short.t_trigger
    return math.inf


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("scenario", nargs="?", default=DEFAULT_SCENARIO)
    args = ap.parse_args()
    sc = load_scenario(args.scenario)

    c_p = brentq(lambda c: rupture_delay(sc, c) - RUPTURE_DELAY, 1.5, 1.95, xtol=1e-5)
    sc = replace(sc, thermal=replace(sc.thermal, c_p=round(c_p, 4)))
    print(f"thermal.c_p      = {sc.thermal.c_p}  (rupture delay {rupture_delay(sc, sc.thermal.c_p):.3f} s)")

    res = run(quiet(sc, t_end=sc.short.t_trigger + 3.0))
    n_vent = res.summary["vented_n_co2"]
    duct = sc.duct
    a_rup = n_vent * GAS_CONSTANT * duct.t_gas / (duct.p_atm * VENT_VELOCITY * sc.vent_duration)
    print(f"duct.a_rupture   = {a_rup:.4g}  (vented {n_vent:.4g} mol)")

    l_gain = brentq(lambda g: theta_cross(sc, g) - FORCE_CROSS_DELAY, 0.02, 5.0, xtol=1e-5)
    print(f"l_gain           = {l_gain:.4f}  (threshold crossing +{theta_cross(sc, round(l_gain, 4)):.3f} s)")


if __name__ == "__main__":
    main()
