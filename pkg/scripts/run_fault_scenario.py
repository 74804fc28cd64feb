"""Run the default fault scenario next to its healthy twin and print the key event times.

Usage: python scripts/run_fault_scenario.py [--seeds 10]
"""

import argparse
from dataclasses import replace

import numpy as np

from packisc.scenario import load_scenario, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    sc = load_scenario()
    rows = []
    for seed in range(args.seeds):
        s = run(replace(sc, noise=replace(sc.noise, seed=seed))).summary
        rows.append((s["first_force_alarm"], s["first_gas_alarm"], s["alert_time"]))
        print(f"seed {seed:3d}  force {s['first_force_alarm']}  gas {s['first_gas_alarm']}  alert {s['alert_time']}")

    fault = run(sc)
    healthy = run(replace(sc, short=None)).summary
    f = np.array(rows, dtype=float)
    print(f"\nrupture at {fault.summary['rupture_time']} s, vent velocity {fault.summary['vent_velocity']:.3f} m/s")
    print(f"peak ISC temperature {fault.summary['peak_t_isc_c']:.1f} C, peak outlet CO2 {fault.summary['peak_outlet_ppm']:.0f} ppm")
    print(f"mean force alarm {f[:, 0].mean():.2f} s, mean gas alarm {f[:, 1].mean():.2f} s")
    print(f"healthy twin: peak |theta| {healthy['peak_theta_hat']:.2f} N, decision {healthy['final_decision']}")


if __name__ == "__main__":
    main()
