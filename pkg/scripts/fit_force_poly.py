"""Fit the 8th-order SOC expansion-force polynomial to a digitized curve.

The digitized points describe a 4.5 Ah NMC pouch cell at 25 degC: a steep rise
at low SOC, a plateau in the middle and a second rise towards full charge,
156 N from empty to full. Prints coefficients (highest power first) ready to
paste into ``packisc.mechanics.DEFAULT_SOC_POLY``.
"""

import numpy as np

SOC = np.array([0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0])
FORCE = np.array([0.0, 17.0, 31.0, 42.0, 51.0, 63.0, 70.0, 76.0, 84.0, 96.0, 112.0, 133.0, 144.5, 156.0])


def main() -> None:
    coeffs = np.polyfit(SOC, FORCE, 8)
    fine = np.linspace(0.0, 1.0, 1001)
    fit = np.polyval(coeffs, fine)
    print("coefficients:", ", ".join(f"{c:.10g}" for c in coeffs))
    print(f"range f(1)-f(0) = {fit[-1] - fit[0]:.3f} N")
    print(f"max residual at knots = {np.abs(np.polyval(coeffs, SOC) - FORCE).max():.3f} N")
    print(f"monotone: {bool(np.all(np.diff(fit) > 0))}")


if __name__ == "__main__":
    main()
