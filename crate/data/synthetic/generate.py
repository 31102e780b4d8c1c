"""Regenerates the synthetic market data set in this directory.

The curve is a smooth EUR-like zero curve with negative short rates; the
surface holds at-the-money normal volatilities from a simple parametric
shape. Prices are left empty so loaders convert them with Bachelier.
"""
import csv
import math
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

HERE = Path(__file__).parent
KNOTS = [0.25, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 25, 30]
RATES = [-0.0039, -0.0031, -0.0028, -0.0024, -0.0019, -0.0013, -0.0006, 0.0001,
         0.0007, 0.0013, 0.0018, 0.0026, 0.0036, 0.0043, 0.0043, 0.0040]
MATURITIES = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20]
TENORS = [1, 2, 3, 4, 5, 7, 10]

spline = CubicSpline(KNOTS, RATES, bc_type="natural")


def discount(t):
    if t == 0:
        return 1.0
    r = spline(max(t, KNOTS[0])) if t >= KNOTS[0] else RATES[0]
    return math.exp(-float(r) * t)


def atm(t0, tenor):
    annuity = sum(discount(t0 + i) for i in range(1, tenor + 1))
    return (discount(t0) - discount(t0 + tenor)) / annuity


def vol_bps(t, tenor):
    hump = 9.0 * (1 - math.exp(-t / 2.5)) - 0.35 * max(t - 8, 0)
    return 41.0 + hump + 2.2 * math.log(tenor)


with open(HERE / "curve.csv", "w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["maturity_years", "zero_rate", "discount"])
    for t, r in zip(KNOTS, RATES):
        w.writerow([t, r, repr(math.exp(-r * t))])

with open(HERE / "surface_payer.csv", "w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["maturity_years", "tenor_years", "strike", "normal_vol_bps", "price"])
    for t in MATURITIES:
        for n in TENORS:
            if t + n <= 30:
                w.writerow([t, n, f"{atm(t, n):.6f}", f"{vol_bps(t, n):.2f}", ""])

with open(HERE / "bermudan_strikes.csv", "w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["maturity_years", "tenor_years", "strike"])
    for t in [1, 3, 5, 7, 10]:
        for n in [2, 5, 7, 10]:
            w.writerow([t, n, f"{atm(t, n):.6f}"])

with open(HERE / "cms_requests.csv", "w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["effective_years", "tenor_years", "index_years"])
    for row in [(0, 5, 5), (0, 10, 5), (0, 5, 10), (0, 10, 10), (3, 5, 5),
                (3, 5, 10), (5, 10, 5), (5, 5, 5), (5, 5, 10)]:
        w.writerow(row)
