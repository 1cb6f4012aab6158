#!/usr/bin/env python3
"""Writes the synthetic JHU-style fixtures in this directory.

Each file holds cumulative daily counts in the JHU wide layout
(Province/State, Country/Region, Lat, Long, then one m/d/yy column per day).
Counts come from a daily renewal model driven by a hand-drawn reproduction
path, with negative-binomial noise, a weekday reporting pattern and a few
downward corrections. Rerunning the script reproduces the files exactly.
"""

import argparse
import datetime as dt
from pathlib import Path

import numpy as np
from scipy import stats

HORIZON = 25
SERIAL_MEAN, SERIAL_STD = 6.6, 3.5


def serial_interval():
    shape = (SERIAL_MEAN / SERIAL_STD) ** 2
    scale = SERIAL_STD**2 / SERIAL_MEAN
    cdf = stats.gamma.cdf(np.arange(HORIZON + 1), a=shape, scale=scale)
    w = np.diff(cdf)
    return w / w.sum()


def path(start, end, knots):
    """Piecewise-linear reproduction number through (date, value) knots."""
    days = (end - start).days + 1
    t = np.arange(days)
    xs = [(d - start).days for d, _ in knots]
    ys = [v for _, v in knots]
    return np.interp(t, xs, ys)


def simulate(r, level, rng, dispersion=30.0):
    psi = serial_interval()
    n = len(r)
    y = np.zeros(n)
    for t in range(n):
        past = [y[t - s] if t - s >= 0 else level for s in range(1, HORIZON + 1)]
        mean = r[t] * float(np.dot(psi, past))
        p = dispersion / (dispersion + mean)
        y[t] = rng.negative_binomial(dispersion, p)
    return y


def report(y, start, rng, weekday_factors, corrections):
    """Applies weekday under/over-reporting and returns cumulative counts."""
    out = np.array(
        [y[i] * weekday_factors[(start + dt.timedelta(i)).weekday()] for i in range(len(y))]
    )
    out = np.round(out)
    cum = np.cumsum(out)
    for day, amount in corrections:
        i = (day - start).days
        cum[i:] -= amount  # later revision: cumulative total drops
    return cum


def write(path_out, start, rows):
    n = len(rows[0][2])
    dates = [start + dt.timedelta(i) for i in range(n)]
    header = ["Province/State", "Country/Region", "Lat", "Long"] + [
        f"{d.month}/{d.day}/{d.strftime('%y')}" for d in dates
    ]
    with open(path_out, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for province, country, cum, lat, lon in rows:
            values = ",".join(str(int(v)) for v in cum)
            f.write(f"{province},{country},{lat},{lon},{values}\n")


D = dt.date
WEEKDAYS = [1.15, 1.1, 1.05, 1.05, 1.0, 0.85, 0.8]

COUNTRIES = {
    "france": dict(
        country="France", start=D(2021, 10, 4), end=D(2023, 2, 6), level=5000, lat=46.2, lon=2.2,
        knots=[(D(2021, 10, 4), 1.0), (D(2021, 11, 1), 1.35), (D(2021, 12, 20), 1.6),
               (D(2022, 1, 10), 1.0), (D(2022, 1, 31), 0.75), (D(2022, 3, 1), 1.2),
               (D(2022, 4, 5), 0.8), (D(2022, 6, 1), 1.15), (D(2022, 7, 10), 0.8),
               (D(2022, 8, 25), 0.95), (D(2022, 10, 1), 1.2), (D(2022, 11, 1), 0.8),
               (D(2022, 12, 10), 1.1), (D(2023, 1, 5), 0.8), (D(2023, 2, 6), 0.95)],
        corrections=[(D(2022, 5, 20), 40000), (D(2022, 11, 3), 15000)],
    ),
    "india": dict(
        country="India", start=D(2021, 10, 4), end=D(2023, 2, 6), level=20000, lat=20.6, lon=79.0,
        knots=[(D(2021, 10, 4), 0.9), (D(2021, 12, 27), 0.95), (D(2022, 1, 4), 2.4),
               (D(2022, 1, 14), 2.2), (D(2022, 1, 26), 0.7), (D(2022, 3, 10), 0.75),
               (D(2022, 4, 20), 1.0), (D(2022, 5, 25), 1.35), (D(2022, 7, 1), 1.0),
               (D(2022, 8, 10), 0.8), (D(2022, 10, 1), 0.9), (D(2023, 2, 6), 1.0)],
        corrections=[(D(2022, 3, 15), 20000)],
    ),
    "canada": dict(
        country="Canada", start=D(2020, 12, 21), end=D(2022, 4, 25), level=6500, lat=56.1, lon=-106.3,
        knots=[(D(2020, 12, 21), 1.05), (D(2021, 1, 15), 0.8), (D(2021, 2, 20), 1.0),
               (D(2021, 3, 25), 1.25), (D(2021, 4, 25), 0.8), (D(2021, 6, 15), 0.8),
               (D(2021, 7, 20), 1.05), (D(2021, 8, 10), 1.5), (D(2021, 9, 15), 0.95),
               (D(2021, 11, 1), 1.0), (D(2021, 12, 20), 1.6), (D(2022, 1, 10), 0.8),
               (D(2022, 2, 15), 0.85), (D(2022, 3, 20), 1.15), (D(2022, 4, 25), 1.0)],
        corrections=[(D(2021, 9, 1), 5000)],
        provinces=[("Ontario", 0.4, 51.3, -85.3), ("Quebec", 0.35, 52.9, -73.5),
                   ("British Columbia", 0.25, 53.7, -127.6)],
    ),
    "argentina": dict(
        country="Argentina", start=D(2020, 12, 21), end=D(2022, 4, 25), level=7000, lat=-38.4, lon=-63.6,
        knots=[(D(2020, 12, 21), 1.2), (D(2021, 1, 20), 0.9), (D(2021, 3, 1), 1.0),
               (D(2021, 4, 10), 1.3), (D(2021, 5, 20), 0.95), (D(2021, 6, 20), 0.8),
               (D(2021, 9, 1), 0.8), (D(2021, 11, 15), 1.0), (D(2021, 12, 20), 1.9),
               (D(2022, 1, 10), 0.9), (D(2022, 2, 10), 0.7), (D(2022, 4, 25), 0.95)],
        corrections=[(D(2021, 10, 12), 3000)],
    ),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent)
    parser.add_argument("--seed", type=int, default=20211004)
    args = parser.parse_args()
    for k, (name, spec) in enumerate(COUNTRIES.items()):
        rng = np.random.default_rng([args.seed, k])
        r = path(spec["start"], spec["end"], spec["knots"])
        y = simulate(r, spec["level"], rng)
        cum = report(y, spec["start"], rng, WEEKDAYS, spec["corrections"])
        if "provinces" in spec:
            rows = []
            remaining = cum.copy()
            for i, (prov, share, lat, lon) in enumerate(spec["provinces"]):
                part = remaining if i == len(spec["provinces"]) - 1 else np.floor(cum * share)
                if i < len(spec["provinces"]) - 1:
                    remaining = remaining - part
                rows.append((prov, spec["country"], part, lat, lon))
        else:
            rows = [("", spec["country"], cum, spec["lat"], spec["lon"])]
        write(args.out / f"jhu_{name}.csv", spec["start"], rows)
        np.savetxt(args.out / f"truth_{name}.csv", r, fmt="%.6g", header="R_daily", comments="")


if __name__ == "__main__":
    main()
