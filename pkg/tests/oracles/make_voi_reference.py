"""Regenerate tests/data/voi_reference.json.

Direct 50-digit summation of the net-VOI series with mpmath: every term from
n = ceil(n_max) up to n_max + 3000 is added, far past where the Poisson
terms drop below 1e-300 for the rates used here.
"""

import itertools
import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50

NUS = ["0.1", "0.5", "1", "2", "5", "10", "20"]
N_MAXES = [1, 2, 5, 10, 50]
DOMAINS = [2, 10, 30]
GAMMAS = ["0", "0.001"]


def series(n_max, nu):
    nu = mp.mpf(nu)
    total = mp.mpf(0)
    for n in range(int(mp.ceil(n_max)), n_max + 3000):
        total += (mp.mpf(1) / n_max - mp.mpf(1) / n) * mp.exp(-nu) * nu ** n / mp.factorial(n)
    return total


def main():
    rows = []
    cache = {}
    for nu, n_max, d, g in itertools.product(NUS, N_MAXES, DOMAINS, GAMMAS):
        key = (nu, n_max)
        if key not in cache:
            cache[key] = series(n_max, nu)
        value = d * cache[key] - mp.mpf(g)
        rows.append({"nu": float(nu), "n_max": n_max, "domain_size": d, "gamma": float(g), "net_voi": mp.nstr(value, 30)})
    extra = {"nu": 5.0, "n_max": 1, "domain_size": 10, "gamma": 0.001, "net_voi": mp.nstr(10 * series(1, "5") - mp.mpf("0.001"), 30)}
    out = Path(__file__).resolve().parents[1] / "data" / "voi_reference.json"
    out.write_text(json.dumps({"grid": rows, "example": extra}, indent=1) + "\n")


if __name__ == "__main__":
    main()
