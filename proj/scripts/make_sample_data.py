#!/usr/bin/env python3
"""Regenerates the bundled sample CSVs in data/sample/.

Three synthetic daily series in the CoinGecko export format. ALPHA and BRAVO
behave like ordinary tokens (geometric price walk, drifting supply, lognormal
daily velocity); USDT is the pegged store-of-value series. A few early rows
have blank market caps, matching what real exports look like.

Deterministic: fixed per-asset seeds, so the committed files never churn.
"""

import math
import random
from datetime import date, timedelta
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "sample"
START = date(2022, 5, 1)
DAYS = 460


def walk(asset, seed, p0, drift, vol, m0, m_growth, lv_mu, lv_sigma, blank_mc_rows):
    rng = random.Random(seed)
    rows = []
    price = p0
    for i in range(DAYS):
        day = START + timedelta(days=i)
        price *= math.exp(rng.gauss(drift, vol))
        supply = m0 + m_growth * i
        mc = price * supply
        velocity = math.exp(rng.gauss(lv_mu, lv_sigma))
        volume = velocity * mc
        mc_field = "" if i < blank_mc_rows else repr(mc)
        rows.append((f"{day.isoformat()} 00:00:00 UTC", repr(price), mc_field, repr(volume)))
    write(asset, rows)


def pegged(asset, seed, m0, m_growth, lv_mu, lv_sigma):
    rng = random.Random(seed)
    rows = []
    for i in range(DAYS):
        day = START + timedelta(days=i)
        price = 1.0 + rng.gauss(0.0, 0.0015)
        supply = m0 + m_growth * i
        mc = price * supply
        volume = math.exp(rng.gauss(lv_mu, lv_sigma)) * mc
        rows.append((f"{day.isoformat()} 00:00:00 UTC", repr(price), repr(mc), repr(volume)))
    write(asset, rows)


def write(asset, rows):
    path = OUT / f"{asset}.csv"
    with open(path, "w", newline="") as f:
        f.write("snapped_at,price,market_cap,total_volume\n")
        for r in rows:
            f.write(",".join(r) + "\n")
    print(f"wrote {path} ({len(rows)} rows)")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    walk("ALPHA", seed=101, p0=42.0, drift=0.0004, vol=0.035,
         m0=21_000_000.0, m_growth=4_000.0, lv_mu=math.log(0.055), lv_sigma=0.55,
         blank_mc_rows=3)
    walk("BRAVO", seed=202, p0=2.8, drift=-0.0002, vol=0.05,
         m0=480_000_000.0, m_growth=150_000.0, lv_mu=math.log(0.035), lv_sigma=0.7,
         blank_mc_rows=2)
    pegged("USDT", seed=303, m0=70_000_000_000.0, m_growth=12_000_000.0,
           lv_mu=math.log(0.18), lv_sigma=0.4)


if __name__ == "__main__":
    main()
