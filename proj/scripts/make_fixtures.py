#!/usr/bin/env python3
"""Regenerates the small synthetic fixtures under data/.

The files mimic the layouts of public temporal-network datasets so the
ingestion paths can be exercised without downloading anything:

  cow_dyadic_excerpt.csv   Correlates-of-War style dyadic trade table
                           (ccode1,ccode2,year,...,flow1,flow2,...; -9 = missing)
  college_msg_excerpt.txt  contact sequence "SRC DST UNIXTS", one message per line
  equity_fixture.csv       50 assets, monthly |correlation| networks (date,i,j,w)
                           quoted on a 0.05 grid

The values are synthetic. Output is deterministic for a given --seed.
"""

import argparse
import datetime as dt
from pathlib import Path

import numpy as np


def cow(rng: np.random.Generator, path: Path) -> None:
    codes = [2, 20, 70, 200, 210, 211, 220, 225, 230, 235, 255, 290, 310, 325, 345, 350, 355, 365, 375, 380,
             385, 390, 395, 530, 560, 615, 630, 640, 651, 660, 666, 670, 700, 710, 732, 740, 750, 770, 820, 900]
    names = {c: f"Country{c}" for c in codes}
    size = rng.lognormal(0.0, 1.0, len(codes))
    years = range(1990, 2000)
    # Gravity-like base flows; each dyad trades with probability rising in size.
    flows = {}
    for a in range(len(codes)):
        for b in range(a + 1, len(codes)):
            if rng.random() < min(1.0, 0.25 + 0.15 * size[a] * size[b]):
                base = 10.0 * size[a] * size[b] * rng.lognormal(0.0, 0.5)
                flows[(a, b)] = [base * rng.lognormal(0.0, 0.2), base * rng.lognormal(0.0, 0.2)]
    header = ["ccode1", "ccode2", "year", "importer1", "importer2", "flow1", "flow2", "smoothflow1",
              "smoothflow2", "smoothtotrade", "source1", "source2", "version"]
    with path.open("w") as out:
        out.write(",".join(header) + "\n")
        for year in years:
            for (a, b), f in sorted(flows.items()):
                for k in range(2):
                    if rng.random() < 0.35:  # most years a flow is reported unchanged
                        continue
                    f[k] *= float(np.exp(rng.normal(0.0, 0.15)))
                f1 = "-9" if rng.random() < 0.02 else f"{f[0]:.2f}"
                f2 = "-9" if rng.random() < 0.02 else f"{f[1]:.2f}"
                total = f[0] + f[1]
                out.write(f"{codes[a]},{codes[b]},{year},{names[codes[a]]},{names[codes[b]]},{f1},{f2},"
                          f"{f[0]:.2f},{f[1]:.2f},{total:.2f},1,1,4.0\n")


def college(rng: np.random.Generator, path: Path) -> None:
    users = 60
    activity = rng.pareto(1.5, users) + 0.2
    start = 1082008561  # 2004-04-15
    days = 40
    friends = [rng.choice(users, size=6, replace=False) for _ in range(users)]
    lines = []
    for day in range(days):
        for u in range(users):
            for _ in range(rng.poisson(0.4 * activity[u])):
                pool = friends[u] if rng.random() < 0.8 else np.arange(users)
                v = int(rng.choice(pool))
                if v == u:
                    continue
                ts = start + day * 86400 + int(rng.integers(0, 86400))
                lines.append((ts, u + 1, v + 1))
    lines.sort()
    with path.open("w") as out:
        for ts, u, v in lines:
            out.write(f"{u} {v} {ts}\n")


def equity(rng: np.random.Generator, path: Path) -> None:
    assets = 50
    factors = 3
    loadings = rng.normal(0.0, 1.0, (assets, factors))
    months = 12
    start = dt.date(2020, 1, 1)
    with path.open("w") as out:
        out.write("date,asset_i,asset_j,abs_correlation\n")
        for m in range(months):
            loadings += rng.normal(0.0, 0.1, loadings.shape)
            returns = rng.normal(0.0, 1.0, (60, factors)) @ loadings.T + rng.normal(0.0, 1.5, (60, assets))
            corr = np.corrcoef(returns.T)
            day = dt.date(start.year + (start.month - 1 + m) // 12, (start.month - 1 + m) % 12 + 1, 1)
            for i in range(assets):
                for j in range(i + 1, assets):
                    # Quoted on a 0.05 grid, so many pairs keep their weight.
                    w = round(abs(corr[i, j]) * 20.0) / 20.0
                    if w >= 0.2:
                        out.write(f"{day.isoformat()},A{i:02d},A{j:02d},{w:.2f}\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    cow(np.random.default_rng([args.seed, 1]), args.out / "cow_dyadic_excerpt.csv")
    college(np.random.default_rng([args.seed, 2]), args.out / "college_msg_excerpt.txt")
    equity(np.random.default_rng([args.seed, 3]), args.out / "equity_fixture.csv")


if __name__ == "__main__":
    main()
