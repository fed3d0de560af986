"""Search step-dummy break quarters for the levels regression with dummies.

    python3 scripts/search_breaks.py            # closest to the published coefficients
    python3 scripts/search_breaks.py --min-ssr  # least-squares choice
"""
import argparse

from econo.config import PipelineConfig, build_dataset
from econo.eqspec import parse_equation
from econo.ols import search_break_quarters
from econo.series import QuarterPeriod

TARGET = {"C": 3442.796, "CAPITALFIJO": 2.151688, "IED": 0.300825,
          "D1": -2527.361, "D2": 6773.382, "D3": 13359.80}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--years", type=int, nargs=3, default=(2012, 2017, 2021))
    ap.add_argument("--min-ssr", action="store_true")
    args = ap.parse_args()
    data = build_dataset(PipelineConfig(breaks=(), generate=()))
    pools = [[QuarterPeriod(y, q) for q in range(1, 5)] for y in args.years]
    res = search_break_quarters(parse_equation("PIB C CAPITALFIJO IED D1 D2 D3"), data, pools,
                                target=None if args.min_ssr else TARGET)
    print("breaks:", " ".join(str(q) for q in res.breaks))
    print("score :", res.score)
    for c in res.fit.coefficients:
        print(f"  {c.name:12s} {c.estimate: .6f}")
    print("  DW          ", res.fit.dw)


if __name__ == "__main__":
    main()
