"""Simulate the finite-sample Dickey-Fuller tau distribution (constant, no trend)
and fit a quantile response surface q(p, T) = b0 + b1/T + b2/T^2 + b3/T^3.

The output JSON is shipped as ``econo/data/df_tau_c_surface.json`` and is what
``econo.unit_root.mackinnon_pvalue`` interpolates.  Regenerating takes a few
minutes on one core.

    python scripts/build_df_surface.py --reps 1000000 --seed 19960101
"""
import argparse
import json
from pathlib import Path

import numpy as np

SAMPLE_SIZES = [20, 25, 30, 35, 40, 45, 50, 60, 70, 80, 90, 100, 125, 150, 200,
                250, 300, 400, 500, 750, 1000]


def probability_grid():
    lo = [0.0001, 0.0002, 0.0005] + [round(0.001 * i, 4) for i in range(1, 10)]
    mid = [round(0.01 * i, 2) for i in range(1, 100)]
    hi = [round(1 - p, 4) for p in reversed(lo)]
    return lo + mid + hi


def simulate_tau(T, reps, rng, chunk=100_000):
    """Dickey-Fuller t statistics of Delta y on (1, y_{t-1}) for T regression rows."""
    out = []
    left = reps
    while left > 0:
        m = min(chunk, left)
        y = np.cumsum(rng.standard_normal((m, T + 1)), axis=1)
        dy = np.diff(y, axis=1)
        x = y[:, :-1]
        xm = x - x.mean(axis=1, keepdims=True)
        dym = dy - dy.mean(axis=1, keepdims=True)
        sxx = np.einsum("ij,ij->i", xm, xm)
        alpha = np.einsum("ij,ij->i", xm, dym) / sxx
        r = dym - alpha[:, None] * xm
        s2 = np.einsum("ij,ij->i", r, r) / (T - 2)
        out.append(alpha / np.sqrt(s2 / sxx))
        left -= m
    return np.concatenate(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=19960101)
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parents[1] / "src/econo/data/df_tau_c_surface.json")
    args = ap.parse_args()

    probs = np.array(probability_grid())
    quantiles = np.empty((len(SAMPLE_SIZES), len(probs)))
    for i, T in enumerate(SAMPLE_SIZES):
        rng = np.random.default_rng([args.seed, T])
        tau = simulate_tau(T, args.reps, rng)
        quantiles[i] = np.quantile(tau, probs)
        print(f"T={T:5d}  q(0.05)={quantiles[i, probs.searchsorted(0.05)]:.5f}", flush=True)

    inv_t = 1.0 / np.array(SAMPLE_SIZES, dtype=float)
    design = np.column_stack([np.ones_like(inv_t), inv_t, inv_t**2, inv_t**3])
    coefs, *_ = np.linalg.lstsq(design, quantiles, rcond=None)

    payload = {
        "description": "Dickey-Fuller tau, constant no trend, one variable: "
                       "quantile(p, T) = b0 + b1/T + b2/T^2 + b3/T^3",
        "seed": args.seed,
        "replications": args.reps,
        "sample_sizes": SAMPLE_SIZES,
        "probabilities": probs.tolist(),
        "coefficients": coefs.T.round(6).tolist(),
    }
    args.out.write_text(json.dumps(payload, indent=1) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
