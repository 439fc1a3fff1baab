"""Sup deviation of the n-fold step sum's CDF from uniform, with a geometric-rate fit."""
import argparse

from torusppc.generators import parse_step
from torusppc.spectral import cdf_deviation_profile, schatte_rate_fit, sup_fourier


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("steps", nargs="*", default=["uniform:0:0.5", "uniform:0.1:0.35", "triangle:64"])
    ap.add_argument("--nmax", type=int, default=40)
    ap.add_argument("--grid", type=int, default=1 << 16)
    args = ap.parse_args()
    for text in args.steps:
        step = parse_step(text)
        fit = schatte_rate_fit(step, range(2, 21), args.grid)
        print(f"# {text}: sup|c_r|={sup_fourier(step):.6f} fitted omega={fit.fitted_omega:.6f}")
        devs = cdf_deviation_profile(step, range(1, args.nmax + 1), args.grid)
        for n, d in enumerate(devs, 1):
            print(f"{text},{n},{d!r}")


if __name__ == "__main__":
    main()
