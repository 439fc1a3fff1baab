"""R_alpha(1, N) along the golden-ratio Kronecker sequence for N = 2^kmin .. 2^kmax."""
import argparse

import numpy as np

from torusppc.generators import GOLDEN, gen_kronecker
from torusppc.paircorr import pair_counts


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmin", type=int, default=8)
    ap.add_argument("--kmax", type=int, default=20)
    ap.add_argument("--alpha", type=float, nargs="+", default=[0.5, 0.75, 1.0])
    args = ap.parse_args()
    x = np.asarray(gen_kronecker(1 << args.kmax, 0.0, GOLDEN))
    print("n," + ",".join(f"R_{a:g}" for a in args.alpha))
    for k in range(args.kmin, args.kmax + 1):
        n = 1 << k
        counts = pair_counts(x[:n], [1.0 / n ** a for a in args.alpha])
        print(f"{n}," + ",".join(repr(c / n ** (2 - a)) for c, a in zip(counts, args.alpha)))


if __name__ == "__main__":
    main()
