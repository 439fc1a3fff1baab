"""Var(R(1, N)) against N for several generators, with fitted log-log slopes.

Usage: python3 scripts/variance_decay.py [--replicates 200] [--kmin 10] [--kmax 16]
"""
import argparse

from torusppc.experiments import ExperimentConfig, variance_decay_scan
from torusppc.generators import GeneratorSpec, UniformStep

GENERATORS = {
    "batch M=4": GeneratorSpec("batch", M=4),
    "iid": GeneratorSpec("iid"),
    "walk uniform(0,1)": GeneratorSpec("walk", step=UniformStep(0.0, 1.0)),
    "walk uniform(0,0.5)": GeneratorSpec("walk", step=UniformStep(0.0, 0.5)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replicates", type=int, default=200)
    ap.add_argument("--kmin", type=int, default=10)
    ap.add_argument("--kmax", type=int, default=16)
    ap.add_argument("--seed", type=int, default=1313)
    args = ap.parse_args()
    ns = tuple(1 << k for k in range(args.kmin, args.kmax + 1))
    print("generator,n,var_R,slope")
    for label, gen in GENERATORS.items():
        cfg = ExperimentConfig(gen, s_values=(1.0,), n_values=ns, replicates=args.replicates,
                               master_seed=args.seed)
        scan = variance_decay_scan(cfg)
        for n, v in scan.points:
            print(f"{label},{n},{v!r},{scan.slope!r}")


if __name__ == "__main__":
    main()
