"""Convergence of the relaxed iteration for several relaxation constants.

Prints, per gamma, whether the step-norm test fired, the final step norm and
the best true error seen; ``--trace`` dumps the per-iteration J and step.

    python3 scripts/gamma_sweep.py --gammas 0.1 0.25 0.5 1.0 --k-max 100
"""

import argparse

import numpy as np

from armagraph import DesignSpec, design_wls


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--gammas", type=float, nargs="+", default=[0.1, 0.25, 0.5])
    parser.add_argument("--k-max", type=int, default=25)
    parser.add_argument("--order", type=int, default=11, help="P = Q")
    parser.add_argument("--trace", action="store_true")
    args = parser.parse_args()

    for gamma in args.gammas:
        spec = DesignSpec(gamma=gamma, k_max=args.k_max, order_p=args.order, order_q=args.order)
        res = design_wls(spec)
        steps = np.array([r.step for r in res.trace])
        best = min(min(r.objective, r.phi_objective) for r in res.trace)
        print(f"gamma={gamma:<5} converged={res.converged!s:<5} iterations={res.iterations:<4} "
              f"last_step={steps[-1]:.2e} min_step={steps.min():.2e} "
              f"best_SSE={10 * np.log10(best):.2f} dB")
        if args.trace:
            for r in res.trace:
                print(f"    k={r.k:<4} J={r.objective:.6e} step={r.step:.3e}")


if __name__ == "__main__":
    main()
