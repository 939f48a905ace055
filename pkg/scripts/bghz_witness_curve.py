#!/usr/bin/env python3
"""Qualitative witness-strength curve from the generator-exponential path.

NON-AUTHORITATIVE: the three-beam state here comes from a truncated dense
exponential of the triple-emission generator, which is sensitive to where
the sector is cut.  Use the curve for shape only; quantitative results
should ingest externally computed coefficients via `bnl entanglement
witness bghz --coeffs FILE`.
"""

import argparse
import sys

import numpy as np

from bnl.indicators import GHZ3_WITNESS, witness_expectation
from bnl.states import bghz_generator_state, prob_diagonal


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--gamma-min", type=float, default=0.02)
    parser.add_argument("--gamma-max", type=float, default=0.6)
    parser.add_argument("--steps", type=int, default=30)
    parser.add_argument("--cutoff", type=int, default=10)
    parser.add_argument("--relative-sign", type=float, default=1.0, choices=(1.0, -1.0))
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    lines = ["gamma,witness_value,witness_strength,p_diag,authoritative"]
    for gamma in np.linspace(args.gamma_min, args.gamma_max, args.steps):
        state = bghz_generator_state(
            float(gamma), args.cutoff, relative_sign=args.relative_sign
        )
        value = witness_expectation(GHZ3_WITNESS, state)
        lines.append(
            f"{float(gamma)!r},{value!r},{-value!r},{prob_diagonal(state)!r},false"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
