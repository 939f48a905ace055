#!/usr/bin/env python3
"""Sweep the squeezed-vacuum gain and emit the square-expression curve.

Writes the same CSV as `bnl contextuality bsv --gamma-min ... --gamma-max ...`
plus a closed-form column for quick plotting of the analytic reference.
"""

import argparse
import math
import sys

import numpy as np

from bnl.indicators import contextuality_verdict
from bnl.states import BsvParams, bsv_state, prob_diagonal


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--gamma-min", type=float, default=0.0)
    parser.add_argument("--gamma-max", type=float, default=1.2)
    parser.add_argument("--steps", type=int, default=49)
    parser.add_argument("--cutoff", type=int, default=40)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    lines = ["gamma,p_diag,p_diag_closed_form,pm_value,margin,verdict"]
    for gamma in np.linspace(args.gamma_min, args.gamma_max, args.steps):
        state = bsv_state(BsvParams(float(gamma), args.cutoff))
        verdict = contextuality_verdict(state)
        closed = 1.0 / math.cosh(2 * gamma)
        lines.append(
            f"{float(gamma)!r},{prob_diagonal(state)!r},{closed!r},"
            f"{verdict.value!r},{verdict.margin!r},{verdict.verdict}"
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
