"""Command-line surface: verification suites, state evaluation and sweeps.

Commands emit CSV for sweep curves and JSON for structured verdicts; no
plotting happens in-process.  Output is byte-stable for fixed flags and
seed.  Exit codes: 0 success, 1 usage error, 2 verification failure,
3 input parse failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import indicators, states
from .fock import MultiBeamState, basis_state, build_space
from .gpauli import verify_algebra
from .indicators import (
    GHZ3_WITNESS,
    PHI_PLUS_WITNESS,
    SINGLET_WITNESS,
    DegenerateCertificateError,
    VerdictRecord,
    WitnessSpec,
)
from .modes import counterexample_report
from .states import (
    BsvParams,
    CoefficientFileError,
    bghz_generator_state,
    bghz_state,
    bsv_state,
    load_bghz_coefficients,
    prob_diagonal,
    qubit_embed,
    random_separable,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2
EXIT_PARSE = 3

CSV_HEADER = "gamma,p_diag,pm_value,margin,lo,hi,verdict"

WITNESSES: dict[str, WitnessSpec] = {
    "singlet": SINGLET_WITNESS,
    "phi-plus": PHI_PLUS_WITNESS,
    "ghz3": GHZ3_WITNESS,
}


class StateFileError(ValueError):
    """Malformed amplitude file; the message names the offending line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 on usage errors
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass(frozen=True)
class SweepSpec:
    """Evenly spaced gain grid for curve emission."""

    gamma_min: float
    gamma_max: float
    steps: int
    cutoff: int

    def __post_init__(self) -> None:
        if self.gamma_min > self.gamma_max:
            raise ValueError("gamma-min must not exceed gamma-max")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")

    def grid(self) -> list[float]:
        return [float(g) for g in np.linspace(self.gamma_min, self.gamma_max, self.steps)]


def load_state_file(path, cutoff: int | None = None) -> MultiBeamState:
    """Parse amplitude lines `n_a1,n_b1,n_a2,n_b2[,n_a3,n_b3],real,imag`.

    The state is normalized on load; a deficit above 1e-6 triggers a
    warning on stderr.  Duplicate occupation rows and inconsistent beam
    counts are parse errors naming the line.
    """
    rows: list[tuple[tuple[tuple[int, int], ...], complex]] = []
    n_beams: int | None = None
    seen: dict[tuple, int] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) not in (6, 8):
                raise StateFileError(
                    f"{path}:{lineno}: expected 6 or 8 comma-separated fields, got {len(parts)}"
                )
            beams = (len(parts) - 2) // 2
            if n_beams is None:
                n_beams = beams
            elif beams != n_beams:
                raise StateFileError(
                    f"{path}:{lineno}: {beams}-beam row in a {n_beams}-beam file"
                )
            try:
                occs = tuple(
                    (int(parts[2 * b]), int(parts[2 * b + 1])) for b in range(beams)
                )
                value = complex(float(parts[-2]), float(parts[-1]))
            except ValueError as exc:
                raise StateFileError(f"{path}:{lineno}: {exc}") from exc
            if any(n < 0 or m < 0 for n, m in occs):
                raise StateFileError(f"{path}:{lineno}: negative occupation")
            if occs in seen:
                raise StateFileError(
                    f"{path}:{lineno}: duplicate occupation (first seen on line {seen[occs]})"
                )
            seen[occs] = lineno
            rows.append((occs, value))
    if not rows:
        raise StateFileError(f"{path}: no amplitude lines found")
    needed = max(max(n + m for n, m in occs) for occs, _ in rows)
    if cutoff is None:
        cutoff = needed
    elif needed > cutoff:
        raise StateFileError(f"{path}: occupations need cutoff >= {needed}, got {cutoff}")
    space = build_space(cutoff)
    domain = (space,) * n_beams
    amps = np.zeros(space.dim**n_beams, dtype=complex)
    from .fock import joint_index

    for occs, value in rows:
        amps[joint_index(domain, occs)] = value
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise StateFileError(f"{path}: state has zero norm")
    if abs(1.0 - norm * norm) > 1e-6:
        print(
            f"warning: {path}: renormalizing, |amplitudes|^2 was {norm * norm!r}",
            file=sys.stderr,
        )
    return MultiBeamState(domain, amps / norm)


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out: str | None) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


# ---------------------------------------------------------------------------
# Command handlers
# ---------------------------------------------------------------------------


def _cmd_verify_algebra(args) -> int:
    report = verify_algebra(build_space(args.cutoff), construction=args.construction)
    _emit_json(report.to_dict(), args.out)
    return EXIT_OK if report.passed else EXIT_VERIFICATION


def _contextuality_rows(args) -> list[tuple[float | None, MultiBeamState]]:
    if args.source == "bsv":
        if args.gamma is not None:
            gammas = [args.gamma]
        elif args.gamma_min is not None and args.gamma_max is not None:
            gammas = _sweep(args).grid()
        else:
            raise _UsageError("bsv source needs --gamma or --gamma-min/--gamma-max")
        return [(g, bsv_state(BsvParams(g, args.cutoff))) for g in gammas]
    if args.source == "qubit":
        return [(None, qubit_embed(states.BELL_STATES[args.bell_state]))]
    if args.state is None:
        raise _UsageError("state source needs --state FILE")
    loaded = load_state_file(args.state)
    if loaded.n_beams != 2:
        raise _UsageError("contextuality takes a two-beam state")
    return [(None, loaded)]


class _UsageError(Exception):
    pass


def _sweep(args) -> SweepSpec:
    try:
        return SweepSpec(args.gamma_min, args.gamma_max, args.steps, args.cutoff)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def _cmd_contextuality(args) -> int:
    rows = _contextuality_rows(args)
    records: list[tuple[float | None, float, VerdictRecord]] = []
    for gamma, state in rows:
        verdict = indicators.contextuality_verdict(state)
        records.append((gamma, prob_diagonal(state), verdict))
    if args.format == "json":
        payload = {
            "rows": [
                {
                    "gamma": gamma,
                    "p_diag": p_diag,
                    **verdict.to_dict(),
                }
                for gamma, p_diag, verdict in records
            ]
        }
        _emit_json(payload, args.out)
        return EXIT_OK
    lines = [CSV_HEADER]
    for gamma, p_diag, v in records:
        lines.append(
            ",".join(
                [
                    _fmt(gamma),
                    _fmt(p_diag),
                    _fmt(v.value),
                    _fmt(v.margin),
                    _fmt(v.interval_lo),
                    _fmt(v.interval_hi),
                    v.verdict,
                ]
            )
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _entanglement_state(args) -> tuple[MultiBeamState, dict]:
    meta: dict = {"source": args.source}
    if args.source == "bsv":
        if args.gamma is None:
            raise _UsageError("bsv source needs --gamma")
        meta["gamma"] = args.gamma
        meta["cutoff"] = args.cutoff
        return bsv_state(BsvParams(args.gamma, args.cutoff)), meta
    if args.source == "qubit":
        if getattr(args, "ghz", False):
            meta["state"] = "ghz"
            return qubit_embed(states.GHZ3), meta
        meta["state"] = args.bell_state
        return qubit_embed(states.BELL_STATES[args.bell_state]), meta
    if args.source == "bghz":
        if args.coeffs is None:
            raise _UsageError("bghz source needs --coeffs FILE")
        coeffs = load_bghz_coefficients(args.coeffs)
        cutoff = args.cutoff if args.cutoff_given else max(2 * coeffs.max_order, 1)
        meta["coeffs"] = str(args.coeffs)
        meta["cutoff"] = cutoff
        return bghz_state(coeffs, cutoff), meta
    if args.source == "bghz-gen":
        if args.gamma is None:
            raise _UsageError("bghz-gen source needs --gamma")
        meta["gamma"] = args.gamma
        meta["cutoff"] = args.cutoff
        meta["authoritative"] = False
        meta["note"] = "generator-exponential path, truncation-sensitive"
        return bghz_generator_state(args.gamma, args.cutoff), meta
    if args.source == "separable":
        beams = 3 if args.witness == "ghz3" else 2
        meta.update({"seed": args.seed, "degree": args.degree, "cutoff": args.cutoff})
        return random_separable(args.seed, beams, args.cutoff, args.degree), meta
    if args.state is None:
        raise _UsageError("state source needs --state FILE")
    meta["file"] = str(args.state)
    return load_state_file(args.state), meta


def _default_witness(n_beams: int) -> str:
    return "ghz3" if n_beams == 3 else "singlet"


def _witness_verdict(value: float, slack: float) -> VerdictRecord:
    lo, hi = value - slack, value + slack
    if hi < 0.0:
        verdict = "entangled"
    elif lo >= 0.0:
        verdict = "not_detected"
    else:
        verdict = "inconclusive"
    return VerdictRecord(
        quantity="witness_expectation",
        value=value,
        bound=0.0,
        margin=-value,
        interval_lo=lo,
        interval_hi=hi,
        verdict=verdict,
    )


def _cmd_entanglement(args) -> int:
    if args.subcommand == "witness" and args.source == "bghz-gen" and args.gamma is None:
        # Sweep mode: emit the qualitative curve from the generator path.
        if args.gamma_min is None or args.gamma_max is None:
            raise _UsageError("bghz-gen needs --gamma or --gamma-min/--gamma-max")
        sweep = _sweep(args)
        spec = WITNESSES[args.witness or "ghz3"]
        curve = []
        for gamma in sweep.grid():
            state = bghz_generator_state(gamma, sweep.cutoff)
            value = indicators.witness_expectation(spec, state)
            curve.append({"gamma": gamma, "witness_value": value})
        if args.format == "csv":
            lines = ["gamma,witness_value,authoritative"]
            for point in curve:
                lines.append(
                    f"{_fmt(point['gamma'])},{_fmt(point['witness_value'])},false"
                )
            _emit("\n".join(lines) + "\n", args.out)
        else:
            _emit_json(
                {
                    "authoritative": False,
                    "note": "generator-exponential path, truncation-sensitive",
                    "witness": args.witness or "ghz3",
                    "curve": curve,
                },
                args.out,
            )
        return EXIT_OK

    state, meta = _entanglement_state(args)

    if args.subcommand == "witness":
        name = args.witness or _default_witness(state.n_beams)
        spec = WITNESSES[name]
        if spec.n_parties != state.n_beams:
            raise _UsageError(
                f"witness {name!r} has {spec.n_parties} parties, state has {state.n_beams} beams"
            )
        value = indicators.witness_expectation(spec, state)
        slack = state.norm_deficit * sum(
            abs(w) for w in spec.coefficients.values()
        ) + indicators.VERDICT_ATOL
        payload = {"witness": name, **meta, **_witness_verdict(value, slack).to_dict()}
        _emit_json(payload, args.out)
        return EXIT_OK

    if args.subcommand == "ns-family":
        if state.n_beams != 2:
            raise _UsageError("ns-family takes a two-beam state")
        report = indicators.ns_condition_family(state)
        _emit_json({**meta, **report.to_dict()}, args.out)
        return EXIT_OK

    # gram
    if state.n_beams != 2:
        raise _UsageError("gram takes a two-beam state")
    certificate = indicators.gram_certificate(state)
    _emit_json({**meta, **certificate.to_dict()}, args.out)
    return EXIT_OK


def _cmd_bell(args) -> int:
    if args.source == "product-state":
        state = basis_state((build_space(1),) * 3, [(1, 0)] * 3)
        meta = {"source": "product-state"}
    else:
        if args.source == "qubit" and not args.ghz:
            raise _UsageError("bell qubit needs --ghz (three beams)")
        state, meta = _entanglement_state(args)
    if state.n_beams != 3:
        raise _UsageError("bell takes a three-beam state")
    result = indicators.mermin_bell_value(state)
    _emit_json({**meta, **result.to_dict()}, args.out)
    return EXIT_OK


def _cmd_counterexample(args) -> int:
    report = counterexample_report(cutoff=args.cutoff, sign_flip=args.sign_flip)
    payload = report.to_dict()
    payload["block"] = args.block
    payload["distance"] = (
        report.g_distance_block1 if args.block == 1 else report.g_distance_block2
    )
    _emit_json(payload, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="bnl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-algebra", help="run the operator-algebra suite")
    p.add_argument("--cutoff", type=int, default=6)
    p.add_argument("--construction", choices=("direct", "compact"), default="direct")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify_algebra)

    p = sub.add_parser("contextuality", help="square-expression verdicts and sweeps")
    p.add_argument("source", choices=("bsv", "qubit", "state"))
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--gamma-min", dest="gamma_min", type=float, default=None)
    p.add_argument("--gamma-max", dest="gamma_max", type=float, default=None)
    p.add_argument("--steps", type=int, default=25)
    p.add_argument("--cutoff", type=int, default=40)
    p.add_argument("--bell-state", dest="bell_state", choices=sorted(states.BELL_STATES), default="singlet")
    p.add_argument("--state", default=None)
    p.add_argument("--out", default=None)
    _add_format_flags(p, default="csv")
    p.set_defaults(func=_cmd_contextuality)

    p = sub.add_parser("entanglement", help="witness, criterion family and certificate")
    p.add_argument("subcommand", choices=("witness", "ns-family", "gram"))
    p.add_argument(
        "source", choices=("bsv", "qubit", "bghz", "bghz-gen", "separable", "state")
    )
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--gamma-min", dest="gamma_min", type=float, default=None)
    p.add_argument("--gamma-max", dest="gamma_max", type=float, default=None)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--bell-state", dest="bell_state", choices=sorted(states.BELL_STATES), default="singlet")
    p.add_argument("--ghz", action="store_true")
    p.add_argument("--coeffs", default=None)
    p.add_argument("--state", default=None)
    p.add_argument("--witness", choices=sorted(WITNESSES), default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--out", default=None)
    _add_format_flags(p, default="json")
    p.set_defaults(func=_cmd_entanglement)

    p = sub.add_parser("bell", help="three-beam Mermin expression")
    p.add_argument(
        "source", choices=("bghz", "bghz-gen", "qubit", "product-state", "state")
    )
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--ghz", action="store_true")
    p.add_argument("--coeffs", default=None)
    p.add_argument("--state", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bell)

    p = sub.add_parser("counterexample", help="mode-rotation non-covariance contrast")
    p.add_argument("--sign-flip", dest="sign_flip", action="store_true")
    p.add_argument("--block", type=int, choices=(1, 2), default=2)
    p.add_argument("--cutoff", type=int, default=2)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_counterexample)

    return parser


def _add_format_flags(p: argparse.ArgumentParser, default: str) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", dest="format", action="store_const", const="json")
    group.add_argument("--csv", dest="format", action="store_const", const="csv")
    p.set_defaults(format=default)


def _normalize_cutoffs(args) -> None:
    # Track whether --cutoff was given so sources can pick their own default.
    args.cutoff_given = args.cutoff is not None
    if args.cutoff is None:
        defaults = {"bsv": 40, "qubit": 1, "bghz-gen": 8, "separable": 4}
        args.cutoff = defaults.get(getattr(args, "source", ""), 6)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if hasattr(args, "cutoff") and args.command in ("entanglement", "bell"):
        _normalize_cutoffs(args)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"bnl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CoefficientFileError, StateFileError) as exc:
        print(f"bnl: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DegenerateCertificateError as exc:
        print(f"bnl: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
