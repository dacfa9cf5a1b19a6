"""Command-line runner.

Human-readable summaries go to stdout; machine-readable artifacts are only
written to ``--output``. Exit codes: 0 success, 1 usage or input error,
2 a checked invariant failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .core import BudgetExceeded, HistogramMismatch, InvariantViolation, Multislice, MultisliceError
from .fkn import NOISE_MODELS, best_dictator_hamming, best_dictator_l2, fkn_experiment
from .harmonic import FunctionTable
from .spectral import (
    DEFAULT_EIGEN_BUDGET,
    DEFAULT_MAX_CANDIDATES,
    SubsetFamily,
    dictator_set,
    exhaustive_min_expansion,
    expansion_exact,
    expansion_spectral,
    hoffman_bound,
    identify_dictator,
    monte_carlo_expansion,
    spectrum,
    stability_report,
)

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _kappa(text: str) -> Multislice:
    try:
        return Multislice(tuple(int(x) for x in text.split(",")))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid --kappa {text!r}: {exc}") from None


def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None


def _write_artifact(args, payload: dict, rows: list[dict] | None = None, text: str | None = None) -> None:
    if not args.output:
        return
    if args.format == "json":
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif text is not None:
        out = text
    else:
        buf = io.StringIO()
        rows = rows if rows is not None else [payload]
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        out = buf.getvalue()
    Path(args.output).write_text(out)


def _frac(x: Fraction) -> str:
    return f"{x} ({float(x):.6g})"


# -- subcommands -----------------------------------------------------------------

def cmd_spectrum(args) -> int:
    spec = args.kappa
    report = spectrum(spec, max_domain=args.max_domain, tol=args.tol if args.tol is not None else 1e-8)
    print(f"kappa={spec.kappa}  |domain|={spec.size}  groups={len(report.groups)}")
    for g in report.groups:
        parts = " ".join("(" + ",".join(map(str, p)) + ")" for p in g.partitions)
        print(f"  c={str(g.eigenvalue):>8}  computed={g.computed:+.10f}  dim={g.dimension:>5}  {parts}")
    print(f"max error {report.max_error:.3g}; {'OK' if report.ok else 'MISMATCH'}")
    rows = [
        {
            "eigenvalue": str(g.eigenvalue),
            "eigenvalue_float": float(g.eigenvalue),
            "computed": g.computed,
            "dimension": g.dimension,
            "partitions": " ".join(",".join(map(str, p)) for p in g.partitions),
        }
        for g in report.groups
    ]
    _write_artifact(args, report.to_json(), rows)
    return EXIT_OK if report.ok else EXIT_INVARIANT


def cmd_fkn(args) -> int:
    f = FunctionTable.from_json(_load_json(args.input))
    report = best_dictator_l2(f) if args.mode == "l2" else best_dictator_hamming(f)
    g = report.dictator
    print(f"mode={report.mode}  kappa={f.spec.kappa}")
    print(f"  epsilon   = {report.epsilon:.6g}")
    print(f"  closeness = {report.closeness:.6g}")
    print(f"  ratio     = {report.ratio:.6g}")
    print(f"  dictator  = coordinate {g.coordinate}, colormap {''.join(map(str, g.colormap))}")
    payload = report.to_json()
    row = {k: v for k, v in payload.items() if k != "dictator"}
    row.update(dictator_coord=g.coordinate, colormap="".join(map(str, g.colormap)))
    _write_artifact(args, payload, [row])
    return EXIT_OK


def cmd_expansion(args) -> int:
    A = SubsetFamily.from_json(_load_json(args.set))
    n = A.spec.n
    exact = expansion_exact(A)
    spectral = expansion_spectral(A)
    bound = hoffman_bound(A.volume, n)
    tight = exact == bound
    dictator = identify_dictator(A)
    tol = args.tol if args.tol is not None else 1e-9
    print(f"kappa={A.spec.kappa}  |A|={A.size}  vol={_frac(A.volume)}")
    print(f"  expansion (exact)    = {_frac(exact)}")
    print(f"  expansion (spectral) = {spectral:.12g}")
    print(f"  isoperimetric bound  = {_frac(bound)}  tight={tight}")
    if dictator:
        print(f"  dictator set: coordinate {dictator[0]}, colors {sorted(dictator[1])}")
    payload = {
        "kappa": list(A.spec.kappa),
        "size": A.size,
        "volume": str(A.volume),
        "expansion_exact": str(exact),
        "expansion_exact_float": float(exact),
        "expansion_spectral": spectral,
        "bound": str(bound),
        "tight": tight,
        "dictator": None if dictator is None else {"coordinate": dictator[0], "colors": sorted(dictator[1])},
    }
    if args.samples:
        if args.seed is None:
            raise UsageError("--samples requires --seed")
        mc = monte_carlo_expansion(A, args.samples, args.seed)
        print(f"  monte carlo          = {mc.estimate:.6g} +- {mc.stderr:.2g} ({mc.samples} samples)")
        payload.update(monte_carlo=mc.estimate, monte_carlo_stderr=mc.stderr, samples=mc.samples)
    row = dict(payload)
    row["dictator"] = "" if dictator is None else f"{dictator[0]}:{','.join(map(str, sorted(dictator[1])))}"
    _write_artifact(args, payload, [row])
    violated = abs(spectral - float(exact)) > tol or exact < bound
    return EXIT_INVARIANT if violated else EXIT_OK


def cmd_stability(args) -> int:
    A = SubsetFamily.from_json(_load_json(args.set))
    report = stability_report(A, check=False, tol=args.tol if args.tol is not None else 1e-9)
    j, S = report.nearest_dictator
    print(f"kappa={A.spec.kappa}  vol={_frac(report.alpha)}")
    print(f"  expansion = {_frac(report.expansion)}  bound = {_frac(report.bound)}  slack = {_frac(report.slack)}")
    print(f"  delta = {report.delta:.6g}  <=  {report.delta_bound:.6g} : {report.within_bound}")
    print(f"  nearest dictator set: coordinate {j}, colors {sorted(S)}; "
          f"symmetric difference volume {_frac(report.symmetric_difference_volume)}")
    _write_artifact(args, report.to_json())
    return EXIT_OK if report.within_bound else EXIT_INVARIANT


def cmd_search(args) -> int:
    spec = args.kappa
    res = exhaustive_min_expansion(spec, args.size, max_candidates=args.max_candidates)
    alpha = Fraction(args.size, spec.size)
    bound = hoffman_bound(alpha, spec.n)
    found = [(A, identify_dictator(A)) for A in res.minimizers]
    all_dict = all(d is not None for _, d in found)
    print(f"kappa={spec.kappa}  size={args.size}  candidates={res.candidates}")
    print(f"  min expansion = {_frac(res.min_expansion)}  bound = {_frac(bound)}")
    print(f"  {len(found)} minimizers, all dictator sets: {all_dict}")
    for A, d in found:
        label = f"u_{d[0]} in {sorted(d[1])}" if d else "not a dictator set"
        print(f"    {A.ranks()}  {label}")
    payload = {
        "kappa": list(spec.kappa),
        "size": args.size,
        "candidates": res.candidates,
        "min_expansion": str(res.min_expansion),
        "bound": str(bound),
        "minimizers": [
            {"members": A.ranks(), "dictator": None if d is None else {"coordinate": d[0], "colors": sorted(d[1])}}
            for A, d in found
        ],
    }
    rows = [
        {
            "members": " ".join(map(str, A.ranks())),
            "dictator": "" if d is None else f"{d[0]}:{','.join(map(str, sorted(d[1])))}",
        }
        for A, d in found
    ]
    _write_artifact(args, payload, rows)
    return EXIT_INVARIANT if res.min_expansion < bound else EXIT_OK


def cmd_experiment(args) -> int:
    if args.seed is None:
        raise UsageError("experiment requires --seed")
    res = fkn_experiment(args.kappa, args.trials, args.seed, noise=args.noise, eps_range=(args.eps_min, args.eps_max))
    s = res.summary()
    print(f"kappa={args.kappa.kappa}  noise={res.noise}  trials={len(res.rows)}  seed={res.seed}")
    print(f"  max L2 ratio closeness/epsilon = {s['max_ratio']:.6g}")
    print(f"  fitted C in Pr[F != g] <= 4 eps + C eps^2 : {s['fitted_C']:.6g}")
    if args.output:
        text = res.to_csv() if args.format == "csv" else None
        _write_artifact(args, res.to_json(), text=text)
    return EXIT_OK


def cmd_dictator(args) -> int:
    colors = [int(c) for c in args.colors.split(",") if c]
    A = dictator_set(args.kappa, args.coord, colors)
    print(f"kappa={args.kappa.kappa}  A = {{u : u_{args.coord} in {sorted(colors)}}}  |A|={A.size}")
    _write_artifact(args, A.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="multislice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", "-o", help="write the machine-readable artifact here")
        p.add_argument("--tol", type=float, default=None)
        return p

    p = common(sub.add_parser("spectrum", help="transposition-walk spectrum vs predicted eigenvalues"))
    p.add_argument("--kappa", type=_kappa, required=True)
    p.add_argument("--max-domain", type=int, default=DEFAULT_EIGEN_BUDGET)
    p.set_defaults(func=cmd_spectrum)

    p = common(sub.add_parser("fkn", help="best dictator for a function table"))
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("l2", "hamming"), default="l2")
    p.set_defaults(func=cmd_fkn)

    p = common(sub.add_parser("expansion", help="exact and spectral expansion of a subset"))
    p.add_argument("--set", required=True)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_expansion)

    p = common(sub.add_parser("stability", help="isoperimetric stability report for a subset"))
    p.add_argument("--set", required=True)
    p.set_defaults(func=cmd_stability)

    p = common(sub.add_parser("search", help="exhaustive minimum-expansion search"))
    p.add_argument("--kappa", type=_kappa, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES)
    p.set_defaults(func=cmd_search)

    p = common(sub.add_parser("experiment", help="noisy-dictator experiment"))
    p.add_argument("--kappa", type=_kappa, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--noise", choices=NOISE_MODELS, default="uniform")
    p.add_argument("--eps-min", type=float, default=1e-4)
    p.add_argument("--eps-max", type=float, default=1e-2)
    p.set_defaults(func=cmd_experiment)

    p = common(sub.add_parser("dictator", help="write a dictator set {u : u_j in S}"))
    p.add_argument("--kappa", type=_kappa, required=True)
    p.add_argument("--coord", type=int, required=True)
    p.add_argument("--colors", required=True, help="comma-separated 1-based colors")
    p.set_defaults(func=cmd_dictator)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("max_domain", "max_candidates", "trials", "samples"):
        value = getattr(args, name, None)
        if value is None:
            continue
        if value < 0 or (value == 0 and name != "samples"):
            print(f"multislice: error: --{name.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"multislice: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except BudgetExceeded as exc:
        print(f"multislice: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HistogramMismatch as exc:
        print(f"multislice: histogram mismatch: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, MultisliceError) as exc:
        print(f"multislice: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"multislice: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
