"""Command-line front end.

Every command writes a plain-text report (stdout or ``--report``) and,
with ``--csv``, a CSV with columns ``instance_id, quantity, mean,
std_error, method, bound, verdict, margin``.  Exit status is 0 when no row
is VIOLATED, 2 when one is and 1 on usage, config or input errors.

Options may also come from a JSON object given by ``--config``; its keys are
the long option names with dashes or underscores.  Flags on the command line
win over the config file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import statistics
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .bounds import (
    frobenius_bound,
    kmeans_bound,
    ltl_reduction_bound,
    operator_kernel_bound,
    theorem1_bound,
)
from .classes import KMeansCenters, LinearNormBall
from .classfile import ClassFileError, load_class_file
from .contraction import Verdict, verify_vector_contraction
from .counterexample import refute_conjecture
from .estimator import DEFAULT_SEED, MAX_ENUM_SIGNS, ExpectationEngine, complexity_scalar, complexity_vector
from .lipschitz import MinCoordinate, loss_from_spec
from .subgaussian import DistKind, SubgaussianDist
from .suites import ALL_SUITES, SUITES, Row, run_suite, suite_counterexample

CSV_HEADER = ["instance_id", "quantity", "mean", "std_error", "method", "bound", "verdict", "margin"]

PRESET_ALIASES = {"finite-random": "contraction-exact", "finite-gaussian": "contraction-gaussian"}

EXIT_OK, EXIT_USAGE, EXIT_VIOLATED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    try:
        value = int(str(text), 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


# defaults live here rather than in argparse so config values can fill gaps
COMMON_DEFAULTS = {"seed": DEFAULT_SEED, "draws": 10_000, "dist": "rademacher", "csv": None, "report": None}
COMMAND_DEFAULTS = {
    "estimate": {"class_file": None, "losses": None, "method": "auto"},
    "verify": {"preset": None, "trials": None, "class_file": None, "losses": "norm"},
    "bounds": {
        "kind": None,
        "n": None,
        "K": None,
        "B": 1.0,
        "L": 1.0,
        "delta": 0.05,
        "mean": None,
        "complexity": None,
        "traces": None,
        "meta": None,
        "class_file": None,
    },
    "counterexample": {"n": None, "K": None},
    "suite": {"names": [], "all": False},
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radcomplex", description="Rademacher and sub-gaussian complexity verification.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None, help="64-bit master seed (default 0x5EED)")
    common.add_argument("--draws", type=_positive_int, default=None, help="Monte Carlo draws (default 10000)")
    common.add_argument("--dist", default=None, help="noise law: rademacher, normal or uniform[:a]")
    common.add_argument("--csv", default=None, metavar="PATH", help="write the CSV here ('-' for stdout)")
    common.add_argument("--report", default=None, metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--config", default=None, metavar="FILE", help="JSON file with option values")

    p = sub.add_parser("estimate", parents=[common], help="estimate a complexity for a class file")
    p.add_argument("--class", dest="class_file", metavar="FILE", default=None)
    p.add_argument("--losses", default=None, help="loss spec, or ';'-separated specs per point")
    p.add_argument("--method", choices=["auto", "exact", "mc"], default=None)

    p = sub.add_parser("verify", parents=[common], help="check the vector-contraction inequality")
    p.add_argument("--preset", default=None, help="a suite name, finite-random or finite-gaussian")
    p.add_argument("--trials", type=_positive_int, default=None)
    p.add_argument("--class", dest="class_file", metavar="FILE", default=None)
    p.add_argument("--losses", default=None)

    p = sub.add_parser("bounds", parents=[common], help="evaluate a closed-form bound")
    p.add_argument("--kind", choices=["theorem1", "kmeans", "frobenius", "operator", "ltl"], default=None)
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--K", type=_positive_int, default=None)
    p.add_argument("--B", type=float, default=None)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--mean", type=float, default=None, help="empirical mean (theorem1)")
    p.add_argument("--complexity", type=float, default=None, help="complexity R (theorem1)")
    p.add_argument("--traces", default=None, help="comma-separated kernel traces (operator)")
    p.add_argument("--meta", type=float, default=None, help="meta-sample vector complexity (ltl)")
    p.add_argument("--class", dest="class_file", metavar="FILE", default=None,
                   help="sample for kmeans/frobenius; also estimates the bounded quantity")

    p = sub.add_parser("counterexample", parents=[common], help="the orthonormal counterexample")
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--K", type=float, default=None, help="candidate constant to refute")

    p = sub.add_parser("suite", parents=[common], help="run named verification suites")
    p.add_argument("names", nargs="*", default=None)
    p.add_argument("--all", action="store_true", default=None, help=f"run {', '.join(ALL_SUITES)}")
    return parser


def _key_position(text: str, key: str) -> tuple[int, int]:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return 1, 1
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


def load_config(path: str, command: str) -> dict:
    """Read a JSON config; errors are reported as ``path:line:col: message``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{path}: cannot read config: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}:1:1: config must be a JSON object")
    allowed = set(COMMON_DEFAULTS) | set(COMMAND_DEFAULTS[command])
    out = {}
    for raw_key, value in data.items():
        key = raw_key.replace("-", "_")
        key = "class_file" if key == "class" else key
        if raw_key == "command":
            if value != command:
                line, col = _key_position(text, raw_key)
                raise UsageError(f"{path}:{line}:{col}: config is for command {value!r}, not {command!r}")
            continue
        if key not in allowed:
            line, col = _key_position(text, raw_key)
            raise UsageError(f"{path}:{line}:{col}: unknown key {raw_key!r} for command {command}")
        out[key] = value
    for key, check in (("seed", _seed), ("draws", _positive_int), ("trials", _positive_int), ("n", _positive_int)):
        if out.get(key) is None:
            continue
        try:
            out[key] = check(out[key])
        except argparse.ArgumentTypeError as exc:
            line, col = _key_position(text, key)
            raise UsageError(f"{path}:{line}:{col}: {key}: {exc}") from None
    return out


def resolve_options(args: argparse.Namespace) -> dict:
    command = args.command
    opts = dict(COMMON_DEFAULTS)
    opts.update(COMMAND_DEFAULTS[command])
    if args.config:
        opts.update(load_config(args.config, command))
    for key in opts:
        value = getattr(args, key, None)
        if value is not None and value != []:
            opts[key] = value
    opts["command"] = command
    return opts


def _engine(opts, dist=None) -> ExpectationEngine:
    return ExpectationEngine.monte_carlo(opts["draws"], opts["seed"], dist or SubgaussianDist.rademacher())


def _dist(opts) -> SubgaussianDist:
    try:
        return SubgaussianDist.from_name(opts["dist"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(path):
    if path is None:
        raise UsageError("--class FILE is required")
    return load_class_file(path)


def _losses(spec, n):
    parts = [p for p in str(spec).split(";") if p.strip()]
    try:
        losses = [loss_from_spec(p) for p in parts]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if len(losses) == 1:
        return losses * n
    if len(losses) != n:
        raise UsageError(f"got {len(losses)} losses for n={n} points")
    return losses


def _exact_ok(signs: int) -> bool:
    return signs <= MAX_ENUM_SIGNS


def cmd_estimate(opts):
    path = opts["class_file"]
    iid = Path(path).stem if path else "class"
    cls = _load(path)
    dist = _dist(opts)
    scalar = opts["losses"] is not None
    signs = cls.n if scalar else cls.n * cls.output_dim
    method = opts["method"]
    if method == "auto":
        method = "exact" if _exact_ok(signs) and dist.kind is DistKind.RADEMACHER else "mc"
    if method == "exact":
        if not _exact_ok(signs):
            raise UsageError(f"{iid}: exact enumeration needs at most {MAX_ENUM_SIGNS} signs, got {signs}")
        if dist.kind is not DistKind.RADEMACHER:
            raise UsageError("exact enumeration is only defined for Rademacher noise")
        eng = ExpectationEngine.exact(opts["seed"])
    else:
        eng = _engine(opts, dist)
    try:
        if scalar:
            est = complexity_scalar(cls, _losses(opts["losses"], cls.n), eng)
            quantity = "scalar_complexity"
        else:
            est = complexity_vector(cls, eng)
            quantity = f"vector_complexity:{dist.name}"
    except ValueError as exc:
        raise UsageError(f"{iid}: {exc}") from None
    verdict = "ESTIMATED" if est.exactness.value == "exact" else "LOWER_BOUND"
    rows = [Row(iid, quantity, est.mean, est.std_error, est.method.value, None, verdict, None)]
    lines = [f"{iid}: {quantity} = {est.mean:.6g} +- {est.std_error:.3g} ({est.method.value}, {est.exactness.value})"]
    return rows, lines


def _summarize(name, rows, seconds=None):
    counts = Counter(r.verdict for r in rows)
    margins = [r.margin for r in rows if r.margin is not None]
    parts = [f"{name}: {len(rows)} rows"]
    parts.append(", ".join(f"{v}={c}" for v, c in sorted(counts.items())))
    if margins:
        parts.append(f"median margin {statistics.median(margins):.6g}, min margin {min(margins):.6g}")
    if seconds is not None:
        parts.append(f"{seconds:.2f}s")
    lines = ["; ".join(parts)]
    lines += [f"  {r.instance_id} {r.quantity}: {r.verdict} (margin {r.margin:.6g})"
              for r in rows if r.verdict == Verdict.VIOLATED.value]
    return lines


def cmd_verify(opts):
    if opts["preset"]:
        name = PRESET_ALIASES.get(opts["preset"], opts["preset"])
        overrides = {}
        if opts["trials"] is not None:
            overrides["trials"] = opts["trials"]
        try:
            rows, secs = run_suite(name, opts["seed"], **overrides)
        except TypeError:
            raise UsageError(f"preset {opts['preset']!r} does not take --trials") from None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return rows, _summarize(name, rows, secs)
    path = opts["class_file"]
    if path is None:
        raise UsageError("verify needs --preset or --class FILE")
    iid = Path(path).stem
    cls = _load(path)
    dist = _dist(opts)
    losses = _losses(opts["losses"], cls.n)
    exact = dist.kind is DistKind.RADEMACHER and _exact_ok(cls.n * cls.output_dim)
    eng = ExpectationEngine.exact(opts["seed"]) if exact else _engine(opts, dist)
    lhs_eng = ExpectationEngine.exact(opts["seed"]) if _exact_ok(cls.n) else _engine(opts)
    try:
        rep = verify_vector_contraction(cls, losses, dist, eng, lhs_engine=lhs_eng)
    except ValueError as exc:
        raise UsageError(f"{iid}: {exc}") from None
    row = Row(iid, "vector_contraction", rep.lhs.mean, rep.lhs.std_error,
              f"{rep.lhs.method.value}/{rep.rhs.method.value}", rep.constant * rep.rhs.mean,
              rep.verdict.value, rep.margin)
    lines = [f"{iid}: lhs {rep.lhs.mean:.6g} vs {rep.constant:.6g} x rhs {rep.rhs.mean:.6g}: "
             f"{rep.verdict.value} (margin {rep.margin:.6g})"]
    return [row], lines


def cmd_bounds(opts):
    kind = opts["kind"]
    if kind is None:
        raise UsageError("bounds needs --kind")

    def need(key):
        if opts[key] is None:
            raise UsageError(f"bounds --kind {kind} needs --{key}")
        return opts[key]

    rows = []
    try:
        if kind == "theorem1":
            res = theorem1_bound(need("mean"), need("complexity"), need("n"), opts["delta"])
        elif kind == "ltl":
            res = ltl_reduction_bound(opts["L"], need("n"), need("meta"))
        elif kind == "operator":
            traces = [float(t) for t in str(need("traces")).split(",")]
            res = operator_kernel_bound(opts["L"], opts["B"], traces)
        elif kind == "kmeans":
            if opts["class_file"]:
                cls = load_class_file(opts["class_file"])
                if not isinstance(cls, KMeansCenters):
                    raise UsageError("bounds --kind kmeans needs a kind kmeans class file")
                res = kmeans_bound(cls.output_dim, cls.n)
                est = complexity_scalar(cls, MinCoordinate(), _engine(opts))
                ok = est.mean - 3 * est.std_error <= res.value
                rows.append(Row(Path(opts["class_file"]).stem, "kmeans_R", est.mean, est.std_error,
                                est.method.value, res.value,
                                Verdict.HOLDS.value if ok else Verdict.INCONCLUSIVE.value, res.value - est.mean))
            else:
                res = kmeans_bound(need("K"), need("n"))
        else:  # frobenius
            cls = load_class_file(need("class_file"))
            if not isinstance(cls, LinearNormBall):
                raise UsageError("bounds --kind frobenius needs a kind linear class file")
            res = frobenius_bound(cls.radius, cls.sample, cls.output_dim)
            exact = _exact_ok(cls.n * cls.output_dim)
            est = complexity_vector(cls, ExpectationEngine.exact(opts["seed"]) if exact else _engine(opts))
            ok = res.value >= est.mean - 3 * est.std_error - 1e-9
            rows.append(Row(Path(opts["class_file"]).stem, "frobenius_domination", est.mean, est.std_error,
                            est.method.value, res.value, Verdict.HOLDS.value if ok else Verdict.VIOLATED.value,
                            res.value - est.mean))
    except ValueError as exc:
        if isinstance(exc, ClassFileError):
            raise
        raise UsageError(str(exc)) from None
    rows.insert(0, Row(kind, f"bound:{res.formula}", res.value, 0.0, "closed_form", res.value, "COMPUTED", None))
    inputs = ", ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in res.inputs.items())
    lines = [f"{res.formula} bound = {res.value:.6g} ({inputs}); dominates {res.dominates}"]
    lines += [f"estimate {r.quantity} = {r.mean:.6g} +- {r.std_error:.3g}: {r.verdict}" for r in rows[1:]]
    return rows, lines


def cmd_counterexample(opts):
    n = opts["n"]
    if n is None:
        raise UsageError("counterexample needs --n")
    rows = suite_counterexample(opts["seed"], ns=(n,), mc_draws=opts["draws"])
    lhs, rhs, ratio = (r.mean for r in rows[:3])
    lines = [f"n={n}: lhs={lhs:g} rhs={rhs:g} ratio={ratio:g}; conjecture REFUTED for any constant below the ratio"]
    if opts["K"] is not None:
        if opts["K"] <= 0:
            raise UsageError("--K must be positive")
        first = refute_conjecture(opts["K"], n)
        if first is None:
            lines.append(f"K={opts['K']:g}: no refuting n <= {n}")
        else:
            lines.append(f"K={opts['K']:g}: smallest refuting n is {first}")
    for r in rows[3:]:
        lines.append(f"{r.quantity}: {r.mean:.6g} +- {r.std_error:.3g} vs {r.bound:.6g} ({r.method}): {r.verdict}")
    return rows, lines


def cmd_suite(opts):
    names = list(ALL_SUITES) if opts["all"] else list(opts["names"] or [])
    if not names:
        raise UsageError(f"suite needs names or --all; available: {', '.join(SUITES)}")
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite {unknown[0]!r}; available: {', '.join(SUITES)}")
    rows, lines = [], []
    for name in names:
        r, secs = run_suite(name, opts["seed"])
        rows += r
        lines += _summarize(name, r, secs)
    return rows, lines


COMMANDS = {
    "estimate": cmd_estimate,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
    "counterexample": cmd_counterexample,
    "suite": cmd_suite,
}


def format_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(r.as_csv())
    return buf.getvalue()


def run(opts: dict) -> int:
    """Execute a resolved option set; returns the exit code."""
    rows, lines = COMMANDS[opts["command"]](opts)
    violated = sum(r.verdict == Verdict.VIOLATED.value for r in rows)
    lines.append(f"seed={opts['seed']:#x} rows={len(rows)} violated={violated}")
    report = "\n".join(lines) + "\n"
    if opts["report"]:
        Path(opts["report"]).write_text(report)
    else:
        sys.stdout.write(report)
    if opts["csv"] == "-":
        sys.stdout.write(format_csv(rows))
    elif opts["csv"]:
        Path(opts["csv"]).write_text(format_csv(rows))
    return EXIT_VIOLATED if violated else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args)
        return run(opts)
    except (UsageError, ValueError, OSError) as exc:
        print(f"radcomplex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
