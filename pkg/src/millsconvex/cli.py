"""Command-line interface: eval, certify, sweep, chain and cm subcommands.

Exit codes: 0 when a command ran to completion (verdicts are data, not
errors), 1 for usage errors, 2 for numerical or I/O failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, distributions, inequalities
from .errors import DomainError, ModelConstructionError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

SWEEP_HEADER = ("alpha", "verdict", "route", "omega_ratio_direction", "Ta_direction",
                "Tb_direction", "x2mprime_direction")
CM_GRID = (0.1, 20.0, 30)
CHAIN_RANGE = (1e-2, 50.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    distribution: str = "normal-h"
    alpha: float | None = None
    spec_file: str | None = None
    grid_min: float | None = None
    grid_max: float | None = None
    grid_points: int | None = None
    slack: float = analysis.DEFAULT_SLACK
    seed: int = 42
    output_format: str | None = None
    output_path: str | None = None

    def validate(self):
        if self.distribution not in ("normal-h", "gamma", "custom"):
            raise UsageError(f"unknown distribution {self.distribution!r}")
        if self.distribution == "gamma":
            if self.alpha is None:
                raise UsageError("--alpha is required for --dist gamma")
            if not (math.isfinite(self.alpha) and self.alpha > 0.0):
                raise UsageError(f"--alpha must be positive, got {self.alpha!r}")
        elif self.alpha is not None:
            raise UsageError("--alpha is only valid with --dist gamma")
        if self.distribution == "custom" and not self.spec_file:
            raise UsageError("--spec is required for --dist custom")
        if self.distribution != "custom" and self.spec_file:
            raise UsageError("--spec is only valid with --dist custom")
        lo = self.grid_min if self.grid_min is not None else analysis.DEFAULT_GRID_MIN
        hi = self.grid_max if self.grid_max is not None else analysis.DEFAULT_GRID_MAX
        if not (0.0 < lo < hi and math.isfinite(hi)):
            raise UsageError("grid must satisfy 0 < grid-min < grid-max")
        if self.grid_points is not None and self.grid_points < 3:
            raise UsageError("--grid-points must be at least 3")
        if not self.slack >= 0.0:
            raise UsageError("--slack must be nonnegative")

    def probe_config(self):
        return analysis.ProbeConfig(
            self.grid_min if self.grid_min is not None else analysis.DEFAULT_GRID_MIN,
            self.grid_max if self.grid_max is not None else analysis.DEFAULT_GRID_MAX,
            self.grid_points if self.grid_points is not None else analysis.DEFAULT_GRID_POINTS,
            self.slack)


# ---------------------------------------------------------------------------
# custom distribution spec files
# ---------------------------------------------------------------------------

_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?P<coef>" + _NUMBER + r")?\s*"
    r"(?:(?P<inv>/\s*x)|(?P<mul>\*)?\s*(?P<x>x)(?:\s*(?:\^|\*\*)\s*(?P<pow>\d+))?)?\s*")


def parse_score(expr: str) -> distributions.PolynomialScore:
    """Parse ``c0 + c1*x + c2*x^2 + ... + c/x`` into a polynomial score.

    Only polynomial terms with nonnegative integer powers and a single 1/x
    term are understood.
    """
    inverse = 0.0
    coeffs = {}
    pos = 0
    first = True
    expr = expr.strip()
    if not expr:
        raise UsageError("empty omega expression")
    while pos < len(expr):
        m = _TERM.match(expr, pos)
        if m is None or m.end() == pos:
            raise UsageError(f"cannot parse omega expression near {expr[pos:]!r}")
        if not first and m.group("sign") is None:
            raise UsageError(f"missing operator near {expr[pos:]!r}")
        if m.group("coef") is None and m.group("x") is None and m.group("inv") is None:
            raise UsageError(f"cannot parse omega expression near {expr[pos:]!r}")
        if m.group("mul") and m.group("coef") is None:
            raise UsageError(f"dangling '*' near {expr[pos:]!r}")
        if m.group("inv") and m.group("coef") is None:
            raise UsageError("write the 1/x term with an explicit coefficient, e.g. 1/x")
        sign = -1.0 if m.group("sign") == "-" else 1.0
        coef = sign * (float(m.group("coef")) if m.group("coef") else 1.0)
        if m.group("inv"):
            inverse += coef
        else:
            power = int(m.group("pow")) if m.group("pow") else (1 if m.group("x") else 0)
            coeffs[power] = coeffs.get(power, 0.0) + coef
        pos = m.end()
        first = False
    dense = tuple(coeffs.get(k, 0.0) for k in range(max(coeffs) + 1)) if coeffs else ()
    try:
        return distributions.PolynomialScore(inverse, dense)
    except ModelConstructionError as exc:
        raise UsageError(str(exc)) from exc


def load_spec_file(path) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read spec file {path!s}: {exc}") from exc
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        entries[key] = value
    if "omega" not in entries:
        raise UsageError(f"{path}: missing 'omega = ...' entry")
    unknown = set(entries) - {"omega", "name", "support_min", "support_max"}
    if unknown:
        raise UsageError(f"{path}: unknown keys {sorted(unknown)}")
    return entries


def build_model(config: RunConfig) -> distributions.DistributionModel:
    if config.distribution == "normal-h":
        return distributions.make_normal_halfline()
    if config.distribution == "gamma":
        return distributions.make_gamma(config.alpha)
    entries = load_spec_file(config.spec_file)
    score = parse_score(entries["omega"])
    try:
        hint = (float(entries.get("support_min", distributions.DEFAULT_SUPPORT[0])),
                float(entries.get("support_max", distributions.DEFAULT_SUPPORT[1])))
        return distributions.make_from_score(score, hint, id=entries.get("name", "custom"))
    except (ModelConstructionError, ValueError) as exc:
        raise UsageError(f"invalid custom distribution: {exc}") from exc


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _sanitize(obj, path, nonfinite):
    if isinstance(obj, float) or isinstance(obj, np.floating):
        v = float(obj)
        if math.isfinite(v):
            return v
        nonfinite.append(path)
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _sanitize(v, f"{path}.{k}", nonfinite) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v, f"{path}[{i}]", nonfinite) for i, v in enumerate(obj)]
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def to_json(obj) -> str:
    """One JSON object; non-finite reals become strings listed under ``nonfinite``."""
    nonfinite = []
    clean = _sanitize(obj, "$", nonfinite)
    if nonfinite:
        clean["nonfinite"] = nonfinite
    return json.dumps(clean, indent=2, allow_nan=False) + "\n"


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, config: RunConfig, stdout):
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _aligned(pairs) -> str:
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k.ljust(width)}  {_fmt(v)}\n" for k, v in pairs)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _safe(fn, *args):
    try:
        return fn(*args)
    except ArithmeticError:
        return math.nan


def cmd_eval(config: RunConfig, x: float) -> tuple[str, int]:
    if not (math.isfinite(x) and x > 0.0):
        raise UsageError(f"--x must be > 0 (got {x!r}); for the value at 0 use a small "
                         "positive x such as 1e-12 and read off the limit")
    model = build_model(config)
    record = {
        "model": model.id,
        "x": x,
        "f": model.density(x),
        "survival": model.survival(x),
        "m": model.mills(x),
        "omega": model.omega(x),
        "omega_prime": model.omega_prime(x),
        "x2mprime": analysis.x2mprime(model, x),
        "Ta": _safe(analysis.test_fn_a, model, x),
        "Tb": _safe(analysis.test_fn_b, model, x),
    }
    fmt = config.output_format or "text"
    if fmt == "json":
        return to_json(record), EXIT_OK
    if fmt == "csv":
        return to_csv(list(record), [list(record.values())]), EXIT_OK
    return _aligned(list(record.items())), EXIT_OK


def _certificate_text(model, cert) -> str:
    lines = [f"model    {model.id}", f"verdict  {cert.verdict.value}",
             f"route    {cert.route.value if cert.route else '-'}"]
    for cond in cert.conditions:
        rep = cond.report
        detail = rep.direction.value if isinstance(rep, analysis.MonotonicityReport) else \
            ("pass" if cond.passed else "fail")
        lines.append(f"  {cond.name:<32} expected {cond.expected:<12} got {detail}")
    for ex in cert.excluded_intervals:
        lines.append(f"excluded ({_fmt(ex.lo)}, {_fmt(ex.hi)}) around {_fmt(ex.center)}: {ex.reason}")
    lines.extend(f"note     {n}" for n in cert.notes)
    return "\n".join(lines) + "\n"


def cmd_certify(config: RunConfig) -> tuple[str, int]:
    model = build_model(config)
    cert = analysis.certify_reciprocal(model, config.probe_config())
    fmt = config.output_format or "text"
    if fmt == "json":
        return to_json({"model": model.id, "certificate": cert.to_dict()}), EXIT_OK
    if fmt == "csv":
        rows = [[c.name, c.expected, c.passed,
                 c.report.direction.value if isinstance(c.report, analysis.MonotonicityReport)
                 else ""] for c in cert.conditions]
        header = ("condition", "expected", "passed", "direction")
        return (f"# model={model.id} verdict={cert.verdict.value} "
                f"route={cert.route.value if cert.route else ''}\n" + to_csv(header, rows)), EXIT_OK
    return _certificate_text(model, cert), EXIT_OK


def _direction_of(cert, route, name):
    conds = cert.attempts.get(route, [])
    for c in conds:
        if c.name == name:
            return c.report.direction.value if c.report is not None else "undefined"
    return "undefined"


def sweep_alphas(alpha_min: float, alpha_max: float, alpha_step: float) -> list:
    count = int(math.floor((alpha_max - alpha_min) / alpha_step + 1e-9)) + 1
    return [round(alpha_min + k * alpha_step, 12) for k in range(count)]


def cmd_sweep(config: RunConfig, alpha_min: float, alpha_max: float,
              alpha_step: float) -> tuple[str, int]:
    if not (alpha_min > 0.0 and alpha_min <= alpha_max and alpha_step > 0.0):
        raise UsageError("sweep needs 0 < alpha-min <= alpha-max and alpha-step > 0")
    if config.distribution not in ("normal-h", "gamma") or config.alpha is not None:
        raise UsageError("sweep runs over the gamma family; do not pass --alpha or --dist custom")
    probe = config.probe_config()
    grid = probe.grid()
    rows = []
    for alpha in sweep_alphas(alpha_min, alpha_max, alpha_step):
        model = distributions.make_gamma(alpha)
        cert = analysis.certify_reciprocal(model, probe)
        x2m = analysis.x2mprime_probe(model, grid, probe.slack).direction.value
        rows.append([
            alpha,
            cert.verdict.value,
            cert.route.value if cert.route else "",
            _direction_of(cert, analysis.Route.PART_A, "omega_ratio"),
            _direction_of(cert, analysis.Route.PART_A, "test_fn_a"),
            _direction_of(cert, analysis.Route.PART_B, "test_fn_b"),
            x2m,
        ])
    if config.output_format == "json":
        return to_json({"rows": [dict(zip(SWEEP_HEADER, r)) for r in rows]}), EXIT_OK
    return to_csv(SWEEP_HEADER, rows), EXIT_OK


def _chain_target(model, config, direction):
    if model.id == "normal-halfline":
        fn = inequalities.sqrt_mills_ratio
        default = inequalities.ChainDirection.CONCAVE
    else:
        fn = model.mills
        cert = analysis.certify_reciprocal(model, config.probe_config())
        default = (inequalities.ChainDirection.CONCAVE if cert.verdict.concave_family
                   else inequalities.ChainDirection.CONVEX)
    if direction == "auto":
        return fn, default
    return fn, inequalities.ChainDirection(f"{direction}_chain")


def cmd_chain(config: RunConfig, n_samples: int, direction: str = "auto",
              range_=CHAIN_RANGE) -> tuple[str, int]:
    if n_samples < 1:
        raise UsageError(f"--samples must be at least 1, got {n_samples}")
    lo, hi = range_
    if not (0.0 < lo <= hi and math.isfinite(hi)):
        raise UsageError("chain range must satisfy 0 < range-min <= range-max")
    model = build_model(config)
    fn, chain_dir = _chain_target(model, config, direction)
    summary = inequalities.random_chain_suite(fn, chain_dir, n_samples, config.seed, (lo, hi))
    fmt = config.output_format or "text"
    data = {"model": model.id, "function": "m(sqrt x)/sqrt x" if model.id == "normal-halfline"
            else "m(x)", **summary.to_dict()}
    if fmt == "json":
        return to_json(data), EXIT_OK
    if fmt == "csv":
        header = ("model", "direction", "n_samples", "passes", "failures", "equalities",
                  "worst_x", "worst_y", "worst_violation", "seed")
        row = [model.id, chain_dir.value, n_samples, summary.passes, summary.failures,
               summary.equalities, summary.worst_pair[0], summary.worst_pair[1],
               summary.worst_violation, config.seed]
        return to_csv(header, [row]), EXIT_OK
    return _aligned([(k, v) for k, v in data.items() if k not in ("range",)]), EXIT_OK


def cmd_cm(config: RunConfig, max_order: int) -> tuple[str, int]:
    if not 1 <= max_order <= analysis.MAX_CM_ORDER:
        raise UsageError(f"--max-order must lie in [1, {analysis.MAX_CM_ORDER}], got {max_order}")
    model = build_model(config)
    fn = inequalities.sqrt_mills_ratio if model.id == "normal-halfline" else model.mills
    lo = config.grid_min if config.grid_min is not None else CM_GRID[0]
    hi = config.grid_max if config.grid_max is not None else CM_GRID[1]
    n = config.grid_points if config.grid_points is not None else CM_GRID[2]
    report = analysis.complete_monotonicity_probe(fn, np.geomspace(lo, hi, n), max_order)
    fmt = config.output_format or "text"
    if fmt == "json":
        return to_json({"model": model.id, **report.to_dict()}), EXIT_OK
    header = ("order", "passed", "strict", "min_signed", "first_failure")
    rows = [[o.order, o.passed, o.strict, o.min_signed,
             "" if o.first_failure is None else o.first_failure] for o in report.orders]
    if fmt == "csv":
        return to_csv(header, rows), EXIT_OK
    lines = [f"model {model.id}  passed {report.passed}"]
    lines += [f"  n={o.order}  {'pass' if o.passed else 'FAIL'}  strict={o.strict}  "
              f"min={_fmt(o.min_signed)}" for o in report.orders]
    return "\n".join(lines) + "\n", EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _shared():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--dist", default="normal-h", choices=("normal-h", "gamma", "custom"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--spec", dest="spec_file", help="key = value file for --dist custom")
    p.add_argument("--grid-min", type=float)
    p.add_argument("--grid-max", type=float)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--slack", type=float, default=analysis.DEFAULT_SLACK)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", dest="output_format", choices=("json", "csv", "text"))
    p.add_argument("--out", dest="output_path")
    return p


def build_parser():
    shared = _shared()
    parser = _Parser(prog="millsconvex",
                     description="Mills ratios and their reciprocal convexity.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[shared], help="evaluate model quantities at x")
    p.add_argument("--x", type=float, required=True)

    sub.add_parser("certify", parents=[shared], help="certify reciprocal convexity/concavity")

    p = sub.add_parser("sweep", parents=[shared], help="certify the gamma family over alpha")
    p.add_argument("--alpha-min", type=float, required=True)
    p.add_argument("--alpha-max", type=float, required=True)
    p.add_argument("--alpha-step", type=float, required=True)

    p = sub.add_parser("chain", parents=[shared], help="random mean-chain test")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--direction", choices=("auto", "convex", "concave"), default="auto")
    p.add_argument("--range-min", type=float, default=CHAIN_RANGE[0])
    p.add_argument("--range-max", type=float, default=CHAIN_RANGE[1])

    p = sub.add_parser("cm", parents=[shared], help="finite-difference complete monotonicity test")
    p.add_argument("--max-order", type=int, default=5)
    return parser


def _config(args) -> RunConfig:
    return RunConfig(args.dist, args.alpha, args.spec_file, args.grid_min, args.grid_max,
                     args.grid_points, args.slack, args.seed, args.output_format,
                     args.output_path)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        config = _config(args)
        config.validate()
        if args.command == "eval":
            text, code = cmd_eval(config, args.x)
        elif args.command == "certify":
            text, code = cmd_certify(config)
        elif args.command == "sweep":
            text, code = cmd_sweep(config, args.alpha_min, args.alpha_max, args.alpha_step)
        elif args.command == "chain":
            text, code = cmd_chain(config, args.samples, args.direction,
                                   (args.range_min, args.range_max))
        else:
            text, code = cmd_cm(config, args.max_order)
        _emit(text, config, stdout)
        return code
    except UsageError as exc:
        stderr.write(f"millsconvex: usage error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, ModelConstructionError) as exc:
        stderr.write(f"millsconvex: usage error: {exc}\n")
        return EXIT_USAGE
    except (ArithmeticError, OSError) as exc:
        stderr.write(f"millsconvex: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERICAL


def main():
    sys.exit(run())
