"""Experiment harness: identity verification, convergence sweeps, evaluation.

Subcommands
-----------
verify    run every identity and inequality check, write one row per
          (check, degree), exit 0 only if all hard checks pass
converge  per-function sup-error / bound sweeps with rate fits
eval      print operator values at given points
gamma     table of the warp gap: closed form, grid oracle, and its n*gap limit

All tabular output shares one schema
(function,n,mu,d,operator,sup_error,bound_rhs,pass,runtime_ms) in CSV or
JSON.  Exit codes: 0 all checks pass, 1 configuration or usage error,
2 check failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import convergence_report, korovkin_witness, tail_mass_bound_check
from .basis import (
    OperatorParams,
    bernstein_basis_matrix,
    first_moment,
    warp_gap_closed,
    warp_gap_grid,
)
from .corpus import LIPSCHITZ, REPRODUCED, builtin_corpus
from .tensor import (
    CLASSICAL,
    EXPONENTIAL,
    Grid,
    ScalarField,
    closed_form_e0_nd,
    closed_form_exp3_nd,
    closed_form_exp4_nd,
    exp_bernstein_apply_nd,
    exp_bernstein_via_classical_nd,
    exp_power_product,
    sup_error,
)
from .univariate import voronovskaja_e0_check

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHECK = 2
EXIT_IO = 3

COLUMNS = ("function", "n", "mu", "d", "operator", "sup_error", "bound_rhs", "pass", "runtime_ms")

# The mu^2/n deviation bound on the constant is asymptotic in principle, so
# rows below this degree are reported but never fail the run.
VORO_HARD_MIN_N = 10


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the exit-code contract wants 1.
    def error(self, message):
        raise CliError(message, EXIT_CONFIG)


@dataclass
class ExperimentConfig:
    mu: float = 1.0
    d: int = 2
    n_list: tuple[int, ...] = ()
    functions: tuple[str, ...] = ()
    grid: tuple[int, ...] | None = None
    operator: str = EXPONENTIAL
    fmt: str = "csv"
    out: str | None = None
    seed: int = 42

    def validate(self, default_n: tuple[int, ...]) -> None:
        if not math.isfinite(self.mu) or self.mu < 0.0:
            raise CliError(f"mu must be finite and >= 0, got {self.mu}", EXIT_CONFIG)
        if not self.n_list:
            self.n_list = default_n
        if any(n < 1 for n in self.n_list):
            raise CliError(f"degrees must be >= 1, got {self.n_list}", EXIT_CONFIG)
        if list(self.n_list) != sorted(set(self.n_list)):
            raise CliError("degree list must be strictly increasing", EXIT_CONFIG)
        if self.operator not in (CLASSICAL, EXPONENTIAL):
            raise CliError(f"unknown operator kind {self.operator!r}", EXIT_CONFIG)
        if self.fmt not in ("csv", "json"):
            raise CliError(f"unknown output format {self.fmt!r}", EXIT_CONFIG)


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _rows_to_csv(rows: list[dict]) -> str:
    lines = [",".join(COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt_value(row[c]) for c in COLUMNS))
    return "\n".join(lines) + "\n"


def _rows_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=2) + "\n"


def _emit(rows: list[dict], fmt: str, out: str | None) -> None:
    text = _rows_to_csv(rows) if fmt == "csv" else _rows_to_json(rows)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        path = Path(out)
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc


def _make_row(function, n, mu, d, operator, sup_err, bound, ok, runtime_ms) -> dict:
    return {
        "function": function,
        "n": int(n),
        "mu": float(mu),
        "d": int(d),
        "operator": operator,
        "sup_error": float(sup_err),
        "bound_rhs": float(bound),
        "pass": bool(ok),
        "runtime_ms": float(runtime_ms),
    }


def _timed(fn):
    start = time.perf_counter()
    result = fn()
    return result, (time.perf_counter() - start) * 1e3


# ---------------------------------------------------------------------------
# verify


def _verify_checks(cfg: ExperimentConfig) -> tuple[list[dict], bool]:
    rows: list[dict] = []
    all_hard_pass = True
    corpus = builtin_corpus(cfg.d, cfg.mu)
    grid = Grid.uniform(cfg.d, cfg.grid)
    rng = np.random.default_rng(cfg.seed)
    exp1 = corpus.lookup("exp_mu").field
    exp2 = corpus.lookup("exp2_mu").field
    osc = corpus.lookup("osc_mix" if cfg.d >= 2 else "sin_pi_sum").field
    non_sep = {
        "e0": (ScalarField(
            eval=lambda pts: np.ones(np.asarray(pts).shape[0]), d=cfg.d, name="e0"
        ), closed_form_e0_nd),
        "exp3": (ScalarField(
            eval=lambda pts: np.exp(3 * cfg.mu * np.sum(np.asarray(pts), axis=1)),
            d=cfg.d, name="exp3",
        ), closed_form_exp3_nd),
        "exp4": (ScalarField(
            eval=lambda pts: np.exp(4 * cfg.mu * np.sum(np.asarray(pts), axis=1)),
            d=cfg.d, name="exp4",
        ), closed_form_exp4_nd),
    }

    def record(check_id, n, dev, bound, hard=True, runtime_ms=0.0):
        nonlocal all_hard_pass
        ok = dev <= bound
        if hard and not ok:
            all_hard_pass = False
        rows.append(
            _make_row(check_id, n, cfg.mu, cfg.d, cfg.operator, dev, bound, ok, runtime_ms)
        )

    for n in cfg.n_list:
        params = OperatorParams(n=n, mu=cfg.mu, d=cfg.d)
        amp = math.exp(cfg.mu * cfg.d)

        # reproduction of the exponential and its square on the full grid;
        # the classical operator only converges, so those rows are skipped
        if cfg.operator == EXPONENTIAL:
            for name, fld in (("reproduce_exp", exp1), ("reproduce_exp2", exp2)):
                (err, ms) = _timed(lambda f=fld: sup_error(f, params, grid, cfg.operator))
                record(name, n, err, 1e-10 * amp, runtime_ms=ms)

        # closed forms against the generic lattice contraction
        probes = rng.uniform(0.0, 1.0, size=(16, cfg.d))
        for label, (fld, closed) in non_sep.items():
            start = time.perf_counter()
            worst = 0.0
            for pt in probes:
                direct = exp_bernstein_apply_nd(fld, params, pt)
                ref = closed(params, pt)
                worst = max(worst, abs(direct - ref) / max(abs(ref), 1e-300))
            record(f"closed_{label}", n, worst, 1e-11,
                   runtime_ms=(time.perf_counter() - start) * 1e3)

        # the two evaluation routes agree on a non-separable field
        start = time.perf_counter()
        worst = 0.0
        for pt in probes:
            a = exp_bernstein_apply_nd(osc, params, pt)
            b = exp_bernstein_via_classical_nd(osc, params, pt)
            worst = max(worst, abs(a - b) / max(abs(a), 1.0))
        record("route_equivalence", n, worst, 1e-11,
               runtime_ms=(time.perf_counter() - start) * 1e3)

        # operator on pure exponential powers factors into 1-D products
        start = time.perf_counter()
        worst = 0.0
        for m, closed in ((3, closed_form_exp3_nd), (4, closed_form_exp4_nd)):
            for pt in probes[:8]:
                a = exp_power_product(m, params, pt)
                ref = closed(params, pt)
                worst = max(worst, abs(a - ref) / abs(ref))
        record("power_product", n, worst, 1e-11,
               runtime_ms=(time.perf_counter() - start) * 1e3)

        # partition of unity of the basis at the warped coordinates
        (dev, ms) = _timed(
            lambda: float(np.max(np.abs(
                bernstein_basis_matrix(n, np.linspace(0.0, 1.0, 257)).sum(axis=1) - 1.0
            )))
        )
        record("partition_unity", n, dev, 1e-12, runtime_ms=ms)

        # first absolute moment bound 1/(2 sqrt(n))
        start = time.perf_counter()
        moment = max(
            first_moment(OperatorParams(n=n, mu=cfg.mu), x)
            for x in np.linspace(0.0, 1.0, 257)
        )
        record("moment_bound", n, moment, 0.5 / math.sqrt(n),
               runtime_ms=(time.perf_counter() - start) * 1e3)

        # deviation of the operator on the constant, against mu^2/n
        (res, ms) = _timed(lambda: voronovskaja_e0_check(OperatorParams(n=n, mu=cfg.mu)))
        max_dev, _ = res
        record("voro_e0", n, max_dev, cfg.mu**2 / n if cfg.mu > 0 else 1e-12,
               hard=n >= VORO_HARD_MIN_N, runtime_ms=ms)

        # closed warp gap against the golden-section grid oracle
        (pair, ms) = _timed(lambda: (
            warp_gap_closed(OperatorParams(n=n, mu=cfg.mu)),
            warp_gap_grid(OperatorParams(n=n, mu=cfg.mu)),
        ))
        record("warp_gap_oracle", n, abs(pair[0] - pair[1]), 1e-8, runtime_ms=ms)

        # basis tail mass beyond delta = 0.2
        start = time.perf_counter()
        worst = -np.inf
        for x in np.linspace(0.0, 1.0, 17):
            lhs, rhs, _ = tail_mass_bound_check(OperatorParams(n=n, mu=cfg.mu), x, 0.2)
            worst = max(worst, lhs - rhs)
        record("tail_mass", n, worst, 1e-12,
               runtime_ms=(time.perf_counter() - start) * 1e3)

    # scalar checks outside the degree loop, reported at n = max
    n_top = cfg.n_list[-1]
    start = time.perf_counter()
    pts_a = rng.uniform(0.0, 1.0, size=(512, cfg.d))
    pts_b = rng.uniform(0.0, 1.0, size=(512, cfg.d))
    wit = np.array([
        korovkin_witness(a, b, cfg.mu) for a, b in zip(pts_a, pts_b)
    ])
    record("korovkin_witness_nonneg", n_top, float(-wit.min()), 0.0,
           runtime_ms=(time.perf_counter() - start) * 1e3)

    return rows, all_hard_pass


def cmd_verify(cfg: ExperimentConfig) -> int:
    cfg.validate(default_n=(5, 20, 100))
    rows, ok = _verify_checks(cfg)
    _emit(rows, cfg.fmt, cfg.out)
    return EXIT_OK if ok else EXIT_CHECK


# ---------------------------------------------------------------------------
# converge


def cmd_converge(cfg: ExperimentConfig) -> int:
    cfg.validate(default_n=(25, 50, 100, 200, 400))
    corpus = builtin_corpus(cfg.d, cfg.mu)
    names = cfg.functions or tuple(corpus.names())
    grid = Grid.uniform(cfg.d, cfg.grid)
    out_dir = Path(cfg.out) if cfg.out else Path("converge_out")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out_dir}: {exc}", EXIT_IO) from exc

    all_pass = True
    summary: list[dict] = []
    for name in names:
        try:
            entry = corpus.lookup(name)
        except KeyError as exc:
            raise CliError(str(exc), EXIT_CONFIG) from exc
        report = convergence_report(
            entry.field, cfg.mu, cfg.d, cfg.n_list, grid=grid,
            operator=cfg.operator, modulus_inflation=1.1, seed=cfg.seed,
        )
        rows = report.to_dicts()
        # bound dominance is a hard requirement from degree 50 upward
        for row in rows:
            if not row["pass"] and row["n"] >= 50:
                all_pass = False
        _emit(rows, cfg.fmt, str(out_dir / f"{name}.{cfg.fmt}"))
        rate_ok = True
        alpha = entry.field.lip_alpha_hint
        if LIPSCHITZ in entry.tags and REPRODUCED not in entry.tags \
                and report.fitted_rate is not None and alpha:
            rate_ok = report.fitted_rate <= -alpha / 2.0 + 0.1
            if not rate_ok:
                all_pass = False
        summary.append({
            "function": name,
            "mu": cfg.mu,
            "d": cfg.d,
            "operator": cfg.operator,
            "fitted_rate": report.fitted_rate,
            "rate_note": report.rate_note,
            "rate_pass": rate_ok,
            "bounds_pass": all(r["pass"] for r in rows if r["n"] >= 50),
        })

    summary_path = out_dir / f"summary.{cfg.fmt}"
    try:
        if cfg.fmt == "json":
            summary_path.write_text(json.dumps(summary, indent=2) + "\n")
        else:
            cols = list(summary[0].keys()) if summary else []
            lines = [",".join(cols)]
            for row in summary:
                lines.append(",".join(
                    "" if row[c] is None else _fmt_value(row[c]) for c in cols
                ))
            summary_path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {summary_path}: {exc}", EXIT_IO) from exc
    return EXIT_OK if all_pass else EXIT_CHECK


# ---------------------------------------------------------------------------
# eval


def _parse_point(text: str, d: int) -> np.ndarray:
    try:
        coords = [float(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]
    except ValueError as exc:
        raise CliError(f"malformed point {text!r}: {exc}", EXIT_CONFIG) from exc
    if len(coords) != d:
        raise CliError(
            f"point {text!r} has {len(coords)} coordinates, expected {d}", EXIT_CONFIG
        )
    pt = np.asarray(coords)
    if np.any(pt < 0.0) or np.any(pt > 1.0):
        raise CliError(f"point {text!r} lies outside the unit hypercube", EXIT_CONFIG)
    return pt


def cmd_eval(cfg: ExperimentConfig, points: list[str], points_file: str | None) -> int:
    cfg.validate(default_n=(50,))
    if len(cfg.n_list) != 1:
        raise CliError("eval expects exactly one degree via --n", EXIT_CONFIG)
    if not cfg.functions or len(cfg.functions) != 1:
        raise CliError("eval expects exactly one --function", EXIT_CONFIG)
    corpus = builtin_corpus(cfg.d, cfg.mu)
    try:
        entry = corpus.lookup(cfg.functions[0])
    except KeyError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc

    texts = list(points)
    if points_file:
        try:
            content = Path(points_file).read_text()
        except OSError as exc:
            raise CliError(f"cannot read {points_file}: {exc}", EXIT_IO) from exc
        texts.extend(line for line in content.splitlines() if line.strip())
    if not texts:
        raise CliError("no points given; use --point or --points-file", EXIT_CONFIG)

    params = OperatorParams(n=cfg.n_list[0], mu=cfg.mu, d=cfg.d)
    lines = []
    for text in texts:
        pt = _parse_point(text, cfg.d)
        if cfg.operator == CLASSICAL:
            value = exp_bernstein_apply_nd(
                entry.field, OperatorParams(n=params.n, mu=0.0, d=cfg.d), pt
            )
        else:
            value = exp_bernstein_apply_nd(entry.field, params, pt)
        lines.append(f"{value:.17g}")
    text_out = "\n".join(lines) + "\n"
    if cfg.out and cfg.out != "-":
        try:
            Path(cfg.out).write_text(text_out)
        except OSError as exc:
            raise CliError(f"cannot write {cfg.out}: {exc}", EXIT_IO) from exc
    else:
        sys.stdout.write(text_out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# gamma


def cmd_gamma(cfg: ExperimentConfig) -> int:
    cfg.validate(default_n=(10, 100, 1000, 10000))
    if cfg.mu == 0.0:
        limit = 0.0
    else:
        limit = cfg.mu / 8.0
    rows = []
    for n in cfg.n_list:
        params = OperatorParams(n=n, mu=cfg.mu)
        start = time.perf_counter()
        closed = warp_gap_closed(params)
        grid_val = warp_gap_grid(params)
        ms = (time.perf_counter() - start) * 1e3
        rows.append({
            "n": n,
            "mu": cfg.mu,
            "gap_closed": closed,
            "gap_grid": grid_val,
            "n_times_gap": n * closed,
            "limit_deviation": abs(n * closed - limit),
            "runtime_ms": ms,
        })
    if cfg.fmt == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        cols = list(rows[0].keys())
        lines = [",".join(cols)]
        for row in rows:
            lines.append(",".join(_fmt_value(row[c]) for c in cols))
        text = "\n".join(lines) + "\n"
    if cfg.out and cfg.out != "-":
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            raise CliError(f"cannot write {cfg.out}: {exc}", EXIT_IO) from exc
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument handling


def _read_config_file(path: str) -> dict:
    """Flat key=value file; '#' starts a comment."""
    values: dict[str, str] = {}
    try:
        content = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_IO) from exc
    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value, got {raw!r}", EXIT_CONFIG)
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise CliError(f"malformed {what} list {text!r}: {exc}", EXIT_CONFIG) from exc


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    file_values: dict[str, str] = {}
    if args.config:
        file_values = _read_config_file(args.config)

    def pick(flag_value, key, convert, default):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            try:
                return convert(file_values[key])
            except CliError:
                raise
            except ValueError as exc:
                raise CliError(f"config {key}={file_values[key]!r}: {exc}", EXIT_CONFIG) from exc
        return default

    cfg = ExperimentConfig()
    cfg.mu = pick(args.mu, "mu", float, cfg.mu)
    cfg.d = pick(args.d, "d", int, cfg.d)
    cfg.n_list = pick(
        args.n and _parse_int_list(args.n, "degree") or None,
        "n", lambda s: _parse_int_list(s, "degree"), (),
    )
    cfg.functions = pick(
        args.function and tuple(t.strip() for t in args.function.split(",") if t.strip()) or None,
        "function", lambda s: tuple(t.strip() for t in s.split(",") if t.strip()), (),
    )
    cfg.grid = pick(
        args.grid and _parse_int_list(args.grid, "grid") or None,
        "grid", lambda s: _parse_int_list(s, "grid"), None,
    )
    cfg.operator = pick(args.operator, "operator", str, cfg.operator)
    cfg.fmt = pick(args.format, "format", str, cfg.fmt)
    cfg.out = pick(args.out, "out", str, cfg.out)
    cfg.seed = pick(args.seed, "seed", int, cfg.seed)
    if cfg.d < 1:
        raise CliError(f"dimension must be >= 1, got {cfg.d}", EXIT_CONFIG)
    return cfg


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--mu", type=float, default=None, help="exponential rate (default 1.0)")
    sub.add_argument("--d", type=int, default=None, help="hypercube dimension (default 2)")
    sub.add_argument("--n", type=str, default=None, help="comma list of degrees")
    sub.add_argument("--function", type=str, default=None, help="comma list of corpus names")
    sub.add_argument("--grid", type=str, default=None, help="per-axis grid points, comma list")
    sub.add_argument("--operator", choices=(CLASSICAL, EXPONENTIAL), default=None)
    sub.add_argument("--format", choices=("csv", "json"), default=None)
    sub.add_argument("--out", type=str, default=None, help="output file or directory")
    sub.add_argument("--seed", type=int, default=None, help="seed for random probes (default 42)")
    sub.add_argument("--config", type=str, default=None, help="key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="expobern", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)
    for name, descr in (
        ("verify", "run identity and inequality checks"),
        ("converge", "sup-error and bound sweeps with rate fits"),
        ("eval", "evaluate the operator at points"),
        ("gamma", "warp-gap table: closed form vs grid oracle"),
    ):
        sub = subs.add_parser(name, help=descr)
        _add_common(sub)
        if name == "eval":
            sub.add_argument("--point", action="append", default=[],
                             help="comma-separated coordinates; repeatable")
            sub.add_argument("--points-file", type=str, default=None,
                             help="file with one point per line")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _build_config(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "converge":
            return cmd_converge(cfg)
        if args.command == "eval":
            return cmd_eval(cfg, args.point, args.points_file)
        if args.command == "gamma":
            return cmd_gamma(cfg)
        raise CliError(f"unknown command {args.command!r}", EXIT_CONFIG)
    except CliError as exc:
        print(f"expobern: error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"expobern: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
