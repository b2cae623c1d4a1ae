"""Command line entry point: ``signorth <subcommand> ...``.

Exit codes: 0 success / Allows / has SIPP / Accept, 2 Forbidden / no SIPP /
Reject, 3 Unknown or nothing found, 1 usage or internal error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import classify as classify_mod
from .certificate import SearchConfig, find_certificate, verify_certificate
from .combinatorics import DecideConfig, Status, decide_allows
from .constructions import fixture_names, named_fixture
from .exact_linalg import ExactMatrix, parse_scalar
from .pattern_core import PatternParseError, SignPattern, parse_pattern, sgn_of
from .random_sim import CSV_HEADER, cover_probability, required_columns
from .sipp_analysis import sipp_check_exact

log = logging.getLogger("signorth")

EXIT_OK, EXIT_ERROR, EXIT_NO, EXIT_UNKNOWN = 0, 1, 2, 3
ENV_SEED, ENV_OUT = "SIGNORTH_SEED", "SIGNORTH_OUT"


class CliError(Exception):
    pass


@dataclass
class Config:
    seed: int = 0
    bits: int = 64
    scale: int = 600
    max_iters: int = 24
    max_doublings: int = 4
    cover_deadline: float = 5.0
    greedy_r: int = 0
    exact_cover_rows: int = 6
    exact_cover_cols: int = 24
    rank1_guard: int = 12
    format: str = "json"
    out: str | None = None

    def __post_init__(self):
        for name in ("bits", "scale", "max_iters", "cover_deadline", "exact_cover_rows",
                     "exact_cover_cols", "rank1_guard"):
            if getattr(self, name) <= 0:
                raise CliError(f"config value {name} must be positive")
        if self.max_doublings < 0 or self.greedy_r < 0 or self.seed < 0:
            raise CliError("max_doublings, greedy_r and seed must be nonnegative")
        if self.format not in ("json", "text", "csv"):
            raise CliError(f"format must be json, text or csv; got {self.format!r}")

    @classmethod
    def parse(cls, text: str) -> "Config":
        kinds = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"config line {lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in kinds:
                raise CliError(f"config line {lineno}: unknown key {key!r}")
            kind = kinds[key]
            try:
                if "int" in kind:
                    values[key] = int(val)
                elif "float" in kind:
                    values[key] = float(val)
                else:
                    values[key] = val or None
            except ValueError:
                raise CliError(f"config line {lineno}: bad value for {key}") from None
        return cls(**values)

    def to_text(self) -> str:
        return "".join(f"{f.name} = {'' if getattr(self, f.name) is None else getattr(self, f.name)}\n"
                       for f in fields(self))

    def search(self) -> SearchConfig:
        return SearchConfig(scale=self.scale, max_doublings=self.max_doublings,
                            max_iters=self.max_iters, bits=self.bits, seed=self.seed)

    def decide(self) -> DecideConfig:
        return DecideConfig(greedy_r=self.greedy_r, cover_deadline=self.cover_deadline,
                            exact_cover_guard=(self.exact_cover_rows, self.exact_cover_cols),
                            rank1_guard=self.rank1_guard, search=self.search())


def resolve_config(args, environ=os.environ) -> Config:
    """defaults < config file < environment (seed, out) < flags."""
    cfg = Config()
    if args.config:
        cfg = Config.parse(Path(args.config).read_text())
    updates = {}
    if environ.get(ENV_SEED):
        try:
            updates["seed"] = int(environ[ENV_SEED])
        except ValueError:
            raise CliError(f"{ENV_SEED} must be an integer") from None
    if environ.get(ENV_OUT):
        updates["out"] = environ[ENV_OUT]
    for key in ("seed", "out", "bits", "format"):
        val = getattr(args, key, None)
        if val is not None:
            updates[key] = val
    return dataclasses.replace(cfg, **updates)


# --- input loading -------------------------------------------------------

def _read_json_or_text(path: Path):
    text = path.read_text()
    if text.lstrip().startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise CliError(f"{path}: invalid JSON: {exc}") from None
    return text


def load_pattern(arg: str) -> SignPattern:
    path = Path(arg)
    if path.is_file():
        obj = _read_json_or_text(path)
        try:
            if isinstance(obj, str):
                return parse_pattern(obj)
            if "entries" in obj:
                return SignPattern.from_json(obj)
            if "data" in obj:
                return sgn_of(ExactMatrix.from_json(obj))
        except PatternParseError as exc:
            raise CliError(f"{path}: {exc}") from None
        raise CliError(f"{path}: expected a pattern or matrix JSON object")
    obj = _fixture(arg)
    if isinstance(obj, SignPattern):
        return obj
    return sgn_of(obj)


def _parse_matrix_text(text: str, path: Path) -> ExactMatrix:
    """A sign pattern, or one row of whitespace-separated scalars per line."""
    try:
        return ExactMatrix.from_rows(parse_pattern(text).to_rows())
    except PatternParseError as exc:
        if not any(ch.isdigit() for ch in text):
            raise CliError(f"{path}: {exc}") from None
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise CliError(f"{path}: rows must be nonempty and of equal length")
    try:
        return ExactMatrix.from_rows([[parse_scalar(x) for x in r] for r in rows])
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"{path}: {exc}") from None


def load_matrix(arg: str) -> ExactMatrix:
    path = Path(arg)
    if path.is_file():
        obj = _read_json_or_text(path)
        if isinstance(obj, str):
            return _parse_matrix_text(obj, path)
        if "data" in obj:
            return ExactMatrix.from_json(obj)
        if "entries" in obj:
            return ExactMatrix.from_rows(SignPattern.from_json(obj).to_rows())
        raise CliError(f"{path}: expected a matrix JSON object")
    obj = _fixture(arg)
    if isinstance(obj, SignPattern):
        return ExactMatrix.from_rows(obj.to_rows())
    if isinstance(obj, np.ndarray):
        raise CliError(f"fixture {arg!r} is a float matrix; exact input required")
    return obj


def _fixture(name: str):
    try:
        return named_fixture(name)
    except KeyError:
        raise CliError(f"{name!r} is neither a file nor a known fixture "
                       f"(see `signorth construct --list`)") from None


# --- output ------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(cfg: Config, name: str, obj: dict, text: str | None = None) -> None:
    body = text if cfg.format in ("text", "csv") and text is not None else _dump(obj)
    sys.stdout.write(body)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(_dump(obj))
        if text is not None:
            (out / f"{name}.txt").write_text(text)


# --- subcommands --------------------------------------------------------------

def cmd_check(args, cfg: Config) -> int:
    S = load_pattern(args.pattern)
    rng = np.random.default_rng(cfg.seed)
    v = decide_allows(S, cfg.decide(), rng)
    obj = {"pattern": S.to_json(), **v.to_json()}
    emit(cfg, "check", obj, f"{v.status.value} ({v.provenance})\n")
    return {Status.ALLOWS: EXIT_OK, Status.FORBIDDEN: EXIT_NO,
            Status.UNKNOWN: EXIT_UNKNOWN}[v.status]


def cmd_sipp(args, cfg: Config) -> int:
    A = load_matrix(args.matrix)
    v = sipp_check_exact(A)
    text = f"has SIPP: {v.has_sipp} ({v.method})\n"
    if v.witness is not None:
        text += "witness X:\n" + "\n".join(" ".join(str(x) for x in row)
                                          for row in v.witness.to_rows()) + "\n"
    emit(cfg, "sipp", v.to_json(), text)
    return EXIT_OK if v.has_sipp else EXIT_NO


def cmd_verify_cert(args, cfg: Config) -> int:
    A = load_matrix(args.matrix)
    rep = verify_certificate(A, cfg.bits)
    obj = rep.to_json()
    text = f"{rep.verdict} delta={obj['delta']} eps^2={obj['epsilon_sq']} " \
           f"pert<={obj['pert_upper']}\n"
    emit(cfg, "verify_cert", obj, text)
    return EXIT_OK if rep.accepted else EXIT_NO


def cmd_find_cert(args, cfg: Config) -> int:
    S = load_pattern(args.pattern)
    A = find_certificate(S, cfg.search(), np.random.default_rng(cfg.seed))
    if A is None:
        emit(cfg, "find_cert", {"found": False}, "no certificate found\n")
        return EXIT_UNKNOWN
    rep = verify_certificate(A, cfg.bits)
    emit(cfg, "find_cert", {"found": True, "matrix": A.to_json(), "report": rep.to_json()},
         "\n".join(" ".join(str(x) for x in row) for row in A.to_rows()) + "\n")
    return EXIT_OK


def _default_r(m: int, n: int, p: Fraction) -> int:
    return max(0, min(m, int((Fraction(n - m * m, m) - 2 / p) // 1)))


def cmd_simulate(args, cfg: Config) -> int:
    p = Fraction(args.p)
    m = args.m
    if args.n:
        ns = [int(x) for x in args.n.split(",")]
    else:
        r0 = m if args.r is None else args.r
        ns = [required_columns(m, p, r0)]
    reports = []
    for n in ns:
        r = args.r if args.r is not None else _default_r(m, n, p)
        reports.append(cover_probability(m, n, p, r, args.trials, cfg.seed,
                                         exact_oracle=args.exact_oracle, relax=args.relax))
    rows = [rep.csv_row() for rep in reports]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            w.writerows(rows)
    obj = reports[0].to_json() if len(reports) == 1 else {"sweep": [r.to_json() for r in reports]}
    if cfg.format == "csv":
        text = ",".join(CSV_HEADER) + "\n" + "".join(",".join(map(str, r)) + "\n" for r in rows)
    else:
        text = "".join(f"m={r.m} n={r.n} p={r.p} r={r.r}: {r.empirical:.4f} "
                       f"[{r.wilson_lo:.4f}, {r.wilson_hi:.4f}] bound={float(r.lower_bound):.4f}\n"
                       for r in reports)
    emit(cfg, "simulate", obj, text)
    return EXIT_OK


def cmd_classify(args, cfg: Config) -> int:
    run = classify_mod.minimal_allows(args.m, args.max_n, cfg.decide(), cfg.seed, full=args.full)
    emit(cfg, f"classify_m{args.m}", run.to_json(all_classes=args.all_classes), run.table())
    return EXIT_UNKNOWN if run.incomplete else EXIT_OK


def cmd_construct(args, cfg: Config) -> int:
    if args.list or not args.name:
        sys.stdout.write("\n".join(fixture_names()) + "\n")
        return EXIT_OK
    obj = _fixture(args.name)
    if isinstance(obj, np.ndarray):
        data = {"rows": obj.shape[0], "cols": obj.shape[1], "float_data": obj.tolist()}
    else:
        data = obj.to_json()
    emit(cfg, args.name, data, str(obj) + "\n")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help=f"RNG seed (env {ENV_SEED})")
    common.add_argument("--out", help=f"directory for artifacts (env {ENV_OUT})")
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--bits", type=int, help="precision of square-root bounds")
    common.add_argument("--format", choices=("json", "text", "csv"))
    common.add_argument("-v", "--verbose", action="store_true")

    ap = _Parser(prog="signorth", description="Sign patterns and row orthogonality.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="decide whether a pattern allows row orthogonality")
    p.add_argument("pattern", help="pattern file (text or JSON) or fixture name")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sipp", parents=[common], help="exact SIPP decision for a matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_sipp)

    p = sub.add_parser("verify-cert", parents=[common], help="verify an approximate-orthogonality certificate")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_verify_cert)

    p = sub.add_parser("find-cert", parents=[common], help="search for an integer certificate")
    p.add_argument("pattern")
    p.set_defaults(func=cmd_find_cert)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo cover probability")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", help="column count, or comma-separated list for a sweep")
    p.add_argument("--p", default="1/2")
    p.add_argument("--r", type=int)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--exact-oracle", action="store_true")
    p.add_argument("--relax", action="store_true", help="allow n below the bound's hypothesis")
    p.add_argument("--csv", help="write the sweep as CSV to this path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("classify", parents=[common], help="minimal nowhere-zero patterns")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--full", action="store_true", help="no restriction for m = 5")
    p.add_argument("--all-classes", action="store_true", help="list non-minimal classes too")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("construct", parents=[common], help="emit a named matrix or pattern")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_construct)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except (CliError, ValueError, OSError) as exc:
        print(f"signorth: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
