"""Command-line front end: ``modlaplace <command> [options]``.

Commands
--------
table N        reference tables 1-4 (approximant and oracle columns)
figure N       sample data behind figures 1-5
betascan       plateau value against beta
largeorder     stationary points, root census and b_i at large order
kernel         delta-expansion kernel diagnostics
coefficients   exact oscillator coefficients in cache-file format
approx         approximant of a built-in model at the given --m2 values

Exit status is 0 on success, 2 for a configuration error and 3 when a
numerical procedure fails to converge.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from mpmath import mp

from . import reproduce
from .heaviside import TransformError
from .output import Table, to_csv, to_json
from .precision import MIN_DPS, ConvergenceError, DomainError, as_rational, to_mpf
from .resummation import NoStationaryPoint, approximant, select_x_star
from .series import CacheFormatError, Model, anharmonic_coefficients

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    model: Model = Model.ANHARMONIC
    order: Optional[int] = None
    beta: Fraction = Fraction(2)
    precision: int = 80
    m2_list: list[str] = field(default_factory=list)
    output_format: str = "csv"
    cache_path: Optional[Path] = None

    def validate(self) -> None:
        if self.precision < MIN_DPS:
            raise ConfigError(f"--precision must be at least {MIN_DPS}")
        if self.order is not None and self.order < 0:
            raise ConfigError("--order must be >= 0")
        if self.beta <= 0:
            raise ConfigError("--beta must be positive")
        for m2 in self.m2_list:
            try:
                to_mpf(m2)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad --m2 value {m2!r}") from exc


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (TypeError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _orders(text: str) -> list[int]:
    """'26-30,99,101' -> [26, 27, 28, 29, 30, 99, 101]."""
    out = []
    try:
        for part in text.split(","):
            if "-" in part:
                lo, hi = part.split("-")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order list: {text!r}")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default=None, help="nongaussian | anharmonic")
    common.add_argument("--order", type=int, default=None)
    common.add_argument("--beta", type=_rational, default=Fraction(2))
    common.add_argument("--precision", type=int, default=80, help="decimal digits (>= 30)")
    common.add_argument("--m2", action="append", default=[], help="mass squared (repeatable)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--cache", type=Path, default=None, help="coefficient cache file")
    common.add_argument("--out", type=Path, default=None, help="write here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true")
    common.add_argument("--quiet", action="store_true", help="no progress messages")

    parser = argparse.ArgumentParser(
        prog="modlaplace",
        description="Resum divergent mass expansions with the cut-off Laplace approximant.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common], help="reference tables 1-4")
    p.add_argument("which", type=int, choices=sorted(reproduce.TABLES))

    p = sub.add_parser("figure", parents=[common], help="figure data 1-5")
    p.add_argument("which", type=int, choices=sorted(reproduce.FIGURES))
    p.add_argument("--betas", type=lambda s: [_rational(b) for b in s.split(",")], default=None)

    p = sub.add_parser("betascan", parents=[common], help="plateau value against beta")
    p.add_argument("--betas", type=lambda s: [_rational(b) for b in s.split(",")], default=None)

    p = sub.add_parser("largeorder", parents=[common], help="large-order report")
    p.add_argument("--census", type=_orders, default=None,
                   help="orders for the root census, e.g. 26-30,99-103 (default 1..order)")

    p = sub.add_parser("kernel", parents=[common], help="delta-expansion kernel report")
    p.add_argument("--omega2", default=None, help="fixed Omega^2 (default Omega^2 = N)")

    sub.add_parser("coefficients", parents=[common], help="exact oscillator coefficients")
    sub.add_parser("approx", parents=[common], help="approximant at --m2 values")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    try:
        model = Model.parse(args.model) if args.model else Model.ANHARMONIC
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg = RunConfig(model, args.order, args.beta, args.precision, list(args.m2),
                    args.format, args.cache)
    cfg.validate()
    return cfg


def _progress(quiet: bool):
    if quiet:
        return None
    state = {"last": 0.0}

    def report(n: int, order: int) -> None:
        now = time.monotonic()
        if n == order or now - state["last"] > 2:
            state["last"] = now
            print(f"generating coefficients: {n}/{order}", file=sys.stderr, flush=True)

    return report


def _run(args: argparse.Namespace, cfg: RunConfig) -> list[Table]:
    progress = _progress(args.quiet)
    cmd = args.command
    if cmd == "table":
        kwargs = {}
        if cfg.m2_list and args.which in (2, 4):
            kwargs["m2_values"] = cfg.m2_list
        if cfg.order is not None:
            kwargs["order" if args.which in (2, 4) else "orders"] = (
                cfg.order if args.which in (2, 4) else [cfg.order]
            )
        if args.which == 4:
            kwargs.update(cache=cfg.cache_path, progress=progress)
        return [reproduce.TABLES[args.which](**kwargs)]
    if cmd == "figure":
        kwargs = {}
        if args.which in (3, 5):
            kwargs.update(cache=cfg.cache_path, progress=progress)
        if cfg.order is not None and args.which in (3, 4, 5):
            kwargs["order"] = cfg.order
        if args.betas and args.which in (4, 5):
            kwargs["betas"] = args.betas
        return [reproduce.FIGURES[args.which](**kwargs)]
    if cmd == "betascan":
        order = cfg.order if cfg.order is not None else (
            100 if cfg.model is Model.NONGAUSSIAN else reproduce.LARGE_ORDER)
        if cfg.model is Model.ANHARMONIC:
            reproduce.ensure_coefficients(order, cfg.cache_path, progress)
        return [reproduce.betascan_table(cfg.model, order, args.betas, cfg.cache_path)]
    if cmd == "largeorder":
        order = cfg.order if cfg.order is not None else reproduce.LARGE_ORDER
        b_orders = tuple(n for n in reproduce.B_ORDERS if n <= order) or (order,)
        return reproduce.largeorder_tables(order, args.census, b_orders,
                                           cache=cfg.cache_path, progress=progress)
    if cmd == "kernel":
        orders = [cfg.order] if cfg.order is not None else list(reproduce.KERNEL_ORDERS)
        if any(n < 1 for n in orders):
            raise ConfigError("kernel needs --order >= 1")
        if args.omega2 is not None and to_mpf(args.omega2) <= 0:
            raise ConfigError("--omega2 must be positive")
        return reproduce.kernel_tables(orders, args.omega2, cfg.model, cache=cfg.cache_path)
    if cmd == "coefficients":
        order = cfg.order if cfg.order is not None else reproduce.LARGE_ORDER
        coeffs = anharmonic_coefficients(order, cfg.cache_path, progress)
        table = Table("coefficients", ["n", "A_n"])
        for n, a in enumerate(coeffs):
            table.add(n, f"{a.numerator}/{a.denominator}" if a.denominator != 1 else str(a.numerator))
        return [table]
    if cmd == "approx":
        if cfg.order is None:
            raise ConfigError("approx needs --order")
        if not cfg.m2_list:
            raise ConfigError("approx needs at least one --m2")
        if cfg.model is Model.ANHARMONIC:
            reproduce.ensure_coefficients(cfg.order, cfg.cache_path, progress)
        series, hs = reproduce.transformed(cfg.model, cfg.order, cfg.beta, cfg.cache_path)
        points = reproduce.stationary_points(cfg.model, cfg.order, cfg.beta, cfg.cache_path)
        point = select_x_star(points)
        table = Table("approx", ["m2", "total", "perturbative", "correction", "x*"])
        for m2 in cfg.m2_list:
            res = approximant(series, hs, point, m2)
            table.add(to_mpf(m2), res.total, res.perturbative_part, res.correction_part,
                      point.x_star)
        return [table]
    raise ConfigError(f"unknown command {cmd}")  # pragma: no cover


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        cfg = _config(args)
        mp.dps = cfg.precision
        tables = _run(args, cfg)
    except (ConfigError, DomainError, TransformError, CacheFormatError, OSError) as exc:
        print(f"modlaplace: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, NoStationaryPoint) as exc:
        print(f"modlaplace: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"modlaplace: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    render = to_json if cfg.output_format == "json" else to_csv
    text = render(tables, timestamp=not args.no_timestamp)
    if args.out is None:
        sys.stdout.write(text)
    else:
        try:
            args.out.write_text(text)
        except OSError as exc:
            print(f"modlaplace: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
