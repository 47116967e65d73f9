"""Command-line front end: analytic curves, rate tables and simulations.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, TextIO

from . import analytic
from .analytic import OperatingPoint
from .coding import CODE_K7, ConvCode
from .constellation import Mapping
from .montecarlo import CodesConfig, RunSpec, run
from .receiver import IterationSchedule, PriorMode

MAPPING_NAMES = {"gray": Mapping.KARNAUGH_GRAY, "balanced": Mapping.BALANCED}
PRIOR_NAMES = {"paper": PriorMode.PAPER_FULL_APP, "extrinsic": PriorMode.EXTRINSIC}


class UsageError(Exception):
    pass


class ConfigError(UsageError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"config line {line}: {message}" if line else message)


def fmt_num(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.6g}"


def fmt_grid(x: float) -> str:
    return repr(round(float(x), 10))


def parse_range(text: str) -> list[float]:
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"--cnr expects lo:hi:step, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and step > 0 and hi >= lo):
        raise UsageError(f"invalid CNR range {text!r}: need lo <= hi and step > 0")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(n)]


def _lambdas(values, default=(0.1, 0.15)) -> list[float]:
    lams = list(values) if values else list(default)
    for lam in lams:
        if not 0.0 <= lam <= 0.5:
            raise UsageError(f"lambda {lam} outside [0, 1/2]")
    return lams


def _write(text: str, out: Optional[str]):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def penalty_csv(kind: str, lambdas: Sequence[float], cnrs: Sequence[float]) -> str:
    lines = ["cnr_db,lambda,penalty_db"]
    for lam in lambdas:
        curve = analytic.penalty_curve(kind, lam, cnrs)
        lines += [f"{fmt_grid(c)},{fmt_grid(lam)},{p:.3f}" for c, p in curve.samples]
    return "\n".join(lines) + "\n"


def ber_csv(lambdas: Sequence[float], cnrs: Sequence[float]) -> str:
    lines = ["cnr_db,lambda,ber_qpsk,ber_basic,ber_secondary,ber_basic_given_s1,ber_basic_given_s0"]
    for lam in lambdas:
        for c in cnrs:
            pt = OperatingPoint(lam, c)
            sec = analytic.ber_secondary_raw(pt) if lam > 0 else math.nan
            vals = [analytic.ber_qpsk(pt.cnr), analytic.ber_basic_raw(pt), sec,
                    analytic.ber_basic_conditional(pt, 1), analytic.ber_basic_conditional(pt, 0)]
            lines.append(",".join([fmt_grid(c), fmt_grid(lam)] + [fmt_num(v) for v in vals]))
    return "\n".join(lines) + "\n"


def rate_table(lambdas: Sequence[float], basic_rate: Optional[float] = None) -> str:
    header = f"{'lambda':>8} {'ratio':>10} {'percent':>9}"
    if basic_rate is not None:
        header += f" {'secondary_rate':>15}"
    lines = [header]
    for lam in lambdas:
        est = analytic.rate_estimate(lam, basic_rate)
        row = f"{lam:>8.3f} {est.ratio:>10.7f} {100 * est.ratio:>8.2f}%"
        if basic_rate is not None:
            row += f" {est.secondary_rate:>15.2f}"
        lines.append(row)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- config files


@dataclass
class RunConfig:
    spec: RunSpec
    out: str = "-"
    log: str = "-"
    defaults: tuple[str, ...] = ()
    values: dict = None


def _floats(v: str) -> list[float]:
    return [float(x) for x in v.split(",") if x.strip()]


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


def _choice(names: dict) -> Callable[[str], object]:
    def convert(v: str):
        if v not in names:
            raise ValueError(f"expected one of {sorted(names)}, got {v!r}")
        return names[v]
    return convert


def _repetition(v: str):
    return None if v == "auto" else int(v)


def _seed(v: str) -> int:
    s = int(v)
    if not 0 <= s < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return s


# key: (converter, default text)
CONFIG_KEYS: dict[str, tuple[Callable[[str], object], str]] = {
    "lambda": (_floats, ""),
    "cnr_db": (_floats, ""),
    "frames": (int, "100"),
    "frame_message_bits": (int, "4096"),
    "seed": (_seed, "0"),
    "mapping": (_choice(MAPPING_NAMES), "gray"),
    "iterations": (int, "3"),
    "prior_mode": (_choice(PRIOR_NAMES), "extrinsic"),
    "basic_code": (ConvCode.parse, str(CODE_K7)),
    "secondary_code": (ConvCode.parse, str(CODE_K7)),
    "repetition": (_repetition, "auto"),
    "interleaver_depth": (int, "1"),
    "decode": (_bool, "true"),
    "noiseless": (_bool, "false"),
    "workers": (int, "1"),
    "out": (str, "-"),
    "log": (str, "-"),
}


def parse_config(text: str, overrides: Optional[dict] = None) -> RunConfig:
    """Parse ``key = value`` lines; ``overrides`` (raw strings) win over the file."""
    raw: dict[str, str] = {}
    lines: dict[str, int] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", n)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", n)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", n)
        raw[key], lines[key] = value, n
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key], lines[key] = str(value), None

    values, defaults = {}, []
    for key, (convert, default) in CONFIG_KEYS.items():
        if key not in raw:
            defaults.append(key)
        try:
            values[key] = convert(raw.get(key, default))
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lines.get(key)) from None

    points = [(lam, c) for lam in values["lambda"] for c in values["cnr_db"]]
    if not points:
        raise ConfigError("no operating points")
    try:
        schedule = IterationSchedule(values["iterations"], values["prior_mode"])
        codes = CodesConfig(values["basic_code"], values["secondary_code"], values["repetition"],
                            values["interleaver_depth"])
        spec = RunSpec(points, frames=values["frames"], frame_message_bits=values["frame_message_bits"],
                       seed=values["seed"], mapping=values["mapping"], schedule=schedule, codes=codes,
                       decode=values["decode"], noiseless=values["noiseless"], workers=values["workers"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(spec, values["out"], values["log"], tuple(defaults), values)


def simulate_csv(spec: RunSpec, results) -> str:
    lines = ["cnr_db,lambda,iteration,ber_basic_raw,ber_basic_coded,ber_secondary_raw,"
             "ber_secondary_coded,bits,errors_basic_raw,ci_halfwidth_basic_raw"]
    for pt, stats in results:
        raw = stats.legacy_raw_basic
        n_iter = len(stats.coded_basic) if spec.decode else 1
        for k in range(n_iter):
            coded_b = stats.coded_basic[k].ber if spec.decode else math.nan
            coded_s = stats.coded_secondary[k].ber if spec.decode else math.nan
            lines.append(",".join([
                fmt_grid(pt.cnr_db), fmt_grid(pt.lam), str(k), fmt_num(raw.ber), fmt_num(coded_b),
                fmt_num(stats.raw_secondary.ber), fmt_num(coded_s), str(raw.bits), str(raw.errors),
                fmt_num(raw.ci_halfwidth)]))
    return "\n".join(lines) + "\n"


def _run_log(cfg: RunConfig, results, wall: float) -> str:
    buf = io.StringIO()
    for key, value in cfg.values.items():
        note = "  (default)" if key in cfg.defaults else ""
        if isinstance(value, list):
            value = ",".join(fmt_grid(v) for v in value)
        elif hasattr(value, "value"):
            value = value.value
        elif value is None and key == "repetition":
            value = "auto"
        buf.write(f"# {key} = {value}{note}\n")
    for pt, stats in results:
        leg = stats.legacy_coded_basic
        flag = "  LOW-CONFIDENCE" if stats.legacy_raw_basic.low_confidence else ""
        buf.write(f"# lambda={fmt_grid(pt.lam)} cnr_db={fmt_grid(pt.cnr_db)} frames={stats.frames} "
                  f"legacy_coded_ber={fmt_num(leg.ber)}{flag}\n")
    buf.write(f"# wall_clock_s = {wall:.3f}\n")
    return buf.getvalue()


# ---------------------------------------------------------------- argparse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hiermod", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def curves(sp):
        sp.add_argument("--lambda", dest="lambdas", type=float, action="append", metavar="LAM")
        sp.add_argument("--cnr", default="0:14:1", help="lo:hi:step in dB")
        sp.add_argument("--out", default="-")

    sp = sub.add_parser("penalty", help="MNR or BER penalty curves (CSV)")
    sp.add_argument("--kind", choices=["mnr", "ber"], default="mnr")
    curves(sp)
    curves(sub.add_parser("ber", help="analytic raw BER curves (CSV)"))

    sp = sub.add_parser("rate", help="secondary/basic rate trade-off table")
    sp.add_argument("--lambda", dest="lambdas", type=float, action="append", metavar="LAM")
    sp.add_argument("--basic-rate", type=float)
    sp.add_argument("--out", default="-")

    sp = sub.add_parser("simulate", help="Monte Carlo run from a config file (CSV)")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.add_argument("--log")
    sp.add_argument("--seed")
    sp.add_argument("--mapping", choices=sorted(MAPPING_NAMES))
    sp.add_argument("--iterations")
    sp.add_argument("--prior-mode", choices=sorted(PRIOR_NAMES))
    sp.add_argument("--workers")
    return p


def _simulate(args) -> None:
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    overrides = {"out": args.out, "log": args.log, "seed": args.seed, "mapping": args.mapping,
                 "iterations": args.iterations, "prior_mode": args.prior_mode, "workers": args.workers}
    cfg = parse_config(text, overrides)
    start = time.perf_counter()
    results = run(cfg.spec)
    wall = time.perf_counter() - start
    _write(simulate_csv(cfg.spec, results), cfg.out)
    log = _run_log(cfg, results, wall)
    if cfg.log == "-":
        sys.stderr.write(log)
    else:
        with open(cfg.log, "w") as fh:
            fh.write(log)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "penalty":
            _write(penalty_csv(args.kind, _lambdas(args.lambdas), parse_range(args.cnr)), args.out)
        elif args.command == "ber":
            _write(ber_csv(_lambdas(args.lambdas), parse_range(args.cnr)), args.out)
        elif args.command == "rate":
            lams = _lambdas(args.lambdas)
            if any(lam <= 0 for lam in lams):
                raise UsageError("rate needs lambda > 0")
            _write(rate_table(lams, args.basic_rate), args.out)
        else:
            _simulate(args)
    except UsageError as exc:
        print(f"hiermod: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - single-line diagnostic for any runtime failure
        print(f"hiermod: runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
