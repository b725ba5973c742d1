"""Command-line front end.

CSV goes to standard output, the run report and any diagnostics to standard
error. Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass

from . import estimation, opo, shg, squeeze
from .config import ConfigError, parse_config
from .model import AboveThresholdError, ModelError, NumericalFailure

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

HEADERS = {
    "shg-curve": ("p_in_w", "eta", "p_shg_w", "p_circ_w", "p_abs_w"),
    "gain-curve": ("p_pump_w", "gain", "x", "threshold_w"),
    "squeeze-sweep": ("p_pump_w", "r_minus_db", "r_plus_db", "x", "omega", "eta_total"),
    "spectrum": ("f_hz", "r_minus_db", "r_plus_db", "omega"),
    "opo-threshold": ("quantity", "value"),
    "budget": ("quantity", "value"),
    "fit": ("parameter", "value"),
}


@dataclass(frozen=True)
class RunReport:
    command: str
    config_digest: str
    rows: int
    wall_time: float

    def __str__(self):
        return (f"command={self.command} config=sha256:{self.config_digest[:16]} "
                f"rows={self.rows} wall_time_s={self.wall_time:.3f}")


def fmt(value):
    """Deterministic CSV cell: shortest round-trip repr for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _shg_curve(cfg, args):
    for pt in shg.shg_sweep(cfg.shg, args.p_min, args.p_max, args.steps):
        yield (pt.input_power, pt.efficiency, pt.shg_power, pt.circulating_power,
               pt.absorbed_uv_power)


def _opo_threshold(cfg, args):
    p = cfg.opo
    yield ("threshold_w", opo.opo_threshold(p))
    yield ("escape_efficiency", opo.escape_efficiency(p.t2, p.l2_base))
    rates = opo.cavity_rates(p.t2, p.l2_base, p.cavity_length, cfg.analysis_frequency)
    yield ("decay_rate_per_s", rates.decay_rate)
    yield ("omega", rates.detuning)
    if args.pump is not None:
        yield ("induced_loss", opo.induced_loss(p, args.pump))
        yield ("effective_threshold_w", opo.effective_threshold(p, args.pump))


def _gain_curve(cfg, args):
    rows = opo.gain_sweep(cfg.opo, args.p_min, args.p_max, args.steps,
                          corrected=args.mode == "corrected")
    for gp in rows:
        yield (gp.pump_power, gp.gain, gp.pump_parameter, gp.threshold_used)


def _frequency(cfg, args):
    return cfg.analysis_frequency if args.frequency is None else args.frequency


def _squeeze_sweep(cfg, args):
    rows = squeeze.squeeze_power_sweep(cfg.opo, cfg.detection, args.p_min, args.p_max,
                                       args.steps, _frequency(cfg, args), args.mode)
    for p, q in rows:
        yield (p, q.r_minus_db, q.r_plus_db, q.pump_parameter, q.detuning,
               q.total_efficiency)


def _spectrum(cfg, args):
    rows = squeeze.frequency_spectrum(cfg.opo, cfg.detection, args.pump, args.f_min,
                                      args.f_max, args.steps, args.log, args.mode)
    for f, q in rows:
        yield (f, q.r_minus_db, q.r_plus_db, q.detuning)


def _budget(cfg, args):
    p = cfg.opo
    f = _frequency(cfg, args)
    if args.gain is not None:
        q = squeeze.predict_from_measured_gain(p, cfg.detection, args.gain, args.pump, f)
        l2 = opo.induced_loss(p, args.pump)
    else:
        q = squeeze.squeeze_at(p, cfg.detection, args.pump, f, args.mode)
        l2 = p.l2_base if args.mode == "ideal" else opo.induced_loss(p, args.pump)
    budget = squeeze.total_detection_efficiency(cfg.detection,
                                                opo.escape_efficiency(p.t2, l2))
    yield ("photodiode", budget.photodiode)
    yield ("visibility_squared", budget.visibility_squared)
    yield ("propagation", budget.propagation)
    yield ("escape", budget.escape)
    yield ("eta_total", budget.total)
    yield ("intracavity_loss", l2)
    yield ("x", q.pump_parameter)
    yield ("omega", q.detuning)
    yield ("r_minus_db", q.r_minus_db)
    yield ("r_plus_db", q.r_plus_db)


def read_data(path):
    """Two-column CSV with a header row."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read data ({exc.strerror or exc})"]) from exc
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise ConfigError([f"{path}: empty data file (header row required)"])
    parsed = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ConfigError([f"{path}:{lineno}: expected 2 columns, got {len(row)}"])
        try:
            parsed.append((float(row[0]), float(row[1])))
        except ValueError as exc:
            raise ConfigError([f"{path}:{lineno}: {exc}"]) from exc
    return estimation.DataSeries(tuple(parsed))


def _fit(cfg, args):
    data = read_data(args.data)
    if args.kind == "loss":
        result = estimation.fit_loss_law(data)
    elif args.kind == "gain":
        result = estimation.fit_threshold(data)
    else:
        result = estimation.fit_shg_params(data, cfg.shg.t1, cfg.shg.gamma_abs_ratio)
    for name, value in result.parameters.items():
        yield (name, value)
    yield ("residual_norm", result.residual_norm)
    yield ("converged", result.converged)


COMMANDS = {
    "shg-curve": _shg_curve,
    "opo-threshold": _opo_threshold,
    "gain-curve": _gain_curve,
    "squeeze-sweep": _squeeze_sweep,
    "spectrum": _spectrum,
    "budget": _budget,
    "fit": _fit,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="opo-squeeze",
        description="SHG, OPO gain and squeezing models; CSV on stdout.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True,
                        help="JSON config path, or 'paper-defaults'")
    sub = parser.add_subparsers(dest="command", required=True)

    def grid(p, p_max, steps):
        p.add_argument("--p-min", type=float, default=0.0, help="W")
        p.add_argument("--p-max", type=float, default=p_max, help="W")
        p.add_argument("--steps", type=int, default=steps)

    def mode(p):
        p.add_argument("--mode", choices=squeeze.MODES, default="ideal")

    p = sub.add_parser("shg-curve", parents=[common], help="doubling efficiency sweep")
    grid(p, 0.24, 241)

    p = sub.add_parser("opo-threshold", parents=[common], help="threshold and rates")
    p.add_argument("--pump", type=float, help="W; adds induced-loss quantities")

    p = sub.add_parser("gain-curve", parents=[common], help="parametric gain sweep")
    grid(p, 0.15, 151)
    mode(p)

    p = sub.add_parser("squeeze-sweep", parents=[common], help="squeezing vs pump")
    grid(p, 0.15, 151)
    mode(p)
    p.add_argument("--frequency", type=float, help="Hz; defaults to the config value")

    p = sub.add_parser("spectrum", parents=[common], help="squeezing vs frequency")
    p.add_argument("--pump", type=float, default=0.042, help="W")
    p.add_argument("--f-min", type=float, default=2e5, help="Hz")
    p.add_argument("--f-max", type=float, default=1e7, help="Hz")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--log", action="store_true", help="geometric frequency grid")
    mode(p)

    p = sub.add_parser("budget", parents=[common],
                       help="efficiency budget and single-point prediction")
    p.add_argument("--pump", type=float, required=True, help="W")
    p.add_argument("--gain", type=float, help="measured parametric gain")
    p.add_argument("--frequency", type=float, help="Hz; defaults to the config value")
    mode(p)

    p = sub.add_parser("fit", parents=[common], help="parameter estimation")
    p.add_argument("kind", choices=("loss", "gain", "shg"))
    p.add_argument("--data", required=True, help="two-column CSV with header")
    return parser


def run(argv=None, stdout=None, stderr=None):
    """Execute one invocation and return its exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT

    start = time.perf_counter()
    try:
        cfg = parse_config(args.config)
        # materialise before writing so a failure emits no partial CSV
        rows = list(COMMANDS[args.command](cfg, args))
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=stderr)
        return EXIT_INPUT
    except (NumericalFailure, AboveThresholdError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except ModelError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT

    writer = csv.writer(stdout, lineterminator="\n")
    writer.writerow(HEADERS[args.command])
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    report = RunReport(args.command, cfg.digest(), len(rows),
                       time.perf_counter() - start)
    print(report, file=stderr)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
