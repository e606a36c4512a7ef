"""Command-line interface.

Exit codes: 0 success, 1 invalid input or usage, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import yaml

from . import analysis, experiments
from .chansim import ScenarioConfig, sample_channels, trial_rng
from .errors import InvalidInputError, NumericalError
from .solver import DEFAULT_MAX_SWEEPS, build_workspace, solve_pipeline
from .units import watts_to_dbm

logger = logging.getLogger("irs_discrete")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2

# flag destination -> ScenarioConfig field
_FLAG_FIELDS = {
    "n": "N", "m": "M", "bits": "b", "gamma_db": "gamma_db", "noise_dbm": "sigma2_dbm",
    "d": "d", "d0": "d0", "dv": "dv", "seed": "seed", "trials": "trials",
    "suppress_direct_link": "suppress_direct_link",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def parse_bits(text) -> Optional[int]:
    """``"cont"``/``None`` -> continuous, otherwise a positive integer."""
    if text is None or str(text).strip().lower() in ("cont", "continuous", "inf", "none"):
        return None
    try:
        b = int(text)
    except (TypeError, ValueError):
        raise InvalidInputError(f"bits must be a positive integer or 'cont', got {text!r}")
    if b < 1:
        raise InvalidInputError(f"bits must be >= 1, got {b}")
    return b


def _bits_arg(text):
    try:
        return parse_bits(text)
    except InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _float_list(text) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _u64(text) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def load_config_file(path) -> dict:
    """Flat mapping of ScenarioConfig field names (YAML or JSON)."""
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise InvalidInputError(f"{path}: expected a flat key-value mapping")
    known = set(ScenarioConfig.__dataclass_fields__)
    unknown = sorted(set(data) - known)
    if unknown:
        raise InvalidInputError(f"{path}: unknown keys {unknown}")
    for key, value in data.items():
        if isinstance(value, (dict, list)):
            raise InvalidInputError(f"{path}: key {key!r} must be a scalar")
    if "b" in data:
        data["b"] = parse_bits(data["b"])
    return data


def resolve_config(args) -> ScenarioConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    # scenario flags default to SUPPRESS, so only explicitly given ones are present
    for dest, name in _FLAG_FIELDS.items():
        if hasattr(args, dest):
            values[name] = getattr(args, dest)
    try:
        return ScenarioConfig(**values)
    except TypeError as exc:
        raise InvalidInputError(str(exc))


def _scenario_flags(p: argparse.ArgumentParser, bits: bool = True):
    g = p.add_argument_group("scenario", argument_default=argparse.SUPPRESS)
    g.add_argument("--config", metavar="PATH", help="YAML/JSON file of ScenarioConfig fields")
    g.add_argument("--seed", type=_u64)
    g.add_argument("--trials", type=int)
    g.add_argument("--n", type=int, help="IRS elements")
    g.add_argument("--m", type=int, help="AP antennas")
    if bits:
        g.add_argument("--bits", type=_bits_arg, help="phase bits, or 'cont'")
    g.add_argument("--gamma-db", type=float, dest="gamma_db")
    g.add_argument("--noise-dbm", type=float, dest="noise_dbm")
    g.add_argument("--d", type=float, help="AP-user horizontal distance (m)")
    g.add_argument("--d0", type=float, help="AP-IRS distance (m)")
    g.add_argument("--dv", type=float, help="vertical offset of the user line (m)")
    g.add_argument("--suppress-direct-link", action="store_true")
    g.add_argument("--max-sweeps", type=int, default=DEFAULT_MAX_SWEEPS)


def _output_flags(p: argparse.ArgumentParser):
    p.add_argument("--out", metavar="DIR", default="results")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="irs-discrete",
                     description="Transmit power minimization with a discrete-phase IRS")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one channel realization")
    _scenario_flags(p)
    p.add_argument("--trial", type=int, default=0, help="trial index of the channel draw")
    p.add_argument("--out", metavar="DIR", default=None)

    p = sub.add_parser("sweep-distance", help="power versus AP-user distance")
    _scenario_flags(p)
    p.add_argument("--d-values", type=_float_list,
                   default=list(experiments.DEFAULT_D_VALUES))
    p.add_argument("--schemes", type=lambda s: [x.strip() for x in s.split(",") if x.strip()],
                   default=list(experiments.SCHEMES))
    _output_flags(p)

    p = sub.add_parser("sweep-elements", help="power versus number of IRS elements")
    _scenario_flags(p, bits=False)
    p.add_argument("--n-values", type=_int_list, default=list(experiments.DEFAULT_N_VALUES))
    p.add_argument("--b-values", type=_int_list, default=list(experiments.DEFAULT_B_VALUES))
    _output_flags(p)

    p = sub.add_parser("eta-table", help="asymptotic quantization loss per bit resolution")
    p.add_argument("--bits", type=int, default=3, help="largest resolution listed")
    p.add_argument("--out", metavar="DIR", default=None)

    p = sub.add_parser("verify-scaling",
                       help="Monte Carlo check of the received-power law and its N^2 slope")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--bits-list", type=lambda s: [parse_bits(x) for x in s.split(",")],
                   default=[1, 2, None], help="e.g. '1,2,cont'")
    p.add_argument("--n-values", type=_int_list, default=[64, 128, 256, 512, 1024])
    p.add_argument("--slope-trials", type=int, default=1000)
    p.add_argument("--out", metavar="DIR", default=None)
    return parser


def _write(out_dir: Optional[str], name: str, text: str):
    if out_dir is None:
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    (path / name).write_text(text, encoding="utf-8")
    logger.info("wrote %s", path / name)


def _log_config(cfg: ScenarioConfig, **extra):
    logger.info("resolved config: %s", json.dumps({**cfg.to_dict(), **extra}, sort_keys=True))


def cmd_solve(args) -> int:
    cfg = resolve_config(args)
    _log_config(cfg, trial=args.trial, max_sweeps=args.max_sweeps)
    ch = sample_channels(cfg, trial_rng(cfg.seed, args.trial))
    ws = build_workspace(ch)
    res = solve_pipeline(ws, cfg.b, cfg.budget(), args.max_sweeps).final
    hd_gain = float(np.vdot(ch.h_d, ch.h_d).real)
    doc = {
        "config": cfg.to_dict(),
        "trial": args.trial,
        "channel_digest": ch.digest(),
        "power_watts": res.power_watts,
        "power_dbm": float(watts_to_dbm(res.power_watts)),
        "objective": res.objective,
        "iterations": res.iterations,
        "converged": bool(res.converged),
        "theta": res.theta.values.tolist(),
        "no_irs_power_watts": cfg.gamma * cfg.sigma2 / hd_gain if hd_gain > 0 else None,
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    _write(args.out, "solve.json", text)
    return EXIT_OK


def _print_points(results):
    print(f"{'scheme':<18}{'d_m':>8}{'N':>6}{'mean_dBm':>12}{'trials':>8}")
    for r in results:
        print(f"{r.scheme:<18}{r.d_m:>8.2f}{r.N:>6d}{r.mean_dbm:>12.4f}{r.trials:>8d}")


def cmd_sweep_distance(args) -> int:
    cfg = resolve_config(args)
    _log_config(cfg, d_values=args.d_values, schemes=args.schemes, workers=args.workers)
    results = experiments.sweep_distance(cfg, args.d_values, args.schemes,
                                         workers=args.workers, max_sweeps=args.max_sweeps)
    doc = experiments.summary(
        results, cfg, "distance",
        {"d_values": args.d_values, "schemes": args.schemes, "max_sweeps": args.max_sweeps},
        assumed=["N", "trials", "d_values"],
    )
    _write(args.out, "sweep_distance.csv", experiments.csv_text(results))
    _write(args.out, "sweep_distance.json", experiments.summary_json(doc))
    _print_points(results)
    return EXIT_OK


def cmd_sweep_elements(args) -> int:
    cfg = resolve_config(args)
    _log_config(cfg, n_values=args.n_values, b_values=args.b_values, workers=args.workers)
    results = experiments.sweep_elements(cfg, args.n_values, args.b_values,
                                         workers=args.workers, max_sweeps=args.max_sweeps)
    doc = experiments.summary(
        results, cfg if not cfg.suppress_direct_link else cfg.replace(M=1), "elements",
        {"N_values": args.n_values, "b_values": args.b_values, "max_sweeps": args.max_sweeps},
        assumed=["N_values", "trials"],
    )
    _write(args.out, "sweep_elements.csv", experiments.csv_text(results))
    _write(args.out, "sweep_elements.json", experiments.summary_json(doc))
    _print_points(results)
    for (d, n, scheme), gap in experiments.gaps_db(results).items():
        print(f"gap N={n} {scheme}: {gap:.4f} dB")
    return EXIT_OK


def cmd_eta_table(args) -> int:
    rows = experiments.eta_table(args.bits)
    lines = ["b,eta,eta_db"]
    for r in rows:
        lines.append(f"{'cont' if r.b is None else r.b},{r.eta:.6f},{r.eta_db:.6f}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    _write(args.out, "eta_table.csv", text)
    return EXIT_OK


def cmd_verify_scaling(args) -> int:
    logger.info("resolved config: %s", json.dumps(
        {k: v for k, v in vars(args).items() if k != "func"}, sort_keys=True))
    doc = {"N": args.n, "trials": args.trials, "seed": args.seed, "checks": []}
    for b in args.bits_list:
        p = analysis.ScalingLawParams(b, args.n)
        est = analysis.pr_monte_carlo(p, args.trials, args.seed)
        ref = analysis.pr_closed_form(p)
        z = (est.mean - ref) / est.se
        label = "cont" if b is None else f"{b}bit"
        print(f"P_r {label:>5}: monte-carlo {est.mean:.4f} +/- {est.se:.4f}, "
              f"closed form {ref:.4f}, z = {z:+.2f}")
        doc["checks"].append({"b": b, "mc_mean": est.mean, "mc_se": est.se,
                              "closed_form": ref, "z": z})
    doc["slopes"] = []
    for b in args.bits_list:
        slope = analysis.power_gain_slope(b, args.n_values, args.slope_trials, args.seed)
        label = "cont" if b is None else f"{b}bit"
        print(f"log-log slope {label:>5}: {slope:.4f}")
        doc["slopes"].append({"b": b, "N_values": args.n_values, "slope": slope})
    _write(args.out, "verify_scaling.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "sweep-distance": cmd_sweep_distance,
    "sweep-elements": cmd_sweep_elements,
    "eta-table": cmd_eta_table,
    "verify-scaling": cmd_verify_scaling,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING if args.quiet else (logging.DEBUG if args.verbose else logging.INFO)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    logger.setLevel(level)
    try:
        return _COMMANDS[args.command](args)
    except (InvalidInputError, OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
