"""Benchmark sweeps over user distance and IRS size.

Every scheme at a given (sweep point, trial) is evaluated on the same
channel draw, and each draw depends only on ``(seed, trial)``. Results are
therefore reproducible regardless of worker count or completion order.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import analysis
from .chansim import ScenarioConfig, sample_channels, trial_rng
from .errors import InvalidInputError
from .solver import (
    DEFAULT_MAX_SWEEPS,
    MAX_EXHAUSTIVE_BITS,
    PhaseShiftVector,
    SolveResult,
    ao_discrete,
    build_workspace,
    continuous_phase_solution,
    evaluate_phases,
    exhaustive_search,
    quantize_phases,
)
from .units import watts_to_dbm

logger = logging.getLogger(__name__)

SCHEMES = ("continuous-ao", "exhaustive-1bit", "ao-bbit", "init-bbit", "no-irs")

CSV_COLUMNS = ("scheme", "d_m", "N", "M", "b", "trial", "power_watts", "power_dbm",
               "objective", "iterations", "converged", "seed")

DEFAULT_D_VALUES = tuple(float(d) for d in range(10, 51, 5))
DEFAULT_N_VALUES = tuple(range(20, 301, 20))
DEFAULT_B_VALUES = (1, 2)


def scheme_label(scheme: str, b: Optional[int]) -> str:
    """Concrete label written to outputs, e.g. ``ao-bbit`` -> ``ao-2bit``."""
    if scheme in ("exhaustive-1bit", "ao-bbit", "init-bbit"):
        return scheme.rsplit("-", 1)[0] + f"-{b}bit"
    return scheme


class TrialRecord(NamedTuple):
    scheme: str
    d_m: float
    N: int
    M: int
    b: Optional[int]
    trial: int
    power_watts: float
    objective: float
    iterations: int
    converged: bool
    seed: int
    channel_digest: str

    @property
    def power_dbm(self) -> float:
        return float(watts_to_dbm(self.power_watts))


@dataclass
class SweepResult:
    """All trials of one scheme at one sweep point."""

    scheme: str
    d_m: float
    N: int
    M: int
    b: Optional[int]
    seed: int
    records: List[TrialRecord] = field(default_factory=list)

    @property
    def powers(self) -> np.ndarray:
        return np.array([r.power_watts for r in self.records])

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def mean_watts(self) -> float:
        return float(self.powers.mean())

    @property
    def se_watts(self) -> Optional[float]:
        p = self.powers
        return float(p.std(ddof=1) / np.sqrt(p.size)) if p.size > 1 else None

    @property
    def mean_dbm(self) -> float:
        # averaged in watts, converted afterwards
        return float(watts_to_dbm(self.mean_watts))

    def summary(self) -> dict:
        return {
            "scheme": self.scheme, "d_m": self.d_m, "N": self.N, "M": self.M,
            "b": self.b, "trials": self.trials, "mean_watts": self.mean_watts,
            "se_watts": self.se_watts, "mean_dbm": self.mean_dbm,
        }


def _record(label, cfg, b, trial, res: SolveResult, digest) -> TrialRecord:
    return TrialRecord(label, float(cfg.d), cfg.N, cfg.M, b, trial, res.power_watts,
                       res.objective, res.iterations, bool(res.converged), cfg.seed, digest)


def _no_irs_record(cfg, trial, ch, digest) -> TrialRecord:
    gain = float(np.vdot(ch.h_d, ch.h_d).real)
    power = cfg.gamma * cfg.sigma2 / gain
    return TrialRecord("no-irs", float(cfg.d), cfg.N, cfg.M, None, trial, power, gain, 0,
                       True, cfg.seed, digest)


def _distance_trial(args) -> List[TrialRecord]:
    cfg, trial, schemes, max_sweeps = args
    ch = sample_channels(cfg, trial_rng(cfg.seed, trial))
    digest = ch.digest()
    ws = build_workspace(ch)
    budget = cfg.budget()
    b = cfg.b
    out = {}
    if {"continuous-ao", "ao-bbit", "init-bbit"} & set(schemes):
        cont = continuous_phase_solution(ws, PhaseShiftVector.zeros(ws.N), budget, max_sweeps)
        out["continuous-ao"] = _record("continuous-ao", cfg, None, trial, cont, digest)
        if {"ao-bbit", "init-bbit"} & set(schemes):
            theta0 = quantize_phases(cont.theta, b)
            init = evaluate_phases(ws, theta0, budget)
            ao = ao_discrete(ws, theta0, budget, max_sweeps)
            out["init-bbit"] = _record(scheme_label("init-bbit", b), cfg, b, trial, init, digest)
            out["ao-bbit"] = _record(scheme_label("ao-bbit", b), cfg, b, trial, ao, digest)
    if "exhaustive-1bit" in schemes and b * cfg.N <= MAX_EXHAUSTIVE_BITS:
        ex = exhaustive_search(ws, b, budget)
        out["exhaustive-1bit"] = _record(scheme_label("exhaustive-1bit", b), cfg, b, trial,
                                         ex, digest)
    if "no-irs" in schemes:
        out["no-irs"] = _no_irs_record(cfg, trial, ch, digest)
    return [out[s] for s in schemes if s in out]


def _map(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves job order, so merging is independent of completion order
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def _group(records: Iterable[TrialRecord], cfg: ScenarioConfig) -> List[SweepResult]:
    groups: Dict[Tuple, SweepResult] = {}
    for r in records:
        key = (r.d_m, r.N, r.scheme)
        if key not in groups:
            groups[key] = SweepResult(r.scheme, r.d_m, r.N, r.M, r.b, cfg.seed)
        groups[key].records.append(r)
    return list(groups.values())


def sweep_distance(cfg: ScenarioConfig, d_values: Sequence[float] = DEFAULT_D_VALUES,
                   schemes: Sequence[str] = SCHEMES, workers: int = 1,
                   max_sweeps: int = DEFAULT_MAX_SWEEPS) -> List[SweepResult]:
    """Required transmit power of each scheme versus AP-user distance."""
    schemes = tuple(schemes)
    unknown = [s for s in schemes if s not in SCHEMES]
    if unknown:
        raise InvalidInputError(f"unknown scheme(s) {unknown}; choose from {SCHEMES}")
    for d in d_values:
        if not 0 < d <= cfg.d0:
            raise InvalidInputError(f"distance {d} outside (0, d0={cfg.d0}]")
    if cfg.b is None and set(schemes) & {"exhaustive-1bit", "ao-bbit", "init-bbit"}:
        raise InvalidInputError("discrete schemes need an integer bit resolution")
    if cfg.suppress_direct_link and "no-irs" in schemes:
        raise InvalidInputError("no-irs scheme is infeasible without a direct link")
    if "exhaustive-1bit" in schemes and cfg.b * cfg.N > MAX_EXHAUSTIVE_BITS:
        warnings.warn(
            f"skipping exhaustive search: b*N = {cfg.b * cfg.N} > {MAX_EXHAUSTIVE_BITS}",
            RuntimeWarning, stacklevel=2,
        )
        schemes = tuple(s for s in schemes if s != "exhaustive-1bit")
    jobs = [(cfg.replace(d=float(d)), t, schemes, max_sweeps)
            for d in d_values for t in range(cfg.trials)]
    logger.info("sweep_distance: %d points x %d trials", len(d_values), cfg.trials)
    rows = _map(_distance_trial, jobs, workers)
    return _group((r for trial_rows in rows for r in trial_rows), cfg)


def _elements_trial(args) -> List[TrialRecord]:
    cfg, trial, b_values, max_sweeps = args
    ch = sample_channels(cfg, trial_rng(cfg.seed, trial))
    digest = ch.digest()
    ws = build_workspace(ch)
    budget = cfg.budget()
    cont = continuous_phase_solution(ws, PhaseShiftVector.zeros(ws.N), budget, max_sweeps)
    rows = [_record("continuous-ao", cfg, None, trial, cont, digest)]
    for b in b_values:
        theta0 = quantize_phases(cont.theta, b)
        init = evaluate_phases(ws, theta0, budget)
        ao = ao_discrete(ws, theta0, budget, max_sweeps)
        rows.append(_record(f"ao-{b}bit", cfg, b, trial, ao, digest))
        rows.append(_record(f"init-{b}bit", cfg, b, trial, init, digest))
    return rows


def sweep_elements(cfg: ScenarioConfig, N_values: Sequence[int] = DEFAULT_N_VALUES,
                   b_values: Sequence[int] = DEFAULT_B_VALUES, workers: int = 1,
                   max_sweeps: int = DEFAULT_MAX_SWEEPS) -> List[SweepResult]:
    """Required transmit power versus IRS size for several resolutions.

    With ``cfg.suppress_direct_link`` the AP is reduced to one antenna and the
    direct link is zeroed, the setting in which the large-N gap to the
    continuous benchmark tends to ``-eta_db(b)``.
    """
    Ns = [int(n) for n in N_values]
    if not Ns or any(n < 1 for n in Ns) or any(b >= a for a, b in zip(Ns[1:], Ns)):
        raise InvalidInputError("N_values must be positive and strictly ascending")
    for b in b_values:
        if int(b) != b or b < 1:
            raise InvalidInputError(f"invalid bit resolution {b}")
    if cfg.suppress_direct_link:
        cfg = cfg.replace(M=1)
    jobs = [(cfg.replace(N=n), t, tuple(int(b) for b in b_values), max_sweeps)
            for n in Ns for t in range(cfg.trials)]
    logger.info("sweep_elements: %d sizes x %d trials", len(Ns), cfg.trials)
    rows = _map(_elements_trial, jobs, workers)
    return _group((r for trial_rows in rows for r in trial_rows), cfg)


def gaps_db(results: Sequence[SweepResult]) -> Dict[Tuple[float, int, str], float]:
    """Mean-power gap (dB) of every scheme to ``continuous-ao`` at the same point."""
    ref = {(r.d_m, r.N): r.mean_watts for r in results if r.scheme == "continuous-ao"}
    gaps = {}
    for r in results:
        key = (r.d_m, r.N)
        if r.scheme != "continuous-ao" and key in ref:
            gaps[(r.d_m, r.N, r.scheme)] = float(10 * np.log10(r.mean_watts / ref[key]))
    return gaps


class EtaRow(NamedTuple):
    b: Optional[int]
    eta: float
    eta_db: float


def eta_table(b_max: int) -> List[EtaRow]:
    """Rows for ``b = 1..b_max`` followed by the continuous row (``b=None``)."""
    if int(b_max) != b_max or b_max < 1:
        raise InvalidInputError("b_max must be a positive integer")
    bs: List[Optional[int]] = list(range(1, int(b_max) + 1)) + [None]
    return [EtaRow(b, analysis.eta(b), analysis.eta_db(b)) for b in bs]


def _fmt(x) -> str:
    if x is None:
        return "cont"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(results: Sequence[SweepResult], fh) -> None:
    """Write one row per (scheme, point, trial) in the fixed column order."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for res in results:
        for r in res.records:
            writer.writerow([_fmt(v) for v in (
                r.scheme, r.d_m, r.N, r.M, r.b, r.trial, r.power_watts, r.power_dbm,
                r.objective, r.iterations, r.converged, r.seed)])


def csv_text(results: Sequence[SweepResult]) -> str:
    buf = io.StringIO()
    write_csv(results, buf)
    return buf.getvalue()


def summary(results: Sequence[SweepResult], cfg: ScenarioConfig, sweep: str,
            grid: dict, assumed: Sequence[str]) -> dict:
    """Machine-readable summary: resolved config, per-point statistics, gaps."""
    return {
        "sweep": sweep,
        "config": cfg.to_dict(),
        "grid": grid,
        "assumed_defaults": list(assumed),
        "points": [r.summary() for r in results],
        "gaps_db": [
            {"d_m": d, "N": n, "scheme": s, "gap_db": g}
            for (d, n, s), g in gaps_db(results).items()
        ],
    }


def summary_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
