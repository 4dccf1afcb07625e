"""Experiment definitions behind the command line: parameter sweeps of
SOP/ESR, minimum-power tables and DMT curves, all written as CSV.

Rows are produced in grid order and every float is printed with 17
significant digits, so a fixed (config, seed) always gives the same bytes.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
from dataclasses import dataclass, field, fields, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from . import dmt as dmt_mod
from .model import ALL_SCHEMES, ChannelRealization, Scheme, SystemParams, order_users
from .numerics import parallel_map
from .outage import simulate_outage, sop_analytic
from .power import min_power
from .rates import esr_from, p_ct_ir_analytic

METHODS = ("mc", "analytic", "both")
MIN_MC_SAMPLES = 1000
SWEEP_COLUMNS = ["snr_db", "scheme", "method", "value", "std_error", "n", "error"]


class ConfigError(ValueError):
    """Bad configuration or command-line value."""


def parse_range(text: str) -> list[float]:
    """``START:STOP:STEP`` (STOP included when hit) or a comma list."""
    text = text.strip()
    if ":" in text:
        try:
            start, stop, step = (float(v) for v in text.split(":"))
        except ValueError:
            raise ConfigError(f"expected START:STOP:STEP, got {text!r}") from None
        if step <= 0:
            raise ConfigError("range step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(max(count, 0))]
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse number list {text!r}") from None
    if not values:
        raise ConfigError("empty number list")
    return values


def parse_schemes(text: str) -> list[Scheme]:
    if text.strip().lower() == "all":
        return list(ALL_SCHEMES)
    try:
        return [Scheme.parse(s.strip()) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def snr_to_power(snr_db: float, sigma2: float = 1.0) -> float:
    return sigma2 * 10.0 ** (snr_db / 10.0)


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams = field(default_factory=SystemParams)
    schemes: tuple = ALL_SCHEMES
    snr_grid_db: tuple = tuple(float(s) for s in range(0, 41, 2))
    method: str = "both"
    n_samples: int = 10 ** 6
    seed: int = 1
    out: Optional[str] = None

    def __post_init__(self):
        if not self.snr_grid_db:
            raise ConfigError("SNR grid is empty")
        if any(b <= a for a, b in zip(self.snr_grid_db, self.snr_grid_db[1:])):
            raise ConfigError("SNR grid must be strictly increasing")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {', '.join(METHODS)}")
        if self.method != "analytic" and self.n_samples < MIN_MC_SAMPLES:
            raise ConfigError(f"Monte Carlo needs at least {MIN_MC_SAMPLES} samples")
        if not self.schemes:
            raise ConfigError("no schemes selected")

    @property
    def methods(self) -> tuple:
        return ("mc", "analytic") if self.method == "both" else (self.method,)

    def powers(self) -> list[float]:
        return [snr_to_power(s) for s in self.snr_grid_db]

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_PARAM_NAMES = {f.name for f in fields(SystemParams)}


def params_with(params: SystemParams, assignments: Iterable[str]) -> SystemParams:
    """Apply ``name=value`` overrides to ``params``."""
    changes = {}
    for item in assignments:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in _PARAM_NAMES:
            raise ConfigError(f"bad parameter override {item!r}; names: {', '.join(sorted(_PARAM_NAMES))}")
        try:
            changes[name] = float(value)
        except ValueError:
            raise ConfigError(f"parameter {name} needs a number, got {value!r}") from None
    try:
        return params.with_(**changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: Optional[str] = None) -> ExperimentConfig:
    """Read an INI file with optional ``[system]`` and ``[experiment]`` sections.

    Missing keys keep their defaults, which reproduce the reference setup.
    """
    cfg = ExperimentConfig()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    parser.optionxform = str  # parameter names are case sensitive (R_A, lambda_A)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    unknown = set(parser.sections()) - {"system", "experiment"}
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")

    params = cfg.params
    if parser.has_section("system"):
        params = params_with(params, [f"{k}={v}" for k, v in parser.items("system")])
    kw = {"params": params}
    if parser.has_section("experiment"):
        sec = parser["experiment"]
        allowed = {"schemes", "snr_db", "method", "samples", "seed", "out"}
        extra = set(sec) - allowed
        if extra:
            raise ConfigError(f"unknown experiment keys: {', '.join(sorted(extra))}")
        if "schemes" in sec:
            kw["schemes"] = tuple(parse_schemes(sec["schemes"]))
        if "snr_db" in sec:
            kw["snr_grid_db"] = tuple(parse_range(sec["snr_db"]))
        if "method" in sec:
            kw["method"] = sec["method"].strip()
        try:
            if "samples" in sec:
                kw["n_samples"] = int(float(sec["samples"]))
            if "seed" in sec:
                kw["seed"] = int(sec["seed"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if "out" in sec:
            kw["out"] = sec["out"].strip()
    return replace(cfg, **kw)


# formatting ----------------------------------------------------------------

def _num(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.17g}"


def write_csv(header: Sequence[str], rows: Iterable[dict], out: Optional[str] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([row.get(h, "") if isinstance(row.get(h), str) else _num(row.get(h))
                    for h in header])
    text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# minimum power ---------------------------------------------------------------

MINPOWER_COLUMNS = ["scheme", "p_min", "P1", "P2", "P_h", "beta1", "regime", "user1"]


def cmd_minpower(config: ExperimentConfig, gains: Sequence[float]) -> list[dict]:
    """Minimum power of every configured scheme on one block ``(gA, gB, gz)``."""
    if len(gains) != 3:
        raise ConfigError("minpower needs three gains: gA gB gz")
    try:
        ch = ChannelRealization(*(float(g) for g in gains))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ord_ = order_users(config.params, ch)
    rows = []
    for s in config.schemes:
        res = min_power(ord_, s)
        row = {"scheme": s.value, "regime": res.regime, "user1": "A" if ord_.user1_is_A else "B"}
        if res.feasible:
            a = res.alloc
            row.update(p_min=res.p_min, P1=a.P1, P2=a.P2, P_h=a.P_h, beta1=a.beta1)
        rows.append(row)
    return rows


# sweeps ----------------------------------------------------------------------

def _analytic_task(task):
    params, kind, P = task
    try:
        if kind == "ct":
            return p_ct_ir_analytic(params, P), None
        return sop_analytic(params, kind, P), None
    except Exception as exc:  # reported per row, the sweep goes on
        return None, f"{type(exc).__name__}: {exc}"


def _analytic_tables(params: SystemParams, powers, schemes, need_ct: bool, workers=None):
    kinds = sorted({"cr" if s in (Scheme.CR, Scheme.IR) else s.value for s in schemes})
    if need_ct:
        kinds.append("ct")
    tasks = [(params, k, P) for P in powers for k in kinds]
    results = parallel_map(_analytic_task, tasks, workers)
    return {(t[1], t[2]): r for t, r in zip(tasks, results)}


def _esr_mc(p: float, c: float, n: int, scheme: Scheme, rate_sum: float) -> tuple[float, float]:
    # outage and activation are disjoint events of one multinomial draw
    value = esr_from(p, c, rate_sum)
    dp = -rate_sum / (1.0 + c)
    dc = -(1.0 - p) * rate_sum / (1.0 + c) ** 2
    if scheme is not Scheme.IR:
        return value, abs(dp) * math.sqrt(p * (1.0 - p) / n)
    var = (dp * dp * p * (1.0 - p) + dc * dc * c * (1.0 - c) - 2.0 * dp * dc * p * c) / n
    return value, math.sqrt(max(var, 0.0))


def cmd_sweep(config: ExperimentConfig, metric: str = "sop", variant: Optional[str] = None,
              workers: Optional[int] = None) -> list[dict]:
    """One row per (SNR, scheme, method) in grid order."""
    if metric not in ("sop", "esr"):
        raise ConfigError(f"metric must be sop or esr, got {metric!r}")
    params = config.params
    powers = config.powers()
    rate_sum = params.R_A + params.R_B
    mc = None
    if "mc" in config.methods:
        mc = simulate_outage(params, powers, config.n_samples, config.seed, workers)
    tables = None
    if "analytic" in config.methods:
        need_ct = metric == "esr" and Scheme.IR in config.schemes
        tables = _analytic_tables(params, powers, config.schemes, need_ct, workers)

    rows = []
    for j, (snr, P) in enumerate(zip(config.snr_grid_db, powers)):
        for s in config.schemes:
            for method in config.methods:
                row = {"snr_db": snr, "scheme": s.value, "method": method}
                if variant is not None:
                    row["variant"] = variant
                if method == "mc":
                    est = mc.sop(s, j)
                    row["n"] = config.n_samples
                    if metric == "sop":
                        row.update(value=est.value, std_error=est.std_error)
                    else:
                        c = {Scheme.CR: 1.0, Scheme.IR: mc.p_ct(j).value}.get(s, 0.0)
                        v, se = _esr_mc(est.value, c, config.n_samples, s, rate_sum)
                        row.update(value=v, std_error=se)
                else:
                    key = "cr" if s in (Scheme.CR, Scheme.IR) else s.value
                    est, err = tables[(key, P)]
                    row["n"] = 0
                    if err is None and metric == "esr":
                        c = 0.0
                        if s is Scheme.CR:
                            c = 1.0
                        elif s is Scheme.IR:
                            ct, err = tables[("ct", P)]
                            c = ct.value if ct is not None else math.nan
                        if err is None:
                            row.update(value=esr_from(est.value, c, rate_sum), std_error=0.0)
                    elif err is None:
                        row.update(value=est.value, std_error=0.0)
                    if err is not None:
                        row["error"] = err
                rows.append(row)
    return rows


# DMT -------------------------------------------------------------------------

DMT_COLUMNS = ["r_A", "r_B", "scheme", "d_theory", "slope", "fit_residual", "points_used"]


def cmd_dmt(config: ExperimentConfig, r_points: Sequence[float], r_B: float = 0.0,
            empirical: bool = False, snr_grid_db: Sequence[float] = (30, 35, 40, 45, 50)) -> list[dict]:
    """Theoretical diversity gain per scheme along r_A, optional fitted slopes."""
    rows = []
    for r_A in r_points:
        for s in config.schemes:
            row = {"r_A": r_A, "r_B": r_B, "scheme": s.value,
                   "d_theory": dmt_mod.dmt_theoretical(s, r_A, r_B)}
            if empirical and row["d_theory"] > 0:
                fit = dmt_mod.dmt_empirical(config.params, s, r_A, r_B, snr_grid_db,
                                            config.n_samples, config.seed)
                row.update(slope=fit.slope, fit_residual=fit.residual, points_used=fit.n_used)
            rows.append(row)
    return rows


# figures ---------------------------------------------------------------------

FIGURES = {
    2: ("sop", None),
    3: ("esr", ("eta", (0.5, 1.0))),
    4: ("sop", ("lambda_g", (0.1, 0.5, 1.0))),
    5: ("esr", ("lambda_g", (0.1, 0.5, 1.0))),
}


def cmd_figure(number: int, config: ExperimentConfig, workers: Optional[int] = None):
    """Rows and column header for one of the reference figures."""
    if number == 6:
        return DMT_COLUMNS, cmd_dmt(config, parse_range("0:1:0.05"))
    if number not in FIGURES:
        raise ConfigError(f"unknown figure {number}; choose 2-6")
    metric, sweep = FIGURES[number]
    if sweep is None:
        return SWEEP_COLUMNS, cmd_sweep(config, metric, workers=workers)
    name, values = sweep
    rows = []
    for v in values:
        cfg = replace(config, params=config.params.with_(**{name: v}))
        rows += cmd_sweep(cfg, metric, variant=f"{name}={v:g}", workers=workers)
    return ["variant"] + SWEEP_COLUMNS, rows
