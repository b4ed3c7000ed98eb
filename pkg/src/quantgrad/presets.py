"""Named experiment configurations and their runners.

Every preset is a plain dataclass whose ``to_dict`` output is enough to
rerun it.  Runners return ``{filename: text}`` maps; writing is left to
the CLI so the runners stay pure and easy to test.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from typing import Any

import numpy as np

from .errors import ObjectiveError
from .fixedpoint import FixedPointFormat, GradientScale, decode_gradient
from .gradest import _round, estimate_gradient
from .oracle import OracleConfig, get_objective
from .optimizer import DescentConfig, descend
from .vqe import default_fqve_config, energy_csv, fqve, u_to_theta, vqe_baseline

KINDS = ("gradient", "descent", "fqve", "vqe-baseline", "sweep")


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    kind: str
    objective: str = ""
    start: tuple[float, ...] = ()
    n_bits: int = 4
    frac_bits: int = 2
    signed: bool = True
    m: float | tuple[float, ...] | None = None
    l: float = 0.01
    readout: str = "twos"
    centered: bool = True
    shots: int = 1000
    seed: int = 0
    exact: bool = False
    learning_rate: float = 0.0
    mode: str = "grid"
    max_iters: int = 100
    grad_norm_tol: float | None = None
    periodic: bool = False
    sweep_kind: str = ""
    grid: tuple[float, ...] = ()
    description: str = ""

    def fmt(self) -> FixedPointFormat:
        return FixedPointFormat(self.n_bits, self.frac_bits, self.signed)

    def oracle_cfg(self, d: int) -> OracleConfig:
        fmt = self.fmt()
        scale = GradientScale.default(fmt, m=self.m, l=self.l, readout=self.readout)
        return OracleConfig.build(d, fmt, scale, centered=self.centered)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["start"] = list(self.start)
        out["grid"] = list(self.grid)
        if isinstance(self.m, tuple):
            out["m"] = list(self.m)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentPreset":
        data = dict(data)
        data["start"] = tuple(data.get("start", ()))
        data["grid"] = tuple(data.get("grid", ()))
        if isinstance(data.get("m"), list):
            data["m"] = tuple(data["m"])
        return cls(**data)


def _fqve_start(seed: int = 0) -> tuple[float, ...]:
    """Initial angles drawn uniformly from [0, pi) with the preset seed."""
    return tuple(float(v) for v in np.random.default_rng(seed).uniform(0.0, math.pi, 2))


def _build() -> dict[str, ExperimentPreset]:
    presets = [
        ExperimentPreset(
            "grad-zero-1.3x", "gradient", "linear-1.3", (0.0,), 4, 2,
            description="gradient of 1.3x at 0, 4 qubits with 2 fractional"),
    ]
    for i, (pt, m) in enumerate([((1.0, 1.5), (-4.0, 4.0)), ((-2.0, -1.25), (-4.0, -4.0)),
                                 ((-2.0, 1.25), (-4.0, 4.0)), ((1.0, -1.5), (-4.0, -4.0))], start=1):
        presets.append(ExperimentPreset(
            f"grad-2var-p{i}", "gradient", "valley-2d", pt, 4, 2, m=m, l=0.01, readout="unsigned",
            description="two-variable gradient; m signs fixed from the analytic gradient"))
    for tag, x0, alpha in [("a", (0.7, 1.6), 0.05), ("b", (1.0, -1.6), 0.05),
                           ("c", (-2.0, 1.0), 0.3), ("d", (-2.0, -1.5), 0.3)]:
        presets.append(ExperimentPreset(
            f"descent-{tag}", "descent", "valley-2d", x0, 6, 3, m=8.0, l=0.01,
            learning_rate=alpha, mode="offgrid", max_iters=400, grad_norm_tol=0.0,
            description="hybrid descent on the valley objective"))
    presets.append(ExperimentPreset(
        "fqve", "fqve", "heisenberg-energy-u", _fqve_start(0), 4, 2, m=2 * math.pi, l=0.01,
        learning_rate=0.25, mode="offgrid", max_iters=200, grad_norm_tol=0.0, periodic=True,
        description="quantum-gradient VQE on the 2-qubit Heisenberg model; start in theta"))
    presets.append(ExperimentPreset(
        "vqe-baseline", "vqe-baseline", "heisenberg-energy-theta", _fqve_start(0),
        learning_rate=0.25, max_iters=200, grad_norm_tol=1e-3, shots=0, exact=True,
        description="parameter-shift gradient descent from the same start"))
    presets.append(ExperimentPreset(
        "sweep-fracbits", "sweep", "linear-1.3", (0.0,), m=None, l=0.01, readout="unsigned",
        sweep_kind="fracbits", grid=(1, 2, 3, 4, 5),
        description="error vs fractional qubits; n = frac + 1, default m"))
    presets.append(ExperimentPreset(
        "sweep-m", "sweep", "linear-1.3", (0.0,), 4, 2, l=0.01, readout="unsigned",
        sweep_kind="m", grid=(16.0, 8.0, 4.0, 2.0, 1.5),
        description="error vs gradient range m, approaching 1.3 from above"))
    return {p.name: p for p in presets}


PRESETS: dict[str, ExperimentPreset] = _build()


def get_preset(name: str) -> ExperimentPreset:
    return PRESETS[name]


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def run_gradient(p: ExperimentPreset) -> dict[str, str]:
    f = get_objective(p.objective)
    cfg = p.oracle_cfg(f.arity)
    est = estimate_gradient(f, p.start, cfg, shots=p.shots, seed=p.seed, exact=p.exact)
    rec = est.to_record()
    rec["preset"] = p.to_dict()
    if f.has_gradient:
        rec["analytic_gradient"] = _round(f.grad(p.start).tolist())
    return {f"{p.name}.json": dumps(rec)}


def run_descent(p: ExperimentPreset) -> dict[str, str]:
    f = get_objective(p.objective)
    cfg = DescentConfig(p.learning_rate, p.oracle_cfg(f.arity), p.max_iters, p.grad_norm_tol,
                        p.shots, p.seed, p.mode, p.exact, p.periodic)
    trace = descend(f, p.start, cfg)
    out = trace.to_json()
    out["preset"] = p.to_dict()
    if f.has_gradient:
        out["final_true_gradient"] = _round(f.grad(trace.final_point).tolist())
    return {f"{p.name}.json": dumps(out), f"{p.name}.csv": trace.to_csv()}


def run_fqve(p: ExperimentPreset) -> dict[str, str]:
    base = default_fqve_config(seed=p.seed, shots=p.shots, exact=p.exact, max_iters=p.max_iters)
    ocfg = p.oracle_cfg(2)
    cfg = replace(base, oracle_cfg=ocfg, learning_rate=p.learning_rate / (math.pi / 2) ** 2,
                  grad_norm_tol=p.grad_norm_tol, mode=p.mode, periodic=p.periodic)
    trace = fqve(p.start, cfg)
    out = trace.to_json()
    out["preset"] = p.to_dict()
    out["final_theta"] = _round(u_to_theta(trace.final_point).tolist())
    return {f"{p.name}.json": dumps(out), f"{p.name}.csv": energy_csv(trace, "u")}


def run_baseline(p: ExperimentPreset) -> dict[str, str]:
    trace = vqe_baseline(p.start, p.learning_rate, p.max_iters,
                         tol=p.grad_norm_tol if p.grad_norm_tol is not None else 1e-3)
    out = trace.to_json()
    out["preset"] = p.to_dict()
    return {f"{p.name}.json": dumps(out), f"{p.name}.csv": energy_csv(trace, "theta")}


@dataclass
class SweepRow:
    setting: float
    n_bits: int
    frac_bits: int
    m: float
    top_outcome: str
    decoded: float
    true_gradient: float
    abs_error: float
    expected_abs_error: float
    top_probability: float


def sweep_point(kind: str, setting: float, p: ExperimentPreset) -> SweepRow:
    """One grid setting of an error sweep (a top-level function so it pickles)."""
    f = get_objective(p.objective)
    if not f.has_gradient:
        raise ObjectiveError(f"objective {f.name!r} has no analytic gradient to sweep against")
    if kind == "fracbits":
        frac = int(setting)
        q = replace(p, n_bits=frac + 1, frac_bits=frac, m=None)
    elif kind == "m":
        q = replace(p, m=float(setting))
    else:
        raise ValueError(f"unknown sweep kind {kind!r}")
    cfg = q.oracle_cfg(f.arity)
    est = estimate_gradient(f, q.start, cfg, shots=q.shots, seed=q.seed, exact=q.exact)
    true = float(f.grad(q.start)[0])
    probs = est.probabilities
    # register 0 is the only register for these one-dimensional sweeps
    vals = np.array([decode_gradient(k, cfg.fmt, cfg.scale) for k in range(cfg.fmt.N)])
    expected = float(np.sum(probs * np.abs(vals - true)))
    m = cfg.scale.m_vector(1)[0]
    return SweepRow(float(setting), cfg.fmt.n_bits, cfg.fmt.frac_bits, m, est.top_outcome,
                    est.decoded[0], true, abs(est.decoded[0] - true), expected, est.top_probability)


def sweep_rows(kind: str, grid, p: ExperimentPreset, jobs: int = 1) -> list[SweepRow]:
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    if jobs > 1 and len(grid) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(sweep_point, [kind] * len(grid), grid, [p] * len(grid)))
    return [sweep_point(kind, s, p) for s in grid]


SWEEP_COLUMNS = ("setting", "n_bits", "frac_bits", "m", "top_outcome", "decoded",
                 "true_gradient", "abs_error", "expected_abs_error", "top_probability")


def sweep_csv(rows: list[SweepRow]) -> str:
    lines = [",".join(SWEEP_COLUMNS)]
    for r in rows:
        d = asdict(r)
        lines.append(",".join(str(_round(d[c])) if isinstance(d[c], float) else str(d[c])
                              for c in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"


def run_sweep(p: ExperimentPreset, jobs: int = 1) -> dict[str, str]:
    rows = sweep_rows(p.sweep_kind, p.grid, p, jobs)
    out = {
        "preset": p.to_dict(),
        "kind": p.sweep_kind,
        "rows": [{k: (_round(v) if isinstance(v, float) else v) for k, v in asdict(r).items()} for r in rows],
    }
    return {f"{p.name}.json": dumps(out), f"{p.name}.csv": sweep_csv(rows)}


def run(p: ExperimentPreset, jobs: int = 1) -> dict[str, str]:
    if p.kind == "gradient":
        return run_gradient(p)
    if p.kind == "descent":
        return run_descent(p)
    if p.kind == "fqve":
        return run_fqve(p)
    if p.kind == "vqe-baseline":
        return run_baseline(p)
    if p.kind == "sweep":
        return run_sweep(p, jobs)
    raise ValueError(f"unknown preset kind {p.kind!r}")


def with_overrides(p: ExperimentPreset, seed: int | None = None, shots: int | None = None,
                   exact: bool | None = None, **extra) -> ExperimentPreset:
    changes: dict[str, Any] = {k: v for k, v in extra.items() if v is not None}
    if seed is not None:
        changes["seed"] = seed
        if p.kind in ("fqve", "vqe-baseline"):
            changes["start"] = _fqve_start(seed)
    if shots is not None:
        changes["shots"] = shots
    if exact:
        changes["exact"] = True
    return replace(p, **changes) if changes else p


__all__ = [
    "ExperimentPreset", "PRESETS", "get_preset", "run", "with_overrides", "sweep_rows",
    "sweep_csv", "SweepRow", "dumps",
]
