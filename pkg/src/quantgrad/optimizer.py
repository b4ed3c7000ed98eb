"""Gradient descent driven by the quantum gradient estimator.

Each iteration estimates the gradient with one oracle call and applies the
classical update ``x <- x - alpha * g``.  Two iterate modes:

``grid``
    iterates are rounded to the fixed-point grid after every update, so
    each estimate is taken exactly at a representable point.
``offgrid``
    iterates are kept at full precision.  The circuit shifts by the
    nearest grid point and the residual is handed to the oracle as an
    offset, so the estimate is still taken at the exact iterate.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fixedpoint import FixedPointFormat, encode
from .gradest import DEFAULT_SHOTS, GradientEstimate, _round, estimate_gradient
from .oracle import CallRecord, ObjectiveFunction, OracleConfig

MODES = ("grid", "offgrid")
STOP_REASONS = ("converged", "max_iters", "diverged")


@dataclass
class DescentConfig:
    learning_rate: float
    oracle_cfg: OracleConfig
    max_iters: int = 100
    grad_norm_tol: float | None = None
    shots: int = DEFAULT_SHOTS
    seed: int = 0
    mode: str = "grid"
    exact: bool = False
    periodic: bool = False
    divergence_window: int = 3

    def __post_init__(self):
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise ValueError("learning_rate must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.grad_norm_tol is not None and self.grad_norm_tol < 0:
            raise ValueError("grad_norm_tol must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    @property
    def tol(self) -> float:
        """Stopping threshold on the decoded gradient; defaults to one codeword."""
        if self.grad_norm_tol is not None:
            return self.grad_norm_tol
        return self.oracle_cfg.scale.resolution(self.oracle_cfg.d)

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "max_iters": self.max_iters,
            "grad_norm_tol": self.tol,
            "shots": 0 if self.exact else self.shots,
            "seed": self.seed,
            "mode": self.mode,
            "exact": self.exact,
            "periodic": self.periodic,
            "oracle": self.oracle_cfg.to_dict(),
        }


@dataclass
class DescentStep:
    point: list[float]
    f_value: float
    gradient: list[float]
    top_outcome: str
    top_probability: float
    clamped: bool = False


@dataclass
class DescentTrace:
    """Per-iteration record of a descent run.

    ``iterations[k].point`` is the iterate at which estimate ``k`` was
    taken.  ``final_point`` is where the run stopped; for ``converged`` it
    is the last evaluated iterate.
    """

    objective: str
    iterations: list[DescentStep]
    stop_reason: str
    final_point: list[float]
    final_value: float
    config: dict = field(default_factory=dict)
    record: CallRecord = field(default_factory=CallRecord)
    coordinate_map: dict | None = None

    @property
    def oracle_calls(self) -> int:
        return self.record.oracle_calls

    def __len__(self) -> int:
        return len(self.iterations)

    def points(self) -> np.ndarray:
        return np.array([s.point for s in self.iterations])

    def values(self) -> np.ndarray:
        return np.array([s.f_value for s in self.iterations])

    def to_csv(self) -> str:
        d = len(self.final_point)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", *[f"x{i}" for i in range(d)], "f", *[f"g{i}" for i in range(d)], "outcome"])
        for k, s in enumerate(self.iterations):
            w.writerow([k, *_round(s.point), _round(s.f_value), *_round(s.gradient), s.top_outcome])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "objective": self.objective,
            "stop_reason": self.stop_reason,
            "iterations": len(self.iterations),
            "oracle_calls": self.oracle_calls,
            "final_point": _round(self.final_point),
            "final_value": _round(self.final_value),
            "config": self.config,
            "coordinate_map": self.coordinate_map,
            "trace": [
                {
                    "point": _round(s.point),
                    "f": _round(s.f_value),
                    "gradient": _round(s.gradient),
                    "outcome": s.top_outcome,
                    "top_probability": _round(s.top_probability),
                    "clamped": s.clamped,
                }
                for s in self.iterations
            ],
        }


def _wrap(x: np.ndarray, fmt: FixedPointFormat) -> np.ndarray:
    period = fmt.N * fmt.step
    return np.mod(x - fmt.min_value, period) + fmt.min_value


def _to_grid(x: np.ndarray, fmt: FixedPointFormat, periodic: bool) -> tuple[np.ndarray, np.ndarray]:
    """Nearest grid point per component and a per-component clamp flag."""
    k = np.sign(x) * np.floor(np.abs(x) / fmt.step + 0.5)
    lo, hi = fmt.code_range
    if periodic:
        k = np.mod(k - lo, fmt.N) + lo
        return k * fmt.step, np.zeros(x.shape, dtype=bool)
    clamped = (k < lo) | (k > hi)
    return np.clip(k, lo, hi) * fmt.step, clamped


def _constrain(x: np.ndarray, fmt: FixedPointFormat, periodic: bool) -> tuple[np.ndarray, np.ndarray]:
    """Keep a full-precision iterate inside the representable window."""
    if periodic:
        return _wrap(x, fmt), np.zeros(x.shape, dtype=bool)
    lo, hi = fmt.min_value, fmt.max_value
    clamped = (x < lo) | (x > hi)
    return np.clip(x, lo, hi), clamped


def descend(f: ObjectiveFunction, x0: Sequence[float], cfg: DescentConfig) -> DescentTrace:
    """Run quantum-gradient descent from ``x0``.

    Stops when the decoded gradient is the zero codeword or its max-norm
    is at most ``cfg.tol``; when ``max_iters`` is reached; or, flagged as
    ``diverged``, when every component was clamped at the range edge for
    ``divergence_window`` consecutive updates.
    """
    ocfg = cfg.oracle_cfg
    fmt = ocfg.fmt
    x = np.asarray(x0, dtype=float).reshape(ocfg.d)
    for v in x:
        encode(v, fmt)  # raises when unrepresentable
    if cfg.mode == "grid":
        x, _ = _to_grid(x, fmt, cfg.periodic)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.max_iters)
    record = CallRecord()
    steps: list[DescentStep] = []
    stop = "max_iters"
    clamp_run = 0
    clamped_now = False
    for k in range(cfg.max_iters):
        if cfg.mode == "grid":
            shift, offset = x, None
        else:
            shift, _ = _to_grid(x, fmt, cfg.periodic)
            offset = x - shift
        est: GradientEstimate = estimate_gradient(
            f, shift, ocfg, shots=cfg.shots, seed=seeds[k], exact=cfg.exact, offset=offset)
        record.merge(est.record)
        g = np.array(est.decoded)
        steps.append(DescentStep(x.tolist(), f(x), g.tolist(), est.top_outcome,
                                 est.top_probability, bool(clamped_now)))
        if not any(est.codes) or np.max(np.abs(g)) <= cfg.tol:
            stop = "converged"
            break
        x_new = x - cfg.learning_rate * g
        if cfg.mode == "grid":
            x, clamped = _to_grid(x_new, fmt, cfg.periodic)
        else:
            x, clamped = _constrain(x_new, fmt, cfg.periodic)
        clamped_now = bool(clamped.any())
        clamp_run = clamp_run + 1 if clamped.all() else 0
        if clamp_run >= cfg.divergence_window:
            stop = "diverged"
            break
    return DescentTrace(
        objective=f.name,
        iterations=steps,
        stop_reason=stop,
        final_point=x.tolist(),
        final_value=f(x),
        config=cfg.to_dict(),
        record=record,
    )
