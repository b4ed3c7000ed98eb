"""Diagonal phase oracles built from classical objectives.

For ``d`` registers of ``n`` qubits each, a register holding integer
``r_i`` after a shift by codeword ``s_i`` represents the offset
``delta_i = signed((r_i - s_i) mod N)`` in ``[-N/2, N/2)``.  The oracle
evaluates the objective at

    x_i = point_i + c_i * delta_i,   c_i = (l / N) * (m_max / m_i)

and imprints ``f(x) * N / (m_max * l)`` turns.  For a single scalar ``m``
this is the usual grid of step ``l/N`` and constant ``N/(m*l)``.  After the
inverse QFT each register then peaks at ``(N/m_i) * df/dx_i``.

Linearization error across the grid is bounded by roughly
``(N/(m*l)) * 0.5 * sup|Hess f| * (l/2)**2`` turns; a
:class:`CurvatureWarning` is issued when the estimate passes a quarter
turn, at which point shrinking ``l`` is advisable.
"""
from __future__ import annotations

import warnings
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ObjectiveError, PhaseEvaluationError
from .fixedpoint import FixedPointFormat, GradientScale, decode
from .sim import RegisterLayout, StateVector, apply_diagonal_phase

CURVATURE_LIMIT_TURNS = 0.25


class CurvatureWarning(UserWarning):
    """Grid extent ``l`` is large relative to the objective's curvature."""


@dataclass(frozen=True)
class ObjectiveFunction:
    """A deterministic real objective of ``arity`` variables.

    ``fn`` and ``gradient`` are vectorized: they take ``d`` broadcastable
    arrays (one per coordinate) and return an array (``gradient`` returns a
    sequence of ``d`` arrays).
    """

    name: str
    arity: int
    fn: Callable[..., np.ndarray]
    gradient: Callable[..., Sequence[np.ndarray]] | None = None
    description: str = ""
    periodic: float | None = None

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float).reshape(self.arity)
        return float(self.fn(*x))

    def evaluate(self, coords: Sequence[np.ndarray]) -> np.ndarray:
        return np.asarray(self.fn(*coords), dtype=float)

    def grad(self, x) -> np.ndarray:
        if self.gradient is None:
            raise ObjectiveError(f"objective {self.name!r} has no analytic gradient")
        x = np.asarray(x, dtype=float).reshape(self.arity)
        return np.array([float(g) for g in self.gradient(*x)])

    @property
    def has_gradient(self) -> bool:
        return self.gradient is not None

    def shifted(self, offset: Sequence[float]) -> "ObjectiveFunction":
        """Objective ``x -> f(x + offset)``; used for off-grid evaluation."""
        off = np.asarray(offset, dtype=float)
        if not np.any(off):
            return self
        fn, grad = self.fn, self.gradient
        return ObjectiveFunction(
            name=self.name,
            arity=self.arity,
            fn=lambda *c: fn(*(ci + oi for ci, oi in zip(c, off))),
            gradient=None if grad is None else (lambda *c: grad(*(ci + oi for ci, oi in zip(c, off)))),
            description=self.description,
            periodic=self.periodic,
        )


_REGISTRY: dict[str, ObjectiveFunction] = {}


def register_objective(obj: ObjectiveFunction, overwrite: bool = False) -> ObjectiveFunction:
    if obj.name in _REGISTRY and not overwrite:
        raise ValueError(f"objective {obj.name!r} already registered")
    _REGISTRY[obj.name] = obj
    return obj


def get_objective(name: str) -> ObjectiveFunction:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ObjectiveError(
            f"unknown objective {name!r}; known: {', '.join(sorted(_REGISTRY))}"
        ) from None


def list_objectives() -> list[str]:
    return sorted(_REGISTRY)


def _valley(x1, x2):
    return 0.1 * (x1 - x2**2) ** 2 + 0.1 * (1 - x2**2) ** 2


def _valley_grad(x1, x2):
    return (0.2 * (x1 - x2**2), -0.4 * x2 * ((x1 - x2**2) + (1 - x2**2)))


def _valley_printed(x1, x2):
    return 0.1 * (x1 + x2**2) ** 2 + 0.1 * (1 + x2**2) ** 2


def _valley_printed_grad(x1, x2):
    return (0.2 * (x1 + x2**2), 0.4 * x2 * ((x1 + x2**2) + (1 + x2**2)))


register_objective(ObjectiveFunction(
    "linear-1.3", 1, lambda x: 1.3 * x, lambda x: (np.full_like(np.asarray(x, float), 1.3),),
    "f(x) = 1.3 x"))
register_objective(ObjectiveFunction(
    "valley-2d", 2, _valley, _valley_grad,
    "f(x1, x2) = 0.1 (x1 - x2^2)^2 + 0.1 (1 - x2^2)^2"))
register_objective(ObjectiveFunction(
    "valley-2d-printed", 2, _valley_printed, _valley_printed_grad,
    "f(x1, x2) = 0.1 (x1 + x2^2)^2 + 0.1 (1 + x2^2)^2"))
register_objective(ObjectiveFunction(
    "square", 1, lambda x: x**2, lambda x: (2 * np.asarray(x, float),), "f(x) = x^2"))
register_objective(ObjectiveFunction(
    "neg-linear", 1, lambda x: -np.asarray(x, float), lambda x: (np.full_like(np.asarray(x, float), -1.0),),
    "f(x) = -x"))


def linear_objective(coeffs: Sequence[float], name: str | None = None) -> ObjectiveFunction:
    """``f(x) = sum(g_i x_i)``; not registered."""
    g = [float(c) for c in coeffs]
    return ObjectiveFunction(
        name or f"linear{tuple(g)}",
        len(g),
        lambda *x: sum(gi * np.asarray(xi, float) for gi, xi in zip(g, x)),
        lambda *x: tuple(np.full_like(np.asarray(xi, float), gi) for gi, xi in zip(g, x)),
        "linear",
    )


@dataclass(frozen=True)
class OracleConfig:
    """Format, scale and register placement for a ``d``-variable oracle.

    ``centered`` selects offsets in ``[-N/2, N/2)`` around the point; with
    ``centered=False`` offsets run over ``0..N-1`` instead.
    """

    fmt: FixedPointFormat
    scale: GradientScale
    layout: RegisterLayout
    centered: bool = True

    def __post_init__(self):
        if self.scale.n_bits != self.fmt.n_bits:
            raise ValueError("scale and format disagree on register width")
        for name, rng in self.layout.registers:
            if len(rng) != self.fmt.n_bits:
                raise ValueError(f"register {name!r} width {len(rng)} != {self.fmt.n_bits}")
        self.scale.m_vector(self.d)

    @property
    def d(self) -> int:
        return len(self.layout.registers)

    @property
    def num_qubits(self) -> int:
        return self.layout.num_qubits

    def registers(self) -> list[range]:
        return [rng for _, rng in self.layout.registers]

    @property
    def adder_ancillas(self) -> list[int]:
        return sorted(self.layout.ancillas)

    def coefficients(self) -> np.ndarray:
        """Per-register grid step ``c_i`` in objective coordinates."""
        m = np.array(self.scale.m_vector(self.d))
        m_max = np.abs(m).max()
        return self.scale.grid_step * m_max / m

    def phase_constant(self) -> float:
        m_max = max(abs(v) for v in self.scale.m_vector(self.d))
        return self.fmt.N / (m_max * self.scale.l)

    def offsets(self) -> np.ndarray:
        N = self.fmt.N
        k = np.arange(N)
        return np.where(k < N // 2, k, k - N) if self.centered else k

    def to_dict(self) -> dict:
        return {
            "fmt": self.fmt.to_dict(),
            "scale": self.scale.to_dict(),
            "d": self.d,
            "centered": self.centered,
        }

    @classmethod
    def build(cls, d: int, fmt: FixedPointFormat, scale: GradientScale | None = None,
              centered: bool = True) -> "OracleConfig":
        """Standard layout: ``d*n`` value qubits then ``n+1`` adder ancillas.

        Register 0 sits on the highest value qubits so it renders leftmost
        in bitstrings.  The ancillas (``n`` for the loaded constant, one
        carry) are shared by every register's adder.
        """
        n = fmt.n_bits
        regs = tuple((f"x{i}", range((d - 1 - i) * n, (d - i) * n)) for i in range(d))
        anc = frozenset(range(d * n, d * n + n + 1))
        layout = RegisterLayout(regs, anc, d * n + n + 1)
        return cls(fmt, scale or GradientScale.default(fmt), layout, centered)


def register_points(cfg: OracleConfig, point: Sequence[float]) -> list[np.ndarray]:
    """Objective coordinates of every offset, per register (length ``N`` each)."""
    delta = cfg.offsets()
    c = cfg.coefficients()
    return [float(p) + c[i] * delta for i, p in enumerate(point)]


@dataclass
class CallRecord:
    """Accumulates oracle invocations made during one run."""

    calls: list[dict] = field(default_factory=list)

    @property
    def oracle_calls(self) -> int:
        return len(self.calls)

    def merge(self, other: "CallRecord") -> None:
        self.calls.extend(other.calls)


def oracle_call_count(record) -> int:
    """Number of phase-oracle applications in a run record."""
    if isinstance(record, CallRecord):
        return record.oracle_calls
    inner = getattr(record, "record", None)
    if isinstance(inner, CallRecord):
        return inner.oracle_calls
    return int(getattr(record, "oracle_calls"))


def estimate_curvature_turns(f: ObjectiveFunction, cfg: OracleConfig, point: Sequence[float]) -> float:
    """Second-difference estimate of the worst linearization error in turns."""
    axes = [np.sort(ax) for ax in register_points(cfg, point)]
    mesh = np.meshgrid(*axes, indexing="ij")
    vals = np.broadcast_to(f.evaluate(mesh), tuple(len(ax) for ax in axes))
    worst = 0.0
    for i, ax in enumerate(axes):
        if vals.shape[i] < 3:
            continue
        h = abs(ax[1] - ax[0])
        sec = np.diff(vals, n=2, axis=i) / h**2
        extent = h * vals.shape[i] / 2
        worst = max(worst, 0.5 * float(np.max(np.abs(sec))) * extent**2)
    return cfg.phase_constant() * worst


def phase_grid(f: ObjectiveFunction, cfg: OracleConfig, point: Sequence[float],
               shift: Sequence[int]) -> np.ndarray:
    """Oracle phase (turns) indexed by register values ``[r_0, ..., r_{d-1}]``."""
    d, N = cfg.d, cfg.fmt.N
    axes = register_points(cfg, point)
    # axis entry k is the offset delta at index k; the register value is
    # (delta + shift) mod N
    reordered = []
    for i, ax in enumerate(axes):
        r = (cfg.offsets() + int(shift[i])) % N
        out = np.empty(N)
        out[r] = ax
        reordered.append(out)
    mesh = np.meshgrid(*reordered, indexing="ij")
    vals = np.broadcast_to(f.evaluate(mesh), (N,) * d)
    bad = ~np.isfinite(vals)
    if bad.any():
        pos = np.unravel_index(int(np.flatnonzero(bad)[0]), bad.shape)
        x = tuple(float(reordered[i][p]) for i, p in enumerate(pos))
        raise PhaseEvaluationError(f"objective {f.name!r} is non-finite at x={x}", index=x)
    return cfg.phase_constant() * vals


def _expand(grid: np.ndarray, cfg: OracleConfig, num_qubits: int) -> np.ndarray:
    """Lift a phase grid over register values to all ``2**num_qubits`` indices."""
    regs = cfg.registers()
    n = cfg.fmt.n_bits
    stacked = all(list(r) == list(range((cfg.d - 1 - i) * n, (cfg.d - i) * n)) for i, r in enumerate(regs))
    if stacked:
        # register 0 on top of the value block: C-order ravel is the value index
        flat = grid.reshape(-1)
        return np.tile(flat, 1 << (num_qubits - flat.size.bit_length() + 1))
    idx = np.arange(1 << num_qubits, dtype=np.int64)
    regvals = []
    for rng in regs:
        v = np.zeros_like(idx)
        for j, q in enumerate(rng):
            v |= ((idx >> q) & 1) << j
        regvals.append(v)
    return grid[tuple(regvals)]


def apply_phase_oracle(state: StateVector, f: ObjectiveFunction, cfg: OracleConfig,
                       shift: Sequence[int], offset: Sequence[float] | None = None,
                       record: CallRecord | None = None, warn: bool = True) -> StateVector:
    """Imprint ``f`` on the shifted value registers.

    ``shift`` lists the codeword each register was advanced by; the
    corresponding point is its signed fixed-point decode.  ``offset`` adds
    a sub-grid displacement to that point (off-grid iterates).
    """
    if f.arity != cfg.d:
        raise ValueError(f"objective arity {f.arity} != register count {cfg.d}")
    shift = [int(s) for s in shift]
    point = np.array([decode(s, cfg.fmt) for s in shift], dtype=float)
    if offset is not None:
        point = point + np.asarray(offset, dtype=float)
    if warn:
        turns = estimate_curvature_turns(f, cfg, point)
        if turns > CURVATURE_LIMIT_TURNS:
            warnings.warn(
                f"linearization error about {turns:.3g} turns at {point.tolist()}; consider a smaller l",
                CurvatureWarning, stacklevel=2)
    grid = phase_grid(f, cfg, point, shift)
    apply_diagonal_phase(state, _expand(grid, cfg, state.num_qubits))
    if record is not None:
        record.calls.append({"shift": shift, "point": point.tolist()})
    return state

