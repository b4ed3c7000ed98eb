"""Fixed-point encoding and gradient readout.

A format with ``n_bits`` and ``frac_bits`` maps integer codeword ``k`` to
``k * 2**-frac_bits``.  Signed formats use two's complement, so codeword
``2**(n-1)`` is the most negative value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EncodingError

READOUTS = ("twos", "unsigned")


@dataclass(frozen=True)
class FixedPointFormat:
    n_bits: int
    frac_bits: int
    signed: bool = True

    def __post_init__(self):
        if self.n_bits < 1:
            raise ValueError("n_bits must be >= 1")
        if not 0 <= self.frac_bits < self.n_bits:
            raise ValueError("need 0 <= frac_bits < n_bits")

    @property
    def N(self) -> int:
        return 1 << self.n_bits

    @property
    def step(self) -> float:
        return 2.0 ** -self.frac_bits

    @property
    def code_range(self) -> tuple[int, int]:
        """Inclusive range of the signed integer a codeword represents."""
        if self.signed:
            half = self.N >> 1
            return -half, half - 1
        return 0, self.N - 1

    @property
    def min_value(self) -> float:
        return self.code_range[0] * self.step

    @property
    def max_value(self) -> float:
        return self.code_range[1] * self.step

    def representable(self, value: float) -> bool:
        try:
            encode(value, self)
        except EncodingError:
            return False
        return True

    def round_to_grid(self, value: float, clamp: bool = True) -> tuple[float, bool]:
        """Nearest grid value; returns ``(value, was_clamped)``."""
        k = _round_half_away(value / self.step)
        lo, hi = self.code_range
        if lo <= k <= hi:
            return k * self.step, False
        if not clamp:
            raise EncodingError(f"{value} outside [{self.min_value}, {self.max_value}]")
        return min(max(k, lo), hi) * self.step, True

    def to_dict(self) -> dict:
        return {"n_bits": self.n_bits, "frac_bits": self.frac_bits, "signed": self.signed}


def _round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def encode(value: float, fmt: FixedPointFormat) -> int:
    """Codeword nearest to ``value`` (ties away from zero).

    Raises :class:`EncodingError` for non-finite or out-of-range input;
    there is never a silent modular wrap.
    """
    value = float(value)
    if not math.isfinite(value):
        raise EncodingError(f"cannot encode non-finite value {value}")
    k = _round_half_away(value / fmt.step)
    lo, hi = fmt.code_range
    if not lo <= k <= hi:
        raise EncodingError(
            f"{value} outside representable range [{fmt.min_value}, {fmt.max_value}]"
        )
    return k % fmt.N


def decode(code: int, fmt: FixedPointFormat) -> float:
    code = int(code)
    if not 0 <= code < fmt.N:
        raise EncodingError(f"codeword {code} out of range for {fmt.n_bits} bits")
    if fmt.signed and code >= fmt.N >> 1:
        code -= fmt.N
    return code * fmt.step


def twos_complement(code: int, n_bits: int) -> int:
    code = int(code)
    n = 1 << n_bits
    if not 0 <= code < n:
        raise EncodingError(f"codeword {code} out of range for {n_bits} bits")
    return (n - code) % n


def signed_code(code: int, n_bits: int) -> int:
    """Two's-complement integer value of ``code``."""
    n = 1 << n_bits
    return code - n if code >= n >> 1 else code


@dataclass(frozen=True)
class GradientScale:
    """Gradient range ``m`` and grid extent ``l`` for ``n_bits`` registers.

    ``m`` may be a scalar or one value per component.  A negative component
    mirrors that register's oracle grid, which reads out ``-grad`` as a
    positive codeword: useful when the sign is known in advance so the
    full unsigned range is available for the magnitude.

    ``readout`` selects how a codeword maps back to a gradient:
    ``"twos"`` splits at ``N/2`` (wraparound sign recovery) and
    ``"unsigned"`` reads ``code * m / N`` directly.
    """

    m: float | tuple[float, ...]
    l: float
    n_bits: int
    readout: str = "twos"

    def __post_init__(self):
        ms = self.m_vector(1) if np.isscalar(self.m) else tuple(self.m)
        if isinstance(self.m, (list, np.ndarray)):
            object.__setattr__(self, "m", tuple(float(v) for v in self.m))
        for v in ms:
            if not (math.isfinite(v) and v != 0):
                raise ValueError(f"m components must be finite and nonzero, got {v}")
        if not (math.isfinite(self.l) and self.l > 0):
            raise ValueError("l must be positive")
        if self.readout not in READOUTS:
            raise ValueError(f"readout must be one of {READOUTS}")

    @classmethod
    def default(cls, fmt: FixedPointFormat, m=None, l=None, readout: str = "twos") -> "GradientScale":
        """Defaults ``m = l = N * 2**-frac_bits`` so codewords read in grid units."""
        unit = fmt.N * fmt.step
        return cls(m if m is not None else unit, l if l is not None else unit, fmt.n_bits, readout)

    @property
    def N(self) -> int:
        return 1 << self.n_bits

    @property
    def grid_step(self) -> float:
        return self.l / self.N

    def m_vector(self, d: int) -> tuple[float, ...]:
        if np.isscalar(self.m):
            return (float(self.m),) * d
        if len(self.m) != d:
            raise ValueError(f"m has {len(self.m)} components, expected {d}")
        return tuple(float(v) for v in self.m)

    def resolution(self, d: int = 1) -> float:
        """Largest decoded gradient step over the components."""
        return max(abs(v) for v in self.m_vector(d)) / self.N

    def to_dict(self) -> dict:
        m = self.m if np.isscalar(self.m) else list(self.m)
        return {"m": m, "l": self.l, "n_bits": self.n_bits, "readout": self.readout}


def decode_gradient(code: int, fmt: FixedPointFormat, scale: GradientScale,
                    component: int = 0, d: int | None = None) -> float:
    """Gradient component read from an IQFT output register.

    With ``"twos"`` readout a codeword at or above ``N/2`` is the
    wrapped image of a negative value.  The result is ``k * m / N`` where
    ``k`` is the (signed) codeword and ``m`` the component's gradient range.
    """
    code = int(code)
    if not 0 <= code < fmt.N:
        raise EncodingError(f"codeword {code} out of range")
    if np.isscalar(scale.m):
        m = float(scale.m)
    else:
        m = scale.m_vector(d if d is not None else len(scale.m))[component]
    k = signed_code(code, fmt.n_bits) if scale.readout == "twos" else code
    return k * m / fmt.N


def decode_gradients(codes: Sequence[int], fmt: FixedPointFormat, scale: GradientScale) -> list[float]:
    d = len(codes)
    return [decode_gradient(c, fmt, scale, i, d) for i, c in enumerate(codes)]
