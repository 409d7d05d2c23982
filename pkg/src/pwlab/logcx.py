"""Complex numbers stored as (log-modulus, argument).

Factors such as ``g(N/x)**(N+1) / N!`` or Bell coefficients of size ``N**N``
leave the double range long before the quantity they multiply into does.
Keeping every intermediate as ``log|w| + i arg w`` and converting only at the
end sidesteps that.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

TAU = 2.0 * math.pi
_EPS = np.finfo(float).eps


def wrap_angle(theta: float) -> float:
    """Reduce ``theta`` into (-pi, pi]."""
    r = math.remainder(theta, TAU)
    if r <= -math.pi:
        r += TAU
    return r


@dataclass(frozen=True)
class LogComplex:
    """``exp(log_abs) * exp(i * arg)``; ``log_abs = -inf`` is exact zero."""

    log_abs: float
    arg: float = 0.0

    def __post_init__(self):
        if math.isnan(self.log_abs) or math.isnan(self.arg):
            raise ValueError("LogComplex components must not be NaN")
        if self.log_abs == math.inf:
            raise ValueError("LogComplex modulus must be finite")
        if self.log_abs == -math.inf:
            object.__setattr__(self, "arg", 0.0)
        else:
            object.__setattr__(self, "arg", wrap_angle(self.arg))

    @classmethod
    def zero(cls) -> "LogComplex":
        return cls(-math.inf, 0.0)

    @property
    def is_zero(self) -> bool:
        return self.log_abs == -math.inf

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        if self.log_abs > 709.78:
            raise OverflowError(f"modulus exp({self.log_abs:.6g}) exceeds double range")
        return cmath.rect(math.exp(self.log_abs), self.arg)

    def __complex__(self) -> complex:
        return self.to_complex()

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return mul(self, other)

    def __pow__(self, n: int) -> "LogComplex":
        return pow_int(self, n)


def from_complex(w: complex) -> LogComplex:
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise ValueError(f"cannot take log of non-finite value {w!r}")
    if w == 0:
        return LogComplex.zero()
    return LogComplex(math.log(abs(w)), cmath.phase(w))


def from_real_log(log_abs: float, negative: bool = False) -> LogComplex:
    """Positive (or negative) real with known natural log of its modulus."""
    return LogComplex(log_abs, math.pi if negative else 0.0)


def to_complex(a: LogComplex) -> complex:
    return a.to_complex()


def mul(a: LogComplex, b: LogComplex) -> LogComplex:
    if a.is_zero or b.is_zero:
        return LogComplex.zero()
    return LogComplex(a.log_abs + b.log_abs, a.arg + b.arg)


def pow_int(a: LogComplex, n: int) -> LogComplex:
    n = int(n)
    if a.is_zero:
        if n < 0:
            raise ZeroDivisionError("zero raised to a negative power")
        return LogComplex(0.0, 0.0) if n == 0 else LogComplex.zero()
    return LogComplex(n * a.log_abs, n * a.arg)


def pow_real(a: LogComplex, s: float) -> LogComplex:
    """Principal power ``a**s`` for real ``s`` (arg of ``a`` taken in (-pi, pi])."""
    if a.is_zero:
        if s < 0:
            raise ZeroDivisionError("zero raised to a negative power")
        return LogComplex(0.0, 0.0) if s == 0 else LogComplex.zero()
    return LogComplex(s * a.log_abs, s * a.arg)


def lsum(terms: Iterable[LogComplex]) -> LogComplex:
    """Sum of log-domain terms, rescaled by the largest modulus.

    Results that fall below the rounding floor of the accumulation
    (``~ m * eps`` times the scaled absolute sum) are returned as exact zero.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("lsum needs at least one term")
    live = [t for t in terms if not t.is_zero]
    if not live:
        return LogComplex.zero()
    m = max(t.log_abs for t in live)
    acc = 0j
    scale = 0.0
    for t in live:
        r = math.exp(t.log_abs - m)
        acc += cmath.rect(r, t.arg)
        scale += r
    if abs(acc) <= 2.0 * len(live) * _EPS * scale:
        return LogComplex.zero()
    return LogComplex(m + math.log(abs(acc)), cmath.phase(acc))


def lsum_arrays(log_abs: np.ndarray, arg: np.ndarray, axis: int = -1):
    """Vectorised :func:`lsum` over ``axis`` of arrays of log-moduli and phases.

    Returns ``(log_abs, arg)`` arrays with ``axis`` removed. Slices that are
    entirely zero, or cancel below the rounding floor, come back as
    ``(-inf, 0)``.
    """
    log_abs = np.asarray(log_abs, dtype=float)
    arg = np.broadcast_to(np.asarray(arg, dtype=float), log_abs.shape)
    m = np.max(log_abs, axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    r = np.exp(log_abs - m_safe)
    acc = np.sum(r * np.exp(1j * arg), axis=axis)
    scale = np.sum(r, axis=axis)
    count = np.sum(np.isfinite(log_abs), axis=axis)
    m_safe = np.squeeze(m_safe, axis=axis)
    mod = np.abs(acc)
    dead = mod <= 2.0 * count * _EPS * scale
    with np.errstate(divide="ignore"):
        out_log = np.where(dead, -np.inf, m_safe + np.log(np.where(dead, 1.0, mod)))
    out_arg = np.where(dead, 0.0, np.angle(acc))
    return out_log, out_arg
