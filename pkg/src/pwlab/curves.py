"""Curves ``{y + i c(y)}`` in the right half-plane and the inversion kernel on them.

The kernel for fixed ``x`` is

    K_N(t, x) = (N + i x c(N/x))**(N+1) / N! * t**N * exp(-(N + i x c(N/x)) t)

which integrates to one and concentrates at ``t = 1`` as ``N`` grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.special import gammaln

from .errors import QuadratureError
from .logcx import LogComplex, from_complex, mul, pow_int

REAL_AXIS = "real"
MIXTURE = "mixture"
TABULATED = "tabulated"


@dataclass(frozen=True)
class CurveSpec:
    """Curve ``l = {y + i c(y) : y > 0}``.

    Use the constructors :meth:`real_axis`, :meth:`mixture` and
    :meth:`tabulated` rather than building instances directly.
    """

    kind: str
    mu: float = 0.0
    sigma: float = 1.0
    c_func: Callable[[float], float] | None = field(default=None, compare=False)
    gamma: float | None = None

    @classmethod
    def real_axis(cls) -> "CurveSpec":
        return cls(REAL_AXIS)

    @classmethod
    def mixture(cls, mu: float, sigma: float = 1.0) -> "CurveSpec":
        """Image of the positive reals under ``psi(u) = -i u mu + u**2 sigma**2 / 2``."""
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        return cls(MIXTURE, mu=float(mu), sigma=float(sigma))

    @classmethod
    def tabulated(cls, c: Callable[[float], float], gamma: float | None = None) -> "CurveSpec":
        return cls(TABULATED, c_func=c, gamma=gamma)

    def c(self, y):
        if self.kind == REAL_AXIS:
            return np.zeros_like(np.asarray(y, dtype=float))[()]
        if self.kind == MIXTURE:
            return (-self.mu * np.sqrt(2.0 * np.asarray(y, dtype=float)) / self.sigma)[()]
        return self.c_func(y)

    def __str__(self):
        if self.kind == MIXTURE:
            return f"mixture(mu={self.mu:g}, sigma={self.sigma:g})"
        return self.kind


def g(curve: CurveSpec, y: float) -> complex:
    """Point ``y + i c(y)`` of the curve."""
    if not y > 0:
        raise ValueError(f"curve parameter y must be positive, got {y}")
    return complex(y, float(curve.c(y)))


def gamma_const(curve: CurveSpec) -> float:
    """Growth constant ``limsup c(y)**2 / y``."""
    if curve.kind == REAL_AXIS:
        return 0.0
    if curve.kind == MIXTURE:
        return 2.0 * curve.mu**2 / curve.sigma**2
    if curve.gamma is not None:
        return float(curve.gamma)
    raise ValueError("growth constant of a tabulated curve is unknown; pass gamma= explicitly")


def _check_kernel_args(N, x):
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")


def _kernel_base(curve: CurveSpec, N: int, x: float) -> complex:
    """``N + i x c(N/x)``; note ``x * g(N/x)`` equals this."""
    return complex(N, x * float(curve.c(N / x)))


def kernel(curve: CurveSpec, N: int, t: float, x: float) -> LogComplex:
    """``K_N(t, x)`` in log domain."""
    _check_kernel_args(N, x)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    base = _kernel_base(curve, N, x)
    head = pow_int(from_complex(base), N + 1)
    tail = LogComplex(-float(gammaln(N + 1)) + N * math.log(t) - N * t, -base.imag * t)
    return mul(head, tail)


def kernel_array(curve: CurveSpec, N: int, t, x: float) -> np.ndarray:
    """Vectorised ``K_N(t, x)`` as ordinary complex values (``|K_N|`` is O(sqrt N))."""
    _check_kernel_args(N, x)
    t = np.asarray(t, dtype=float)
    base = _kernel_base(curve, N, x)
    log_head = (N + 1) * math.log(abs(base)) - float(gammaln(N + 1))
    arg_head = math.remainder((N + 1) * math.atan2(base.imag, base.real), 2 * math.pi)
    with np.errstate(divide="ignore"):
        logmod = log_head + N * np.log(t) - N * t
    return np.exp(logmod) * np.exp(1j * (arg_head - base.imag * t))


def abs_kernel_array(curve: CurveSpec, N: int, t, x: float) -> np.ndarray:
    _check_kernel_args(N, x)
    t = np.asarray(t, dtype=float)
    base = _kernel_base(curve, N, x)
    with np.errstate(divide="ignore"):
        logmod = (N + 1) * math.log(abs(base)) - float(gammaln(N + 1)) + N * np.log(t) - N * t
    return np.exp(logmod)


def moment_closed(curve: CurveSpec, N: int, r: int, x: float, allow_general: bool = False) -> complex:
    """``int_0^inf t**r K_N(t, x) dt = prod_{l=1}^r (1 + l/N) / (1 + i (x/N) c(N/x))**r``."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if r < 0 or (r > 2 and not allow_general):
        raise ValueError(f"moment order r={r} not in {{0, 1, 2}} (pass allow_general=True for r >= 3)")
    if r == 0:
        return 1.0 + 0j
    num = math.prod(1.0 + l / N for l in range(1, r + 1))
    den = complex(1.0, (x / N) * float(curve.c(N / x))) ** r
    return num / den


def truncation_point(N: int, floor: float = -60.0) -> float:
    """Smallest ``t > 1`` with ``N (ln t - t + 1) / 2 < floor``."""
    f = lambda t: 0.5 * N * (math.log(t) - t + 1.0) - floor
    hi = 2.0
    while f(hi) > 0:
        hi *= 2.0
    return optimize.brentq(f, 1.0, hi, xtol=1e-12)


def quad_complex(func, a: float, b: float, points, epsabs: float, epsrel: float = 1e-12, limit: int = 400) -> complex:
    """Adaptive Gauss-Kronrod (QUADPACK) on real and imaginary parts separately."""
    out = []
    for part in (np.real, np.imag):
        val, err, *info = integrate.quad(
            lambda s: float(part(func(s))), a, b, points=points,
            epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1,
        )
        if len(info) > 1 and err > 10 * epsabs:
            raise QuadratureError(f"quadrature did not converge: {info[1]}", estimate=err)
        out.append(val)
    return complex(out[0], out[1])


def _panel_points(N: int, t_cut: float):
    w = 1.0 / math.sqrt(N)
    pts = sorted({p for p in (1.0 - 6 * w, 1.0 - 2 * w, 1.0, 1.0 + 2 * w, 1.0 + 6 * w) if 0 < p < t_cut})
    return pts


def moment_quadrature(curve: CurveSpec, N: int, r: int, x: float, epsabs: float = 1e-10) -> complex:
    """Numerical ``int_0^inf t**r K_N(t, x) dt``, truncated where the kernel is below ``e**-60``."""
    if not 1 <= N <= 500:
        raise ValueError(f"moment quadrature supports 1 <= N <= 500, got {N}")
    _check_kernel_args(N, x)
    t_cut = truncation_point(N)
    f = lambda t: t**r * kernel_array(curve, N, t, x)
    return quad_complex(f, 0.0, t_cut, _panel_points(N, t_cut), epsabs=epsabs)


def tail_mass(curve: CurveSpec, N: int, x: float, delta: float, r: int = 0) -> float:
    """``int_{|t-1| >= delta} t**r |K_N(t, x)| dt``."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    f = lambda t: t**r * float(abs_kernel_array(curve, N, t, x))
    t_cut = max(truncation_point(N), 1.0 + delta + 1.0)
    lo, *_ = integrate.quad(f, 0.0, 1.0 - delta, epsabs=1e-14, limit=200)
    hi, *_ = integrate.quad(f, 1.0 + delta, t_cut, epsabs=1e-14, limit=200)
    return lo + hi
