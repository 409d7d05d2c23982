"""Post-Widder inversion from N-th derivatives of a Laplace transform on a curve.

    p_N(x) = (-1)**N / N! * g(N/x)**(N+1) * L^(N)(g(N/x))

with ``g(y) = y + i c(y)``.  On the real axis this is the classical formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy.special import gammaln

from .curves import CurveSpec, _panel_points, g, kernel_array, quad_complex, truncation_point
from .errors import NumericalError
from .logcx import LogComplex, from_complex, mul, pow_int, pow_real


@dataclass(frozen=True)
class LaplaceOracle:
    """``deriv(N, z)`` returns the N-th derivative of the transform at ``z`` as a LogComplex."""

    deriv: Callable[[int, complex], LogComplex]
    name: str = "custom"

    def __call__(self, N: int, z: complex) -> LogComplex:
        return self.deriv(N, z)


@dataclass(frozen=True)
class InversionResult:
    x: float
    N: int
    value: complex

    @property
    def real_part(self) -> float:
        return self.value.real


def exponential_oracle(lam: float = 1.0) -> LaplaceOracle:
    """``L(z) = lam / (lam + z)``; ``L^(N)(z) = (-1)**N N! lam (lam + z)**(-N-1)``."""
    if not lam > 0:
        raise ValueError(f"exponential rate must be positive, got {lam}")

    def deriv(N: int, z: complex) -> LogComplex:
        _check_deriv_args(N, z)
        lead = LogComplex(float(gammaln(N + 1)) + math.log(lam), math.pi * (N % 2))
        return mul(lead, pow_int(from_complex(lam + z), -(N + 1)))

    return LaplaceOracle(deriv, name=f"exp:{lam:g}")


def gamma_oracle(alpha: float, beta: float) -> LaplaceOracle:
    """``L(z) = (beta / (beta + z))**alpha``, principal branch."""
    if not (alpha > 0 and beta > 0):
        raise ValueError(f"gamma parameters must be positive, got alpha={alpha}, beta={beta}")

    def deriv(N: int, z: complex) -> LogComplex:
        _check_deriv_args(N, z)
        # beta**alpha * alpha (alpha+1) ... (alpha+N-1), sign (-1)**N
        log_lead = alpha * math.log(beta) + float(gammaln(alpha + N) - gammaln(alpha))
        lead = LogComplex(log_lead, math.pi * (N % 2))
        return mul(lead, pow_real(from_complex(beta + z), -(alpha + N)))

    return LaplaceOracle(deriv, name=f"gamma:{alpha:g}:{beta:g}")


def builtin_oracle(kind: str, *params: float) -> LaplaceOracle:
    """``builtin_oracle("exp", lam)`` or ``builtin_oracle("gamma", alpha, beta)``."""
    if kind in ("exp", "exponential"):
        return exponential_oracle(*params)
    if kind == "gamma":
        return gamma_oracle(*params)
    raise ValueError(f"unknown transform kind {kind!r}; expected 'exp' or 'gamma'")


def _check_deriv_args(N, z):
    if N < 0:
        raise ValueError(f"derivative order must be >= 0, got {N}")
    if complex(z).real < 0:
        raise ValueError(f"transform evaluated outside Re z >= 0: {z}")


def invert_log(oracle: LaplaceOracle, curve: CurveSpec, N: int, x: float) -> LogComplex:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    z = g(curve, N / x)
    if not z.real > 0:
        raise ValueError(f"g(N/x) = {z} is not in the right half-plane")
    prefactor = mul(pow_int(from_complex(z), N + 1), LogComplex(-float(gammaln(N + 1)), math.pi * (N % 2)))
    return mul(prefactor, oracle(N, z))


def invert(oracle: LaplaceOracle, curve: CurveSpec, N: int, x: float) -> InversionResult:
    """Generalised Post-Widder approximation ``p_N(x)``."""
    lv = invert_log(oracle, curve, N, x)
    try:
        value = lv.to_complex()
    except OverflowError as exc:
        raise NumericalError(f"p_N({x}) overflowed at N={N}: {exc}") from exc
    return InversionResult(x=float(x), N=int(N), value=value)


def invert_via_kernel(p: Callable[[float], float], curve: CurveSpec, N: int, x: float,
                      epsabs: float = 1e-9) -> complex:
    """``int_0^inf p(t x) K_N(t, x) dt`` by adaptive quadrature.

    Independent of any transform: uses the density itself.  ``p`` must be
    bounded and continuous on ``[0, inf)``.
    """
    if not 1 <= N <= 200:
        raise ValueError(f"kernel quadrature supports 1 <= N <= 200, got {N}")
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    t_cut = truncation_point(N)
    f = lambda t: p(t * x) * kernel_array(curve, N, t, x)
    return quad_complex(f, 0.0, t_cut, _panel_points(N, t_cut), epsabs=epsabs)
