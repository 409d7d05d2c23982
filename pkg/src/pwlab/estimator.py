"""Empirical Post-Widder estimator of the mixing density.

For a sample on the reduced scale (``sigma = 1``) and a point ``x > 0`` put
``u = sqrt(2N/x)`` and ``w = u - i mu``.  Then ``g(N/x) = (w**2 + mu**2)/2``,
``xi(g(N/x)) = u`` is real, and

    p_{n,N}(x) = (-1)**N / N! * g**(N+1) * mean_j exp(i u X_j) S_j
    S_j = sum_{k=1}^N (i X_j)**k (-1)**(N-k) w**(k-2N) F[N, k]

Each ``S_j`` is summed in log domain; the outer mean runs in ordinary complex
arithmetic after rescaling by the largest ``|S_j|``.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .bell import BellTable, build_table
from .errors import NumericalError
from .logcx import lsum_arrays
from .mixture import MixtureParams, Sample

logger = logging.getLogger(__name__)

_LOG_MAX = 709.78


@dataclass(frozen=True)
class EstimatorConfig:
    params: MixtureParams
    N: int
    x_grid: tuple
    take_real_part: bool = True

    def __post_init__(self):
        object.__setattr__(self, "x_grid", tuple(float(v) for v in np.atleast_1d(self.x_grid)))
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not self.x_grid or min(self.x_grid) <= 0:
            raise ValueError("all grid points must be positive")


@dataclass
class EstimateResult:
    x: np.ndarray
    p_hat: np.ndarray
    N: int
    n: int
    wall_time: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def p_hat_real(self) -> np.ndarray:
        return self.p_hat.real

    def to_dict(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "p_real": [float(v) for v in self.p_hat.real],
            "p_imag": [float(v) for v in self.p_hat.imag],
            "N": int(self.N),
            "n": int(self.n),
            "meta": {**self.meta, "wall_time": self.wall_time},
        }


def _point_log(X: np.ndarray, log_abs_x: np.ndarray, sign_x: np.ndarray, mu: float,
               N: int, x: float, log_f: np.ndarray):
    """Log-modulus and phase of ``p_{n,N}(x)`` for reduced data ``X``."""
    y = N / x
    u = math.sqrt(2.0 * y)
    w = complex(u, -mu)
    gz = complex(y, -mu * u)
    k = np.arange(1, N + 1)

    log_terms = k * log_abs_x[:, None] + ((k - 2 * N) * math.log(abs(w)) + log_f)
    # (i X)**k (-1)**(N-k) contributes whole quarter turns: k*sign(X) + 2(N-k)
    quarter = np.mod(k * sign_x[:, None] + 2 * (N - k), 4)
    phase = quarter * (math.pi / 2) + (k - 2 * N) * math.atan2(w.imag, w.real)
    inner_log, inner_arg = lsum_arrays(log_terms, phase, axis=1)

    outer_log, outer_arg = lsum_arrays(inner_log, inner_arg + u * X, axis=0)
    log_abs = (outer_log - math.log(X.size) + (N + 1) * math.log(abs(gz)) - float(gammaln(N + 1)))
    arg = outer_arg + (N + 1) * math.atan2(gz.imag, gz.real) + math.pi * (N % 2)
    return log_abs, arg


def _to_value(log_abs: float, arg: float, x: float, N: int) -> complex:
    if log_abs == -math.inf:
        return 0j
    if log_abs > _LOG_MAX:
        raise NumericalError(
            f"estimate overflowed at x={x:g} (log-modulus {log_abs:.4g}) with N={N}; "
            "use a smaller N or larger x"
        )
    return complex(math.exp(log_abs) * math.cos(arg), math.exp(log_abs) * math.sin(arg))


def estimate(sample: Sample, config: EstimatorConfig, bell: BellTable | None = None,
             threads: int = 1) -> EstimateResult:
    """Evaluate ``p_{n,N}`` on ``config.x_grid``.

    Data are rescaled to ``X / sigma`` with ``mu / sigma`` first; the mixing
    density is unchanged by this.
    """
    start = time.perf_counter()
    N = int(config.N)
    if bell is None:
        bell = build_table(N)
    if not bell.covers(N):
        raise ValueError(f"Bell table (n_max={bell.n_max}) does not cover N={N}")
    reduced = config.params.reduced()
    X = np.asarray(sample.values if isinstance(sample, Sample) else sample, dtype=float) / config.params.sigma
    with np.errstate(divide="ignore"):
        log_abs_x = np.log(np.abs(X))
    sign_x = np.where(X < 0, -1, 1)
    log_f = bell.row(N)

    def one(xv):
        return _to_value(*_point_log(X, log_abs_x, sign_x, reduced.mu, N, xv, log_f), xv, N)

    grid = list(config.x_grid)
    if threads > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, grid))
    else:
        values = [one(xv) for xv in grid]
    return EstimateResult(
        x=np.array(grid), p_hat=np.array(values, dtype=complex), N=N, n=X.size,
        wall_time=time.perf_counter() - start,
        meta={"mu": config.params.mu, "sigma": config.params.sigma},
    )


@dataclass(frozen=True)
class NSelector:
    """Rule for the number of terms as a function of sample size.

    ``subexponential`` applies when ``E|X|**(2k) <= A**k k**k`` and uses
    ``N = (ln n - 2 rho ln ln n) / ln(A C)``.  ``heavy`` applies when
    ``E|X|**(2k) <= A**k k**(b k)`` with ``b > 1``.  ``rho`` is the bias
    order ``p_N - p = O(N**-rho)``; ``C`` is the growth constant of the
    variance bound, which has no closed form and must be tuned.
    """

    rule: str = "subexponential"
    A: float = 2.0
    C: float = 2.0
    b: float = 2.0
    rho: float = 1.0

    def __post_init__(self):
        if self.rule not in ("subexponential", "heavy"):
            raise ValueError(f"unknown selection rule {self.rule!r}")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.rule == "subexponential" and not (self.A > 0 and self.C > 1 and self.A * self.C > 1):
            raise ValueError("subexponential rule needs A > 0, C > 1 and A*C > 1")
        if self.rule == "heavy" and not self.b > 1:
            raise ValueError("heavy-tailed rule needs b > 1")


def select_n_raw(selector: NSelector, n: int) -> float:
    if n < 3:
        raise ValueError(f"N selection needs n >= 3, got {n}")
    ln_n = math.log(n)
    rho = selector.rho
    if selector.rule == "subexponential":
        lac = math.log(selector.A * selector.C)
        return ln_n / lac - (2 * rho / lac) * math.log(ln_n)
    b1 = selector.b - 1
    s = 2 * rho + ln_n
    return s / (b1 * math.log(s / b1)) - 2 * rho / b1


def select_n(selector: NSelector, n: int) -> int:
    """Rounded (half up) and clamped at 1."""
    raw = select_n_raw(selector, n)
    if not math.isfinite(raw):
        raise ValueError(f"N selection produced a non-finite value for n={n}")
    N = math.floor(raw + 0.5)
    if N < 1:
        logger.warning("selected N=%.4g for n=%d is below 1; clamped to 1", raw, n)
        N = 1
    return N


class PostWidderDensityEstimator(BaseEstimator):
    """Mixing-density estimator for ``X = sigma sqrt(xi) Z + mu xi``.

    ``n_terms`` is either a fixed ``N`` or an :class:`NSelector`, in which case
    ``N`` is chosen from the sample size at fit time.

    >>> est = PostWidderDensityEstimator(mu=0.1, sigma=1.0, n_terms=10).fit(X)
    >>> est.predict([0.5, 1.0, 2.0])
    """

    def __init__(self, mu=0.0, sigma=1.0, n_terms=10, take_real_part=True):
        self.mu = mu
        self.sigma = sigma
        self.n_terms = n_terms
        self.take_real_part = take_real_part

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=False, dtype=np.float64)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError(f"expected a single feature column, got shape {X.shape}")
            X = X[:, 0]
        self.params_ = MixtureParams(float(self.mu), float(self.sigma))
        if isinstance(self.n_terms, NSelector):
            if X.size < 3:
                raise ValueError("automatic N selection needs at least 3 samples")
            self.n_terms_ = select_n(self.n_terms, X.size)
        else:
            self.n_terms_ = int(self.n_terms)
            if self.n_terms_ < 1:
                raise ValueError(f"n_terms must be >= 1, got {self.n_terms}")
        self.sample_ = Sample(X)
        self.bell_table_ = build_table(self.n_terms_)
        self.n_samples_ = X.size
        return self

    def estimate(self, x_grid) -> EstimateResult:
        check_is_fitted(self, "sample_")
        x = np.ravel(check_array(np.atleast_1d(x_grid), ensure_2d=False, dtype=np.float64))
        config = EstimatorConfig(self.params_, self.n_terms_, tuple(x), self.take_real_part)
        return estimate(self.sample_, config, self.bell_table_)

    def predict(self, x_grid):
        """Density estimate on ``x_grid`` (real part unless ``take_real_part=False``)."""
        res = self.estimate(x_grid)
        return res.p_hat_real if self.take_real_part else res.p_hat
