"""Normal variance-mean mixtures ``X = sigma sqrt(xi) Z + mu xi``.

Sampling uses numpy's PCG64 bit generator seeded through ``SeedSequence``;
a replicate ``index`` is appended to the seed entropy so every replicate owns
an independent, order-free stream.  Within a draw the mixing variables are
generated first, then the normals.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate, stats
from scipy.special import gammaln, ndtr

from .errors import QuadratureError, UsageError
from .inversion import LaplaceOracle, exponential_oracle, gamma_oracle


@dataclass(frozen=True)
class MixtureParams:
    mu: float
    sigma: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise ValueError("mixture parameters must be finite")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def reduced(self) -> "MixtureParams":
        """Same model on the scale ``X / sigma``."""
        return MixtureParams(self.mu / self.sigma, 1.0)


@dataclass(frozen=True)
class MixingLaw:
    """Built-in mixing distribution: ``exp:rate`` or ``gamma:shape:rate``."""

    kind: str
    shape: float = 1.0
    rate: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exp", "gamma"):
            raise ValueError(f"unknown mixing law {self.kind!r}")
        if not (self.shape > 0 and self.rate > 0):
            raise ValueError("mixing law parameters must be positive")

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "MixingLaw":
        return cls("exp", 1.0, rate)

    @classmethod
    def gamma(cls, shape: float, rate: float) -> "MixingLaw":
        return cls("gamma", shape, rate)

    @classmethod
    def parse(cls, text: str) -> "MixingLaw":
        parts = text.split(":")
        try:
            nums = [float(p) for p in parts[1:]]
        except ValueError:
            raise UsageError(f"malformed mixing law {text!r}; use exp:RATE or gamma:SHAPE:RATE") from None
        if parts[0] in ("exp", "exponential") and len(nums) <= 1:
            return cls.exponential(*nums)
        if parts[0] == "gamma" and len(nums) == 2:
            return cls.gamma(*nums)
        raise UsageError(f"malformed mixing law {text!r}; use exp:RATE or gamma:SHAPE:RATE")

    @property
    def label(self) -> str:
        if self.kind == "exp":
            return f"exp:{self.rate:g}"
        return f"gamma:{self.shape:g}:{self.rate:g}"

    def density(self, s):
        return stats.gamma.pdf(s, self.shape, scale=1.0 / self.rate)[()]

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "exp":
            return rng.exponential(1.0 / self.rate, size=n)
        return rng.gamma(self.shape, 1.0 / self.rate, size=n)

    def laplace_oracle(self) -> LaplaceOracle:
        if self.kind == "exp":
            return exponential_oracle(self.rate)
        return gamma_oracle(self.shape, self.rate)


@dataclass
class Sample:
    values: np.ndarray
    seed: int | None = None
    params_used: MixtureParams | None = None
    mixing_label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.values.size == 0:
            raise ValueError("sample is empty")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sample contains non-finite values")

    def __len__(self):
        return self.values.size


def make_rng(seed: int, index: int | None = None) -> np.random.Generator:
    entropy = [int(seed)] if index is None else [int(seed), int(index)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def sample_mixture(params: MixtureParams, mixing: MixingLaw, n: int, seed: int,
                   index: int | None = None) -> Sample:
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    rng = make_rng(seed, index)
    xi = mixing.draw(rng, n)
    z = rng.standard_normal(n)
    x = params.sigma * np.sqrt(xi) * z + params.mu * xi
    return Sample(x, seed=seed, params_used=params, mixing_label=mixing.label)


def psi(params: MixtureParams, u):
    """Characteristic exponent: ``Phi(u) = L(psi(u))``."""
    u = np.asarray(u, dtype=float)
    return (-1j * u * params.mu + u**2 * params.sigma**2 / 2)[()]


def xi(params: MixtureParams, z: complex) -> complex:
    """Inverse of :func:`psi` on the curve, principal square-root branch.

    For ``sigma = 1`` this is ``sqrt(2z - mu**2) + i mu``.
    """
    mu, s2 = params.mu, params.sigma**2
    inner = 2 * s2 * complex(z) - mu**2
    if inner.imag == 0 and inner.real <= 0:
        raise ValueError(f"2 sigma^2 z - mu^2 = {inner.real} lies on the square-root branch cut")
    return (cmath.sqrt(inner) + 1j * mu) / s2


def emp_fourier_deriv(sample, k: int, u: float) -> complex:
    """k-th derivative of the empirical characteristic function at ``u``."""
    if k < 0:
        raise ValueError("derivative order must be >= 0")
    x = sample.values if isinstance(sample, Sample) else np.asarray(sample, dtype=float)
    return complex(np.mean((1j * x) ** k * np.exp(1j * u * x)))


def _v_integral(fn, epsabs):
    # substitution s = v**2 removes the 1/sqrt(s) endpoint singularity
    val, err, *info = integrate.quad(fn, 0.0, np.inf, epsabs=epsabs, epsrel=1e-11, limit=400, full_output=1)
    if len(info) > 1 and err > 100 * epsabs:
        raise QuadratureError(f"mixture quadrature failed: {info[1]}", estimate=err)
    return val


def mixture_density(params: MixtureParams, mixing_density, x: float, epsabs: float = 1e-10) -> float:
    """``q(x) = int_0^inf (sigma sqrt s)^-1 nu((x - s mu)/(sigma sqrt s)) p(s) ds``."""
    mu, sigma = params.mu, params.sigma
    c = 2.0 / (sigma * math.sqrt(2 * math.pi))

    def fn(v):
        if v == 0.0:
            return 0.0 if x != 0 else c * float(mixing_density(0.0))
        s = v * v
        return c * math.exp(-0.5 * ((x - s * mu) / (sigma * v)) ** 2) * float(mixing_density(s))

    return _v_integral(fn, epsabs)


def mixture_cdf(params: MixtureParams, mixing_density, x: float, epsabs: float = 1e-11) -> float:
    """``P(X <= x)`` via ``int p(s) Phi((x - s mu)/(sigma sqrt s)) ds``."""
    mu, sigma = params.mu, params.sigma

    def fn(v):
        if v == 0.0:
            return 0.0
        s = v * v
        return 2.0 * v * float(ndtr((x - s * mu) / (sigma * v))) * float(mixing_density(s))

    return _v_integral(fn, epsabs)


def bin_probabilities(params: MixtureParams, mixing_density, edges) -> np.ndarray:
    cdf = np.array([mixture_cdf(params, mixing_density, e) for e in edges])
    return np.diff(cdf)


def abs_moment_exp_mixing(k: int, log: bool = False) -> float:
    """``E|X|**(2k) = 2**k / sqrt(pi) Gamma(1+k) Gamma(k+1/2)`` for mu = 0, sigma = 1, Exp(1) mixing.

    Equals ``(2k)! / 2**k``.  With ``log=True`` the natural log is returned,
    which stays finite for any ``k``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    lv = k * math.log(2.0) - 0.5 * math.log(math.pi) + float(gammaln(1 + k) + gammaln(k + 0.5))
    if log:
        return lv
    if lv > 709.78:
        raise OverflowError(f"E|X|^{2 * k} overflows; use log=True")
    return math.exp(lv)


def write_sample(sample: Sample, path, meta: dict | None = None) -> None:
    header = dict(meta or {})
    header.setdefault("seed", sample.seed)
    if sample.params_used is not None:
        header.setdefault("mu", sample.params_used.mu)
        header.setdefault("sigma", sample.params_used.sigma)
    if sample.mixing_label:
        header.setdefault("mixing", sample.mixing_label)
    lines = ["# " + json.dumps(header, sort_keys=True)]
    lines.extend(repr(float(v)) for v in sample.values)
    Path(path).write_text("\n".join(lines) + "\n")


def read_sample(path) -> Sample:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read samples file {path}: {exc.strerror}") from None
    meta, values = {}, []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if lineno == 1:
                try:
                    meta = json.loads(line[1:])
                except json.JSONDecodeError:
                    meta = {}
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not values:
        raise UsageError(f"{path}: no sample values found")
    try:
        return Sample(np.array(values), seed=meta.get("seed"), mixing_label=meta.get("mixing", ""), meta=meta)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
