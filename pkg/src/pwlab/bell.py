"""Coefficients ``F[N, k] = B_{N,k}(a_1, ..., a_{N-k+1})``.

The Bell arguments are ``a_l = (2(l-1))! / (2**(l-1) (l-1)!)``, i.e. the
double factorials ``(2l-3)!!`` that show up as derivative magnitudes of
``sqrt(2z - mu**2)``.  Everything is stored as natural logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln, logsumexp

N_MAX_LIMIT = 1000
BRUTE_FORCE_LIMIT = 12


def bell_argument(l: int) -> float:
    """``ln a_l`` with ``a_l = (2(l-1))! / (2**(l-1) (l-1)!)``."""
    if l < 1:
        raise ValueError(f"bell argument index must be >= 1, got {l}")
    m = l - 1
    return float(gammaln(2 * m + 1) - m * math.log(2.0) - gammaln(m + 1))


@dataclass(frozen=True)
class BellTable:
    n_max: int
    log_f: np.ndarray  # shape (n_max + 1, n_max + 1); -inf outside 1 <= k <= N

    def __post_init__(self):
        self.log_f.setflags(write=False)

    def row(self, N: int) -> np.ndarray:
        """``ln F[N, k]`` for ``k = 1..N``."""
        if not 1 <= N <= self.n_max:
            raise ValueError(f"N={N} outside table range 1..{self.n_max}")
        return self.log_f[N, 1 : N + 1]

    def __getitem__(self, key) -> float:
        N, k = key
        if not (1 <= k <= N <= self.n_max):
            raise IndexError(f"(N={N}, k={k}) outside table")
        return float(self.log_f[N, k])

    def covers(self, N: int) -> bool:
        return 1 <= N <= self.n_max


def build_table(n_max: int) -> BellTable:
    """Fill ``ln B_{N,k}(a)`` with the standard partial-Bell recurrence.

    B[N, k] = sum_{i=1}^{N-k+1} C(N-1, i-1) a_i B[N-i, k-1]

    All summands are positive, so the log-sum-exp loses nothing to
    cancellation.
    """
    n_max = int(n_max)
    if not 1 <= n_max <= N_MAX_LIMIT:
        raise ValueError(f"n_max must be in 1..{N_MAX_LIMIT}, got {n_max}")
    log_a = np.array([-np.inf] + [bell_argument(l) for l in range(1, n_max + 1)])
    lg = gammaln(np.arange(n_max + 1) + 1.0)  # ln m!

    B = np.full((n_max + 1, n_max + 1), -np.inf)
    B[0, 0] = 0.0
    for N in range(1, n_max + 1):
        i = np.arange(1, N + 1)
        log_binom = lg[N - 1] - lg[i - 1] - lg[N - i]
        w = log_binom + log_a[1 : N + 1]  # indexed by i
        # terms[i-1, k-1] = w_i + B[N-i, k-1]  for k = 1..N
        prev = B[N - i, :N]  # rows N-i, columns k-1 = 0..N-1
        terms = w[:, None] + prev
        B[N, 1 : N + 1] = logsumexp(terms, axis=0)
    return BellTable(n_max=n_max, log_f=B)


def _partitions(total: int, parts: int, max_part: int):
    """Non-increasing integer partitions of ``total`` into exactly ``parts`` parts."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    lo = -(-total // parts)  # largest part is at least ceil(total/parts)
    for first in range(min(total - (parts - 1), max_part), lo - 1, -1):
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def brute_force_f(N: int, k: int) -> float:
    """``ln F[N, k]`` by enumerating multi-indices in exact integer arithmetic."""
    if N > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force enumeration limited to N <= {BRUTE_FORCE_LIMIT}")
    if not 1 <= k <= N:
        raise ValueError(f"need 1 <= k <= N, got N={N}, k={k}")
    a = [None] + [math.factorial(2 * (l - 1)) // (2 ** (l - 1) * math.factorial(l - 1))
                  for l in range(1, N + 1)]
    total = Fraction(0)
    for part in _partitions(N, k, N):
        mult = {}
        for l in part:
            mult[l] = mult.get(l, 0) + 1
        denom = 1
        num = math.factorial(N)
        for l, kl in mult.items():
            denom *= math.factorial(kl) * math.factorial(l) ** kl
            num *= a[l] ** kl
        total += Fraction(num, denom)
    assert total.denominator == 1
    return math.log(int(total))
