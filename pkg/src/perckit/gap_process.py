"""No-k-gap probabilities of independent event sequences.

Events A_1, ..., A_n occur independently with probabilities u_i; the
sequence has a k-gap when some k consecutive events all fail.  Writing
rho_n for the probability of no k-gap among the first n events,
conditioning on the last occurring event gives the k-term recurrence

    rho_{n+k} = sum_{i=1}^{k} rho_{n+k-i} u_{n+k-i+1}
                prod_{j=n+k-i+2}^{n+k} (1 - u_j),

with rho_0 = ... = rho_{k-1} = 1.  For monotone u the two-sided product
bounds hold:

    prod_{i=1}^{n} f_k(1-u_i)  <=  rho_n  <=  prod_{i=k}^{n} f_k(1-u_i),

the lower for increasing or decreasing u, the upper for increasing u
(an empty upper product, n < k, is 1).

The parametric family u_i = 1 - e^{-i s} drives everything percolation
related; its n -> infinity limit P(A_k) is bracketed rigorously here, and
satisfies exp(-lambda_k/s) <= P(A_k) <= s^{-(2k-1)/(2k)} exp(-lambda_k/s)
up to the multiplicative 1+o(1) of the upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .special_fn import fk_eval, gk_eval, lambda_k

__all__ = [
    "GapProcess",
    "RhoTrace",
    "SandwichBounds",
    "PakResult",
    "MonotonicityError",
    "rho_exact",
    "rho_sandwich",
    "prob_ak",
    "prob_ak_bounds",
    "prob_ak_log_bounds",
    "rho_montecarlo",
    "lower_bound_conjecture_gap",
]

# Fixed chunk width for Monte Carlo trial streams; part of the determinism
# contract (trial t always lives in chunk t // _MC_CHUNK of the keyed
# Philox sequence, whatever the scheduling).
_MC_CHUNK = 4096


class MonotonicityError(ValueError):
    """A product bound was requested for a sequence that does not support it."""


@dataclass(frozen=True)
class GapProcess:
    """A finite or s-parameterized sequence of independent event probabilities.

    Exactly one of `u` (explicit probabilities u_1..u_n) or `s` (the
    parametric family u_i = 1 - e^{-i s}) is set.  Monotonicity is computed
    from the data, never asserted by the caller.
    """

    k: int
    u: Optional[tuple] = None
    s: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError("k must be a positive integer")
        if (self.u is None) == (self.s is None):
            raise ValueError("exactly one of u (explicit) or s (parametric) is required")
        if self.u is not None:
            vals = tuple(float(v) for v in self.u)
            if any(v < 0.0 or v > 1.0 for v in vals):
                raise ValueError("all u_i must lie in [0, 1]")
            object.__setattr__(self, "u", vals)
        else:
            if not (self.s > 0):
                raise ValueError("s must be positive")

    @classmethod
    def explicit(cls, k: int, u: Sequence[float]) -> "GapProcess":
        return cls(k=k, u=tuple(u))

    @classmethod
    def parametric(cls, k: int, s: float) -> "GapProcess":
        return cls(k=k, s=float(s))

    @property
    def is_parametric(self) -> bool:
        return self.s is not None

    def probabilities(self, n: int) -> np.ndarray:
        """u_1..u_n as an array (index 0 holds u_1)."""
        if self.is_parametric:
            i = np.arange(1, n + 1, dtype=float)
            return -np.expm1(-i * self.s)
        if n > len(self.u):
            raise ValueError(f"process holds {len(self.u)} probabilities, {n} requested")
        return np.asarray(self.u[:n], dtype=float)

    def log_u(self, n: int) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.probabilities(n))

    def log_one_minus_u(self, n: int) -> np.ndarray:
        if self.is_parametric:
            # 1 - u_i = e^{-i s} exactly
            return -self.s * np.arange(1, n + 1, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log1p(-self.probabilities(n))

    def monotonicity(self, n: Optional[int] = None) -> str:
        """'increasing', 'decreasing', or 'neither'; ties count as monotone."""
        if self.is_parametric:
            return "increasing"
        u = self.probabilities(n if n is not None else len(self.u))
        inc = bool(np.all(u[1:] >= u[:-1]))
        dec = bool(np.all(u[1:] <= u[:-1]))
        if inc:
            return "increasing"
        if dec:
            return "decreasing"
        return "neither"


@dataclass(frozen=True)
class RhoTrace:
    """rho_0..rho_n in linear and log space.

    The initial k values are exactly 1; the sequence is nonincreasing.
    """

    k: int
    values: np.ndarray
    log_values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "log_values", np.asarray(self.log_values, dtype=float))

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def final(self) -> float:
        return float(self.values[-1])

    @property
    def log_final(self) -> float:
        return float(self.log_values[-1])


def _logsumexp(terms):
    m = max(terms)
    if m == -math.inf:
        return -math.inf
    return m + math.log(sum(math.exp(t - m) for t in terms))


def rho_exact(process: GapProcess, n: int) -> RhoTrace:
    """rho_0..rho_n by the k-term recurrence, in linear and log space.

    Linear values are exact up to float rounding; log values stay
    meaningful long after the linear ones underflow.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    k = process.k
    u = process.probabilities(n)
    log_u = process.log_u(n)
    log_1mu = process.log_one_minus_u(n)

    vals = np.ones(n + 1)
    logs = np.zeros(n + 1)
    for m in range(k, n + 1):
        tot = 0.0
        prod = 1.0
        log_terms = []
        log_prod = 0.0
        # term i: rho_{m-i} * u_{m-i+1} * prod_{j=m-i+2}^{m} (1-u_j)
        for i in range(1, k + 1):
            if i > 1:
                prod *= 1.0 - u[m - i + 1]  # u_{m-i+2} is index m-i+1
                log_prod += log_1mu[m - i + 1]
            tot += vals[m - i] * u[m - i] * prod
            log_terms.append(logs[m - i] + log_u[m - i] + log_prod)
        vals[m] = tot
        logs[m] = _logsumexp(log_terms)
    return RhoTrace(k=k, values=vals, log_values=logs)


@dataclass(frozen=True)
class SandwichBounds:
    """The two-sided f_k product bounds around rho_n."""

    lower: float
    upper: float
    log_lower: float
    log_upper: float


def rho_sandwich(process: GapProcess, n: int) -> SandwichBounds:
    """(prod_{i=1}^{n} f_k(1-u_i), prod_{i=k}^{n} f_k(1-u_i)).

    The lower bound needs u monotone (either direction); the upper bound
    needs u increasing.  Violations raise MonotonicityError naming the
    bound that loses its guarantee.
    """
    k = process.k
    mono = process.monotonicity(n)
    if mono == "neither":
        raise MonotonicityError(
            "probabilities are not monotone: both the lower bound "
            "(needs increasing or decreasing u) and the upper bound "
            "(needs increasing u) are invalidated"
        )
    if mono == "decreasing":
        raise MonotonicityError(
            "probabilities are decreasing: the upper product bound requires "
            "increasing u (the lower bound alone remains valid)"
        )
    return _sandwich_unchecked(process, n)


def rho_lower_product(process: GapProcess, n: int) -> SandwichBounds:
    """Lower product bound only, valid for increasing or decreasing u."""
    if process.monotonicity(n) == "neither":
        raise MonotonicityError(
            "probabilities are not monotone: the lower product bound is invalidated"
        )
    return _sandwich_unchecked(process, n)


def _sandwich_unchecked(process: GapProcess, n: int) -> SandwichBounds:
    k = process.k
    u = process.probabilities(n)
    f = np.asarray(fk_eval(k, 1.0 - u)) if n else np.ones(0)
    with np.errstate(divide="ignore"):
        log_f = np.log(f)
    log_lower = float(np.sum(log_f))
    log_upper = float(np.sum(log_f[k - 1 :])) if n >= k else 0.0
    return SandwichBounds(
        lower=float(np.exp(log_lower)) if n else 1.0,
        upper=float(np.exp(log_upper)),
        log_lower=log_lower,
        log_upper=log_upper,
    )


@lru_cache(maxsize=None)
def _tail_constant_ok(k: int) -> bool:
    # g_k(z) <= 2 e^{-kz} for z >= 1, checked once per k on a dense grid
    z = np.linspace(1.0, 40.0 / k + 1.0, 400)
    return bool(np.all(gk_eval(k, z) <= 2.0 * np.exp(-k * z)))


@dataclass(frozen=True)
class PakResult:
    """A rigorous bracket around P(A_k) = lim rho_n for u_i = 1 - e^{-i s}.

    `value` is the geometric midpoint of the bracket (0.0 if it underflows
    double precision); `log_value` is always meaningful.  `error_bound` is
    the half-width of the log-bracket, i.e. a relative half-width.
    """

    value: float
    error_bound: float
    log_value: float
    log_lower: float
    log_upper: float
    n_terms: int


def prob_ak(k: int, s: float, tol: float = 1e-8, max_terms: int = 20_000_000) -> PakResult:
    """Bracket P(A_k) for the parametric family to relative width <= tol.

    Runs the exact recurrence to N and closes the tail with

        rho_N * u_N * exp(-sum_{j>N} g_k(js))  <=  P(A_k)  <=  rho_N.

    The lower bracket is rigorous: a k-gap straddling index N would need
    A_N to fail, so P(A_k) >= P(no gap in 1..N and A_N occurs) * P(fresh
    suffix has no gap); the first factor is >= rho_N u_N by the Harris
    inequality (both events increasing), the second is bounded below by the
    f_k product of the suffix.  N is chosen so that the tail sum and the
    u_N correction each stay under tol/4, using g_k(z) <= 2 e^{-kz} for
    z >= 1 (verified numerically per k).
    """
    if s <= 0:
        raise ValueError("s must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not _tail_constant_ok(k):
        raise ArithmeticError(f"tail bound g_{k}(z) <= 2 e^(-kz) failed verification")

    ks = k * s
    # 2 e^{-ks(N+1)} / (1 - e^{-ks}) <= tol/4
    n_tail = math.log(8.0 / (tol * -math.expm1(-ks))) / ks
    n_un = math.log(4.0 / tol) / s  # e^{-Ns} <= tol/4
    n = int(math.ceil(max(n_tail, n_un, 1.0 / s, k + 1)))
    if n > max_terms:
        raise ValueError(f"tol {tol} at s={s} needs N={n} > budget {max_terms}")

    process = GapProcess.parametric(k, s)
    log_rho_n = rho_exact(process, n).log_final

    # tail sum, overestimated (only lowers the lower bracket): numeric part
    # to M, then the geometric remainder bound
    m_stop = n + int(math.ceil(45.0 / ks)) + 1
    j = np.arange(n + 1, m_stop + 1, dtype=float)
    tail = float(np.sum(gk_eval(k, j * s)))
    tail += 2.0 * math.exp(-ks * (m_stop + 1)) / -math.expm1(-ks)

    log_un = float(np.log(-np.expm1(-n * s)))
    log_lower = log_rho_n + log_un - tail
    log_upper = log_rho_n
    log_mid = 0.5 * (log_lower + log_upper)
    half = 0.5 * (log_upper - log_lower)
    return PakResult(
        value=float(np.exp(log_mid)),
        error_bound=half,
        log_value=log_mid,
        log_lower=log_lower,
        log_upper=log_upper,
        n_terms=n,
    )


def prob_ak_bounds(k: int, s: float) -> tuple:
    """The theorem's (lower, upper) = (e^{-lambda_k/s}, s^{-(2k-1)/2k} e^{-lambda_k/s}).

    Linear-space values; they underflow for small s, see prob_ak_log_bounds.
    """
    lo, hi = prob_ak_log_bounds(k, s)
    return math.exp(lo) if lo > -745 else 0.0, math.exp(hi) if hi > -745 else 0.0


def prob_ak_log_bounds(k: int, s: float) -> tuple:
    if s <= 0:
        raise ValueError("s must be positive")
    lam = lambda_k(k)
    log_lower = -lam / s
    log_upper = -lam / s - (2.0 * k - 1.0) / (2.0 * k) * math.log(s)
    return log_lower, log_upper


def _trial_chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(chunk))


def rho_montecarlo(process: GapProcess, n: int, trials: int, seed: int) -> tuple:
    """Monte Carlo estimate of rho_n; returns (estimate, stderr).

    Bernoulli sequences are drawn from counter-based Philox streams in
    fixed-size chunks keyed by (seed, chunk index), so the draw for trial t
    never depends on scheduling.  The aggregate is an integer success
    count; estimate = count / trials.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 0:
        raise ValueError("n must be nonnegative")
    k = process.k
    u = process.probabilities(n)
    count = 0
    done = 0
    chunk = 0
    while done < trials:
        take = min(_MC_CHUNK, trials - done)
        rng = _trial_chunk_rng(seed, chunk)
        draws = rng.random((take, n)) if n else np.zeros((take, 0))
        fail = draws >= u  # event i fails with probability 1 - u_i
        run = np.zeros(take, dtype=np.int32)
        gap = np.zeros(take, dtype=bool)
        for j in range(n):
            run = np.where(fail[:, j], run + 1, 0)
            gap |= run >= k
        count += int(np.sum(~gap))
        done += take
        chunk += 1
    est = count / trials
    return est, math.sqrt(est * (1.0 - est) / trials)


def lower_bound_conjecture_gap(k: int, u: Sequence[float]) -> float:
    """rho_n - prod f_k(1-u_i) for an arbitrary (possibly non-monotone) u.

    Fuzzing hook for the conjecture that the lower product bound needs no
    monotonicity; a negative return is a counterexample.  Exploratory only,
    nothing in the library assumes the conjecture.
    """
    process = GapProcess.explicit(k, u)
    n = len(process.u)
    rho = rho_exact(process, n).final
    return rho - _sandwich_unchecked(process, n).lower
