"""Exact truncated q-series arithmetic and partitions without k-sequences.

Everything here is integer-exact modulo q^(N+1): Python ints as
coefficients, schoolbook multiplication that truncates (never silently
extends the order), and Newton-free power-series inversion for series with
unit constant term.

The headline identities:

  * G_k(q) = sum_n p_k(n) q^n, where p_k(n) counts partitions of n with no
    k consecutive integers among the parts, equals Andrews' double series

        (1/(q;q)_inf) sum_{r,s>=0} (-1)^s
            q^{binom(k+1,2)(s+r)^2 + (k+1) binom(r+1,2)}
            / ((q^k;q^k)_s (q^{k+1};q^{k+1})_r).

  * G_2(q) = ((-q^3;q^3)_inf / (q^2;q^2)_inf) * chi(q) with chi one of
    Ramanujan's third-order mock theta functions,
    chi(q) = 1 + sum_{n>=1} q^{n^2} / prod_{j=1}^{n} (1 - q^j + q^{2j}).

Pochhammer convention: (a;q)_n = prod_{j=0}^{n-1} (1 - a q^j), so
(q^k;q^k)_s = prod_{j=1}^{s} (1 - q^{kj}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

__all__ = [
    "IntSeries",
    "PartitionTable",
    "partition_count",
    "partition_no_ksequences",
    "pochhammer",
    "andrews_gk_series",
    "mock_theta_chi",
    "euler_product_inverse",
    "pak_bridge_residual",
]


@dataclass(frozen=True)
class IntSeries:
    """A power series in q truncated at order N, with exact int coefficients."""

    coeffs: tuple
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("truncation order must be nonnegative")
        c = tuple(int(v) for v in self.coeffs)
        if len(c) < self.order + 1:
            c = c + (0,) * (self.order + 1 - len(c))
        elif len(c) > self.order + 1:
            c = c[: self.order + 1]
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int], order: int) -> "IntSeries":
        return cls(coeffs=tuple(coeffs), order=order)

    @classmethod
    def one(cls, order: int) -> "IntSeries":
        return cls(coeffs=(1,), order=order)

    @classmethod
    def monomial(cls, exponent: int, order: int, coeff: int = 1) -> "IntSeries":
        c = [0] * (order + 1)
        if 0 <= exponent <= order:
            c[exponent] = coeff
        return cls(coeffs=tuple(c), order=order)

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    def _check_order(self, other: "IntSeries"):
        if self.order != other.order:
            raise ValueError("operands have different truncation orders")

    def __add__(self, other: "IntSeries") -> "IntSeries":
        self._check_order(other)
        return IntSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.order)

    def __sub__(self, other: "IntSeries") -> "IntSeries":
        self._check_order(other)
        return IntSeries(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.order)

    def __neg__(self) -> "IntSeries":
        return IntSeries(tuple(-a for a in self.coeffs), self.order)

    def __mul__(self, other) -> "IntSeries":
        if isinstance(other, int):
            return IntSeries(tuple(a * other for a in self.coeffs), self.order)
        self._check_order(other)
        n = self.order
        out = [0] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs[: n + 1 - i]):
                if b:
                    out[i + j] += a * b
        return IntSeries(tuple(out), n)

    __rmul__ = __mul__

    def shift(self, e: int) -> "IntSeries":
        """Multiply by q^e (truncating)."""
        if e < 0:
            raise ValueError("shift exponent must be nonnegative")
        return IntSeries((0,) * e + self.coeffs[: self.order + 1 - e], self.order)

    def inverse(self) -> "IntSeries":
        """Multiplicative inverse modulo q^(N+1); requires constant term 1."""
        if self.coeffs[0] != 1:
            raise ValueError("series inversion requires constant term 1")
        n = self.order
        b = [0] * (n + 1)
        b[0] = 1
        for m in range(1, n + 1):
            acc = 0
            for j in range(1, m + 1):
                if self.coeffs[j]:
                    acc += self.coeffs[j] * b[m - j]
            b[m] = -acc
        return IntSeries(tuple(b), n)

    def evaluate(self, q: float) -> float:
        """Float evaluation of the truncated polynomial (Horner)."""
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc


@dataclass(frozen=True)
class PartitionTable:
    """p_k(0)..p_k(N); k = 0 encodes the unrestricted p(n)."""

    k: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if self.values[0] != 1:
            raise ValueError("p(0) must be 1")

    def __getitem__(self, n: int) -> int:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def as_series(self) -> IntSeries:
        return IntSeries(self.values, self.order)


def partition_count(n_max: int) -> PartitionTable:
    """Unrestricted partition numbers p(0)..p(n_max), exact."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    p = [0] * (n_max + 1)
    p[0] = 1
    for part in range(1, n_max + 1):
        for n in range(part, n_max + 1):
            p[n] += p[n - part]
    return PartitionTable(k=0, values=tuple(p))


def partition_no_ksequences(k: int, n_max: int) -> PartitionTable:
    """p_k(0)..p_k(n_max): partitions with no k consecutive integers as parts.

    DP over part values 1..n_max; the state is the length of the current
    run of consecutive values used (capped at k-1, since reaching k is
    forbidden).  Within one value the multiplicity loop is the usual
    unbounded-knapsack self-reference, so the whole table costs
    O(n_max^2 k) exact-integer additions.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    # f[r][n]: partitions of n from values < v with run of trailing
    # consecutive used values r (r in 0..k-1)
    f = [[0] * (n_max + 1) for _ in range(k)]
    f[0][0] = 1
    for v in range(1, n_max + 1):
        g = [[0] * (n_max + 1) for _ in range(k)]
        for r in range(k):
            row = f[r]
            dest = g[0]
            for n in range(n_max + 1):
                if row[n]:
                    dest[n] += row[n]  # v unused: run resets
        # v used at least once: run r -> r+1, must stay < k
        for r in range(k - 1):
            src = f[r]
            dest = g[r + 1]
            for n in range(v, n_max + 1):
                acc = src[n - v] + (dest[n - v] if n - v >= v else 0)
                if acc:
                    dest[n] += acc
        f = g
    return PartitionTable(k=k, values=tuple(sum(f[r][n] for r in range(k)) for n in range(n_max + 1)))


def pochhammer(
    a_exponent: int,
    q_step: int,
    terms: Optional[int],
    order: int,
    negate: bool = False,
) -> IntSeries:
    """(±q^a; q^step)_terms truncated at `order`.

    Factors are (1 - q^{a + j step}) for j = 0..terms-1, or with negate
    (1 + q^{a + j step}), i.e. the base -q^a.  terms=None is the infinite
    product, which stabilizes once the exponent passes the order.  The
    leading factor must have unit constant term (a_exponent + 0*step >= 1).
    """
    if a_exponent < 1:
        raise ValueError("a_exponent must be >= 1 so every factor has constant term 1")
    if q_step < 1:
        raise ValueError("q_step must be a positive integer")
    if terms is not None and terms < 0:
        raise ValueError("terms must be nonnegative")
    out = [0] * (order + 1)
    out[0] = 1
    sign = 1 if negate else -1
    j = 0
    while terms is None or j < terms:
        e = a_exponent + j * q_step
        if e > order:
            break  # every remaining factor is 1 modulo q^(order+1)
        # in-place multiply by (1 + sign q^e), highest order first
        for i in range(order - e, -1, -1):
            if out[i]:
                out[i + e] += sign * out[i]
        j += 1
    return IntSeries(tuple(out), order)


def euler_product_inverse(order: int) -> IntSeries:
    """1/(q;q)_inf truncated: the generating function of p(n)."""
    return pochhammer(1, 1, None, order).inverse()


def andrews_gk_series(k: int, order: int) -> IntSeries:
    """Andrews' double hypergeometric series for G_k(q), truncated.

    The (r, s) sum is finite: the exponent binom(k+1,2)(s+r)^2 +
    (k+1) binom(r+1,2) is minimized by the pure square, so pairs are
    enumerated while binom(k+1,2)(s+r)^2 <= order.  Denominators are
    finite Pochhammers inverted as unit-constant-term series; all
    arithmetic is exact.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    tri = k * (k + 1) // 2  # binom(k+1, 2)
    acc = [0] * (order + 1)
    inv_s_cache: List[IntSeries] = [IntSeries.one(order)]
    inv_r_cache: List[IntSeries] = [IntSeries.one(order)]

    def inv_poch(cache: List[IntSeries], count: int, step: int) -> IntSeries:
        while len(cache) <= count:
            nxt = len(cache)
            # 1/(1 - q^{step*nxt}) is the geometric series in q^{step*nxt}
            geom = [0] * (order + 1)
            for e in range(0, order + 1, step * nxt):
                geom[e] = 1
            cache.append(cache[-1] * IntSeries(tuple(geom), order))
        return cache[count]

    r = 0
    while (k + 1) * r * (r + 1) // 2 <= order:
        s = 0
        while tri * (s + r) ** 2 + (k + 1) * r * (r + 1) // 2 <= order:
            e = tri * (s + r) ** 2 + (k + 1) * r * (r + 1) // 2
            term = inv_poch(inv_s_cache, s, k) * inv_poch(inv_r_cache, r, k + 1)
            sign = -1 if s % 2 else 1
            tc = term.coeffs
            for i in range(order + 1 - e):
                if tc[i]:
                    acc[i + e] += sign * tc[i]
            s += 1
        r += 1
    return IntSeries(tuple(acc), order) * euler_product_inverse(order)


def mock_theta_chi(order: int) -> IntSeries:
    """Ramanujan's third-order mock theta function chi(q), truncated."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    acc = [0] * (order + 1)
    acc[0] = 1
    den = IntSeries.one(order)
    n = 1
    while n * n <= order:
        # extend the denominator by (1 - q^n + q^{2n})
        factor = [0] * (order + 1)
        factor[0] = 1
        if n <= order:
            factor[n] -= 1
        if 2 * n <= order:
            factor[2 * n] += 1
        den = den * IntSeries(tuple(factor), order)
        inv = den.inverse()
        e = n * n
        for i in range(order + 1 - e):
            if inv.coeffs[i]:
                acc[i + e] += inv.coeffs[i]
        n += 1
    return IntSeries(tuple(acc), order)


def g2_mock_theta_product(order: int) -> IntSeries:
    """((-q^3;q^3)_inf / (q^2;q^2)_inf) * chi(q): the G_2 product form."""
    num = pochhammer(3, 3, None, order, negate=True)
    den_inv = pochhammer(2, 2, None, order).inverse()
    return num * den_inv * mock_theta_chi(order)


def pak_bridge_residual(k: int, s: float, order: int, pak_log_value: float) -> float:
    """Relative residual of P(A_k) ~ G_k(q) * (q;q)_inf at q = e^{-s}, truncated.

    Cross-check only: the truncation makes this an approximation, so the
    residual is reported, never asserted.  Uses log-space to survive small s.
    """
    q = math.exp(-s)
    gk_val = andrews_gk_series(k, order).evaluate(q)
    euler_val = pochhammer(1, 1, None, order).evaluate(q)
    approx_log = math.log(gk_val) + math.log(euler_val)
    return abs(approx_log - pak_log_value) / abs(pak_log_value)
