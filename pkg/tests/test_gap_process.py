"""Tests for no-k-gap probabilities: recurrence, bounds, P(A_k)."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perckit.gap_process import (
    GapProcess,
    MonotonicityError,
    lower_bound_conjecture_gap,
    prob_ak,
    prob_ak_bounds,
    prob_ak_log_bounds,
    rho_exact,
    rho_lower_product,
    rho_montecarlo,
    rho_sandwich,
)
from perckit.special_fn import fk_eval, lambda_k


def rho_bruteforce(k, u):
    """Sum the probability of every outcome without k consecutive failures."""
    n = len(u)
    total = 0.0
    for mask in range(1 << n):
        run = 0
        ok = True
        p = 1.0
        for i in range(n):
            occurs = (mask >> i) & 1
            p *= u[i] if occurs else 1.0 - u[i]
            run = 0 if occurs else run + 1
            if run >= k:
                ok = False
                break
        if ok:
            total += p
    return total


class TestGapProcess:
    def test_validation(self):
        with pytest.raises(ValueError):
            GapProcess(k=2)  # neither u nor s
        with pytest.raises(ValueError):
            GapProcess(k=2, u=(0.5,), s=0.1)
        with pytest.raises(ValueError):
            GapProcess.explicit(2, [1.5])
        with pytest.raises(ValueError):
            GapProcess.parametric(2, -1.0)
        with pytest.raises(ValueError):
            GapProcess.explicit(0, [0.5])

    def test_parametric_values(self):
        p = GapProcess.parametric(2, 0.5)
        u = p.probabilities(3)
        assert u == pytest.approx([1 - math.exp(-0.5), 1 - math.exp(-1.0), 1 - math.exp(-1.5)])
        assert p.monotonicity() == "increasing"
        # exact log(1-u_i) = -i s
        assert p.log_one_minus_u(3) == pytest.approx([-0.5, -1.0, -1.5], abs=0)

    def test_monotonicity_detection(self):
        assert GapProcess.explicit(2, [0.1, 0.1, 0.3]).monotonicity() == "increasing"
        assert GapProcess.explicit(2, [0.3, 0.1, 0.1]).monotonicity() == "decreasing"
        assert GapProcess.explicit(2, [0.1, 0.3, 0.2]).monotonicity() == "neither"
        assert GapProcess.explicit(2, [0.2, 0.2]).monotonicity() == "increasing"

    def test_insufficient_probabilities(self):
        with pytest.raises(ValueError):
            GapProcess.explicit(2, [0.5, 0.5]).probabilities(3)


class TestRhoExact:
    def test_half_half_half(self):
        trace = rho_exact(GapProcess.explicit(2, [0.5] * 3), 3)
        assert trace.values[3] == pytest.approx(5 / 8, abs=1e-15)
        assert trace.log_values[3] == pytest.approx(math.log(5 / 8), abs=1e-12)

    def test_initial_values_are_one(self):
        trace = rho_exact(GapProcess.explicit(3, [0.2, 0.4, 0.6]), 2)
        assert list(trace.values) == [1.0, 1.0, 1.0]

    def test_k1_is_product(self):
        u = [0.3, 0.9, 0.5, 0.7]
        trace = rho_exact(GapProcess.explicit(1, u), 4)
        assert trace.final == pytest.approx(np.prod(u), rel=1e-14)

    def test_nonincreasing_in_range(self):
        rng = np.random.default_rng(5)
        for k in (1, 2, 3):
            u = rng.uniform(0, 1, 40)
            trace = rho_exact(GapProcess.explicit(k, u), 40)
            assert np.all(np.diff(trace.values) <= 1e-15)
            assert np.all((trace.values >= -1e-15) & (trace.values <= 1.0 + 1e-15))

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_matches_bruteforce(self, k):
        rng = np.random.default_rng(40 + k)
        for _ in range(8):
            n = int(rng.integers(k, 13))
            u = rng.uniform(0, 1, n)
            trace = rho_exact(GapProcess.explicit(k, u), n)
            assert trace.final == pytest.approx(rho_bruteforce(k, list(u)), abs=1e-12)

    def test_log_agrees_with_linear(self):
        rng = np.random.default_rng(6)
        u = rng.uniform(0.05, 0.95, 60)
        trace = rho_exact(GapProcess.explicit(2, u), 60)
        assert np.exp(trace.log_values) == pytest.approx(trace.values, rel=1e-10)

    def test_degenerate_probabilities(self):
        # u = 1 forces occurrence, u = 0 forces failure
        trace = rho_exact(GapProcess.explicit(1, [1.0, 1.0]), 2)
        assert trace.final == 1.0
        trace = rho_exact(GapProcess.explicit(1, [1.0, 0.0]), 2)
        assert trace.final == 0.0
        assert trace.log_final == -math.inf
        trace = rho_exact(GapProcess.explicit(2, [0.0, 0.0, 1.0]), 3)
        assert trace.final == 0.0

    @given(st.integers(1, 3), st.lists(st.floats(0.0, 1.0), min_size=0, max_size=9))
    @settings(max_examples=60, deadline=None)
    def test_bruteforce_property(self, k, u):
        trace = rho_exact(GapProcess.explicit(k, u), len(u))
        assert trace.final == pytest.approx(rho_bruteforce(k, u), abs=1e-12)


class TestSandwich:
    def test_point_example(self):
        process = GapProcess.explicit(2, [0.5] * 3)
        b = rho_sandwich(process, 3)
        f = fk_eval(2, 0.5)
        assert b.lower == pytest.approx(f**3, rel=1e-12)
        assert b.upper == pytest.approx(f**2, rel=1e-12)
        assert b.lower <= 5 / 8 <= b.upper

    def test_k1_equality(self):
        u = [0.2, 0.4, 0.9]
        process = GapProcess.explicit(1, u)
        b = rho_sandwich(process, 3)
        rho = rho_exact(process, 3).final
        assert b.lower == pytest.approx(rho, rel=1e-12)
        assert b.upper == pytest.approx(rho, rel=1e-12)

    def test_empty_upper_product(self):
        process = GapProcess.explicit(3, [0.3, 0.5])
        b = rho_sandwich(process, 2)
        assert b.upper == 1.0

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_sandwich_random_increasing(self, k):
        rng = np.random.default_rng(60 + k)
        for trial in range(40):
            n = int(rng.integers(k, 200))
            u = np.sort(rng.uniform(0, 1, n))
            process = GapProcess.explicit(k, u)
            rho = rho_exact(process, n)
            b = rho_sandwich(process, n)
            assert b.lower - 1e-10 <= rho.final <= b.upper + 1e-10
            if rho.final > 0:
                assert b.log_lower <= rho.log_final * (1 - 1e-8) + 1e-8
                assert rho.log_final <= b.log_upper * (1 - 1e-8) + 1e-8

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_lower_bound_decreasing(self, k):
        rng = np.random.default_rng(80 + k)
        for trial in range(40):
            n = int(rng.integers(k, 120))
            u = np.sort(rng.uniform(0, 1, n))[::-1]
            process = GapProcess.explicit(k, u)
            rho = rho_exact(process, n).final
            assert rho_lower_product(process, n).lower <= rho + 1e-10

    def test_monotonicity_errors(self):
        dec = GapProcess.explicit(2, [0.9, 0.5, 0.1])
        with pytest.raises(MonotonicityError, match="upper"):
            rho_sandwich(dec, 3)
        mixed = GapProcess.explicit(2, [0.1, 0.9, 0.5])
        with pytest.raises(MonotonicityError, match="lower"):
            rho_sandwich(mixed, 3)
        with pytest.raises(MonotonicityError):
            rho_lower_product(mixed, 3)


class TestProbAk:
    def test_k1_closed_product(self):
        for s in (0.3, 0.1):
            res = prob_ak(1, s, tol=1e-10)
            exact = math.fsum(
                math.log1p(-math.exp(-i * s)) for i in range(1, int(80 / s) + 1)
            )
            assert res.log_value == pytest.approx(exact, abs=1e-8)
            assert res.error_bound <= 1e-10

    def test_bracket_width_and_order(self):
        for k in (1, 2, 3, 4):
            for s in (0.1, 0.05):
                res = prob_ak(k, s, tol=1e-8)
                assert res.error_bound <= 1e-8
                assert res.log_lower <= res.log_value <= res.log_upper

    def test_theorem_lower_bound(self):
        for k in (1, 2, 3, 4):
            for s in (0.1, 0.05, 0.02):
                res = prob_ak(k, s, tol=1e-8)
                lo, hi = prob_ak_log_bounds(k, s)
                assert res.log_value >= lo

    def test_large_s_limit(self):
        # all u_i -> 1, so P(A_k) -> 1; bracketed below by the f_k product
        res = prob_ak(2, 8.0, tol=1e-8)
        assert res.value > 0.99

    def test_bounds_shape(self):
        lo, hi = prob_ak_bounds(1, 0.1)
        assert lo == pytest.approx(math.exp(-(math.pi**2 / 6) / 0.1))
        lo2, hi2 = prob_ak_bounds(2, 0.1)
        assert hi2 / lo2 == pytest.approx(0.1 ** (-3 / 4), rel=1e-12)
        for k in (1, 2, 5):
            lo3, hi3 = prob_ak_log_bounds(k, 0.5)
            assert lo3 < hi3

    def test_interval_containment_recorded(self):
        # recorded (not asserted) containment: the bracket sits above the
        # theorem lower bound; the upper side with its 50% slack absorbs
        # the unquantified (1+o(1)) factor and is printed for the record
        for k in (1, 2, 3, 4):
            for s in (0.1, 0.05):
                res = prob_ak(k, s, tol=1e-8)
                lo, hi = prob_ak_log_bounds(k, s)
                assert res.log_lower >= lo + math.log1p(-1e-9)  # theorem side
                ratio = math.exp(res.log_upper - hi)
                print(f"recorded: k={k} s={s} upper-side ratio {ratio:.3f} (1.5 slack)")

    def test_monotone_decreasing_in_k(self):
        # more allowed gap patterns for larger k
        vals = [prob_ak(k, 0.1, 1e-8).log_value for k in (1, 2, 3)]
        assert vals[0] < vals[1] < vals[2]

    def test_errors(self):
        with pytest.raises(ValueError):
            prob_ak(2, -0.1)
        with pytest.raises(ValueError):
            prob_ak(2, 0.1, tol=-1)
        with pytest.raises(ValueError):
            prob_ak(2, 1e-6, tol=1e-10, max_terms=100)


class TestMonteCarlo:
    def test_matches_oracle(self):
        process = GapProcess.explicit(2, [0.5] * 3)
        est, err = rho_montecarlo(process, 3, trials=200_000, seed=42)
        assert abs(est - 5 / 8) <= 4 * err

    def test_certain_events(self):
        est, err = rho_montecarlo(GapProcess.explicit(1, [1.0] * 5), 5, 1000, seed=1)
        assert est == 1.0
        est, _ = rho_montecarlo(GapProcess.explicit(3, [0.1, 0.1]), 2, 1000, seed=1)
        assert est == 1.0  # n < k: no k-gap possible

    def test_deterministic(self):
        process = GapProcess.parametric(2, 0.4)
        a = rho_montecarlo(process, 50, trials=10_000, seed=7)
        b = rho_montecarlo(process, 50, trials=10_000, seed=7)
        assert a == b
        c = rho_montecarlo(process, 50, trials=10_000, seed=8)
        assert a != c


class TestConjectureFuzz:
    def test_no_counterexample_found(self):
        # exploratory fuzz of the conjecture that the lower product bound
        # needs no monotonicity; record violations (none expected)
        rng = np.random.default_rng(123)
        worst = math.inf
        for _ in range(300):
            k = int(rng.integers(1, 4))
            n = int(rng.integers(1, 12))
            gap = lower_bound_conjecture_gap(k, rng.uniform(0, 1, n))
            worst = min(worst, gap)
        assert worst >= -1e-12, f"conjecture counterexample found: gap={worst}"
