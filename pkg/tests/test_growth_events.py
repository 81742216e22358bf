"""Tests for the diagonal/skew growth events and their probabilities."""

import math

import numpy as np
import pytest

from perckit.gap_process import GapProcess, rho_exact
from perckit.growth_events import (
    EventChain,
    SkewGeometry,
    StairGeometry,
    dk_paper_lower_bound,
    jk_paper_lower_bound,
    prob_dk,
    prob_jk,
    sample_conditioned,
    validate_chain,
    verify_growth_guarantee,
)
from perckit.lattice import CellState, Lattice, ModelSpec, Variant, run_to_fixpoint

E, O, A = CellState.EMPTY, CellState.OCCUPIED, CellState.ACTIVE


class TestGoldenGeometry:
    """The frozen cell lists for k=2, a=4, b=9 (coordinates are (x, y))."""

    def test_stair_columns(self):
        geom = StairGeometry(2, 4, 9)
        assert list(geom.labels) == [5, 6, 7, 8, 9]
        golden = {
            5: [(4, 0), (4, 1), (4, 2)],
            6: [(5, 0), (5, 1), (5, 2), (5, 3)],
            7: [(6, 0), (6, 1), (6, 2), (6, 3), (6, 4)],
            8: [(7, 0), (7, 1), (7, 2), (7, 3), (7, 4), (7, 5)],
            9: [(8, 0), (8, 1), (8, 2), (8, 3), (8, 4), (8, 5), (8, 6)],
        }
        for label, cells in golden.items():
            assert geom.column_cells(label) == cells
            assert geom.row_cells(label) == [(y, x) for x, y in cells]

    def test_stair_families_disjoint(self):
        geom = StairGeometry(2, 4, 9)
        cols = {c for l in geom.labels for c in geom.column_cells(l)}
        rows = {c for l in geom.labels for c in geom.row_cells(l)}
        assert not cols & rows

    def test_skew_lines(self):
        geom = SkewGeometry(2, 4, 9)
        assert geom.column_cells(5) == [(4, 0), (4, 1), (4, 2)]
        assert geom.column_cells(6) == [(5, 0), (5, 1), (5, 2), (5, 3)]
        for label in (7, 8, 9):
            assert geom.column_cells(label) == [(label - 1, y) for y in range(5)]
        assert geom.row_cells(5) == [(0, 4), (1, 4), (2, 4)]
        assert geom.row_cells(6) == [(x, 5) for x in range(8)]
        assert geom.row_cells(7) == [(x, 6) for x in range(8)]
        assert geom.row_cells(8) == [(x, 7) for x in range(9)]
        assert geom.row_cells(9) == [(x, 8) for x in range(9)]
        assert geom.occupied_cell == (8, 6)
        assert list(geom.empty_rows) == [6, 7]
        assert list(geom.gap_family_columns) == [6, 7, 8]
        assert list(geom.gap_family_rows) == [8]

    def test_invalid_geometries(self):
        with pytest.raises(ValueError):
            StairGeometry(2, 1, 5)  # a < k
        with pytest.raises(ValueError):
            StairGeometry(2, 5, 5)  # b <= a
        with pytest.raises(ValueError):
            SkewGeometry(2, 4, 7)  # b - a < k + 2


def mc_prob_dk(geom, q, trials, seed):
    rng = np.random.default_rng(seed)
    hits = 0
    k = geom.k
    sizes = [geom.line_size(l) for l in geom.labels]
    for _ in range(trials):
        def family_ok():
            run = 0
            for h in sizes:
                nonempty = bool((rng.random(h) < 1 - q).any())
                run = 0 if nonempty else run + 1
                if run >= k:
                    return False
            return True
        hits += family_ok() and family_ok()
    return hits / trials


def mc_prob_jk(geom, q, trials, seed):
    rng = np.random.default_rng(seed)
    k = geom.k
    hits = 0
    for _ in range(trials):
        def nonempty(n):
            return bool((rng.random(n) < 1 - q).any())

        def no_gap(sizes):
            run = 0
            for h in sizes:
                run = 0 if nonempty(h) else run + 1
                if run >= k:
                    return False
            return True

        ok = nonempty(geom.col_height(geom.a + 1))
        ok &= nonempty(geom.row_width(geom.a + 1))
        ok &= nonempty(geom.col_height(geom.b))
        ok &= nonempty(geom.row_width(geom.b))
        # k rows of width b-1 all empty
        ok &= not (rng.random(k * (geom.b - 1)) < 1 - q).any()
        ok &= rng.random() < 1 - q  # the turn cell
        ok &= no_gap([geom.col_height(l) for l in geom.gap_family_columns])
        ok &= no_gap([geom.row_width(l) for l in geom.gap_family_rows])
        hits += ok
    return hits / trials


class TestProbabilities:
    def test_dk_single_line(self):
        # b = a + 1: one column and one row; a single line is a k-gap only
        # for k = 1
        q = 0.4
        assert prob_dk(StairGeometry(1, 5, 6), q) == pytest.approx((1 - q**5) ** 2)
        assert prob_dk(StairGeometry(2, 5, 6), q) == 1.0

    def test_dk_limits(self):
        geom = StairGeometry(2, 4, 9)
        assert prob_dk(geom, 1e-9) == pytest.approx(1.0, abs=1e-6)
        assert prob_dk(geom, 1 - 1e-12) == pytest.approx(0.0, abs=1e-6)

    def test_jk_q_to_one_vanishes(self):
        geom = SkewGeometry(2, 4, 9)
        assert prob_jk(geom, 1 - 1e-9) == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.parametrize("k,a,b", [(1, 3, 8), (2, 4, 9), (2, 12, 20), (3, 5, 12), (3, 14, 20)])
    def test_dk_exact_vs_mc(self, k, a, b):
        for q in (0.3, 0.5, 0.7):
            geom = StairGeometry(k, a, b)
            exact = prob_dk(geom, q)
            trials = 40_000
            est = mc_prob_dk(geom, q, trials, seed=k * 100 + a)
            # stderr from the exact p: the estimate can sit at 1.0 when the
            # failure rate is a few per hundred thousand
            stderr = math.sqrt(max(exact * (1 - exact), 1.0 / trials) / trials)
            assert abs(est - exact) <= 4 * stderr

    @pytest.mark.parametrize("k,a,b", [(1, 4, 9), (2, 4, 9), (2, 6, 12), (2, 13, 20), (3, 5, 12), (3, 12, 20)])
    def test_jk_exact_vs_mc(self, k, a, b):
        for q in (0.3, 0.5, 0.7):
            geom = SkewGeometry(k, a, b)
            exact = prob_jk(geom, q)
            trials = 60_000
            est = mc_prob_jk(geom, q, trials, seed=k * 31 + b)
            stderr = math.sqrt(max(exact * (1 - exact), 1.0 / trials) / trials)
            assert abs(est - exact) <= 4 * stderr

    def test_dk_dominates_paper_bound(self):
        for k in (1, 2, 3):
            for a in (k, k + 3, k + 7):
                for b in (a + 2, a + 6, a + 12):
                    for q in (0.3, 0.5, 0.7):
                        geom = StairGeometry(k, a, b)
                        assert prob_dk(geom, q) >= dk_paper_lower_bound(geom, q) - 1e-12

    def test_jk_dominates_paper_bound(self):
        for k in (1, 2, 3):
            for a in (2 * k, 2 * k + 3):
                for b in (a + k + 2, a + k + 5):
                    for q in (0.3, 0.5, 0.7):
                        geom = SkewGeometry(k, a, b)
                        assert prob_jk(geom, q) >= jk_paper_lower_bound(geom, q) - 1e-12

    def test_rho_family_matches_direct(self):
        # the column family of D_k is literally a no-k-gap process with
        # u_i = 1 - q^{i-k}
        geom = StairGeometry(2, 4, 9)
        q = 0.45
        u = geom.u_values(q)
        assert u == pytest.approx([1 - q**3, 1 - q**4, 1 - q**5, 1 - q**6, 1 - q**7])
        rho = rho_exact(GapProcess.explicit(2, u), 5).final
        assert prob_dk(geom, q) == pytest.approx(rho**2, rel=1e-12)


class TestEventChain:
    def test_validation(self):
        EventChain(2, 24, ((4, 9), (12, 17)))
        with pytest.raises(ValueError):
            EventChain(2, 24, ())
        with pytest.raises(ValueError):
            EventChain(2, 24, ((4, 7),))  # b - a < k + 2
        with pytest.raises(ValueError):
            EventChain(2, 24, ((9, 14), (4, 9)))  # decreasing
        with pytest.raises(ValueError):
            EventChain(2, 24, ((1, 6),))  # a < k
        with pytest.raises(ValueError):
            EventChain(2, 12, ((4, 13),))  # beyond window

    def test_contradictory_corner_chain_rejected(self):
        # b_m = L with minimal skew puts a required-empty row through the
        # occupied corner cell (0, L-2)
        with pytest.raises(ValueError, match="contradictory"):
            EventChain(2, 20, ((16, 20),))

    def test_components(self):
        chain = EventChain(2, 24, ((4, 9), (12, 17)))
        kinds = [(kind, g.a, g.b) for g, kind in chain.components()]
        assert kinds == [
            ("dk", 2, 4),
            ("jk", 4, 9),
            ("dk", 9, 12),
            ("jk", 12, 17),
            ("dk", 17, 23),
        ]

    def test_degenerate_trailing_dk_dropped(self):
        chain = EventChain(2, 12, ((4, 9),))
        kinds = [kind for _, kind in chain.components()]
        assert kinds == ["dk", "jk", "dk"]
        chain2 = EventChain(2, 10, ((4, 9),))  # L - 1 = b_m: no trailing dk
        assert [kind for _, kind in chain2.components()] == ["dk", "jk"]


class TestConditionedSampling:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_samples_always_validate(self, k):
        chain = EventChain(k, 4 * k + 18, ((k + 2, 2 * k + 5),))
        for seed in range(60):
            lat = sample_conditioned(chain, q=0.5, seed=seed)
            assert validate_chain(lat, chain) == []

    def test_two_pair_chain_validates(self):
        chain = EventChain(2, 26, ((4, 9), (12, 17)))
        for seed in range(40):
            lat = sample_conditioned(chain, q=0.6, seed=seed)
            assert validate_chain(lat, chain) == []

    def test_chain_disjointness(self):
        # samples satisfying chain X never satisfy a different chain Y
        x = EventChain(2, 26, ((4, 9),))
        y = EventChain(2, 26, ((5, 10),))
        z = EventChain(2, 26, ((4, 9), (12, 17)))
        cross = 0
        for seed in range(1000):
            lat = sample_conditioned(x, q=0.5, seed=seed)
            assert validate_chain(lat, x) == []
            cross += not validate_chain(lat, y)
            cross += not validate_chain(lat, z)
        assert cross == 0

    def test_background_empty(self):
        chain = EventChain(2, 26, ((4, 9),))
        lat = sample_conditioned(chain, q=0.5, seed=0, background="empty")
        assert validate_chain(lat, chain) == []
        # adversarial mode leaves unconstrained regions empty: count is small
        occupied = int(np.sum(lat.cells != E))
        lat2 = sample_conditioned(chain, q=0.5, seed=0, background="sample")
        assert int(np.sum(lat2.cells != E)) > occupied

    def test_corner_cells_present(self):
        chain = EventChain(2, 26, ((4, 9),))
        lat = sample_conditioned(chain, q=0.5, seed=3)
        L = chain.L
        assert lat.cells[L - 2, 0] != E
        assert lat.cells[0, L - 2] != E
        assert lat.cells[0, 0] == A  # origin active
        assert lat.cells[1, 1] == O  # rest of the k x k block occupied


class TestGrowthGuarantee:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_zero_violations_smoke(self, k):
        report = verify_growth_guarantee(k, trials=40, seed=11, q=0.5)
        assert report.total_violations == 0, "\n" + report.summary()

    def test_report_structure(self):
        report = verify_growth_guarantee(2, trials=5, seed=1, q=0.5)
        kinds = {c.kind.split("[")[0] for c in report.cases}
        assert kinds == {"dk", "jk", "ek"}
        assert all(c.trials == 5 for c in report.cases)
        assert "TOTAL" in report.summary()

    def test_ek_growth_reaches_full_block(self):
        # conditioned sample + evolution reaches R(L-1, L-1) even with an
        # adversarial empty background
        chain = EventChain(2, 26, ((4, 9), (12, 17)))
        spec = ModelSpec(Variant.LOCAL_K, k=2, q=0.5)
        for seed in range(25):
            lat = sample_conditioned(chain, q=0.5, seed=seed, background="empty")
            fixed, _, converged = run_to_fixpoint(lat, spec)
            assert converged
            side = chain.L - 1
            assert np.all(fixed.cells[:side, :side] == A)
