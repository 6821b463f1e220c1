from dataclasses import replace
from decimal import Decimal

import mpmath
import pytest

from cramkit.coeffs import builtin_set, truncate_set
from cramkit.errcurve import make_grid
from cramkit.errors import PoleProximityError
from cramkit.sensitivity import (
    complex_grid_diff,
    perturbation_bound,
    min_pole_distance,
    perturbation_report,
    pole_term,
    truncation_experiment,
)
from cramkit.xprec import XComplex, working_precision

D = Decimal


@pytest.fixture(scope="module")
def grid():
    return make_grid("log", D("-1e3"), D("-1e-8"), 400)


def _mp(z):
    return mpmath.mpc(str(z.re), str(z.im))


def bound_by_mpmath(base, pert, x):
    with mpmath.workdps(50):
        x = mpmath.mpf(x)
        total = abs(mpmath.mpf(str(base.alpha0)) - mpmath.mpf(str(pert.alpha0)))
        for t, tp, a, ap in zip(base.poles, pert.poles, base.residues, pert.residues):
            t, tp, a, ap = map(_mp, (t, tp, a, ap))
            for tt, ttp, aa, aap in ((t, tp, a, ap), (t.conjugate(), tp.conjugate(), a.conjugate(), ap.conjugate())):
                dist = abs(x - tt)
                total += abs(aa) * abs(tt - ttp) / dist**2 + abs(aa - aap) / dist
        return D(mpmath.nstr(total, 30))


class TestBound:
    def test_identical_sets(self):
        s = builtin_set(14)
        assert perturbation_bound(s, s, D(-3)) == 0

    def test_against_independent_sum(self):
        s = builtin_set(14)
        t = truncate_set(s, 6)
        got = perturbation_bound(s, t, D(-10))
        assert abs(got - bound_by_mpmath(s, t, "-10")) < got * D("1e-25")
        assert got < D("1e-3")

    def test_pole_term_linear_in_displacement(self):
        s = builtin_set(14)
        eps = D("1e-9")
        with working_precision(64):
            one = replace(s, poles=tuple(XComplex(p.re + eps, p.im) for p in s.poles))
            two = replace(s, poles=tuple(XComplex(p.re + 2 * eps, p.im) for p in s.poles))
        a = pole_term(s, one, D(-2))
        b = pole_term(s, two, D(-2))
        with working_precision(64):
            assert abs(b - 2 * a) < a * D("1e-40")

    def test_symmetric_in_argument_order_for_alpha0(self):
        s = builtin_set(16)
        t = replace(s, alpha0=s.alpha0 * 2)
        assert perturbation_bound(s, t, D(-1)) == perturbation_bound(t, s, D(-1))

    def test_near_pole_refused(self):
        s = builtin_set(14)
        with pytest.raises(PoleProximityError):
            perturbation_bound(s, truncate_set(s, 6), s.poles[1])

    def test_order_mismatch(self):
        with pytest.raises(ValueError):
            perturbation_bound(builtin_set(14), builtin_set(16), D(-1))

    def test_min_pole_distance(self):
        s = builtin_set(14)
        assert min_pole_distance(s, s.poles[2]) == 0


class TestTruncation:
    def test_twenty_digits_changes_nothing(self, grid):
        rep = truncation_experiment(builtin_set(14), 20, grid)
        assert rep.max_measured == 0 and rep.max_bound == 0
        assert all(r is None for r in rep.ratios())

    def test_six_digits_band(self, grid):
        rep = truncation_experiment(builtin_set(14), 6, grid)
        assert D("1e-5") <= rep.max_measured <= D("1e-2")

    @pytest.mark.parametrize("k", [14, 16])
    def test_measured_within_bound(self, grid, k):
        s = builtin_set(k)
        for d in (4, 6, 8, 10):
            rep = truncation_experiment(s, d, grid)
            for x, m, b in zip(grid.points, rep.measured, rep.bound):
                if min_pole_distance(s, x) > 1:
                    assert m <= 10 * b

    def test_monotone_in_digits(self, grid):
        s = builtin_set(14)
        maxima = [truncation_experiment(s, d, grid).max_measured for d in (3, 5, 7, 9, 11)]
        assert all(b < a for a, b in zip(maxima, maxima[1:]))

    def test_alpha0_only_far_field(self):
        s = builtin_set(14)
        t = replace(s, alpha0=D("1.8e-14"))
        g = make_grid("log", D("-1e12"), D("-1e10"), 5)
        rep = perturbation_report(s, t, g)
        delta = abs(s.alpha0 - t.alpha0)
        for m in rep.measured:
            assert abs(m - delta) < D("1e-19")

    def test_json(self, grid):
        data = truncation_experiment(builtin_set(14), 6, grid).to_json()
        assert len(data["points"]) == 400


class TestComplexPlane:
    def test_small_window(self):
        s = builtin_set(14)
        t = truncate_set(s, 6)
        g = complex_grid_diff(s, t, resolution=(26, 21))
        assert len(g.re_axis) == 26 and len(g.im_axis) == 21
        assert g.poles == list(s.poles)
        assert g.re_axis[0] == -15 and g.im_axis[-1] == 20
        cells = [v for row in g.values for v in row if v is not None]
        assert len(cells) == 26 * 21

    def test_larger_near_poles(self):
        s = builtin_set(14)
        t = truncate_set(s, 6)
        near = s.poles[3] + XComplex(D("0.01"), D(0))
        g = complex_grid_diff(s, t, re_range=(near.re, 10), im_range=(near.im, 20), resolution=(2, 2))
        assert g.values[0][0] > g.values[1][1]

    def test_pole_cells_masked(self):
        s = builtin_set(14)
        p = s.poles[0]
        g = complex_grid_diff(s, truncate_set(s, 6), re_range=(p.re, p.re + 1), im_range=(p.im, p.im + 1), resolution=(2, 2))
        assert g.values[0][0] is None
        assert g.to_csv().splitlines()[1].endswith("MASK")

    def test_identical_sets_all_masked(self):
        s = builtin_set(14)
        g = complex_grid_diff(s, s, resolution=(4, 3))
        assert all(v is None for row in g.values for v in row)
