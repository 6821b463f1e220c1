import random
from decimal import Decimal

import pytest

from cramkit.coeffs import builtin_set
from cramkit.errcurve import Grid, make_grid, make_hybrid_grid
from cramkit.errors import IllPosedError
from cramkit.ratfun import agreement_digits, eval_real
from cramkit.refit import (
    RefitProblem,
    axis_sup,
    design_row,
    fit_grid,
    householder_lstsq,
    lsq_refit,
    mixed_set,
    refit_experiment,
)
from cramkit.xprec import XComplex, working_precision, xexp

D = Decimal


def coeff_vector(s):
    return [s.alpha0] + [v for a in s.residues for v in a]


class TestDesignRow:
    def test_toy(self):
        with working_precision(40):
            row = design_row([XComplex(D(0), D(1))], D(1))
        assert row == [1, 1, -1]

    def test_dot_equals_eval(self):
        s = builtin_set(14)
        rng = random.Random(3)
        for _ in range(20):
            x = D(rng.uniform(-200, 0)).quantize(D("1e-6"))
            with working_precision(64):
                got = sum(r * c for r, c in zip(design_row(s.poles, x), coeff_vector(s)))
            assert abs(got - eval_real(s, x)) < D("1e-60")

    def test_far_left(self):
        with working_precision(40):
            row = design_row(builtin_set(14).poles, D("-1e30"))
        assert row[0] == 1
        assert max(abs(v) for v in row[1:]) < D("1e-29")

    def test_without_alpha0(self):
        with working_precision(40):
            assert len(design_row(builtin_set(16).poles, D(-1), fit_alpha0=False)) == 16


class TestLstsq:
    def test_exact_square(self):
        cols = [[D(2), D(0)], [D(1), D(3)]]
        c, cond = householder_lstsq(cols, [D(5), D(6)], 40)
        assert abs(c[0] - D("1.5")) < D("1e-38") and abs(c[1] - 2) < D("1e-38")
        assert cond >= 1

    def test_line_fit(self):
        xs = [D(i) for i in range(5)]
        ys = [D(1), D(3), D(2), D(5), D(4)]
        c, _ = householder_lstsq([[D(1)] * 5, xs], ys, 40)
        # closed form for the regression line
        assert abs(c[1] - D("0.8")) < D("1e-38")
        assert abs(c[0] - D("1.4")) < D("1e-38")

    def test_rank_deficient(self):
        col = [D(1), D(2), D(3)]
        with pytest.raises(IllPosedError):
            householder_lstsq([col, list(col)], [D(1), D(1), D(1)], 40)

    def test_underdetermined(self):
        with pytest.raises(IllPosedError):
            householder_lstsq([[D(1)], [D(2)]], [D(1)], 40)


@pytest.fixture(scope="module")
def true_pole_fit():
    s = builtin_set(14)
    return s, lsq_refit(RefitProblem(poles=s.poles, grid=fit_grid(10_000)))


class TestRefit:
    def test_true_poles_close_to_table(self, true_pole_fit):
        # Least squares is not minimax, so the table residues are not its
        # minimiser; agreement is limited to about six digits.
        s, fit = true_pole_fit
        digits = min(agreement_digits(a, b, 40) for a, b in zip(s.residues, fit.coeffs.residues))
        assert digits >= 5
        assert fit.coeffs.poles == s.poles

    def test_true_poles_sup(self, true_pole_fit):
        s, fit = true_pole_fit
        grid = make_hybrid_grid(4000)
        assert axis_sup(fit.coeffs, grid) <= D("1.5") * axis_sup(s, grid)

    def test_residual_orthogonal_to_columns(self):
        s = builtin_set(14)
        grid = fit_grid(500)
        fit = lsq_refit(RefitProblem(poles=s.poles, grid=grid), 40)
        coeffs = coeff_vector(fit.coeffs)
        with working_precision(40):
            rows = [design_row(s.poles, x) for x in grid.points]
            res = [xexp(x, 40) - sum(r * c for r, c in zip(row, coeffs)) for x, row in zip(grid.points, rows)]
            scale = max(abs(v) for row in rows for v in row) * max(D(1), max(abs(v) for v in res))
            for j in range(len(coeffs)):
                dot = sum(row[j] * r for row, r in zip(rows, res))
                assert abs(dot) <= D(10) ** (-40 + 12) * scale * len(rows)

    def test_zero_weights_interpolate(self):
        s = builtin_set(14)
        grid = make_grid("linear", -30, 0, 60)
        keep = set(range(0, 60, 4))
        weights = [D(1) if i in keep else D(0) for i in range(60)]
        assert len(keep) == 15
        fit = lsq_refit(RefitProblem(poles=s.poles, grid=grid, weights=weights), 60)
        for i in keep:
            x = grid.points[i]
            assert abs(eval_real(fit.coeffs, x, 60) - xexp(x, 60)) < D("1e-40")

    def test_fixed_alpha0(self):
        s = builtin_set(14)
        fit = lsq_refit(RefitProblem(poles=s.poles, grid=fit_grid(300), fit_alpha0=False, alpha0=s.alpha0))
        assert fit.coeffs.alpha0 == s.alpha0

    def test_deterministic(self):
        s = builtin_set(16)
        p = RefitProblem(poles=s.poles, grid=fit_grid(200))
        assert lsq_refit(p).coeffs == lsq_refit(p).coeffs

    def test_too_few_points(self):
        s = builtin_set(14)
        g = Grid((D(-2), D(-1)), "linear", D(-2), D(-1))
        with pytest.raises(IllPosedError):
            lsq_refit(RefitProblem(poles=s.poles, grid=g))

    def test_problem_validation(self):
        s = builtin_set(14)
        with pytest.raises(ValueError):
            RefitProblem(poles=[p.conjugate() for p in s.poles], grid=fit_grid(100))
        with pytest.raises(ValueError):
            RefitProblem(poles=s.poles, grid=fit_grid(100), weights=[D(1)] * 99)


class TestExperiment:
    def test_mixed_set(self):
        s = builtin_set(14)
        m = mixed_set(s, 6)
        assert m.residues == s.residues and m.alpha0 == s.alpha0
        assert m.poles[0].re == D("-8.89777")

    def test_twenty_digits(self):
        s = builtin_set(14)
        grid = make_hybrid_grid(2000)
        exp = refit_experiment(s, 20, n_points=2000, sup_grid=grid)
        true_sup = axis_sup(s, grid)
        assert exp.naive_sup == exp.mixed_sup == true_sup
        assert abs(exp.refit_sup - true_sup) <= D("0.5") * true_sup
