"""The twelve acceptance criteria, one test each.

Every test records a PASS/FAIL line before asserting; the lines are printed
together at the end of the session.
"""

import random
from decimal import Decimal
from fractions import Fraction

import pytest

from cramkit.coeffs import builtin_set, truncate_set
from cramkit.errcurve import HALPHEN, equioscillation_report, make_grid, make_hybrid_grid, sample_error, sup_error
from cramkit.matexp import DecayChain, bateman_oracle, chain_matrix, cram_apply, hermitian_oracle
from cramkit.ratfun import roundtrip_report
from cramkit.refit import RefitProblem, axis_sup, fit_grid, lsq_refit, mixed_set
from cramkit.sensitivity import min_pole_distance, truncation_experiment
from cramkit.xprec import working_precision, xarith, xexp

from conftest import ACCEPTANCE_LINES, load_tables

D = Decimal

E_DIGITS = (
    "2.7182818284590452353602874713526624977572470936999595749669676277240766303535475945713821785251664274"
)


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} {n}: {detail}")
    assert ok, detail


@pytest.fixture(scope="session")
def sup_grid():
    return make_hybrid_grid(100_000, digits=40)


@pytest.fixture(scope="session")
def curves(sup_grid):
    return {k: sample_error(builtin_set(k), sup_grid, 40) for k in (14, 16)}


@pytest.fixture(scope="session")
def sups(curves):
    return {k: sup_error(c) for k, c in curves.items()}


def test_1_table_fidelity():
    tables = load_tables()
    bad = []
    for k in (14, 16):
        s = builtin_set(k)
        t = tables[k]
        if s.alpha0 != D(t["alpha0"][0]):
            bad.append(f"{k}/alpha0")
        for j in range(k // 2):
            for name, got in ((f"theta{j + 1}", s.poles[j]), (f"alpha{j + 1}", s.residues[j])):
                if (got.re, got.im) != tuple(D(v) for v in t[name]):
                    bad.append(f"{k}/{name}")
    record(1, not bad, "table fidelity " + ("exact" if not bad else f"mismatch {bad}"))


def _sup_criterion(n, k, sups, lo, hi):
    s = builtin_set(k)
    sup = sups[k]
    rel = abs(sup / s.alpha0 - 1)
    ok = D(lo) <= sup <= D(hi) and rel <= D("0.15")
    record(n, ok, f"k={k} sup error {sup:.6e} in [{lo}, {hi}], {float(rel) * 100:.2f}% from alpha0")


def test_2_sup_error_k14(sups):
    _sup_criterion(2, 14, sups, "1.5e-14", "2.1e-14")


def test_3_sup_error_k16(sups):
    _sup_criterion(3, 16, sups, "1.7e-16", "2.6e-16")


def test_4_equioscillation(curves):
    counts = {}
    ok = True
    for k, need in ((14, 29), (16, 33)):
        rep = equioscillation_report(curves[k], 0.1)
        counts[k] = rep.alternation_count
        ok = ok and rep.alternation_count >= need and rep.includes_infinity_limit
    record(4, ok, f"alternations k=14: {counts[14]} (need 29), k=16: {counts[16]} (need 33)")


def test_5_halphen_ratio(sups):
    with working_precision(40):
        ratio = sups[14] / sups[16]
        ref = HALPHEN**2
        dev = abs(ratio / ref - 1)
    record(5, dev <= D("0.2"), f"sup14/sup16 = {ratio:.4f} vs H^2 = {ref:.4f} ({float(dev) * 100:.2f}% off)")


def test_6_truncation_experiment():
    s = builtin_set(14)
    grid = make_grid("log", D("-1e3"), D("-1e-8"), 10_000, 40)
    rep = truncation_experiment(s, 6, grid, 40)
    in_band = D("1e-5") <= rep.max_measured <= D("1e-2")
    worst = D(0)
    for x, m, b in zip(grid.points, rep.measured, rep.bound):
        if min_pole_distance(s, x) > 1 and m:
            worst = max(worst, m / b)
    ok = in_band and worst <= 10
    record(6, ok, f"6-digit max deviation {rep.max_measured:.3e}, worst measured/bound {worst:.3f} (<= 10)")


def test_7_mixed_coefficients():
    s = builtin_set(14)
    sup = axis_sup(mixed_set(s, 6), make_hybrid_grid(20_000))
    ok = D("1e-8") <= sup <= D("1e-6")
    record(7, ok, f"6-digit poles with exact residues: sup error {sup:.3e}, target [1e-8, 1e-6]")


@pytest.mark.slow
def test_8_refit():
    s = builtin_set(14)
    poles = truncate_set(s, 6).poles
    fit = lsq_refit(RefitProblem(poles=poles, grid=fit_grid(100_000, 40)), 40)
    sup = axis_sup(fit.coeffs, make_hybrid_grid(20_000))
    record(8, sup <= D("1e-10"), f"refit with 6-digit poles on 1e5 points: sup error {sup:.3e} (<= 1e-10)")


def test_9_roundtrip():
    agree = {k: roundtrip_report(builtin_set(k), 50).min_agreement for k in (14, 16)}
    ok = all(v >= 18 for v in agree.values())
    record(9, ok, f"round trip at 50 digits: {agree[14]:.1f} / {agree[16]:.1f} digits (need 18)")


def _random_nsd(rng, n):
    b = [[D(rng.uniform(-1, 1)).quantize(D("1e-12")) for _ in range(n)] for _ in range(n)]
    with working_precision(64):
        return [[-sum(b[k][i] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


@pytest.mark.slow
def test_10_hermitian():
    rng = random.Random(2024)
    s = builtin_set(14)
    worst = D(0)
    for _ in range(20):
        a = _random_nsd(rng, 30)
        x0 = [D(rng.uniform(-1, 1)).quantize(D("1e-12")) for _ in range(30)]
        y = cram_apply(a, 1, x0, s)
        ref = hermitian_oracle(a, 1, x0)
        with working_precision(64):
            err = sum((u - v) ** 2 for u, v in zip(y, ref)).sqrt()
            worst = max(worst, err / sum(v * v for v in x0).sqrt())
    record(10, worst <= D("5e-14"), f"20 symmetric NSD 30x30: worst relative 2-norm error {worst:.3e} (<= 5e-14)")


def test_11_decay_chain():
    chain = DecayChain((D(3), D(1), D("0.3"), D("0.1")))
    s = builtin_set(16)
    x0 = [D(1), D(0), D(0), D(0)]
    worst = D(0)
    for t in ("0.1", "1", "10"):
        y = cram_apply(chain_matrix(chain), D(t), x0, s)
        ref = bateman_oracle(chain, D(t), x0)
        with working_precision(64):
            worst = max([worst] + [abs(u - v) for u, v in zip(y, ref)])
    record(11, worst <= D("1e-12"), f"4-nuclide chain, k=16: max component error {worst:.3e} (<= 1e-12)")


def test_12_arithmetic_kernel():
    ok = True
    for digits in (30, 64):
        got = xexp(D(1), digits)
        rel = abs(Fraction(got) - Fraction(E_DIGITS)) / Fraction(E_DIGITS)
        ok = ok and rel < Fraction(1, 10 ** (digits - 2))
    rng = random.Random(12)
    ops = ["add", "sub", "mul", "div"]
    worst = Fraction(0)
    for i in range(1000):
        x = D(rng.randint(-(10**30), 10**30)).scaleb(rng.randint(-40, 40))
        y = D(rng.choice([-1, 1]) * rng.randint(1, 10**30)).scaleb(rng.randint(-40, 40))
        op = ops[i % 4]
        got = Fraction(xarith(op, x, y, 60))
        fx, fy = Fraction(x), Fraction(y)
        exact = {"add": fx + fy, "sub": fx - fy, "mul": fx * fy, "div": fx / fy}[op]
        if exact:
            worst = max(worst, abs(got - exact) / abs(exact))
    ok = ok and worst <= Fraction(1, 10**58)
    record(12, ok, f"xexp(1) checked at 30/64 digits; worst relative error over 1000 pairs {float(worst):.2e} (<= 1e-58)")
