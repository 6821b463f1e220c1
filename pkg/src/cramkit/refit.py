"""Least-squares residues for fixed (slightly wrong) poles.

With the poles held fixed the real-axis form of the rational function is
linear in alpha0 and the real and imaginary parts of the residues, so the
residues can be fitted to exp(x) on sample points by ordinary least
squares.  The fit runs through a Householder QR factorisation in extended
precision; the normal equations would square an already poor condition
number.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .coeffs import CoefficientSet, truncate_set
from .errcurve import SUP_DIGITS, Grid, make_grid, make_hybrid_grid, sample_error, sup_error
from .errors import IllPosedError
from .xprec import ONE, ZERO, XComplex, working_precision, xexp

REFIT_DIGITS = 40
FIT_LO = Decimal("-1e3")
FIT_HI = Decimal("-1e-10")
DEFAULT_POINTS = 100_000


@dataclass(frozen=True)
class RefitProblem:
    poles: tuple[XComplex, ...]
    grid: Grid
    fit_alpha0: bool = True
    weights: tuple[Decimal, ...] | None = None
    # Used only when alpha0 is held fixed.
    alpha0: Decimal = ZERO

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(self.poles))
        if not len(self.grid):
            raise ValueError("refit grid is empty")
        if any(p.im <= 0 for p in self.poles):
            raise ValueError("poles must be given with positive imaginary part")
        if len(set(self.poles)) != len(self.poles):
            raise ValueError("poles must be distinct")
        if self.weights is not None:
            w = tuple(Decimal(v) for v in self.weights)
            if len(w) != len(self.grid) or any(v < 0 for v in w):
                raise ValueError("weights must be nonnegative, one per grid point")
            object.__setattr__(self, "weights", w)

    @property
    def n_unknowns(self) -> int:
        return 2 * len(self.poles) + (1 if self.fit_alpha0 else 0)


def design_row(poles, x, fit_alpha0: bool = True) -> list[Decimal]:
    """Row r with r . [alpha0, Re a1, Im a1, ...] = r(x).

    Uses 2 Re(a/(x - t)) = 2 Re(a) Re(1/(x - t)) - 2 Im(a) Im(1/(x - t)).
    Runs under the caller's decimal context.
    """
    x = Decimal(x)
    row = [ONE] if fit_alpha0 else []
    for tr, ti in poles:
        dr = x - tr
        den = dr * dr + ti * ti
        # 1/(x - t) = (dr + i*ti)/den
        row.append(2 * dr / den)
        row.append(-2 * ti / den)
    return row


def householder_lstsq(columns: list[list[Decimal]], rhs: list[Decimal], digits: int) -> tuple[list[Decimal], Decimal]:
    """Minimise ||A c - b||_2 for A given column-wise; returns (c, cond).

    ``cond`` is max|R_ii| / min|R_ii|, a cheap lower estimate of the
    condition number.  Raises IllPosedError when it exceeds
    10**(digits - 10).
    """
    n = len(columns)
    m = len(rhs)
    if m < n:
        raise IllPosedError(f"{m} equations for {n} unknowns")
    with working_precision(digits):
        cols = [list(c) for c in columns]
        b = list(rhs)
        diag = []
        for k in range(n):
            ck = cols[k]
            norm = sum(v * v for v in ck[k:]).sqrt()
            if norm == 0:
                raise IllPosedError(f"column {k} is zero after elimination")
            alpha = -norm if ck[k] >= 0 else norm
            # v = x - alpha e1, stored in place of the column tail
            v = ck[k:]
            v[0] = v[0] - alpha
            vnorm2 = sum(t * t for t in v)
            diag.append(alpha)
            if vnorm2 == 0:
                continue
            for j in range(k + 1, n):
                cj = cols[j]
                tail = cj[k:]
                f = 2 * sum(p * q for p, q in zip(v, tail)) / vnorm2
                cj[k:] = [q - f * p for p, q in zip(v, tail)]
            tail = b[k:]
            f = 2 * sum(p * q for p, q in zip(v, tail)) / vnorm2
            b[k:] = [q - f * p for p, q in zip(v, tail)]
            ck[k] = alpha
        mags = [abs(d) for d in diag]
        cond = max(mags) / min(mags)
        if cond > Decimal(10) ** (digits - 10):
            raise IllPosedError(f"design matrix condition estimate {cond:.3e} too large for {digits} digits")
        c = [ZERO] * n
        for i in reversed(range(n)):
            acc = b[i] - sum(cols[j][i] * c[j] for j in range(i + 1, n))
            c[i] = acc / cols[i][i]
        return c, cond


@dataclass
class RefitResult:
    coeffs: CoefficientSet
    condition: Decimal


def lsq_refit(problem: RefitProblem, digits: int = REFIT_DIGITS, label: str = "refit") -> RefitResult:
    """Fit alpha0 (optionally) and the residues to exp on ``problem.grid``."""
    if digits < 40:
        raise ValueError("refit runs at 40 digits or more")
    pts = problem.grid.points
    if len(pts) < problem.n_unknowns:
        raise IllPosedError(f"{len(pts)} points for {problem.n_unknowns} unknowns")
    n = problem.n_unknowns
    columns = [[] for _ in range(n)]
    rhs = []
    with working_precision(digits):
        for i, x in enumerate(pts):
            row = design_row(problem.poles, x, problem.fit_alpha0)
            target = xexp(x, digits)
            if not problem.fit_alpha0:
                target -= problem.alpha0
            if problem.weights is not None:
                sw = problem.weights[i].sqrt()
                row = [sw * r for r in row]
                target = sw * target
            for col, r in zip(columns, row):
                col.append(r)
            rhs.append(target)
    c, cond = householder_lstsq(columns, rhs, digits)
    if problem.fit_alpha0:
        alpha0, rest = c[0], c[1:]
    else:
        alpha0, rest = problem.alpha0, c
    residues = [XComplex(rest[2 * j], rest[2 * j + 1]) for j in range(len(problem.poles))]
    s = CoefficientSet(
        order=2 * len(problem.poles),
        alpha0=alpha0,
        poles=problem.poles,
        residues=residues,
        label=label,
    )
    return RefitResult(s, cond)


def fit_grid(n_points: int = DEFAULT_POINTS, digits: int = REFIT_DIGITS) -> Grid:
    """Log-uniform sample points on [-1e3, -1e-10]."""
    return make_grid("log", FIT_LO, FIT_HI, n_points, digits)


def axis_sup(s: CoefficientSet, grid: Grid, digits: int = SUP_DIGITS) -> Decimal:
    """Sup of |exp(x) - r(x)| over ``grid`` and the limit at -inf."""
    return max(sup_error(sample_error(s, grid, digits)), abs(s.alpha0))


def default_sup_grid(n: int = 20_000) -> Grid:
    return make_hybrid_grid(n)


@dataclass
class RefitExperiment:
    naive_sup: Decimal
    mixed_sup: Decimal
    refit_sup: Decimal
    refit: RefitResult


def mixed_set(s: CoefficientSet, d: int) -> CoefficientSet:
    """Poles rounded to ``d`` digits, residues and alpha0 left exact."""
    t = truncate_set(s, d)
    return CoefficientSet(s.order, s.alpha0, t.poles, s.residues, label=f"{s.label}/poles-{d}")


def refit_experiment(
    s: CoefficientSet,
    d: int,
    n_points: int = DEFAULT_POINTS,
    digits: int = REFIT_DIGITS,
    sup_grid: Grid | None = None,
) -> RefitExperiment:
    """Sup errors of three sets built from ``d``-digit poles.

    naive: every coefficient rounded; mixed: rounded poles with the exact
    residues; refit: rounded poles with least-squares residues.
    """
    sup_grid = sup_grid or default_sup_grid()
    naive = truncate_set(s, d)
    mixed = mixed_set(s, d)
    problem = RefitProblem(poles=naive.poles, grid=fit_grid(n_points, digits))
    fitted = lsq_refit(problem, digits, label=f"{s.label}/refit-{d}")
    return RefitExperiment(
        naive_sup=axis_sup(naive, sup_grid),
        mixed_sup=axis_sup(mixed, sup_grid),
        refit_sup=axis_sup(fitted.coeffs, sup_grid),
        refit=fitted,
    )
