"""Error curves exp(x) - r(x) on the negative real axis.

Sampling, sup-norm estimation with local refinement, detection of the
alternation set that characterises a best approximation, and the ratio of
sup errors between two orders compared with the Halphen rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .coeffs import CoefficientSet
from .errors import CramError
from .ratfun import eval_real
from .xprec import ZERO, working_precision, xexp, xstr

HALPHEN = Decimal("9.28902549")
SUP_DIGITS = 40

# Hybrid grid layout: log-spaced on [HYBRID_LO, HYBRID_SPLIT], linear on
# [HYBRID_SPLIT, 0].  The outermost alternation points of the order-16
# error sit near -2.7e3, so the log piece must reach past that.
HYBRID_LO = Decimal(-10000)
HYBRID_SPLIT = Decimal("-1e-3")


class ResolutionError(CramError):
    """Grid too coarse to separate neighbouring extrema."""


@dataclass(frozen=True)
class Grid:
    points: tuple[Decimal, ...]
    kind: str
    lo: Decimal
    hi: Decimal

    def __post_init__(self):
        pts = self.points
        if not pts:
            raise ValueError("grid is empty")
        if any(p > 0 for p in pts):
            raise ValueError("grid points must lie in (-inf, 0]")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("grid points must be strictly increasing")

    def __len__(self):
        return len(self.points)


def make_grid(kind: str, lo, hi, n: int, digits: int = SUP_DIGITS) -> Grid:
    """``n`` points from ``lo`` to ``hi`` inclusive.

    ``kind="log"`` spaces the exponents evenly: points are -10**s with s
    running linearly from log10(-lo) to log10(-hi).
    """
    with working_precision(digits):
        lo, hi = +Decimal(lo), +Decimal(hi)
        if not lo < hi <= 0:
            raise ValueError(f"need lo < hi <= 0, got lo={lo}, hi={hi}")
        if n < 2:
            raise ValueError("need at least two points")
        if kind == "linear":
            step = (hi - lo) / (n - 1)
            pts = [lo + i * step for i in range(n - 1)] + [hi]
        elif kind == "log":
            if hi >= 0:
                raise ValueError("log grid needs hi < 0")
            a, b = (-lo).log10(), (-hi).log10()
            with working_precision(digits + 10):
                ratio = Decimal(10) ** ((b - a) / (n - 1))
                mags = [-lo]
                for _ in range(n - 2):
                    mags.append(mags[-1] * ratio)
            pts = [lo] + [-(+m) for m in mags[1:]] + [hi]
        else:
            raise ValueError(f"unknown grid kind {kind!r}")
        return Grid(tuple(pts), kind, lo, hi)


def make_hybrid_grid(n: int, lo=HYBRID_LO, split=HYBRID_SPLIT, digits: int = SUP_DIGITS) -> Grid:
    """Log-spaced on [lo, split] joined with linear on [split, 0].

    A twentieth of the points (at least 2) go to the linear piece.
    """
    n_lin = max(2, n // 20)
    n_log = n - n_lin + 1
    if n_log < 2:
        raise ValueError("hybrid grid needs at least three points")
    left = make_grid("log", lo, split, n_log, digits)
    right = make_grid("linear", split, 0, n_lin, digits)
    return Grid(left.points + right.points[1:], "hybrid", left.lo, right.hi)


def parse_grid_spec(spec: str, digits: int = SUP_DIGITS) -> Grid:
    """``kind:lo:hi:n``, e.g. ``log:-1e3:-1e-8:20000`` or ``hybrid:-500:0:100000``."""
    try:
        kind, lo, hi, n = spec.split(":")
        n = int(n)
    except ValueError:
        raise ValueError(f"grid spec must look like kind:lo:hi:n, got {spec!r}") from None
    if kind == "hybrid":
        if Decimal(hi) != 0:
            raise ValueError("hybrid grids end at 0")
        return make_hybrid_grid(n, Decimal(lo), digits=digits)
    return make_grid(kind, Decimal(lo), Decimal(hi), n, digits)


@dataclass
class ErrorCurve:
    grid: Grid
    values: list[Decimal]
    coeffs: CoefficientSet
    digits: int

    @property
    def set_label(self) -> str:
        return self.coeffs.label

    def error_at(self, x) -> Decimal:
        return _error(self.coeffs, Decimal(x), self.digits)

    def to_csv(self) -> str:
        lines = ["x,error"]
        lines += [f"{xstr(x)},{xstr(v)}" for x, v in zip(self.grid.points, self.values)]
        return "\n".join(lines) + "\n"


def _error(s: CoefficientSet, x: Decimal, digits: int) -> Decimal:
    with working_precision(digits):
        return xexp(x, digits) - eval_real(s, x, digits)


def sample_error(s: CoefficientSet, grid: Grid, digits: int = SUP_DIGITS) -> ErrorCurve:
    if digits < 32:
        raise ValueError("error curves need at least 32 digits")
    values = [_error(s, x, digits) for x in grid.points]
    return ErrorCurve(grid, values, s, digits)


_INVPHI = (Decimal(5).sqrt() - 1) / 2


def _golden_max(f, a: Decimal, b: Decimal, iterations: int = 40) -> Decimal:
    """Largest value of f seen during a golden-section search on [a, b]."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best = max(fc, fd)
    for _ in range(iterations):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        best = max(best, fc, fd)
    return best


def _local_maxima(mags: list[Decimal]) -> list[int]:
    n = len(mags)
    out = []
    for i in range(n):
        left = mags[i - 1] if i > 0 else None
        right = mags[i + 1] if i < n - 1 else None
        if mags[i] == 0:
            continue
        if (left is None or mags[i] >= left) and (right is None or mags[i] > right):
            out.append(i)
    return out


def sup_error(curve: ErrorCurve, refine: int = 3) -> Decimal:
    """max |error| over the grid, refined near the largest local maxima.

    The ``refine`` largest discrete local maxima of |error| are each polished
    by golden-section search on their bracketing grid interval; the result
    is never below the discrete maximum.
    """
    mags = [abs(v) for v in curve.values]
    best = max(mags)
    pts = curve.grid.points
    if len(pts) < 3:
        return best
    peaks = sorted(_local_maxima(mags), key=lambda i: mags[i], reverse=True)[:refine]

    def f(x):
        return abs(curve.error_at(x))

    with working_precision(curve.digits):
        for i in peaks:
            a = pts[max(i - 1, 0)]
            b = pts[min(i + 1, len(pts) - 1)]
            best = max(best, _golden_max(f, a, b))
    return best


@dataclass
class EquioscillationReport:
    extrema: list[tuple[Decimal | None, Decimal]]
    alternation_count: int
    sup: Decimal
    level_uniformity: Decimal | None
    includes_infinity_limit: bool

    def to_json(self) -> dict:
        return {
            "alternation_count": self.alternation_count,
            "sup": xstr(self.sup, 17),
            "level_uniformity": None if self.level_uniformity is None else xstr(self.level_uniformity, 6),
            "includes_infinity_limit": self.includes_infinity_limit,
            "extrema": [
                {"x": "-inf" if x is None else xstr(x, 17), "value": xstr(v, 17)} for x, v in self.extrema
            ],
        }


def _sign_runs(values) -> int:
    runs = 0
    prev = 0
    for v in values:
        sgn = 1 if v > 0 else -1
        if sgn != prev:
            runs += 1
            prev = sgn
    return runs


def equioscillation_report(curve: ErrorCurve, tolerance_fraction: float = 0.1) -> EquioscillationReport:
    """Near-maximal extrema of the error and their sign alternation.

    Candidates are the per-lobe maxima of |error| (one per run of constant
    sign), where the limit -alpha0 at x -> -inf is a virtual first sample
    with x reported as None.
    Extrema within ``tolerance_fraction`` of the largest magnitude are
    kept, and ``alternation_count`` is the number of sign changes among
    them plus one.  ``level_uniformity`` is max/min |value| over all lobe
    maxima, so a curve whose lobes have very different heights scores far
    above 1.
    """
    if not 0 < tolerance_fraction < 1:
        raise ValueError("tolerance_fraction must lie in (0, 1)")
    pts = curve.grid.points
    vals = curve.values

    # One extremum per sign lobe; zero values split nothing.  The limit at
    # -inf opens the sequence, so the leftmost sampled lobe merges with it
    # when the signs agree.
    limit = -curve.coeffs.alpha0
    seq = [(None, None, limit)] + [(i, pts[i], v) for i, v in enumerate(vals)]
    lobes: list[tuple[int | None, Decimal | None, Decimal]] = []
    cur_sign = 0
    for i, x, v in seq:
        if v == 0:
            continue
        sgn = 1 if v > 0 else -1
        if sgn != cur_sign:
            lobes.append((i, x, v))
            cur_sign = sgn
        elif abs(v) > abs(lobes[-1][2]):
            lobes[-1] = (i, x, v)

    sampled = [i for i, _, _ in lobes if i is not None]
    for i, j in zip(sampled, sampled[1:]):
        if j - i < 3:
            raise ResolutionError(f"extrema at grid indices {i} and {j} are not resolved")

    candidates = [(x, v) for _, x, v in lobes]
    if not candidates:
        return EquioscillationReport([], 0, ZERO, None, False)

    sup = max(abs(v) for _, v in candidates)
    floor = sup * (1 - Decimal(str(tolerance_fraction)))
    extrema = [(x, v) for x, v in candidates if abs(v) >= floor]
    mags = [abs(v) for _, v in candidates]
    uniformity = max(mags) / min(mags)
    return EquioscillationReport(
        extrema=extrema,
        alternation_count=_sign_runs(v for _, v in extrema),
        sup=sup,
        level_uniformity=uniformity,
        includes_infinity_limit=bool(extrema) and extrema[0][0] is None,
    )


@dataclass
class HalphenResult:
    ratio: Decimal
    reference: Decimal
    sup_a: Decimal
    sup_b: Decimal

    @property
    def relative_deviation(self) -> Decimal:
        return abs(self.ratio / self.reference - 1)


def halphen_ratio(a: CoefficientSet, b: CoefficientSet, grid: Grid, digits: int = SUP_DIGITS) -> HalphenResult:
    """sup error of ``a`` over sup error of ``b``, next to H**(k_b - k_a)."""
    if a.order > b.order:
        raise ValueError("first set must not have the larger order")
    sup_a = sup_error(sample_error(a, grid, digits))
    sup_b = sup_a if b is a else sup_error(sample_error(b, grid, digits))
    with working_precision(digits):
        return HalphenResult(sup_a / sup_b, HALPHEN ** (b.order - a.order), sup_a, sup_b)
