"""How perturbed coefficients change the rational function.

``perturbation_bound`` is the first-order estimate

    |r(z) - r~(z)| <~ |a0 - a0~| + sum_j |a_j| |t_j - t~_j| / |z - t_j|**2
                                        + |a_j - a~_j| / |z - t_j|

summed over all k poles (conjugates included), with the unperturbed poles
and residues in the weights.  The bound blows up near the poles, which is
also where the measured deviation is largest.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .coeffs import CoefficientSet, truncate_set
from .errcurve import Grid
from .errors import PoleProximityError
from .ratfun import eval_complex, eval_real
from .xprec import DEFAULT_DIGITS, ZERO, XComplex, as_xcomplex, working_precision, xstr

BOUND_MIN_DISTANCE = Decimal("1e-3")
MASK_RADIUS = Decimal("1e-6")


def _check_pairing(base: CoefficientSet, perturbed: CoefficientSet) -> None:
    if base.order != perturbed.order or len(base.poles) != len(perturbed.poles):
        raise ValueError(f"sets differ in order: {base.order} vs {perturbed.order}")


def perturbation_bound(base: CoefficientSet, perturbed: CoefficientSet, z, digits: int = DEFAULT_DIGITS) -> Decimal:
    _check_pairing(base, perturbed)
    z = as_xcomplex(z)
    with working_precision(digits):
        total = abs(base.alpha0 - perturbed.alpha0)
        pairs = zip(base.all_poles(), perturbed.all_poles(), base.all_residues(), perturbed.all_residues())
        for j, (t, tp, a, ap) in enumerate(pairs):
            dist = abs(z - t)
            if dist <= BOUND_MIN_DISTANCE:
                raise PoleProximityError(f"point within {BOUND_MIN_DISTANCE} of pole {j % len(base.poles)}", j)
            total += abs(a) * abs(t - tp) / (dist * dist) + abs(a - ap) / dist
        return total


def pole_term(base: CoefficientSet, perturbed: CoefficientSet, z, digits: int = DEFAULT_DIGITS) -> Decimal:
    """The pole-displacement part of :func:`perturbation_bound` on its own."""
    _check_pairing(base, perturbed)
    z = as_xcomplex(z)
    with working_precision(digits):
        total = ZERO
        for t, tp, a in zip(base.all_poles(), perturbed.all_poles(), base.all_residues()):
            dist = abs(z - t)
            total += abs(a) * abs(t - tp) / (dist * dist)
        return total


def min_pole_distance(s: CoefficientSet, z, digits: int = DEFAULT_DIGITS) -> Decimal:
    z = as_xcomplex(z)
    with working_precision(digits):
        return min(abs(z - t) for t in s.all_poles())


@dataclass
class PerturbationReport:
    base_label: str
    perturbed_label: str
    grid: Grid
    measured: list[Decimal]
    bound: list[Decimal]

    @property
    def max_measured(self) -> Decimal:
        return max(self.measured)

    @property
    def max_bound(self) -> Decimal:
        return max(self.bound)

    def ratios(self) -> list[Decimal | None]:
        """measured/bound per point (None where the bound is zero)."""
        return [m / b if b else None for m, b in zip(self.measured, self.bound)]

    def to_json(self) -> dict:
        return {
            "base": self.base_label,
            "perturbed": self.perturbed_label,
            "max_measured": xstr(self.max_measured, 17),
            "max_bound": xstr(self.max_bound, 17),
            "points": [
                {"x": xstr(x, 17), "measured": xstr(m, 17), "bound": xstr(b, 17)}
                for x, m, b in zip(self.grid.points, self.measured, self.bound)
            ],
        }


def perturbation_report(
    base: CoefficientSet, perturbed: CoefficientSet, grid: Grid, digits: int = DEFAULT_DIGITS
) -> PerturbationReport:
    _check_pairing(base, perturbed)
    measured, bound = [], []
    for x in grid.points:
        with working_precision(digits):
            measured.append(abs(eval_real(base, x, digits) - eval_real(perturbed, x, digits)))
        bound.append(perturbation_bound(base, perturbed, x, digits))
    return PerturbationReport(base.label, perturbed.label, grid, measured, bound)


def truncation_experiment(s: CoefficientSet, d: int, grid: Grid, digits: int = DEFAULT_DIGITS) -> PerturbationReport:
    """Compare ``s`` with its ``d``-significant-digit rounding along ``grid``."""
    return perturbation_report(s, truncate_set(s, d), grid, digits)


@dataclass
class ComplexGrid:
    re_axis: list[Decimal]
    im_axis: list[Decimal]
    # values[i][j] at (re_axis[j], im_axis[i]); None marks a masked cell.
    values: list[list[Decimal | None]]
    poles: list[XComplex]

    def to_csv(self) -> str:
        lines = ["re,im,log10diff"]
        for i, im in enumerate(self.im_axis):
            for j, re in enumerate(self.re_axis):
                v = self.values[i][j]
                lines.append(f"{xstr(re, 17)},{xstr(im, 17)},{'MASK' if v is None else xstr(v, 8)}")
        return "\n".join(lines) + "\n"


def _linspace(lo: Decimal, hi: Decimal, n: int) -> list[Decimal]:
    if n == 1:
        return [(lo + hi) / 2]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def complex_grid_diff(
    base: CoefficientSet,
    perturbed: CoefficientSet,
    re_range=(-15, 10),
    im_range=(0, 20),
    resolution=(500, 400),
    digits: int = 32,
) -> ComplexGrid:
    """log10 |r(z) - r~(z)| on a rectangular window of the complex plane.

    Cells within 1e-6 of a pole of either set, and cells where the two
    functions agree exactly, are masked (None).
    """
    _check_pairing(base, perturbed)
    n_re, n_im = resolution
    with working_precision(digits):
        re_axis = _linspace(Decimal(re_range[0]), Decimal(re_range[1]), n_re)
        im_axis = _linspace(Decimal(im_range[0]), Decimal(im_range[1]), n_im)
        poles = base.all_poles() + perturbed.all_poles()
        rows = []
        for im in im_axis:
            row = []
            for re in re_axis:
                z = XComplex(re, im)
                if min(abs(z - t) for t in poles) <= MASK_RADIUS:
                    row.append(None)
                    continue
                diff = abs(eval_complex(base, z, digits) - eval_complex(perturbed, z, digits))
                row.append(diff.log10() if diff else None)
            rows.append(row)
    return ComplexGrid(re_axis, im_axis, rows, list(base.poles))
