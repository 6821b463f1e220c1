"""Evaluation of CRAM rational functions and conversion between forms.

The partial-fraction form is what the coefficient tables store; the
polynomial form p(x)/q(x) is recovered by expanding pole products, and the
way back goes through Aberth-Ehrlich root finding and p(theta)/q'(theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal

from .coeffs import CoefficientSet
from .errors import ConvergenceError, DomainError, PoleProximityError
from .xprec import DEFAULT_DIGITS, ONE, ZERO, XComplex, as_xcomplex, working_precision, xstr

ROUNDTRIP_DIGITS = 50


def eval_real(s: CoefficientSet, x, digits: int = DEFAULT_DIGITS) -> Decimal:
    """r(x) = alpha0 + 2 Re sum_j alpha_j / (x - theta_j) for real x."""
    with working_precision(digits):
        x = +Decimal(x)
        acc = ZERO
        for (tr, ti), (ar, ai) in zip(s.poles, s.residues):
            # alpha/(x - theta) = alpha * conj(x - theta) / |x - theta|^2
            dr = x - tr
            acc += (ar * dr - ai * ti) / (dr * dr + ti * ti)
        return s.alpha0 + 2 * acc


def eval_complex(s: CoefficientSet, z, digits: int = DEFAULT_DIGITS) -> XComplex:
    """Full sum over all k poles at a complex point."""
    z = as_xcomplex(z)
    with working_precision(digits):
        tol = Decimal(10) ** (-digits + 4)
        acc = XComplex(+s.alpha0, ZERO)
        for j, (theta, alpha) in enumerate(zip(s.poles, s.residues)):
            d1 = z - theta
            d2 = z - theta.conjugate()
            if abs(d1) <= tol or abs(d2) <= tol:
                raise PoleProximityError(f"evaluation point within {tol} of pole {j}", j)
            acc = acc + alpha / d1 + alpha.conjugate() / d2
        return acc


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, coefficients in ascending degree."""

    coeffs: tuple[Decimal, ...]

    def __post_init__(self):
        c = tuple(Decimal(v) for v in self.coeffs)
        if not c:
            raise ValueError("polynomial needs at least one coefficient")
        if c[-1] == 0 and len(c) > 1:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Decimal:
        return self.coeffs[-1]

    def __call__(self, x):
        # Horner; works for Decimal and XComplex arguments.
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((ZERO,))
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def norm(self) -> Decimal:
        return max(abs(c) for c in self.coeffs)

    def to_json(self) -> dict:
        return {"coeffs": [xstr(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "Polynomial":
        return cls(tuple(Decimal(c) for c in data["coeffs"]))


def _poly_from_roots(roots: list[XComplex]) -> list[XComplex]:
    """Monic complex coefficients (ascending) of prod (x - r)."""
    c = [XComplex(ONE)]
    for r in roots:
        nxt = [XComplex(ZERO)] * (len(c) + 1)
        for i, ci in enumerate(c):
            nxt[i + 1] = nxt[i + 1] + ci
            nxt[i] = nxt[i] - ci * r
        c = nxt
    return c


def _realify(c: list[XComplex], digits: int, what: str) -> Polynomial:
    scale = max(abs(v) for v in c)
    tol = Decimal(10) ** (-digits + 6) * scale
    worst = max(abs(v.im) for v in c)
    if worst > tol:
        raise DomainError(f"{what}: imaginary residue {worst:.3e} exceeds {tol:.3e}")
    while len(c) > 1 and c[-1].re == 0:
        c = c[:-1]
    return Polynomial(tuple(v.re for v in c))


def denominator_from_poles(s: CoefficientSet, digits: int = DEFAULT_DIGITS) -> Polynomial:
    """Monic q(x) = prod over all k poles of (x - theta)."""
    with working_precision(digits):
        return _realify(_poly_from_roots(s.all_poles()), digits, "denominator")


def numerator_from_pfd(s: CoefficientSet, digits: int = DEFAULT_DIGITS) -> Polynomial:
    """p(x) = alpha0 q(x) + sum_j alpha_j prod_{i != j} (x - theta_i)."""
    with working_precision(digits):
        poles = s.all_poles()
        residues = s.all_residues()
        k = len(poles)
        acc = [XComplex(s.alpha0) * c for c in _poly_from_roots(poles)]
        for j in range(k):
            others = _poly_from_roots(poles[:j] + poles[j + 1 :])
            for i, c in enumerate(others):
                acc[i] = acc[i] + residues[j] * c
        return _realify(acc, digits, "numerator")


def _initial_guesses(poly: Polynomial) -> list[XComplex]:
    # Fujiwara bound: every root lies within this radius, and unlike the
    # Cauchy bound it does not grow like the constant term.
    n = poly.degree
    lead = poly.leading
    c = poly.coeffs
    radius = 2 * max(float(abs(c[n - i] / lead)) ** (1.0 / i) for i in range(1, n + 1))
    radius = radius or 1.0
    out = []
    for j in range(n):
        ang = 2 * math.pi * j / n + 0.4
        out.append(XComplex(Decimal(radius * math.cos(ang)), Decimal(radius * math.sin(ang))))
    return out


def root_residuals(poly: Polynomial, roots: list[XComplex]) -> list[Decimal]:
    return [abs(poly(z)) for z in roots]


def find_roots(poly: Polynomial, digits: int = DEFAULT_DIGITS, max_iter: int = 200) -> list[XComplex]:
    """All complex roots by Aberth-Ehrlich simultaneous iteration.

    Starts from the n-th roots of unity rotated by 0.4 rad on a circle that
    encloses all roots, so runs are deterministic.  Stops when every
    relative correction is below 10**(6 - digits).  Roots are returned
    sorted by imaginary part descending, then real part ascending.
    """
    n = poly.degree
    if n < 1:
        raise ValueError("polynomial must have degree >= 1")
    with working_precision(digits):
        if n == 1:
            return [XComplex(-poly.coeffs[0] / poly.coeffs[1])]
        dpoly = poly.derivative()
        z = _initial_guesses(poly)
        tol = Decimal(10) ** (-digits + 6)
        for _ in range(max_iter):
            worst = ZERO
            for j in range(n):
                zj = z[j]
                pv = poly(zj)
                if pv == XComplex(ZERO):
                    continue
                w = pv / dpoly(zj)
                s = XComplex(ZERO)
                for i in range(n):
                    if i != j:
                        s = s + ONE / (zj - z[i])
                delta = w / (ONE - w * s)
                z[j] = zj - delta
                rel = abs(delta) / max(abs(z[j]), tol)
                if rel > worst:
                    worst = rel
            if worst < tol:
                return sorted(z, key=lambda r: (-r.im, r.re))
        raise ConvergenceError(
            f"Aberth iteration did not converge in {max_iter} iterations",
            best=z,
            residuals=root_residuals(poly, z),
        )


def residues_from_polys(
    p: Polynomial, q: Polynomial, poles: list[XComplex], digits: int = DEFAULT_DIGITS
) -> tuple[Decimal, list[XComplex]]:
    """(alpha0, [p(theta)/q'(theta) for theta in poles])."""
    if p.degree > q.degree:
        raise ValueError("numerator degree exceeds denominator degree")
    with working_precision(digits):
        dq = q.derivative()
        qn = q.norm()
        residues = []
        for j, theta in enumerate(poles):
            d = dq(theta)
            scale = qn * max(ONE, abs(theta)) ** max(q.degree - 1, 0)
            if abs(d) < Decimal(10) ** (-digits + 10) * scale:
                raise DomainError(f"pole {j}: q' nearly vanishes (multiple pole?)")
            residues.append(p(theta) / d)
        alpha0 = p.leading / q.leading if p.degree == q.degree else ZERO
        return alpha0, residues


def match_roots(roots: list[XComplex], targets: list[XComplex], tol: Decimal = Decimal("1e-4")) -> list[XComplex]:
    """For each target, the unique root within ``tol`` of it."""
    matched = []
    used = set()
    for j, t in enumerate(targets):
        near = [i for i, r in enumerate(roots) if abs(r - t) < tol]
        if len(near) != 1 or near[0] in used:
            raise DomainError(f"cannot match pole {j} unambiguously ({len(near)} candidates)")
        used.add(near[0])
        matched.append(roots[near[0]])
    return matched


def agreement_digits(a, b, cap: int) -> float:
    """Number of significant decimal digits to which a and b agree."""
    a, b = as_xcomplex(a), as_xcomplex(b)
    err = abs(a - b)
    mag = abs(a)
    if err == 0:
        return float(cap)
    if mag == 0:
        return 0.0
    return min(float(cap), max(0.0, -float((err / mag).log10())))


@dataclass
class RoundtripRow:
    name: str
    original: object
    recovered: object
    agreement: float


@dataclass
class RoundtripReport:
    label: str
    digits: int
    rows: list[RoundtripRow]
    root_residuals: list[Decimal]

    @property
    def min_agreement(self) -> float:
        return min(r.agreement for r in self.rows)

    def recovered_set(self, order: int) -> CoefficientSet:
        by_name = {r.name: r.recovered for r in self.rows}
        half = order // 2
        return CoefficientSet(
            order=order,
            alpha0=by_name["alpha0"],
            poles=[by_name[f"theta{j + 1}"] for j in range(half)],
            residues=[by_name[f"alpha{j + 1}"] for j in range(half)],
            label=f"{self.label}/roundtrip",
        )

    def to_json(self) -> dict:
        def fmt(v):
            if isinstance(v, XComplex):
                return {"re": xstr(v.re), "im": xstr(v.im)}
            return xstr(v)

        return {
            "label": self.label,
            "digits": self.digits,
            "min_agreement": f"{self.min_agreement:.2f}",
            "rows": [
                {
                    "name": r.name,
                    "original": fmt(r.original),
                    "recovered": fmt(r.recovered),
                    "agreement": f"{r.agreement:.2f}",
                }
                for r in self.rows
            ],
            "root_residuals": [xstr(v, 6) for v in self.root_residuals],
        }


def roundtrip_report(
    s: CoefficientSet, digits: int = ROUNDTRIP_DIGITS, reference: CoefficientSet | None = None
) -> RoundtripReport:
    """set -> (p, q) -> roots of q -> residues, compared coefficient-wise.

    The recovered coefficients are compared with ``reference`` (default:
    ``s`` itself), which lets a perturbed set be scored against the exact one.
    """
    if digits < 40:
        raise ValueError("round trip needs at least 40 digits")
    ref = s if reference is None else reference
    q = denominator_from_poles(s, digits)
    p = numerator_from_pfd(s, digits)
    roots = find_roots(q, digits)
    with working_precision(digits):
        residuals = root_residuals(q, roots)
    upper = [r for r in roots if r.im > 0]
    poles = match_roots(upper, list(s.poles))
    alpha0, residues = residues_from_polys(p, q, poles, digits)

    cap = digits
    rows = [RoundtripRow("alpha0", ref.alpha0, alpha0, agreement_digits(ref.alpha0, alpha0, cap))]
    for j, (t0, t1) in enumerate(zip(ref.poles, poles)):
        rows.append(RoundtripRow(f"theta{j + 1}", t0, t1, agreement_digits(t0, t1, cap)))
    for j, (a0, a1) in enumerate(zip(ref.residues, residues)):
        rows.append(RoundtripRow(f"alpha{j + 1}", a0, a1, agreement_digits(a0, a1, cap)))
    return RoundtripReport(label=s.label, digits=digits, rows=rows, root_residuals=residuals)
