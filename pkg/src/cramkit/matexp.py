"""exp(At) x0 through the partial-fraction form, plus independent oracles.

Matrices are row-major lists of lists.  Real input matrices hold
``Decimal`` entries; the shifted systems At - theta I are complex and hold
``XComplex`` entries.  Everything is dense: the intended sizes are a few
hundred at most.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .coeffs import CoefficientSet
from .errors import DegenerateChainError, DomainError, SingularMatrixError, ValidationError
from .xprec import DEFAULT_DIGITS, ONE, ZERO, XComplex, working_precision, xexp

Matrix = list[list[Decimal]]


def as_matrix(rows, digits: int = DEFAULT_DIGITS) -> Matrix:
    """Validate squareness and convert entries to Decimal at ``digits``."""
    n = len(rows)
    if n < 1:
        raise ValidationError("matrix must have at least one row")
    with working_precision(digits):
        out = []
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValidationError(f"row {i} has {len(row)} entries, expected {n}")
            out.append([+Decimal(v) for v in row])
    return out


def lu_factor(m: list[list[XComplex]]) -> tuple[list[list[XComplex]], list[int]]:
    """In-place style LU with partial pivoting by largest modulus.

    Returns the packed factors (unit lower part below the diagonal) and the
    row permutation.  Runs under the caller's decimal context.
    """
    n = len(m)
    a = [list(row) for row in m]
    perm = list(range(n))
    for k in range(n):
        p = max(range(k, n), key=lambda i: a[i][k].abs2())
        if a[p][k].abs2() == 0:
            raise SingularMatrixError(f"zero pivot in column {k}", k)
        if p != k:
            a[k], a[p] = a[p], a[k]
            perm[k], perm[p] = perm[p], perm[k]
        pivot_row = a[k]
        inv = ONE / pivot_row[k]
        for i in range(k + 1, n):
            row = a[i]
            f = row[k] * inv
            row[k] = f
            if f.re == 0 and f.im == 0:
                continue
            for j in range(k + 1, n):
                row[j] = row[j] - f * pivot_row[j]
    return a, perm


def lu_back(lu: list[list[XComplex]], perm: list[int], b) -> list[XComplex]:
    n = len(lu)
    y = [XComplex(Decimal(b[perm[i]])) if not isinstance(b[perm[i]], XComplex) else b[perm[i]] for i in range(n)]
    for i in range(n):
        row = lu[i]
        acc = y[i]
        for j in range(i):
            acc = acc - row[j] * y[j]
        y[i] = acc
    for i in reversed(range(n)):
        row = lu[i]
        acc = y[i]
        for j in range(i + 1, n):
            acc = acc - row[j] * y[j]
        y[i] = acc / row[i]
    return y


def lu_solve(m: list[list[XComplex]], b, digits: int = DEFAULT_DIGITS) -> list[XComplex]:
    """Solve M x = b by complex LU with partial pivoting."""
    if len(b) != len(m):
        raise ValidationError(f"right-hand side has length {len(b)}, expected {len(m)}")
    with working_precision(digits):
        lu, perm = lu_factor(m)
        return lu_back(lu, perm, b)


def _shifted(a: Matrix, t: Decimal, theta: XComplex) -> list[list[XComplex]]:
    n = len(a)
    out = []
    for i in range(n):
        row = [XComplex(a[i][j] * t) for j in range(n)]
        row[i] = row[i] - theta
        out.append(row)
    return out


def cram_apply(
    a: Matrix,
    t,
    x0,
    s: CoefficientSet,
    digits: int = DEFAULT_DIGITS,
    check_real: bool = False,
) -> list[Decimal]:
    """x = alpha0 x0 + 2 Re sum_j alpha_j (At - theta_j I)^{-1} x0.

    The eigenvalues of At are assumed to lie near the negative real axis;
    that is not checked.  With ``check_real`` the conjugate-pole solves are
    carried out as well and the imaginary part of the full k-term sum is
    asserted to be at rounding level before it is dropped.
    """
    n = len(a)
    if len(x0) != n:
        raise ValidationError(f"x0 has length {len(x0)}, expected {n}")
    with working_precision(digits):
        t = +Decimal(t)
        if t < 0:
            raise DomainError("time must be nonnegative")
        x0 = [+Decimal(v) for v in x0]
        acc = [XComplex(ZERO)] * n
        for j, (theta, alpha) in enumerate(zip(s.poles, s.residues)):
            if theta.im == 0:
                raise DomainError(f"pole {j} is real; shifted system may be singular")
            try:
                y = lu_solve(_shifted(a, t, theta), x0, digits)
            except SingularMatrixError as exc:
                raise SingularMatrixError(f"shifted system for pole {j} is singular", exc.column) from None
            acc = [c + alpha * v for c, v in zip(acc, y)]
        if check_real:
            full = list(acc)
            for theta, alpha in zip(s.poles, s.residues):
                y = lu_solve(_shifted(a, t, theta.conjugate()), x0, digits)
                full = [c + alpha.conjugate() * v for c, v in zip(full, y)]
            scale = max((abs(v) for v in x0), default=ZERO)
            limit = n * Decimal(10) ** (-digits + 10) * max(scale, ONE)
            worst = max(abs(c.im) for c in full)
            if worst > limit:
                raise DomainError(f"imaginary part {worst:.3e} of the pole sum exceeds {limit:.3e}")
        return [s.alpha0 * x + 2 * c.re for x, c in zip(x0, acc)]


@dataclass(frozen=True)
class DecayChain:
    """Sequential chain: nuclide i decays into nuclide i+1."""

    lambdas: tuple[Decimal, ...]

    def __post_init__(self):
        lam = tuple(Decimal(v) for v in self.lambdas)
        if not lam:
            raise ValidationError("decay chain needs at least one nuclide")
        if any(v <= 0 for v in lam):
            raise ValidationError("decay constants must be positive")
        object.__setattr__(self, "lambdas", lam)


def chain_matrix(chain: DecayChain) -> Matrix:
    lam = chain.lambdas
    n = len(lam)
    a = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = -lam[i]
        if i + 1 < n:
            a[i + 1][i] = lam[i]
    return a


def bateman_oracle(chain: DecayChain, t, x0=None, digits: int = DEFAULT_DIGITS) -> list[Decimal]:
    """Closed-form amounts at time t for distinct decay constants.

    For an initial unit amount of nuclide m, nuclide i >= m holds

        prod_{m<=j<i} l_j * sum_{j=m..i} exp(-l_j t) / prod_{p!=j} (l_p - l_j)

    with p also running over m..i; general x0 is a superposition.
    """
    lam = chain.lambdas
    n = len(lam)
    if len(set(lam)) != n:
        raise DegenerateChainError("Bateman formula needs distinct decay constants")
    if x0 is None:
        x0 = [ONE] + [ZERO] * (n - 1)
    if len(x0) != n:
        raise ValidationError(f"x0 has length {len(x0)}, expected {n}")
    with working_precision(digits + 10):
        t = Decimal(t)
        decays = [xexp(-v * t, digits + 10) for v in lam]
        out = [ZERO] * n
        for m in range(n):
            if x0[m] == 0:
                continue
            for i in range(m, n):
                coef = ONE
                for j in range(m, i):
                    coef *= lam[j]
                total = ZERO
                for j in range(m, i + 1):
                    den = ONE
                    for p in range(m, i + 1):
                        if p != j:
                            den *= lam[p] - lam[j]
                    total += decays[j] / den
                out[i] += Decimal(x0[m]) * coef * total
    with working_precision(digits):
        return [+v for v in out]


def is_symmetric(a: Matrix, digits: int = DEFAULT_DIGITS) -> bool:
    n = len(a)
    with working_precision(digits):
        scale = max(ONE, max(abs(v) for row in a for v in row))
        tol = Decimal(10) ** (-digits + 8) * scale
        return all(abs(a[i][j] - a[j][i]) <= tol for i in range(n) for j in range(i + 1, n))


def jacobi_eigh(a: Matrix, digits: int = DEFAULT_DIGITS, max_sweeps: int = 60) -> tuple[list[Decimal], Matrix]:
    """Eigenvalues and eigenvectors (columns of V) of a symmetric matrix.

    Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls
    below 10**(10 - digits) times the matrix norm.
    """
    n = len(a)
    with working_precision(digits):
        m = [list(row) for row in a]
        v = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        norm = sum(x * x for row in m for x in row).sqrt() or ONE
        tol = Decimal(10) ** (-digits + 10) * norm
        for _ in range(max_sweeps):
            off = sum(m[i][j] * m[i][j] for i in range(n) for j in range(n) if i != j).sqrt()
            if off < tol:
                return [m[i][i] for i in range(n)], v
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = m[p][q]
                    if apq == 0:
                        continue
                    theta = (m[q][q] - m[p][p]) / (2 * apq)
                    tt = ONE / (abs(theta) + (theta * theta + 1).sqrt())
                    if theta < 0:
                        tt = -tt
                    c = ONE / (tt * tt + 1).sqrt()
                    sn = tt * c
                    for k in range(n):
                        mkp, mkq = m[k][p], m[k][q]
                        m[k][p] = c * mkp - sn * mkq
                        m[k][q] = sn * mkp + c * mkq
                    for k in range(n):
                        mpk, mqk = m[p][k], m[q][k]
                        m[p][k] = c * mpk - sn * mqk
                        m[q][k] = sn * mpk + c * mqk
                    for k in range(n):
                        vkp, vkq = v[k][p], v[k][q]
                        v[k][p] = c * vkp - sn * vkq
                        v[k][q] = sn * vkp + c * vkq
        raise DomainError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def hermitian_oracle(a: Matrix, t, x0, digits: int = DEFAULT_DIGITS) -> list[Decimal]:
    """exp(At) x0 = V exp(Lambda t) V^T x0 for symmetric A."""
    if not is_symmetric(a, digits):
        raise ValidationError("hermitian_oracle needs a symmetric matrix")
    n = len(a)
    evals, v = jacobi_eigh(a, digits)
    with working_precision(digits):
        t = Decimal(t)
        coef = [sum(v[k][i] * Decimal(x0[k]) for k in range(n)) for i in range(n)]
        coef = [c * xexp(lam * t, digits) for c, lam in zip(coef, evals)]
        return [sum(v[k][i] * coef[i] for i in range(n)) for k in range(n)]
