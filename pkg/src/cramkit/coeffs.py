"""CRAM coefficient sets: built-in orders 14 and 16, JSON I/O, validation.

A set stores one representative per conjugate pair of poles (the one with
positive imaginary part) together with its residue, plus the limit value
``alpha0`` of the rational function at infinity.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Context, Decimal
from pathlib import Path

from .errors import ParseError, ValidationError
from .xprec import ZERO, XComplex, xmake, xstr

SUPPORTED_ORDERS = (14, 16)

# (re, im) literals, 20 significant digits, one row per conjugate pair.
_TABLES = {
    14: {
        "alpha0": ("1.8321743782540412751e-14", "0.0000000000000000000e0"),
        "poles": [
            ("-8.8977731864688888199e0", "1.6630982619902085304e1"),
            ("-3.7032750494234480603e0", "1.3656371871483268171e1"),
            ("-0.2087586382501301251e0", "1.0991260561901260913e1"),
            ("3.9933697105785685194e0", "6.0048316422350373178e0"),
            ("5.0893450605806245066e0", "3.5888240290270065102e0"),
            ("5.6231425727459771248e0", "1.1940690463439669766e0"),
            ("2.2697838292311127097e0", "8.4617379730402214019e0"),
        ],
        "residues": [
            ("-7.1542880635890672853e-5", "1.4361043349541300111e-4"),
            ("9.4390253107361688779e-3", "-1.7184791958483017511e-2"),
            ("-3.7636003878226968717e-1", "3.3518347029450104214e-1"),
            ("-2.3498232091082701191e1", "-5.8083591297142074004e0"),
            ("4.6933274488831293047e1", "4.5643649768827760791e1"),
            ("-2.7875161940145646468e1", "-1.0214733999056451434e2"),
            ("4.8071120988325088907e0", "-1.3209793837428723881e0"),
        ],
    },
    16: {
        "alpha0": ("2.1248537104952237488e-16", "0.0000000000000000000e0"),
        "poles": [
            ("-1.0843917078696988026e1", "1.9277446167181652284e1"),
            ("-5.2649713434426468895e0", "1.6220221473167927305e1"),
            ("5.9481522689511774808e0", "3.5874573620183222829e0"),
            ("3.5091036084149180974e0", "8.4361989858843750826e0"),
            ("6.4161776990994341923e0", "1.1941223933701386874e0"),
            ("1.4193758971856659786e0", "1.0925363484496722585e1"),
            ("4.9931747377179963991e0", "5.9968817136039422260e0"),
            ("-1.4139284624888862114e0", "1.3497725698892745389e1"),
        ],
        "residues": [
            ("-5.0901521865224915650e-7", "-2.4220017652852287970e-5"),
            ("2.1151742182466030907e-4", "4.3892969647380673918e-3"),
            ("1.1339775178483930527e2", "1.0194721704215856450e2"),
            ("1.5059585270023467528e1", "-5.7514052776421819979e0"),
            ("-6.4500878025539646595e1", "-2.2459440762652096056e2"),
            ("-1.4793007113557999718e0", "1.7686588323782937906e0"),
            ("-6.2518392463207918892e1", "-1.1190391094283228480e1"),
            ("4.1023136835410021273e-2", "-1.5743466173455468191e-1"),
        ],
    },
}

# Upper bounds on alpha0 for the built-in orders (sanity check on loaded sets).
_ALPHA0_CEILING = {14: Decimal("1e-13"), 16: Decimal("1e-15")}


@dataclass(frozen=True)
class CoefficientSet:
    order: int
    alpha0: Decimal
    poles: tuple[XComplex, ...]
    residues: tuple[XComplex, ...]
    label: str = ""
    alpha0_imag: Decimal = ZERO

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(self.poles))
        object.__setattr__(self, "residues", tuple(self.residues))

    def all_poles(self) -> list[XComplex]:
        """Representatives followed by their conjugates (k entries)."""
        return list(self.poles) + [p.conjugate() for p in self.poles]

    def all_residues(self) -> list[XComplex]:
        return list(self.residues) + [a.conjugate() for a in self.residues]

    def with_label(self, label: str) -> "CoefficientSet":
        return replace(self, label=label)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "alpha0": xstr(self.alpha0),
            "poles": [{"re": xstr(p.re), "im": xstr(p.im)} for p in self.poles],
            "residues": [{"re": xstr(a.re), "im": xstr(a.im)} for a in self.residues],
            "label": self.label,
        }


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    indices: list[int] = field(default_factory=list)


@dataclass
class ValidationReport:
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def raise_if_failed(self) -> None:
        bad = self.failures()
        if bad:
            raise ValidationError("; ".join(f"{c.name}: {c.detail}" for c in bad))


def _exact(text: str) -> Decimal:
    # Exact literal; 20-digit table values never need rounding.
    return Decimal(text)


def builtin_set(k: int) -> CoefficientSet:
    """The corrected order-14 or order-16 coefficients, exactly as tabulated."""
    if k not in _TABLES:
        raise ValueError(f"no built-in coefficients for order {k}; supported orders: {SUPPORTED_ORDERS}")
    table = _TABLES[k]
    a0_re, a0_im = table["alpha0"]
    s = CoefficientSet(
        order=k,
        alpha0=_exact(a0_re),
        alpha0_imag=_exact(a0_im),
        poles=[XComplex(_exact(r), _exact(i)) for r, i in table["poles"]],
        residues=[XComplex(_exact(r), _exact(i)) for r, i in table["residues"]],
        label=f"builtin-{k}",
    )
    validate_set(s).raise_if_failed()
    return s


def validate_set(s: CoefficientSet) -> ValidationReport:
    k = s.order
    checks = []

    order_ok = isinstance(k, int) and k >= 2 and k % 2 == 0
    checks.append(Check("order", order_ok, "" if order_ok else f"order must be a positive even integer, got {k}"))

    half = k // 2 if order_ok else None
    length_ok = half is not None and len(s.poles) == half and len(s.residues) == half
    checks.append(
        Check(
            "length mismatch",
            length_ok,
            "" if length_ok else f"expected {half} poles and residues, got {len(s.poles)} and {len(s.residues)}",
        )
    )

    bad_im = [j for j, p in enumerate(s.poles) if not p.im > 0]
    checks.append(
        Check(
            "pole imaginary part positive",
            not bad_im,
            "" if not bad_im else "poles must be stored with Im > 0",
            bad_im,
        )
    )

    real_ok = s.alpha0_imag == 0
    checks.append(Check("alpha0 must be real", real_ok, "" if real_ok else f"imaginary part {s.alpha0_imag}"))

    if k in _ALPHA0_CEILING:
        ceiling = _ALPHA0_CEILING[k]
        mag_ok = 0 < s.alpha0 < ceiling
        checks.append(
            Check("alpha0 range", mag_ok, "" if mag_ok else f"alpha0 = {s.alpha0} not in (0, {ceiling})")
        )

    dupes = []
    for i in range(len(s.poles)):
        for j in range(i + 1, len(s.poles)):
            if s.poles[i] == s.poles[j]:
                dupes.extend([i, j])
    checks.append(
        Check(
            "simple poles violated",
            not dupes,
            "" if not dupes else "repeated poles",
            sorted(set(dupes)),
        )
    )
    return ValidationReport(checks)


def truncate_set(s: CoefficientSet, d: int) -> CoefficientSet:
    """Round every real and imaginary part to ``d`` significant digits.

    Ties round away from zero.
    """
    if not 1 <= d <= 20:
        raise ValueError(f"digits kept must be in [1, 20], got {d}")
    ctx = Context(prec=d, rounding=ROUND_HALF_UP)

    def rnd(x: Decimal) -> Decimal:
        return ctx.create_decimal(x)

    def rndc(z: XComplex) -> XComplex:
        return XComplex(rnd(z.re), rnd(z.im))

    return CoefficientSet(
        order=s.order,
        alpha0=rnd(s.alpha0),
        alpha0_imag=rnd(s.alpha0_imag),
        poles=[rndc(p) for p in s.poles],
        residues=[rndc(a) for a in s.residues],
        label=f"{s.label}/truncated-{d}",
    )


def _parse_number(obj, where: str) -> Decimal:
    if not isinstance(obj, str):
        raise ParseError(f"{where}: expected a decimal string, got {type(obj).__name__}")
    try:
        return xmake(obj, 256)
    except ParseError:
        raise ParseError(f"{where}: malformed decimal literal {obj!r}") from None


def _parse_complex(obj, where: str) -> XComplex:
    if not isinstance(obj, dict) or set(obj) != {"re", "im"}:
        raise ParseError(f"{where}: expected an object with keys 're' and 'im'")
    return XComplex(_parse_number(obj["re"], f"{where}.re"), _parse_number(obj["im"], f"{where}.im"))


def set_from_json(
    data: dict, *, negate_axis: bool = False, residue_scale: Decimal | str = "1"
) -> CoefficientSet:
    """Build and validate a set from the JSON schema.

    Files written for the transformed variable (approximating exp(-x) on
    the positive axis) are converted with ``negate_axis=True``, which maps
    poles and residues to their negatives.  ``residue_scale`` multiplies
    every residue, for files that fold a factor into them.  Neither is
    guessed: the caller declares the convention of the file.

    A pole stored with negative imaginary part is replaced, together with
    its residue, by the conjugate pair member and a warning is issued.
    """
    if not isinstance(data, dict):
        raise ParseError("top level: expected a JSON object")
    for key in ("order", "alpha0", "poles", "residues"):
        if key not in data:
            raise ParseError(f"{key}: missing field")
    order = data["order"]
    if not isinstance(order, int) or isinstance(order, bool):
        raise ParseError("order: expected an integer")
    if isinstance(data["alpha0"], dict):
        a0 = _parse_complex(data["alpha0"], "alpha0")
        alpha0, alpha0_imag = a0.re, a0.im
    else:
        alpha0, alpha0_imag = _parse_number(data["alpha0"], "alpha0"), ZERO
    for key in ("poles", "residues"):
        if not isinstance(data[key], list):
            raise ParseError(f"{key}: expected a list")
    poles = [_parse_complex(p, f"poles[{j}]") for j, p in enumerate(data["poles"])]
    residues = [_parse_complex(a, f"residues[{j}]") for j, a in enumerate(data["residues"])]
    label = data.get("label", "")
    if not isinstance(label, str):
        raise ParseError("label: expected a string")

    scale = Decimal(residue_scale)
    if negate_axis:
        poles = [-p for p in poles]
        residues = [-a for a in residues]
    if scale != 1:
        residues = [XComplex(a.re * scale, a.im * scale) for a in residues]

    for j, p in enumerate(poles):
        if p.im < 0 and j < len(residues):
            warnings.warn(f"pole {j} stored with negative imaginary part; using its conjugate pair member")
            poles[j] = p.conjugate()
            residues[j] = residues[j].conjugate()

    s = CoefficientSet(order=order, alpha0=alpha0, alpha0_imag=alpha0_imag, poles=poles, residues=residues, label=label)
    validate_set(s).raise_if_failed()
    return s


def load_set(path, **convention) -> CoefficientSet:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    return set_from_json(data, **convention)


def save_set(s: CoefficientSet, path) -> None:
    Path(path).write_text(json.dumps(s.to_json(), indent=2) + "\n")
