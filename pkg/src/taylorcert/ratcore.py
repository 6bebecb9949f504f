"""Exact rational scalars, rational-endpoint interval arithmetic, and certified
enclosures of the elementary functions the certification pipeline needs.

Every operation here is exact: endpoints are `fractions.Fraction` values and no
floating point enters any rigorous computation.  Elementary enclosures are
truncated series in exact rational arithmetic with explicit tail bounds, so the
returned interval is a mathematical guarantee, not a numerical estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

# The universal exact scalar of the library.
Rational = Fraction

RationalLike = Union[Fraction, int, str]

#: Default width for elementary-function enclosures.
DEFAULT_ENCLOSURE_WIDTH = Fraction(1, 10**12)


class EnclosureError(ValueError):
    """Raised when an enclosure is requested outside its certified domain."""


def as_rational(value: RationalLike) -> Fraction:
    """Coerce int/str/Fraction to an exact Fraction; floats are rejected.

    Strings may be integers ("3"), ratios ("3/4"), or decimals ("0.25", parsed
    exactly).
    """
    if isinstance(value, bool):
        raise TypeError("cannot convert bool to exact rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass a string or Fraction")
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to exact rational")


def format_rational(q: Fraction) -> str:
    """Serialize as "p/q" (or plain "p" for integers); inverse of as_rational."""
    return str(q)


def decimal_str(q: Fraction, digits: int = 17) -> str:
    """Decimal rendering of an exact rational, truncated toward zero.

    Appends an ellipsis when the expansion does not terminate within `digits`
    fractional digits, so a reader can tell displayed values from exact ones.
    """
    sign = "-" if q < 0 else ""
    n, d = abs(q.numerator), q.denominator
    whole, rem = divmod(n, d)
    if rem == 0:
        return f"{sign}{whole}"
    frac_digits = []
    for _ in range(digits):
        rem *= 10
        dig, rem = divmod(rem, d)
        frac_digits.append(str(dig))
        if rem == 0:
            break
    tail = "..." if rem else ""
    return f"{sign}{whole}.{''.join(frac_digits)}{tail}"


@dataclass(frozen=True)
class RatInterval:
    """Closed interval [lo, hi] with exact rational endpoints.

    All arithmetic is containment-sound: for a in A and b in B, a op b lies in
    A op B.  Results are the tightest rational-endpoint intervals containing
    the pointwise image of each operation.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.lo, Fraction) or not isinstance(self.hi, Fraction):
            object.__setattr__(self, "lo", as_rational(self.lo))
            object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value: RationalLike) -> "RatInterval":
        v = as_rational(value)
        return cls(v, v)

    @classmethod
    def of(cls, lo: RationalLike, hi: RationalLike) -> "RatInterval":
        return cls(as_rational(lo), as_rational(hi))

    # -- queries ---------------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    @property
    def mag(self) -> Fraction:
        """Largest absolute value over the interval."""
        return max(abs(self.lo), abs(self.hi))

    def __contains__(self, value: RationalLike) -> bool:
        v = as_rational(value)
        return self.lo <= v <= self.hi

    def contains_interval(self, other: "RatInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def straddles_zero(self) -> bool:
        return self.lo < 0 < self.hi

    # -- arithmetic ------------------------------------------------------

    def __neg__(self) -> "RatInterval":
        return RatInterval(-self.hi, -self.lo)

    def __add__(self, other: "RatInterval") -> "RatInterval":
        return RatInterval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "RatInterval") -> "RatInterval":
        return RatInterval(self.lo - other.hi, self.hi - other.lo)

    def __mul__(self, other: "RatInterval") -> "RatInterval":
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return RatInterval(min(products), max(products))

    def __truediv__(self, other: "RatInterval") -> "RatInterval":
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError(
                f"divisor interval [{other.lo}, {other.hi}] contains zero"
            )
        quotients = (
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        )
        return RatInterval(min(quotients), max(quotients))

    def scale(self, factor: RationalLike) -> "RatInterval":
        c = as_rational(factor)
        if c >= 0:
            return RatInterval(c * self.lo, c * self.hi)
        return RatInterval(c * self.hi, c * self.lo)

    def shift(self, offset: RationalLike) -> "RatInterval":
        c = as_rational(offset)
        return RatInterval(self.lo + c, self.hi + c)

    def int_pow(self, exponent: int) -> "RatInterval":
        """Tightest enclosure of {t**exponent : t in self}, exponent >= 0.

        Even powers of straddling intervals have lower endpoint exactly 0.
        """
        if exponent < 0:
            raise ValueError("int_pow exponent must be nonnegative")
        if exponent == 0:
            return RatInterval.point(1)
        lo_p = self.lo**exponent
        hi_p = self.hi**exponent
        if exponent % 2 == 1:
            return RatInterval(lo_p, hi_p)
        if self.lo >= 0:
            return RatInterval(lo_p, hi_p)
        if self.hi <= 0:
            return RatInterval(hi_p, lo_p)
        return RatInterval(Fraction(0), max(lo_p, hi_p))

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class DecimalRounding:
    """Either the identity ("exact") or outward rounding to `places` decimals.

    Outward rounding only ever widens an interval, so applying it anywhere in
    a chain of sound interval computations preserves soundness.
    """

    mode: str  # "exact" | "outward"
    places: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "outward"):
            raise ValueError(f"unknown rounding mode {self.mode!r}")
        if self.mode == "outward" and self.places < 0:
            raise ValueError("outward rounding needs places >= 0")

    @classmethod
    def exact(cls) -> "DecimalRounding":
        return cls("exact")

    @classmethod
    def outward(cls, places: int) -> "DecimalRounding":
        return cls("outward", places)

    @classmethod
    def parse(cls, text: str) -> "DecimalRounding":
        text = text.strip()
        if text == "exact":
            return cls.exact()
        if text.startswith("outward:"):
            return cls.outward(int(text.split(":", 1)[1]))
        raise ValueError(f"rounding must be 'exact' or 'outward:D', got {text!r}")

    @property
    def is_exact(self) -> bool:
        return self.mode == "exact"

    def round_down(self, q: Fraction) -> Fraction:
        if self.is_exact:
            return q
        scale = 10**self.places
        return Fraction(q.numerator * scale // q.denominator, scale)

    def round_up(self, q: Fraction) -> Fraction:
        if self.is_exact:
            return q
        scale = 10**self.places
        return Fraction(-((-q.numerator) * scale // q.denominator), scale)

    def apply(self, interval: RatInterval) -> RatInterval:
        if self.is_exact:
            return interval
        return RatInterval(self.round_down(interval.lo), self.round_up(interval.hi))

    def __str__(self) -> str:
        return "exact" if self.is_exact else f"outward:{self.places}"


# Validated enclosure of pi, precision far beyond what the tangent domain
# check needs.  Digits from the standard decimal expansion
# pi = 3.14159265358979323846... (e.g. OEIS A000796).
PI_ENCLOSURE = RatInterval(
    Fraction("3.14159265358979323"), Fraction("3.14159265358979324")
)

#: Certified lower bound on pi/2, used as the tangent domain cutoff.
HALF_PI_LOWER = PI_ENCLOSURE.lo / 2


def _check_width(width: Fraction) -> Fraction:
    width = as_rational(width)
    if width <= 0:
        raise EnclosureError("enclosure width must be positive")
    return width


def enclose_exp_neg(
    q: RationalLike, width: RationalLike = DEFAULT_ENCLOSURE_WIDTH
) -> RatInterval:
    """Certified enclosure of exp(-q) for rational q >= 0.

    Sums the series for exp(q) in exact rationals, bounds the tail by a
    geometric series, and reciprocates.  The returned width is at most `width`.
    """
    q = as_rational(q)
    width = _check_width(width)
    if q < 0:
        raise EnclosureError(f"enclose_exp_neg needs q >= 0, got {q}")
    if q == 0:
        return RatInterval.point(1)

    partial = Fraction(1)
    term = Fraction(1)
    k = 0
    while True:
        k += 1
        term *= q / k
        partial += term
        # Tail after k terms: sum_{j>k} q^j/j! <= term * r/(1-r), r = q/(k+1),
        # valid once q < k+1.
        if k + 1 > q:
            ratio = q / (k + 1)
            tail = term * ratio / (1 - ratio)
            # exp(q) in [partial, partial + tail]; reciprocal width is
            # tail / (partial * (partial + tail)) <= tail since partial >= 1.
            if tail / (partial * (partial + tail)) <= width:
                upper_exp = partial + tail
                return RatInterval(1 / upper_exp, 1 / partial)


def _sin_enclosure(t: Fraction, width: Fraction) -> RatInterval:
    """Enclosure of sin(t) for 0 <= t < 3/2 via the alternating series.

    The truncation error is bounded by the first omitted term (Lagrange bound
    with |sin^(m)| <= 1).
    """
    partial = Fraction(0)
    term = t  # t^(2k+1) / (2k+1)!
    k = 0
    while True:
        partial += term
        nxt = -term * t * t / ((2 * k + 2) * (2 * k + 3))
        if abs(nxt) <= width / 2:
            err = abs(nxt)
            return RatInterval(partial - err, partial + err)
        term = nxt
        k += 1


def _cos_enclosure(t: Fraction, width: Fraction) -> RatInterval:
    """Enclosure of cos(t) for 0 <= t < 3/2, same tail bound as the sine."""
    partial = Fraction(0)
    term = Fraction(1)
    k = 0
    while True:
        partial += term
        nxt = -term * t * t / ((2 * k + 1) * (2 * k + 2))
        if abs(nxt) <= width / 2:
            err = abs(nxt)
            return RatInterval(partial - err, partial + err)
        term = nxt
        k += 1


def _tan_point_enclosure(t: Fraction, width: Fraction) -> RatInterval:
    sin_enc = _sin_enclosure(t, width)
    cos_enc = _cos_enclosure(t, width)
    if cos_enc.lo <= 0:
        raise EnclosureError(f"cosine enclosure at {t} not bounded away from 0")
    # cos > 0 throughout, so the quotient corners are immediate.
    lo = sin_enc.lo / cos_enc.hi if sin_enc.lo >= 0 else sin_enc.lo / cos_enc.lo
    hi = sin_enc.hi / cos_enc.lo
    return RatInterval(lo, hi)


def enclose_tan(
    theta: RatInterval, width: RationalLike = DEFAULT_ENCLOSURE_WIDTH
) -> RatInterval:
    """Certified enclosure of tan over an interval theta inside [0, pi/2).

    tan is increasing there, so the image is [tan(theta.lo), tan(theta.hi)];
    each endpoint is enclosed by certified sine/cosine series divided outward.
    The result width is at most `width` plus the spread tan(hi) - tan(lo).
    """
    width = _check_width(width)
    if theta.lo < 0:
        raise EnclosureError(f"tan domain is [0, pi/2); got lower endpoint {theta.lo}")
    if theta.hi >= Fraction(3, 2):
        raise EnclosureError(
            f"tan argument {theta.hi} outside the series domain [0, 3/2)"
        )
    if theta.hi >= HALF_PI_LOWER:
        raise EnclosureError(
            f"tan argument {theta.hi} not certified below pi/2 >= {HALF_PI_LOWER}"
        )
    # The excess of the result width over tan(hi) - tan(lo) is bounded by the
    # two endpoint enclosure widths; shrink the series width until that excess
    # fits the budget.  Near the domain edge the quotient amplifies the series
    # width, hence the loop.
    point_width = width / 4
    while True:
        lo_enc = _tan_point_enclosure(theta.lo, point_width)
        hi_enc = (
            lo_enc
            if theta.hi == theta.lo
            else _tan_point_enclosure(theta.hi, point_width)
        )
        if lo_enc.width + hi_enc.width <= width:
            return RatInterval(lo_enc.lo, hi_enc.hi)
        point_width /= 16


def enclose_sqrt(
    q: RationalLike, width: RationalLike = DEFAULT_ENCLOSURE_WIDTH
) -> RatInterval:
    """Certified enclosure [lo, hi] of sqrt(q): lo**2 <= q <= hi**2.

    Perfect squares of the numerator and denominator short-circuit to an exact
    point; otherwise plain bisection from [0, max(1, q)].
    """
    q = as_rational(q)
    width = _check_width(width)
    if q < 0:
        raise EnclosureError(f"enclose_sqrt needs q >= 0, got {q}")
    if q == 0:
        return RatInterval.point(0)

    num_root = isqrt(q.numerator)
    den_root = isqrt(q.denominator)
    if num_root * num_root == q.numerator and den_root * den_root == q.denominator:
        return RatInterval.point(Fraction(num_root, den_root))

    lo = Fraction(0)
    hi = max(Fraction(1), q)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if mid * mid <= q:
            lo = mid
        else:
            hi = mid
    return RatInterval(lo, hi)
