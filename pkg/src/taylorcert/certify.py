"""Assemble rigorous error certificates for Taylor partial sums.

The pipeline: exact coefficients from the derivative chain, a guaranteed
convergence-radius bound, a certified solution range on [x0, x1], sequential
interval bounds for every solution derivative up to order n+1, and finally the
degree-n remainder in Lagrange form, |R_n(x)| <= sup|y^(n+1)| * dx^(n+1) /
(n+1)!.  A centralized variant shifts the partial sum by the midpoint of the
signed remainder range, halving the worst-case error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from . import cauchy, comparison, odexpr
from .odexpr import DerivativeChain, FlowExpr, symbol_name
from .ratcore import (
    DEFAULT_ENCLOSURE_WIDTH,
    DecimalRounding,
    RatInterval,
    RationalLike,
    as_rational,
)

#: Degree cap for polynomials accepted by certify_polynomial.
MAX_POLY_DEGREE = 64


class CertificationError(RuntimeError):
    """A pipeline stage could not establish its guarantee."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class ProblemSpec:
    """An initial value problem y' = f(x, y), y(x0) = y0 plus certification
    parameters: the partial-sum degree, the right end x1 of the certification
    interval, the box radii for the radius bound, the reporting rounding mode
    and the enclosure width."""

    f: FlowExpr
    x0: Fraction
    y0: Fraction
    degree: int
    x1: Fraction
    r1: Fraction = Fraction(1)
    r2: Fraction = Fraction(1)
    rounding: DecimalRounding = DecimalRounding.exact()
    enclosure_width: Fraction = DEFAULT_ENCLOSURE_WIDTH
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.f.order > 0:
            raise ValueError(
                f"right-hand side mentions {symbol_name(self.f.order)}"
            )
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if self.x1 <= self.x0:
            raise ValueError("x1 must exceed x0")
        if self.r1 <= 0 or self.r2 <= 0:
            raise ValueError("box radii must be positive")
        if self.enclosure_width <= 0:
            raise ValueError("enclosure width must be positive")

    @property
    def dx(self) -> Fraction:
        return self.x1 - self.x0


@dataclass(frozen=True)
class Certificate:
    """Full output record of certify_partial_sum.

    derivative_bounds[k-1] encloses y^(k) over [x0, x1] for k = 1 .. n+1.
    remainder_bound = max(|remainder_signed.lo|, |remainder_signed.hi|) bounds
    |y(x) - p_n(x)| for every x in [x0, x1].  Adding
    centralized_coefficient * (x - x0)^(n+1) to the partial sum brings the
    worst-case error down to centralized_halfwidth.
    """

    problem: ProblemSpec
    coefficients: tuple[Fraction, ...]
    radius: cauchy.RadiusCertificate
    yrange: comparison.SolutionRange
    derivative_bounds: tuple[RatInterval, ...]
    remainder_bound: Fraction
    remainder_signed: RatInterval
    centralized_coefficient: Fraction
    centralized_halfwidth: Fraction
    warnings: tuple[str, ...] = ()
    parity_notes: tuple[str, ...] = ()


def bound_derivatives(
    chain: DerivativeChain,
    xrange: RatInterval,
    yrange: RatInterval,
    rounding: DecimalRounding = DecimalRounding.exact(),
) -> list[RatInterval]:
    """Sequential interval bounds for y^(1) ... y^(len(chain)) over the box.

    The bound for y^(k) evaluates D_k monomial-wise with x over xrange, y over
    yrange and each lower-order derivative symbol over its own previously
    computed bound.  With an outward rounding mode every bound is widened
    before being stored and fed to the next stage, which reproduces
    two-decimal tabulated bounds; exact mode keeps the raw rational endpoints.
    """
    env: dict[str, RatInterval] = {"x": xrange, "y": yrange}
    bounds: list[RatInterval] = []
    for k in range(1, len(chain) + 1):
        bound = rounding.apply(chain.expr_for_order(k).eval_interval(env))
        bounds.append(bound)
        env[symbol_name(k)] = bound
    return bounds


def lagrange_remainder(
    bound_top: RatInterval, dx: RationalLike, n: int
) -> tuple[Fraction, RatInterval]:
    """Signed remainder range and magnitude bound for the degree-n partial sum.

    bound_top must enclose y^(n+1) over [x0, x0+dx]; then at each x the
    remainder lies in bound_top * (x-x0)^(n+1) / (n+1)!.  The returned signed
    range is that envelope at the full step dx, and the magnitude bound
    max(|lo|, |hi|) covers every x in the interval since |x-x0| <= dx.
    """
    dx = as_rational(dx)
    if dx < 0:
        raise ValueError("dx must be nonnegative")
    scale = dx ** (n + 1) / factorial(n + 1)
    signed = bound_top.scale(scale)
    return signed.mag, signed


def centralize(bound_top: RatInterval, n: int) -> tuple[Fraction, Fraction]:
    """Midpoint coefficient and halfwidth scale for error centralization.

    Adding midpoint(bound_top)/(n+1)! * (x-x0)^(n+1) to the partial sum leaves
    a worst-case error of radius(bound_top)/(n+1)! * dx^(n+1).
    """
    fact = factorial(n + 1)
    return bound_top.midpoint / fact, bound_top.radius / fact


def poly_range(coeffs: Sequence[Fraction], xrange: RatInterval) -> RatInterval:
    """Monomial-wise interval enclosure of sum coeffs[k] * x^k over xrange."""
    total = RatInterval.point(0)
    for k, c in enumerate(coeffs):
        if c != 0:
            total = total + xrange.int_pow(k).scale(c)
    return total


def poly_eval(coeffs: Sequence[Fraction], x: RationalLike) -> Fraction:
    """Exact Horner evaluation of sum coeffs[k] * x^k."""
    x = as_rational(x)
    acc = Fraction(0)
    for c in reversed(list(coeffs)):
        acc = acc * x + c
    return acc


def certify_partial_sum(p: ProblemSpec) -> Certificate:
    """Run the full pipeline and assemble the certificate.

    Fails fast with a CertificationError naming the stage whose guarantee
    cannot be established.  x1 beyond the radius floor is only a warning: the
    remainder argument needs existence and differentiability on [x0, x1],
    which the certified solution range establishes on its own.
    """
    warnings: list[str] = list(p.notes)
    parity_notes: list[str] = []

    coefficients = odexpr.taylor_coefficients(p.f, p.x0, p.y0, p.degree)

    radius = cauchy.radius_for_problem(
        p.f, p.x0, p.y0, p.r1, p.r2, p.enclosure_width
    )
    if p.x1 - p.x0 > radius.r_floor:
        warnings.append(
            f"certification interval extends past the guaranteed radius floor "
            f"({p.x1} - {p.x0} > {radius.r_floor}); the radius bound is "
            f"conservative and the remainder certificate stands on the "
            f"certified solution range instead"
        )

    try:
        qc = comparison.extract_comparison(p.f, p.x0, p.x1, p.y0)
    except comparison.ComparisonFormError as exc:
        raise CertificationError("comparison", str(exc)) from exc
    yrange = comparison.solution_range(
        qc, p.enclosure_width, p.rounding, flow=p.f
    )
    if not yrange.valid:
        raise CertificationError("comparison", yrange.diagnostics)

    chain = odexpr.derivative_chain(p.f, p.degree)
    xrange = RatInterval(p.x0, p.x1)
    bounds = bound_derivatives(chain, xrange, yrange.range, p.rounding)
    if not p.rounding.is_exact:
        parity_notes.append(
            f"bounds rounded outward to {p.rounding.places} decimals at every "
            f"stage; each interval is the rigorous monomial-wise corner "
            f"enclosure, which at high orders can be wider than tabulations "
            f"that pick a single corner value per summand"
        )

    bound_top = bounds[-1]
    remainder_bound, remainder_signed = lagrange_remainder(bound_top, p.dx, p.degree)
    central_coeff, halfwidth_scale = centralize(bound_top, p.degree)

    return Certificate(
        problem=p,
        coefficients=tuple(coefficients),
        radius=radius,
        yrange=yrange,
        derivative_bounds=tuple(bounds),
        remainder_bound=remainder_bound,
        remainder_signed=remainder_signed,
        centralized_coefficient=central_coeff,
        centralized_halfwidth=halfwidth_scale * p.dx ** (p.degree + 1),
        warnings=tuple(warnings),
        parity_notes=tuple(parity_notes),
    )


def certify_polynomial(
    p: ProblemSpec,
    q: Sequence[RationalLike],
    certificate: Certificate | None = None,
) -> Fraction:
    """Rigorous bound on sup |q(x) - y(x)| over [x0, x1].

    q is a coefficient list in powers of x.  The bound is the partial-sum
    remainder bound plus an interval enclosure of max |q - p_n| over the
    interval, so it certifies any polynomial, not just the Taylor one.
    """
    if len(q) - 1 > MAX_POLY_DEGREE:
        raise ValueError(f"polynomial degree exceeds limit {MAX_POLY_DEGREE}")
    cert = certificate if certificate is not None else certify_partial_sum(p)
    q_coeffs = [as_rational(c) for c in q]
    diff = list(q_coeffs)
    for k, c in enumerate(cert.coefficients):
        while len(diff) <= k:
            diff.append(Fraction(0))
        diff[k] -= c
    diff_range = poly_range(diff, RatInterval(p.x0, p.x1))
    return cert.remainder_bound + diff_range.mag
