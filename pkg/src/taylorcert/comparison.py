"""Rigorous solution range on [x0, x1] from a frozen-argument comparison bound.

If f > 0 on the interval and f is nondecreasing in x there, then along the
solution y' = f(x, y) <= f(x1, y), so integrating dy / f(x1, y) <= dx gives an
explicit upper bound for y(x).  With f(x1, y) = alpha + beta * y^2 the
integral is an arctangent and the bound at x1 has the closed tangent-addition
form (s*t + y0) / (1 - t*y0/s), s = sqrt(alpha/beta), t = tan(sqrt(alpha*beta)
* (x1 - x0)).  Since f > 0 the solution is nondecreasing, so y0 is the exact
lower endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .odexpr import FlowExpr, symbol_name
from .ratcore import (
    DEFAULT_ENCLOSURE_WIDTH,
    DecimalRounding,
    EnclosureError,
    HALF_PI_LOWER,
    RatInterval,
    RationalLike,
    as_rational,
    enclose_sqrt,
    enclose_tan,
)


class ComparisonFormError(ValueError):
    """f(x1, y) is not of the supported form alpha + beta*y^2, alpha,beta > 0."""


class ApplicabilityError(RuntimeError):
    """A hypothesis of the range bound fails over the given box."""

    def __init__(self, kind: str, interval: RatInterval, message: str):
        super().__init__(message)
        self.kind = kind  # "positivity" | "monotonicity"
        self.interval = interval


@dataclass(frozen=True)
class QuadraticComparison:
    """The frozen right-hand side f(x1, y) = alpha + beta * y^2 on [x0, x1]."""

    alpha: Fraction
    beta: Fraction
    x0: Fraction
    x1: Fraction
    y0: Fraction

    def __post_init__(self) -> None:
        if self.alpha <= 0 or self.beta <= 0:
            raise ComparisonFormError("alpha and beta must be positive")
        if self.x1 < self.x0:
            raise ValueError("x1 must not precede x0")


@dataclass(frozen=True)
class SolutionRange:
    """Certified range of the solution over [x0, x1].

    `range` is the reported (possibly outward-rounded) enclosure; `tight_upper`
    retains the unrounded enclosure of the comparison upper bound.  When
    `valid` is false the bound could not be certified and `diagnostics` says
    why.
    """

    range: RatInterval
    valid: bool
    diagnostics: str
    tight_upper: RatInterval


def extract_comparison(
    f: FlowExpr,
    x0: RationalLike,
    x1: RationalLike,
    y0: RationalLike,
) -> QuadraticComparison:
    """Freeze x := x1 in f and extract alpha + beta * y^2.

    Any residual monomial (x powers are gone after substitution) that is not
    the constant or the pure y^2 term is rejected by name, as are nonpositive
    alpha or beta.
    """
    if f.order > 0:
        raise ComparisonFormError(
            f"right-hand side mentions {symbol_name(f.order)}; expected x and y only"
        )
    x0, x1, y0 = as_rational(x0), as_rational(x1), as_rational(y0)
    frozen = f.subs_x(x1)
    alpha = Fraction(0)
    beta = Fraction(0)
    for key, coeff in frozen.monomials.items():
        if key == ():
            alpha = coeff
        elif key == (0, 2):
            beta = coeff
        else:
            exponents = "*".join(
                ("x" if slot == 0 else symbol_name(slot - 1))
                + (f"^{exp}" if exp > 1 else "")
                for slot, exp in enumerate(key)
                if exp
            )
            raise ComparisonFormError(
                f"unsupported monomial {coeff}*{exponents} after freezing x = {x1}"
            )
    if alpha <= 0:
        raise ComparisonFormError(f"constant term alpha = {alpha} is not positive")
    if beta <= 0:
        raise ComparisonFormError(f"y^2 coefficient beta = {beta} is not positive")
    return QuadraticComparison(alpha=alpha, beta=beta, x0=x0, x1=x1, y0=y0)


def check_applicability(
    f: FlowExpr,
    x0: RationalLike,
    x1: RationalLike,
    yrange: RatInterval,
) -> None:
    """Certify the comparison hypotheses over [x0, x1] x yrange.

    (a) f > 0 there, and (b) df/dx >= 0 there, which makes the frozen
    right-hand side f(x1, y) an upper bound for f(x, y) on the interval.
    Raises ApplicabilityError with the offending interval otherwise.
    """
    x0, x1 = as_rational(x0), as_rational(x1)
    if x1 <= x0:
        raise ValueError("applicability check needs x1 > x0")
    box = {"x": RatInterval(x0, x1), "y": yrange}
    f_range = f.eval_interval(box)
    if f_range.lo <= 0:
        raise ApplicabilityError(
            "positivity",
            f_range,
            f"cannot certify f > 0 on the box: interval evaluation gives {f_range}",
        )
    fx_range = f.partial_x().eval_interval(box)
    if fx_range.lo < 0:
        raise ApplicabilityError(
            "monotonicity",
            fx_range,
            f"cannot certify df/dx >= 0 on the box: interval evaluation gives {fx_range}",
        )


def _invalid(
    y0: Fraction, diagnostics: str, tight: RatInterval | None = None
) -> SolutionRange:
    point = RatInterval.point(y0)
    return SolutionRange(
        range=point,
        valid=False,
        diagnostics=diagnostics,
        tight_upper=tight if tight is not None else point,
    )


def solution_range(
    qc: QuadraticComparison,
    width: RationalLike = DEFAULT_ENCLOSURE_WIDTH,
    rounding: DecimalRounding = DecimalRounding.exact(),
    flow: FlowExpr | None = None,
) -> SolutionRange:
    """Certified range [y0, U] of the solution over [x0, x1].

    U encloses the tangent-addition value (s*t + y0) / (1 - t*y0/s) computed
    entirely with certified enclosures and outward interval division.  The
    certificate is refused (valid=False) if the comparison solution blows up
    before x1 (denominator not certifiably positive) or, when `flow` is given,
    if the comparison hypotheses fail on [x0, x1] x [y0, U].

    The reported upper endpoint is widened per `rounding`; the tight enclosure
    is always retained alongside.
    """
    width = as_rational(width)
    if width <= 0:
        raise EnclosureError("enclosure width must be positive")
    if qc.x1 == qc.x0:
        return SolutionRange(
            range=RatInterval.point(qc.y0),
            valid=True,
            diagnostics="degenerate interval: x1 = x0",
            tight_upper=RatInterval.point(qc.y0),
        )

    dx = qc.x1 - qc.x0
    component_width = width / 8
    for _ in range(60):
        s_enc = enclose_sqrt(qc.alpha / qc.beta, component_width)
        rate_enc = enclose_sqrt(qc.alpha * qc.beta, component_width)
        theta = rate_enc.scale(dx)
        if theta.hi >= HALF_PI_LOWER:
            return _invalid(
                qc.y0,
                f"tangent argument {theta} reaches the certified pi/2 bound: "
                f"no tangent-form bound exists on [{qc.x0}, {qc.x1}]",
            )
        try:
            t_enc = enclose_tan(theta, component_width)
        except EnclosureError as exc:
            return _invalid(qc.y0, f"tangent enclosure failed: {exc}")
        if s_enc.lo <= 0:
            component_width /= 16
            continue
        denominator = RatInterval.point(1) - t_enc * RatInterval.point(qc.y0) / s_enc
        if denominator.lo <= 0:
            if denominator.hi <= 0 or component_width <= width / 2**40:
                return _invalid(
                    qc.y0,
                    f"denominator 1 - t*y0/s = {denominator} not certifiably "
                    f"positive: comparison solution escapes before x1 = {qc.x1}",
                )
            component_width /= 16
            continue
        numerator = s_enc * t_enc + RatInterval.point(qc.y0)
        upper = numerator / denominator
        if upper.width > width:
            component_width /= 16
            continue
        break
    else:
        return _invalid(qc.y0, "enclosure width target unreachable")

    # t >= 0 and denominator > 0 keep the bound at or above y0; clip the
    # enclosure so the reported range never dips below the exact lower end.
    upper = RatInterval(max(upper.lo, qc.y0), max(upper.hi, qc.y0))
    reported = RatInterval(qc.y0, rounding.round_up(upper.hi))

    if flow is not None:
        try:
            check_applicability(flow, qc.x0, qc.x1, reported)
        except ApplicabilityError as exc:
            return _invalid(
                qc.y0, f"{exc.kind} fails on certified range {reported}: {exc}", upper
            )
    return SolutionRange(
        range=reported,
        valid=True,
        diagnostics="",
        tight_upper=upper,
    )
