"""Non-rigorous high-precision reference values for validation.

Nothing here carries a guarantee; these values live outside the certified
path and are used in tests and in the report's sanity section.  Two methods:
a classical 4th-order one-step integrator with step halving, and, for the
specific flow x^2 + y^2/4 started at (0, -1), the closed-form solution as a
quotient of quarter-order Bessel series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .odexpr import FlowExpr
from .ratcore import RationalLike, as_rational

#: Working precision (significant decimal digits) for all oracle arithmetic.
ORACLE_DPS = 40

# Gamma-function constants, hardcoded because computing the gamma function is
# out of scope here.  40+ digit decimal expansions from standard references
# (DLMF 5.4; OEIS A068466 and A068465):
#   Gamma(1/4) = 3.62560990822190831193068515586767200299516768...
#   Gamma(3/4) = 1.22541670246517764512909830336289052685123925...
_GAMMA_QUARTER = "3.62560990822190831193068515586767200299516768"
_GAMMA_THREE_QUARTERS = "1.22541670246517764512909830336289052685123925"


class ConvergenceError(RuntimeError):
    """The reference computation did not reach the requested accuracy."""


@dataclass(frozen=True)
class ReferenceValue:
    """A high-precision (non-rigorous) value with an error estimate."""

    value: mp.mpf
    error_estimate: mp.mpf
    method: str  # "integrator" | "bessel"

    def __str__(self) -> str:
        return (
            f"{mp.nstr(self.value, 20)} "
            f"({self.method}, error estimate {mp.nstr(self.error_estimate, 3)})"
        )


def _to_mpf(q: RationalLike) -> mp.mpf:
    q = as_rational(q)
    return mp.mpf(q.numerator) / q.denominator


def _compile_flow(f: FlowExpr):
    """Turn an x/y-only FlowExpr into a fast mpf-valued callable."""
    terms = []
    for key, coeff in f.monomials.items():
        e_x = key[0] if len(key) >= 1 else 0
        e_y = key[1] if len(key) >= 2 else 0
        terms.append((_to_mpf(coeff), e_x, e_y))

    def call(x: mp.mpf, y: mp.mpf) -> mp.mpf:
        total = mp.mpf(0)
        for c, e_x, e_y in terms:
            total += c * x**e_x * y**e_y
        return total

    return call


def _rk4_fixed(flow, x0: mp.mpf, y0: mp.mpf, x1: mp.mpf, steps: int) -> mp.mpf:
    h = (x1 - x0) / steps
    x, y = x0, y0
    for _ in range(steps):
        k1 = flow(x, y)
        k2 = flow(x + h / 2, y + h * k1 / 2)
        k3 = flow(x + h / 2, y + h * k2 / 2)
        k4 = flow(x + h, y + h * k3)
        y += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        x += h
    return y


def integrate_fixed(
    f: FlowExpr,
    x0: RationalLike,
    y0: RationalLike,
    x: RationalLike,
    steps: int,
) -> mp.mpf:
    """Classical one-step 4th-order integration with a fixed step count."""
    if f.order > 0:
        raise ValueError("flow must involve x and y only")
    with mp.workdps(ORACLE_DPS):
        return _rk4_fixed(_compile_flow(f), _to_mpf(x0), _to_mpf(y0), _to_mpf(x), steps)


def reference_solution(
    f: FlowExpr,
    x0: RationalLike,
    y0: RationalLike,
    x: RationalLike,
    tol: RationalLike = Fraction(1, 10**15),
    max_doublings: int = 22,
) -> ReferenceValue:
    """Integrator value of y(x), halving the step until stable within tol."""
    if f.order > 0:
        raise ValueError("flow must involve x and y only")
    x0, x = as_rational(x0), as_rational(x)
    if x < x0:
        raise ValueError("evaluation point precedes x0")
    if x == x0:
        return ReferenceValue(_to_mpf(y0), mp.mpf(0), "integrator")
    with mp.workdps(ORACLE_DPS):
        flow = _compile_flow(f)
        a, b = _to_mpf(x0), _to_mpf(x)
        tol_f = _to_mpf(tol)
        steps = 16
        prev = _rk4_fixed(flow, a, _to_mpf(y0), b, steps)
        for _ in range(max_doublings):
            steps *= 2
            current = _rk4_fixed(flow, a, _to_mpf(y0), b, steps)
            diff = abs(current - prev)
            if diff < tol_f:
                return ReferenceValue(current, diff, "integrator")
            prev = current
    raise ConvergenceError(
        f"integrator did not stabilize within {tol} after {steps} steps"
    )


def reference_grid(
    f: FlowExpr,
    x0: RationalLike,
    y0: RationalLike,
    xs: list[Fraction],
    tol: RationalLike = Fraction(1, 10**15),
    max_doublings: int = 18,
) -> list[mp.mpf]:
    """Integrator values at increasing grid points, sharing one trajectory.

    Far cheaper than independent reference_solution calls when many points of
    the same problem are needed.
    """
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("grid points must be strictly increasing")
    if xs and as_rational(xs[0]) < as_rational(x0):
        raise ValueError("grid starts before x0")
    with mp.workdps(ORACLE_DPS):
        flow = _compile_flow(f)
        nodes = [_to_mpf(x0)] + [_to_mpf(p) for p in xs]
        tol_f = _to_mpf(tol)

        def sweep(steps_per_segment: int) -> list[mp.mpf]:
            y = _to_mpf(y0)
            out = []
            for a, b in zip(nodes, nodes[1:]):
                if b > a:
                    y = _rk4_fixed(flow, a, y, b, steps_per_segment)
                out.append(y)
            return out

        steps = 4
        prev = sweep(steps)
        for _ in range(max_doublings):
            steps *= 2
            current = sweep(steps)
            if max(abs(c - p) for c, p in zip(current, prev)) < tol_f:
                return current
            prev = current
    raise ConvergenceError(f"grid integration did not stabilize within {tol}")


def is_quarter_riccati(f: FlowExpr, x0: RationalLike, y0: RationalLike) -> bool:
    """True when the problem is exactly y' = x^2 + y^2/4, y(0) = -1."""
    target = FlowExpr.monomial(1, x_exp=2) + FlowExpr.monomial(
        Fraction(1, 4), derivs={0: 2}
    )
    return f == target and as_rational(x0) == 0 and as_rational(y0) == -1


def _bessel_series(nu: mp.mpf, z: mp.mpf, gamma_nu_plus_1: mp.mpf, terms: int):
    """Truncated series of the first-kind Bessel function of order nu at z.

    Returns (sum, relative tail estimate).  The k-th term ratio is
    -(z/2)^2 / ((k+1)(nu+k+1)), so for the small arguments used here the tail
    is dominated by the first omitted term.
    """
    half = z / 2
    term = half**nu / gamma_nu_plus_1
    total = mp.mpf(0)
    for k in range(terms):
        total += term
        term *= -(half * half) / ((k + 1) * (nu + k + 1))
    rel_tail = abs(term) / abs(total) if total != 0 else mp.inf
    return total, rel_tail


def riccati_exact(
    x: RationalLike, terms: int = 40, rel_tol: mp.mpf = mp.mpf("1e-13")
) -> ReferenceValue:
    """Closed-form value of the solution of y' = x^2 + y^2/4, y(0) = -1.

    The substitution y = -4 w'/w linearizes the flow to w'' + (x^2/4) w = 0,
    whose solutions are sqrt(x) times Bessel functions of orders +-1/4 in
    x^2/4; matching the initial value fixes the combination

        y(x) = 2x * [8 G34 J(3/4)  - sqrt(2) G14 J(-3/4)]
                  / [sqrt(2) G14 J(1/4) + 8 G34 J(-1/4)]

    with every J evaluated at x^2/4 and G14, G34 the hardcoded gamma
    constants.  x = 0 is the removable singularity of the quotient (the limit
    is the initial value) and is rejected; negative x is rejected too, since
    the representation above holds for the principal branch x > 0 only and
    certification never looks left of x0.
    """
    x = as_rational(x)
    if x == 0:
        raise ValueError("closed form degenerates at x = 0; the limit is y(0) = -1")
    if x < 0:
        raise ValueError("closed form is implemented for x > 0 only")
    if terms < 4:
        raise ValueError("need at least 4 series terms")
    with mp.workdps(ORACLE_DPS):
        g14 = mp.mpf(_GAMMA_QUARTER)
        g34 = mp.mpf(_GAMMA_THREE_QUARTERS)
        sqrt2 = mp.sqrt(2)
        xf = _to_mpf(x)
        z = xf * xf / 4
        quarter = mp.mpf(1) / 4
        j_p34, r1 = _bessel_series(3 * quarter, z, 3 * quarter * g34, terms)
        j_m34, r2 = _bessel_series(-3 * quarter, z, g14, terms)
        j_p14, r3 = _bessel_series(quarter, z, quarter * g14, terms)
        j_m14, r4 = _bessel_series(-quarter, z, g34, terms)
        rel_tail = max(r1, r2, r3, r4)
        if rel_tail > rel_tol:
            raise ConvergenceError(
                f"{terms} series terms leave relative tail {mp.nstr(rel_tail, 3)} "
                f"at x = {x}; increase terms or shrink |x|"
            )
        numerator = 8 * g34 * j_p34 - sqrt2 * g14 * j_m34
        denominator = sqrt2 * g14 * j_p14 + 8 * g34 * j_m14
        value = 2 * xf * numerator / denominator
        return ReferenceValue(value, abs(value) * rel_tail * 8, "bessel")
