"""Polynomial expressions in x and the derivative symbols y, y', y'', ...

A FlowExpr is a finite sum of monomials c * x^i * y^j * (y')^k * ... with
exact rational coefficients.  The central operation is the total derivative
along solutions of y' = f(x, y): x differentiates to 1 and each derivative
symbol y^(j) differentiates to the next symbol y^(j+1), never getting
substituted by f.  Iterating it from f yields expressions for every higher
solution derivative, which in turn give exact Taylor coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .ratcore import RatInterval, RationalLike, as_rational

# A monomial key is (e_x, e_y, e_y', ..., e_y^(m)) with trailing zeros trimmed.
MonomialKey = tuple[int, ...]


class ExprError(ValueError):
    """Structural misuse of a FlowExpr (bad exponents, unbound symbols...)."""


class ExprParseError(ValueError):
    """Syntax error in the restricted expression text form."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def symbol_name(order: int) -> str:
    """Display name of the derivative symbol of the given order (y, y', ...)."""
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    if order <= 3:
        return "y" + "'" * order
    return f"y^({order})"


def _trim(key: Sequence[int]) -> MonomialKey:
    key = tuple(key)
    while key and key[-1] == 0:
        key = key[:-1]
    return key


class FlowExpr:
    """Immutable multivariate polynomial over x and derivative symbols."""

    __slots__ = ("_monomials",)

    def __init__(self, monomials: Mapping[MonomialKey, RationalLike] | None = None):
        table: dict[MonomialKey, Fraction] = {}
        for key, coeff in (monomials or {}).items():
            if any(e < 0 for e in key):
                raise ExprError(f"negative exponent in monomial key {key}")
            c = as_rational(coeff)
            if c == 0:
                continue
            trimmed = _trim(key)
            acc = table.get(trimmed, Fraction(0)) + c
            if acc == 0:
                table.pop(trimmed, None)
            else:
                table[trimmed] = acc
        self._monomials = table

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls) -> "FlowExpr":
        return cls()

    @classmethod
    def constant(cls, value: RationalLike) -> "FlowExpr":
        return cls({(): as_rational(value)})

    @classmethod
    def x(cls) -> "FlowExpr":
        return cls({(1,): Fraction(1)})

    @classmethod
    def y(cls, order: int = 0) -> "FlowExpr":
        key = [0] * (order + 2)
        key[order + 1] = 1
        return cls({tuple(key): Fraction(1)})

    @classmethod
    def monomial(
        cls, coeff: RationalLike, x_exp: int = 0, derivs: Mapping[int, int] | None = None
    ) -> "FlowExpr":
        """Build c * x^x_exp * prod_j y^(j) ** derivs[j]."""
        top = max(derivs) if derivs else -1
        key = [0] * (top + 2)
        key[0] = x_exp
        for order, exp in (derivs or {}).items():
            key[order + 1] = exp
        return cls({tuple(key): as_rational(coeff)})

    # -- structure -------------------------------------------------------

    @property
    def monomials(self) -> Mapping[MonomialKey, Fraction]:
        return dict(self._monomials)

    @property
    def order(self) -> int:
        """Highest derivative symbol mentioned; -1 if none (x-only)."""
        orders = [len(key) - 2 for key in self._monomials if len(key) >= 2]
        return max(orders) if orders else -1

    def is_zero(self) -> bool:
        return not self._monomials

    def terms(self) -> Iterator[tuple[MonomialKey, Fraction]]:
        return iter(sorted(self._monomials.items()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlowExpr):
            return NotImplemented
        return self._monomials == other._monomials

    def __hash__(self) -> int:
        return hash(frozenset(self._monomials.items()))

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "FlowExpr") -> "FlowExpr":
        table = dict(self._monomials)
        for key, coeff in other._monomials.items():
            acc = table.get(key, Fraction(0)) + coeff
            if acc == 0:
                table.pop(key, None)
            else:
                table[key] = acc
        return FlowExpr(table)

    def __sub__(self, other: "FlowExpr") -> "FlowExpr":
        return self + (-other)

    def __neg__(self) -> "FlowExpr":
        return FlowExpr({key: -c for key, c in self._monomials.items()})

    def scale(self, factor: RationalLike) -> "FlowExpr":
        c = as_rational(factor)
        if c == 0:
            return FlowExpr.zero()
        return FlowExpr({key: c * coeff for key, coeff in self._monomials.items()})

    def __mul__(self, other: "FlowExpr") -> "FlowExpr":
        table: dict[MonomialKey, Fraction] = {}
        for k1, c1 in self._monomials.items():
            for k2, c2 in other._monomials.items():
                n = max(len(k1), len(k2))
                key = _trim(
                    tuple(
                        (k1[i] if i < len(k1) else 0) + (k2[i] if i < len(k2) else 0)
                        for i in range(n)
                    )
                )
                acc = table.get(key, Fraction(0)) + c1 * c2
                if acc == 0:
                    table.pop(key, None)
                else:
                    table[key] = acc
        return FlowExpr(table)

    # -- calculus --------------------------------------------------------

    def partial(self, slot: int) -> "FlowExpr":
        """Partial derivative with respect to slot 0 (x) or slot j+1 (y^(j))."""
        table: dict[MonomialKey, Fraction] = {}
        for key, coeff in self._monomials.items():
            exp = key[slot] if slot < len(key) else 0
            if exp == 0:
                continue
            new_key = list(key)
            new_key[slot] = exp - 1
            trimmed = _trim(new_key)
            acc = table.get(trimmed, Fraction(0)) + coeff * exp
            if acc == 0:
                table.pop(trimmed, None)
            else:
                table[trimmed] = acc
        return FlowExpr(table)

    def partial_x(self) -> "FlowExpr":
        return self.partial(0)

    def flow_derivative(self) -> "FlowExpr":
        """Total derivative along solutions: d/dx + sum_j y^(j+1) d/dy^(j)."""
        result = self.partial_x()
        for j in range(self.order + 1):
            factor = self.partial(j + 1)
            if not factor.is_zero():
                result = result + factor * FlowExpr.y(j + 1)
        return result

    # -- evaluation ------------------------------------------------------

    def _symbol_value(self, env: Mapping[str, object], slot: int):
        name = "x" if slot == 0 else symbol_name(slot - 1)
        if name not in env:
            raise ExprError(f"unbound symbol {name!r} in evaluation environment")
        return env[name]

    def eval_exact(self, env: Mapping[str, RationalLike]) -> Fraction:
        """Exact rational value under a symbol->Rational environment."""
        total = Fraction(0)
        for key, coeff in self._monomials.items():
            value = coeff
            for slot, exp in enumerate(key):
                if exp:
                    value *= as_rational(self._symbol_value(env, slot)) ** exp
            total += value
        return total

    def eval_interval(self, env: Mapping[str, RatInterval]) -> RatInterval:
        """Monomial-wise interval evaluation under symbol->interval bindings.

        Each monomial is enclosed exactly (every symbol occurs once per
        monomial, as an integer power); the monomial enclosures are summed,
        which accepts the usual interval dependency overestimation across
        monomials.
        """
        total = RatInterval.point(0)
        for key, coeff in self._monomials.items():
            factor = RatInterval.point(1)
            for slot, exp in enumerate(key):
                if exp:
                    bound = self._symbol_value(env, slot)
                    if not isinstance(bound, RatInterval):
                        bound = RatInterval.point(bound)  # type: ignore[arg-type]
                    factor = factor * bound.int_pow(exp)
            total = total + factor.scale(coeff)
        return total

    def subs_x(self, value: RationalLike) -> "FlowExpr":
        """Substitute x := value exactly, leaving derivative symbols symbolic."""
        v = as_rational(value)
        table: dict[MonomialKey, Fraction] = {}
        for key, coeff in self._monomials.items():
            e_x = key[0] if key else 0
            new_key = _trim((0,) + tuple(key[1:]))
            acc = table.get(new_key, Fraction(0)) + coeff * v**e_x
            if acc == 0:
                table.pop(new_key, None)
            else:
                table[new_key] = acc
        return FlowExpr(table)

    # -- display ---------------------------------------------------------

    def __str__(self) -> str:
        if not self._monomials:
            return "0"
        pieces = []
        for key, coeff in self.terms():
            magnitude = abs(coeff)
            factors = []
            if magnitude != 1 or not any(key):
                factors.append(str(magnitude))
            for slot, exp in enumerate(key):
                if exp == 0:
                    continue
                name = "x" if slot == 0 else symbol_name(slot - 1)
                factors.append(name if exp == 1 else f"{name}^{exp}")
            pieces.append((coeff < 0, "*".join(factors)))
        negative, text = pieces[0]
        out = ("-" if negative else "") + text
        for negative, text in pieces[1:]:
            out += (" - " if negative else " + ") + text
        return out

    def __repr__(self) -> str:
        return f"FlowExpr({self._monomials!r})"


@dataclass(frozen=True)
class DerivativeChain:
    """Expressions [D_1 ... D_{n+1}] for the solution derivatives y', y'', ...

    D_1 is the right-hand side f itself and each successor is the flow
    derivative of its predecessor, so D_k mentions derivative symbols only up
    to order k-1.
    """

    exprs: tuple[FlowExpr, ...]

    def __len__(self) -> int:
        return len(self.exprs)

    def __getitem__(self, index: int) -> FlowExpr:
        return self.exprs[index]

    def expr_for_order(self, k: int) -> FlowExpr:
        """Expression for y^(k), 1 <= k <= len(self)."""
        return self.exprs[k - 1]


def derivative_chain(f: FlowExpr, n: int) -> DerivativeChain:
    """Chain [D_1 ... D_{n+1}] for y' = f(x, y) with f in x and y only."""
    if n < 0:
        raise ValueError("chain length parameter must be >= 0")
    if f.order > 0:
        raise ExprError(
            f"right-hand side mentions derivative symbol {symbol_name(f.order)}"
        )
    exprs = [f]
    for _ in range(n):
        exprs.append(exprs[-1].flow_derivative())
    return DerivativeChain(tuple(exprs))


def _chain_env(x0: Fraction, values: Sequence[Fraction]) -> dict[str, Fraction]:
    env = {"x": x0}
    for order, value in enumerate(values):
        env[symbol_name(order)] = value
    return env


def derivative_values(
    f: FlowExpr, x0: RationalLike, y0: RationalLike, n: int
) -> list[Fraction]:
    """Exact values [y'(x0), ..., y^(n)(x0)] from the derivative chain."""
    x0, y0 = as_rational(x0), as_rational(y0)
    if n == 0:
        return []
    chain = derivative_chain(f, n - 1)
    values: list[Fraction] = [y0]
    for k in range(1, n + 1):
        values.append(chain.expr_for_order(k).eval_exact(_chain_env(x0, values)))
    return values[1:]

def taylor_coefficients(
    f: FlowExpr, x0: RationalLike, y0: RationalLike, n: int
) -> list[Fraction]:
    """Exact Taylor coefficients [c_0 ... c_n] of the solution at x0.

    c_0 is the initial value and c_k = y^(k)(x0) / k! with the derivative
    values obtained by evaluating the chain at previously computed ones.
    """
    y0 = as_rational(y0)
    coeffs = [y0]
    factorial = 1
    for k, value in enumerate(derivative_values(f, x0, y0, n), start=1):
        factorial *= k
        coeffs.append(value / factorial)
    return coeffs


# -- restricted text form ------------------------------------------------
#
# expr   := ['+'|'-'] term (('+'|'-') term)*
# term   := factor ('*' factor)*
# factor := NUMBER | 'x' ['^' INT] | 'y' ['^' INT]
# NUMBER := INT | INT '/' INT | DECIMAL          (parsed exactly)
#
# Derivative symbols never appear in user input.

_MAX_EXPONENT = 64


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _position(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        last_nl = self.text.rfind("\n", 0, pos)
        return line, pos - last_nl

    def error(self, message: str, pos: int | None = None) -> ExprParseError:
        line, col = self._position(self.pos if pos is None else pos)
        return ExprParseError(message, line, col)

    def tokens(self) -> list[tuple[str, str, int]]:
        out = []
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isspace():
                self.pos += 1
                continue
            start = self.pos
            if ch in "+-*^/()":
                out.append(("op", ch, start))
                self.pos += 1
            elif ch.isdigit():
                while self.pos < len(text) and text[self.pos].isdigit():
                    self.pos += 1
                if self.pos < len(text) and text[self.pos] == ".":
                    self.pos += 1
                    if self.pos >= len(text) or not text[self.pos].isdigit():
                        raise self.error("decimal point must be followed by digits")
                    while self.pos < len(text) and text[self.pos].isdigit():
                        self.pos += 1
                out.append(("number", text[start : self.pos], start))
            elif ch.isalpha():
                while self.pos < len(text) and text[self.pos].isalnum():
                    self.pos += 1
                out.append(("name", text[start : self.pos], start))
            else:
                raise self.error(f"unsupported character {ch!r}")
        out.append(("end", "", len(text)))
        return out


class _Parser:
    def __init__(self, text: str):
        self.tokenizer = _Tokenizer(text)
        self.toks = self.tokenizer.tokens()
        self.idx = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.idx]

    def advance(self) -> tuple[str, str, int]:
        tok = self.toks[self.idx]
        self.idx += 1
        return tok

    def error(self, message: str, pos: int) -> ExprParseError:
        return self.tokenizer.error(message, pos)

    def parse(self) -> FlowExpr:
        expr = FlowExpr.zero()
        sign = 1
        kind, value, pos = self.peek()
        if kind == "op" and value in "+-":
            sign = -1 if value == "-" else 1
            self.advance()
        elif kind == "end":
            raise self.error("empty expression", pos)
        while True:
            term = self.parse_term()
            expr = expr + (term.scale(-1) if sign < 0 else term)
            kind, value, pos = self.peek()
            if kind == "end":
                return expr
            if kind == "op" and value in "+-":
                sign = -1 if value == "-" else 1
                self.advance()
                continue
            raise self.error(f"expected '+' or '-' before {value!r}", pos)

    def parse_term(self) -> FlowExpr:
        term = self.parse_factor()
        while True:
            kind, value, pos = self.peek()
            if kind == "op" and value == "*":
                self.advance()
                term = term * self.parse_factor()
            else:
                return term

    def parse_factor(self) -> FlowExpr:
        kind, value, pos = self.advance()
        if kind == "number":
            return FlowExpr.constant(self.parse_number(value, pos))
        if kind == "name":
            if value == "x":
                base = FlowExpr.x()
            elif value == "y":
                base = FlowExpr.y(0)
            else:
                raise self.error(
                    f"unsupported token {value!r} (only x, y and rational "
                    f"constants; no function calls or parentheses)",
                    pos,
                )
            exp = self.parse_exponent()
            result = FlowExpr.constant(1)
            for _ in range(exp):
                result = result * base
            return result
        raise self.error(f"expected a factor, found {value!r}", pos)

    def parse_number(self, text: str, pos: int) -> Fraction:
        kind, value, slash_pos = self.peek()
        if kind == "op" and value == "/":
            if "." in text:
                raise self.error("ratio parts must be integers", slash_pos)
            self.advance()
            kind, denom, dpos = self.advance()
            if kind != "number" or "." in denom:
                raise self.error("expected an integer denominator", dpos)
            if int(denom) == 0:
                raise self.error("zero denominator", dpos)
            return Fraction(int(text), int(denom))
        return Fraction(text)

    def parse_exponent(self) -> int:
        kind, value, pos = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            kind, value, pos = self.advance()
            if kind != "number" or "." in value or "/" in value:
                raise self.error("exponent must be a nonnegative integer", pos)
            exp = int(value)
            if exp > _MAX_EXPONENT:
                raise self.error(f"exponent {exp} exceeds limit {_MAX_EXPONENT}", pos)
            return exp
        return 1


def parse_flow_expr(text: str) -> FlowExpr:
    """Parse the restricted text form (terms c * x^i * y^j over + and -)."""
    return _Parser(text).parse()
