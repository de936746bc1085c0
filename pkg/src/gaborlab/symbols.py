"""Symbol library on phase space R^2 with exact partial derivatives.

Each symbol carries a sympy expression in (z1, z2); derivatives up to
total order 8 are produced by exact symbolic differentiation and lambdified
once per (symbol, multi-index).  Seminorm sweeps report evidence of
membership in the weighted smooth classes: sup of |d^alpha sigma| <z>^{-m}
over growing sample regions, with a divergence flag when the sup keeps
growing between radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import sympy as sp

from .phase_space import PhaseSpacePoint

__all__ = [
    "SymbolSpec", "SeminormReport",
    "constant", "bracket_power", "separable_x", "separable_omega",
    "trig", "chirp", "profile_gauss", "profile_cos", "profile_sin",
    "eval_symbol", "eval_symbol_grid", "seminorm",
    "finite_difference_crosscheck", "parse_symbol",
]

Z1, Z2 = sp.symbols("z1 z2", real=True)
_U = sp.Symbol("u", real=True)

MAX_DERIVATIVE_ORDER = 8
# sup growth ratio between radii r and 2r beyond which a seminorm is
# flagged divergent; 1.5 separates the bounded library families (ratio -> 1)
# from the unbounded ones (ratio -> 2 or more at sampled endpoints)
DIVERGENCE_RATIO = 1.5

_lambdified_cache: dict = {}


@dataclass(frozen=True)
class SymbolSpec:
    """A symbol sigma(z1, z2) with exact derivative rules."""

    expr: sp.Expr
    name: str

    def __add__(self, other: "SymbolSpec") -> "SymbolSpec":
        return SymbolSpec(self.expr + other.expr, f"{self.name}+{other.name}")

    def __mul__(self, other: "SymbolSpec") -> "SymbolSpec":
        return SymbolSpec(self.expr * other.expr, f"{self.name}*{other.name}")


@dataclass(frozen=True)
class SeminormReport:
    order: int
    m: float
    value: float
    region_radius: float
    divergence_flag: bool


def constant(c: float) -> SymbolSpec:
    return SymbolSpec(sp.sympify(c), f"constant({c:g})")


def bracket_power(m: float) -> SymbolSpec:
    """sigma(z) = <z>^m = (1 + z1^2 + z2^2)^(m/2); a member of S^m."""
    return SymbolSpec((1 + Z1 ** 2 + Z2 ** 2) ** (sp.Rational(1, 2) * sp.nsimplify(m)),
                      f"bracket_power({m:g})")


def profile_gauss(c: float):
    return sp.exp(-sp.nsimplify(c) * _U ** 2), f"gauss({c:g})"


def profile_cos(a: float):
    return sp.cos(sp.nsimplify(a) * _U), f"cos({a:g})"


def profile_sin(a: float):
    return sp.sin(sp.nsimplify(a) * _U), f"sin({a:g})"


def separable_x(profile) -> SymbolSpec:
    """sigma(z1, z2) = h(z1); Op_tau is multiplication by h for every tau."""
    expr, pname = profile
    return SymbolSpec(expr.subs(_U, Z1), f"separable_x({pname})")


def separable_omega(profile) -> SymbolSpec:
    """sigma(z1, z2) = h(z2); Op_tau is the Fourier multiplier h for every tau."""
    expr, pname = profile
    return SymbolSpec(expr.subs(_U, Z2), f"separable_omega({pname})")


def trig(a: float, b: float) -> SymbolSpec:
    """sigma(z) = sin(a z1) cos(b z2); a member of S^0."""
    return SymbolSpec(sp.sin(sp.nsimplify(a) * Z1) * sp.cos(sp.nsimplify(b) * Z2),
                      f"trig({a:g},{b:g})")


def chirp(c: float) -> SymbolSpec:
    """sigma(z) = e^{pi i c |z|^2}: bounded, but its gradient grows like |z|,
    so it is not a member of S^0."""
    return SymbolSpec(sp.exp(sp.pi * sp.I * sp.nsimplify(c) * (Z1 ** 2 + Z2 ** 2)),
                      f"chirp({c:g})")


def _derivative_fn(sym: SymbolSpec, alpha: tuple[int, int]):
    key = (sym.expr, alpha)
    fn = _lambdified_cache.get(key)
    if fn is None:
        expr = sp.diff(sym.expr, Z1, alpha[0], Z2, alpha[1])
        fn = sp.lambdify((Z1, Z2), expr, modules="numpy")
        _lambdified_cache[key] = fn
    return fn


def _validate_alpha(alpha, max_order) -> tuple[int, int]:
    a1, a2 = int(alpha[0]), int(alpha[1])
    if a1 < 0 or a2 < 0:
        raise ValueError("multi-index entries must be nonnegative")
    if a1 + a2 > max_order:
        raise ValueError(f"derivative order |alpha|={a1 + a2} exceeds supported "
                         f"maximum {max_order}")
    return a1, a2


def eval_symbol(sym: SymbolSpec, z: PhaseSpacePoint, alpha=(0, 0)) -> complex:
    """Exact value of d^alpha sigma at z, |alpha| <= 8."""
    alpha = _validate_alpha(alpha, MAX_DERIVATIVE_ORDER)
    return complex(_derivative_fn(sym, alpha)(z.x, z.omega))


def eval_symbol_grid(sym: SymbolSpec, z1, z2, alpha=(0, 0)) -> np.ndarray:
    """Vectorized d^alpha sigma on broadcastable coordinate arrays."""
    alpha = _validate_alpha(alpha, MAX_DERIVATIVE_ORDER)
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    out = _derivative_fn(sym, alpha)(z1, z2)
    out = np.asarray(out, dtype=np.complex128)
    if out.shape != np.broadcast_shapes(z1.shape, z2.shape):
        out = np.broadcast_to(out, np.broadcast_shapes(z1.shape, z2.shape)).copy()
    return out


def _region_sup(sym: SymbolSpec, order: int, m: float, radius: float, resolution: int) -> float:
    ax = np.linspace(-radius, radius, resolution)
    zz1, zz2 = np.meshgrid(ax, ax, indexing="ij")
    wgt = (1.0 + zz1 ** 2 + zz2 ** 2) ** (-m / 2.0)
    best = 0.0
    for a1 in range(order + 1):
        for a2 in range(order + 1 - a1):
            vals = np.abs(eval_symbol_grid(sym, zz1, zz2, (a1, a2))) * wgt
            best = max(best, float(np.max(vals)))
    return best


def seminorm(sym: SymbolSpec, order: int, m: float, region_radius: float = 8.0,
             resolution: int = 65) -> SeminormReport:
    """Sampled seminorm sup_{|alpha|<=order} sup_z |d^alpha sigma(z)| <z>^{-m}.

    The sup is taken over a uniform grid on the square of the given radius
    and repeated at twice the radius; divergence_flag is set when the larger
    region's sup exceeds the smaller one's by more than DIVERGENCE_RATIO.
    """
    if order < 0 or order > MAX_DERIVATIVE_ORDER:
        raise ValueError(f"order must lie in 0..{MAX_DERIVATIVE_ORDER}")
    if region_radius <= 0:
        raise ValueError("region_radius must be positive")
    sup1 = _region_sup(sym, order, m, region_radius, resolution)
    sup2 = _region_sup(sym, order, m, 2.0 * region_radius, resolution)
    diverges = sup2 > DIVERGENCE_RATIO * sup1 if sup1 > 0 else sup2 > 0
    return SeminormReport(order=order, m=m, value=sup1,
                          region_radius=region_radius, divergence_flag=diverges)


def _central_difference(sym: SymbolSpec, z1: float, z2: float,
                        alpha: tuple[int, int], step: float) -> complex:
    if alpha[0] > 0:
        a = (alpha[0] - 1, alpha[1])
        return (_central_difference(sym, z1 + step, z2, a, step)
                - _central_difference(sym, z1 - step, z2, a, step)) / (2 * step)
    if alpha[1] > 0:
        a = (alpha[0], alpha[1] - 1)
        return (_central_difference(sym, z1, z2 + step, a, step)
                - _central_difference(sym, z1, z2 - step, a, step)) / (2 * step)
    return complex(_derivative_fn(sym, (0, 0))(z1, z2))


def finite_difference_crosscheck(sym: SymbolSpec, z: PhaseSpacePoint, alpha,
                                 step: float) -> float:
    """|central finite difference - analytic derivative|; O(step^2) oracle
    for the derivative rules, |alpha| <= 4."""
    alpha = _validate_alpha(alpha, 4)
    if not (step > 0 and math.isfinite(step)):
        raise ValueError("step must be positive")
    fd = _central_difference(sym, z.x, z.omega, alpha, step)
    return abs(fd - eval_symbol(sym, z, alpha))


# --- expression grammar for CLI configs -------------------------------------
#
#   expr    := term ('+' term)*
#   term    := factor ('*' factor)*
#   factor  := family '(' args ')'
#   family  := constant | bracket_power | trig | chirp
#            | separable_x | separable_omega          (argument: profile call)
#   profile := gauss(c) | cos(a) | sin(a)

_PROFILES = {"gauss": profile_gauss, "cos": profile_cos, "sin": profile_sin}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ValueError(f"symbol expression error at position {self.pos}: {msg} "
                         f"(in {self.text!r})")

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse_number(self) -> float:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit()
                                             or self.text[self.pos] in "+-.eE"):
            self.pos += 1
        try:
            return float(self.text[start:self.pos])
        except ValueError:
            self.pos = start
            self.error("expected a number")

    def parse_name(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                             or self.text[self.pos] == "_"):
            self.pos += 1
        if start == self.pos:
            self.error("expected a name")
        return self.text[start:self.pos]

    def parse_profile(self):
        name = self.parse_name()
        if name not in _PROFILES:
            self.error(f"unknown profile {name!r} (choose from {sorted(_PROFILES)})")
        self.expect("(")
        val = self.parse_number()
        self.expect(")")
        return _PROFILES[name](val)

    def parse_factor(self) -> SymbolSpec:
        name = self.parse_name()
        self.expect("(")
        if name == "constant":
            out = constant(self.parse_number())
        elif name == "bracket_power":
            out = bracket_power(self.parse_number())
        elif name == "chirp":
            out = chirp(self.parse_number())
        elif name == "trig":
            a = self.parse_number()
            self.expect(",")
            b = self.parse_number()
            out = trig(a, b)
        elif name == "separable_x":
            out = separable_x(self.parse_profile())
        elif name == "separable_omega":
            out = separable_omega(self.parse_profile())
        else:
            self.error(f"unknown symbol family {name!r}")
        self.expect(")")
        return out

    def parse_term(self) -> SymbolSpec:
        out = self.parse_factor()
        while self.peek() == "*":
            self.pos += 1
            out = out * self.parse_factor()
        return out

    def parse_expr(self) -> SymbolSpec:
        out = self.parse_term()
        while self.peek() == "+":
            self.pos += 1
            out = out + self.parse_term()
        return out


def parse_symbol(text: str) -> SymbolSpec:
    """Parse a symbol expression like 'bracket_power(1)' or
    'separable_x(gauss(1)) + constant(0.5)*trig(1,2)'."""
    p = _Parser(text)
    out = p.parse_expr()
    p.skip_ws()
    if p.pos != len(text):
        p.error("unexpected trailing input")
    return out
