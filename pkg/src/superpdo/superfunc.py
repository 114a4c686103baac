"""Functions on the supercircle in two exchangeable coefficient models.

A function F = f(x) + g(x)*theta is stored as its raw components
(even part f, theta-coefficient g).  The x-dependence lives in one of two
models:

* ``fourier`` -- finite sums of modes e^{inx} with ParamPoly coefficients.
  Supports the circle integral, hence traces.
* ``jet`` -- polynomials in formal jet symbols a^(k), b^(k), c^(k), d^(k)
  standing for derivatives of four generic functions.  An identity that
  holds here holds for arbitrary smooth inputs, which is what constraint
  extraction needs.

Both models are commutative rings with the derivation d/dx, and all
operations are exact and pure.
"""

from __future__ import annotations

from typing import Iterable

from .scalars import GR_ONE, GaussianRational, ParamPoly

__all__ = [
    "XFunction",
    "SuperFunction",
    "ModelMismatchError",
    "fourier_mode",
    "generic_pair",
    "circle_average",
    "JET_LETTERS",
]

JET_LETTERS = ("a", "b", "c", "d")


class ModelMismatchError(ValueError):
    """Operands use different coefficient models."""


def _join_model(m1, m2):
    if m1 is None:
        return m2
    if m2 is None or m1 == m2:
        return m1
    raise ModelMismatchError(f"{m1} vs {m2}")


class XFunction:
    """An ordinary (theta-free) function of x in either model.

    terms: fourier -> {n: ParamPoly}; jet -> {monomial: ParamPoly} where a
    monomial is a sorted tuple of (letter, order) factors, () meaning 1.
    """

    __slots__ = ("model", "terms")

    def __init__(self, model, terms=None, _clean=False):
        if model not in (None, "fourier", "jet"):
            raise ValueError(f"unknown model {model!r}")
        if terms is None:
            t = {}
        elif _clean:
            t = dict(terms)
        else:
            t = {}
            for k, p in terms.items():
                p = ParamPoly.coerce(p)
                if not p.is_zero():
                    t[k] = p
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "terms", t)

    def __setattr__(self, *a):
        raise AttributeError("XFunction is immutable")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(model=None):
        return XFunction(model, {}, _clean=True)

    @staticmethod
    def const(value, model="fourier"):
        p = ParamPoly.coerce(value)
        if p.is_zero():
            return XFunction.zero(model)
        key = 0 if model == "fourier" else ()
        return XFunction(model, {key: p}, _clean=True)

    @staticmethod
    def mode(n: int, coeff=1):
        """coeff * e^{inx} in the fourier model."""
        p = ParamPoly.coerce(coeff)
        if p.is_zero():
            return XFunction.zero("fourier")
        return XFunction("fourier", {n: p}, _clean=True)

    @staticmethod
    def jet(letter: str, order: int = 0, coeff=1):
        """coeff * letter^(order) in the jet model."""
        if letter not in JET_LETTERS:
            raise ValueError(f"jet letter must be one of {JET_LETTERS}")
        p = ParamPoly.coerce(coeff)
        if p.is_zero():
            return XFunction.zero("jet")
        return XFunction("jet", {((letter, order),): p}, _clean=True)

    # -- ring structure --------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        if not isinstance(other, XFunction):
            return NotImplemented
        model = _join_model(self.model, other.model)
        if not self.terms:
            return other if other.model else XFunction(model, other.terms, _clean=True)
        if not other.terms:
            return self if self.model else XFunction(model, self.terms, _clean=True)
        t = dict(self.terms)
        for k, p in other.terms.items():
            s = t.get(k)
            if s is None:
                t[k] = p
            else:
                s = s + p
                if s.is_zero():
                    del t[k]
                else:
                    t[k] = s
        return XFunction(model, t, _clean=True)

    def __neg__(self):
        return XFunction(self.model, {k: -p for k, p in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c) -> "XFunction":
        p = ParamPoly.coerce(c)
        if p.is_zero() or not self.terms:
            return XFunction.zero(self.model)
        return XFunction(self.model, {k: q * p for k, q in self.terms.items()}, _clean=True)

    def __mul__(self, other):
        if not isinstance(other, XFunction):
            return NotImplemented
        model = _join_model(self.model, other.model)
        if not self.terms or not other.terms:
            return XFunction.zero(model)
        t: dict = {}
        if model == "fourier":
            for n, p in self.terms.items():
                for m, q in other.terms.items():
                    k = n + m
                    c = p * q
                    s = t.get(k)
                    if s is None:
                        t[k] = c
                    else:
                        s = s + c
                        if s.is_zero():
                            del t[k]
                        else:
                            t[k] = s
        else:
            for mon1, p in self.terms.items():
                for mon2, q in other.terms.items():
                    k = tuple(sorted(mon1 + mon2))
                    c = p * q
                    s = t.get(k)
                    if s is None:
                        t[k] = c
                    else:
                        s = s + c
                        if s.is_zero():
                            del t[k]
                        else:
                            t[k] = s
        return XFunction(model, t, _clean=True)

    def dx(self) -> "XFunction":
        if not self.terms:
            return self
        if self.model == "fourier":
            t = {}
            for n, p in self.terms.items():
                if n != 0:
                    t[n] = p * GaussianRational(0, n)
            return XFunction("fourier", t, _clean=True)
        t: dict = {}
        for mon, p in self.terms.items():
            for i in range(len(mon)):
                letter, order = mon[i]
                new = tuple(sorted(mon[:i] + ((letter, order + 1),) + mon[i + 1:]))
                s = t.get(new)
                if s is None:
                    t[new] = p
                else:
                    s = s + p
                    if s.is_zero():
                        del t[new]
                    else:
                        t[new] = s
        return XFunction("jet", t, _clean=True)

    def dx_nilpotent(self) -> bool:
        """True when repeated d/dx eventually kills this function."""
        if self.model == "fourier":
            return all(n == 0 for n in self.terms)
        return all(mon == () for mon in self.terms)

    def substitute(self, assignment) -> "XFunction":
        return XFunction(self.model,
                         {k: p.substitute(assignment) for k, p in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, XFunction):
            return NotImplemented
        if self.terms != other.terms:
            return False
        return not self.terms or self.model == other.model

    def __hash__(self):
        return hash((self.model, frozenset(self.terms.items())))

    def render(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for k in sorted(self.terms, key=lambda x: (str(type(x)), x)):
            p = self.terms[k]
            coeff = p.render()
            if self.model == "fourier":
                if k == 0:
                    base = ""
                elif k == 1:
                    base = "e^{ix}"
                elif k == -1:
                    base = "e^{-ix}"
                else:
                    base = f"e^{{{k}ix}}"
            else:
                base = "*".join(f"{l}{o}" for l, o in k)
            if base == "":
                pieces.append(coeff)
            elif coeff == "1":
                pieces.append(base)
            elif coeff == "-1":
                pieces.append(f"-{base}")
            elif any(s in coeff for s in (" + ", " - ")):
                pieces.append(f"({coeff})*{base}")
            else:
                pieces.append(f"{coeff}*{base}")
        return " + ".join(pieces)

    def __repr__(self):
        return f"XFunction<{self.render()}>"


class SuperFunction:
    """F = f(x) + g(x)*theta, stored as the raw pair (f, g).

    The paper-style normalization F = a + 2b*theta is applied by the helper
    constructors, never implicitly.
    """

    __slots__ = ("even", "odd")

    def __init__(self, even: XFunction, odd: XFunction):
        _join_model(even.model, odd.model)
        object.__setattr__(self, "even", even)
        object.__setattr__(self, "odd", odd)

    def __setattr__(self, *a):
        raise AttributeError("SuperFunction is immutable")

    @property
    def model(self):
        return self.even.model or self.odd.model

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(model=None):
        return SuperFunction(XFunction.zero(model), XFunction.zero(model))

    @staticmethod
    def one(model="fourier"):
        return SuperFunction(XFunction.const(1, model), XFunction.zero(model))

    @staticmethod
    def const(value, model="fourier"):
        return SuperFunction(XFunction.const(value, model), XFunction.zero(model))

    @staticmethod
    def from_even(f: XFunction):
        return SuperFunction(f, XFunction.zero(f.model))

    @staticmethod
    def from_odd(g: XFunction):
        """g*theta."""
        return SuperFunction(XFunction.zero(g.model), g)

    @staticmethod
    def theta(model="fourier"):
        return SuperFunction.from_odd(XFunction.const(1, model))

    @staticmethod
    def pair(a: XFunction, b: XFunction):
        """a + 2b*theta (the conventional normalization of the component pair)."""
        return SuperFunction(a, b.scaled(2))

    # -- structure -------------------------------------------------------------

    def is_zero(self):
        return self.even.is_zero() and self.odd.is_zero()

    def parity(self):
        """0 (even), 1 (odd), or None for a mixed nonzero value.

        The zero function counts as even.
        """
        if self.odd.is_zero():
            return 0
        if self.even.is_zero():
            return 1
        return None

    def __add__(self, other):
        return SuperFunction(self.even + other.even, self.odd + other.odd)

    def __neg__(self):
        return SuperFunction(-self.even, -self.odd)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        return SuperFunction(self.even.scaled(c), self.odd.scaled(c))

    def __mul__(self, other):
        """(f + g theta)(u + v theta) = fu + (fv + gu) theta.

        The stored components are ordinary functions, so no extra signs
        arise in this form; theta^2 = 0.
        """
        if not isinstance(other, SuperFunction):
            return NotImplemented
        return SuperFunction(self.even * other.even,
                             self.even * other.odd + self.odd * other.even)

    def sigma(self):
        """Parity involution: f - g theta."""
        return SuperFunction(self.even, -self.odd)

    def dx(self):
        return SuperFunction(self.even.dx(), self.odd.dx())

    def eta(self):
        """eta = d/dtheta + theta d/dx:  f + g theta  ->  g + f' theta."""
        return SuperFunction(self.odd, self.even.dx())

    def etabar(self):
        """etabar = d/dtheta - theta d/dx:  f + g theta  ->  g - f' theta."""
        return SuperFunction(self.odd, -self.even.dx())

    def eta_power(self, k: int):
        out = self
        for _ in range(k):
            out = out.eta()
        return out

    def etabar_power_applied(self, k: int):
        out = self
        for _ in range(k):
            out = out.etabar()
        return out

    def eta_nilpotent(self) -> bool:
        """True when repeated eta eventually kills this value.

        eta^2 = d/dx, so this holds exactly when both components die under
        d/dx (constant modes / jet constants).
        """
        return self.even.dx_nilpotent() and self.odd.dx_nilpotent()

    def substitute(self, assignment):
        return SuperFunction(self.even.substitute(assignment), self.odd.substitute(assignment))

    def __eq__(self, other):
        if not isinstance(other, SuperFunction):
            return NotImplemented
        return self.even == other.even and self.odd == other.odd

    def __hash__(self):
        return hash((self.even, self.odd))

    def render(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        if not self.even.is_zero():
            parts.append(self.even.render())
        if not self.odd.is_zero():
            o = self.odd.render()
            parts.append("theta" if o == "1" else f"({o})*theta")
        return " + ".join(parts)

    def __repr__(self):
        return f"SuperFunction<{self.render()}>"


def fourier_mode(n: int, part: str) -> SuperFunction:
    """e^{inx} (part='even') or e^{inx}*theta (part='odd'), unit coefficient."""
    if part == "even":
        return SuperFunction.from_even(XFunction.mode(n))
    if part == "odd":
        return SuperFunction.from_odd(XFunction.mode(n))
    raise ValueError("part must be 'even' or 'odd'")


def generic_pair() -> tuple[SuperFunction, SuperFunction]:
    """Two generic jet-model arguments F = a + 2b*theta, G = c + 2d*theta."""
    F = SuperFunction.pair(XFunction.jet("a"), XFunction.jet("b"))
    G = SuperFunction.pair(XFunction.jet("c"), XFunction.jet("d"))
    return F, G


def circle_average(F: SuperFunction) -> ParamPoly:
    """Berezin integral then normalized circle integral: the constant mode
    of the theta-coefficient.  Fourier model only."""
    if F.model == "jet":
        raise ModelMismatchError("circle_average needs the fourier model")
    return F.odd.terms.get(0, ParamPoly.zero())
