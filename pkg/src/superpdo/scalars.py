"""Exact scalar arithmetic: Gaussian rationals and a fixed-alphabet polynomial ring.

Every coefficient in the package bottoms out here.  Values are immutable and
all arithmetic is exact; there is no floating point anywhere.

The polynomial ring has a fixed, closed alphabet of formal parameters
(PARAMS).  Exponents are non-negative except for ``h``, which is allowed
negative powers (a Laurent parameter): the h-graded composition weights
produce h^-1 at low orders, and keeping them exact is simpler and safer
than special-casing.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Mapping, Union

__all__ = [
    "GaussianRational",
    "ParamPoly",
    "PARAMS",
    "GR_ZERO",
    "GR_ONE",
    "GR_I",
    "gen_binomial",
    "gen_binomial_step",
    "specialize",
    "MissingAssignmentError",
]

PARAMS = ("h", "lam", "nu", "c1", "c2", "c3", "P4", "P5", "P6", "P7")
_NP = len(PARAMS)
_PIDX = {name: i for i, name in enumerate(PARAMS)}
_ZEXP = (0,) * _NP
_H_IDX = 0


class MissingAssignmentError(KeyError):
    """A substitution omitted a parameter that occurs in the polynomial."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class GaussianRational:
    """Exact complex scalar a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational(_frac(x))

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational((self.re * o.re + self.im * o.im) / n,
                                (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return GR_ONE / (self ** (-n))
        out = GR_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __str__(self):
        re, im = self.re, self.im
        if im == 0:
            return str(re)
        if re == 0:
            if im == 1:
                return "i"
            if im == -1:
                return "-i"
            if im.denominator == 1:
                return f"{im}i"
            return f"({im})i"
        sign = "+" if im > 0 else "-"
        a = abs(im)
        istr = "i" if a == 1 else (f"{a}i" if a.denominator == 1 else f"({a})i")
        return f"({re}{sign}{istr})"

    def __repr__(self):
        return f"GR({self.re}, {self.im})"


GR_ZERO = GaussianRational(0, 0)
GR_ONE = GaussianRational(1, 0)
GR_I = GaussianRational(0, 1)

Scalar = Union[int, Fraction, GaussianRational]


class ParamPoly:
    """Multivariate polynomial over GaussianRational in the fixed alphabet.

    Stored as a map from exponent vectors (tuples aligned with PARAMS) to
    nonzero coefficients.  Equality is structural.  Only ``h`` may carry
    negative exponents.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, GaussianRational] | None = None, _clean=False):
        if terms is None:
            t = {}
        elif _clean:
            t = dict(terms)
        else:
            t = {}
            for exp, c in terms.items():
                c = GaussianRational.coerce(c)
                if not c.is_zero():
                    if len(exp) != _NP:
                        raise ValueError("bad exponent vector length")
                    if any(e < 0 for i, e in enumerate(exp) if i != _H_IDX):
                        raise ValueError("negative exponent outside h")
                    t[tuple(exp)] = c
        object.__setattr__(self, "terms", t)

    def __setattr__(self, *a):
        raise AttributeError("ParamPoly is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "ParamPoly":
        return _PP_ZERO

    @staticmethod
    def one() -> "ParamPoly":
        return _PP_ONE

    @staticmethod
    def const(x) -> "ParamPoly":
        c = GaussianRational.coerce(x)
        if c.is_zero():
            return _PP_ZERO
        return ParamPoly({_ZEXP: c}, _clean=True)

    @staticmethod
    def var(name: str) -> "ParamPoly":
        exp = [0] * _NP
        exp[_PIDX[name]] = 1
        return ParamPoly({tuple(exp): GR_ONE}, _clean=True)

    @staticmethod
    def h_pow(j: int) -> "ParamPoly":
        """h**j for any integer j (Laurent in h)."""
        exp = [0] * _NP
        exp[_H_IDX] = j
        return ParamPoly({tuple(exp): GR_ONE}, _clean=True)

    @staticmethod
    def coerce(x) -> "ParamPoly":
        if isinstance(x, ParamPoly):
            return x
        return ParamPoly.const(x)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        """Return the constant value (GaussianRational) or None."""
        if not self.terms:
            return GR_ZERO
        if len(self.terms) == 1 and _ZEXP in self.terms:
            return self.terms[_ZEXP]
        return None

    def params_present(self):
        out = set()
        for exp in self.terms:
            for i, e in enumerate(exp):
                if e != 0:
                    out.add(PARAMS[i])
        return out

    def h_exponent_range(self):
        """(min, max) h-exponent over terms, or None for the zero polynomial."""
        if not self.terms:
            return None
        es = [exp[_H_IDX] for exp in self.terms]
        return (min(es), max(es))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        o = ParamPoly.coerce(other)
        if not self.terms:
            return o
        if not o.terms:
            return self
        t = dict(self.terms)
        for exp, c in o.terms.items():
            s = t.get(exp)
            if s is None:
                t[exp] = c
            else:
                s = s + c
                if s.is_zero():
                    del t[exp]
                else:
                    t[exp] = s
        return ParamPoly(t, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly({e: -c for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-ParamPoly.coerce(other))

    def __rsub__(self, other):
        return ParamPoly.coerce(other) - self

    def __mul__(self, other):
        o = ParamPoly.coerce(other)
        if not self.terms or not o.terms:
            return _PP_ZERO
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                s = t.get(e)
                if s is None:
                    t[e] = c
                else:
                    s = s + c
                    if s.is_zero():
                        del t[e]
                    else:
                        t[e] = s
        return ParamPoly(t, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            c = self.is_constant()
            if c is not None and not c.is_zero():
                return ParamPoly.const(c ** n)
            if len(self.terms) == 1:
                (exp, c), = self.terms.items()
                if all(e == 0 for i, e in enumerate(exp) if i != _H_IDX):
                    return ParamPoly.h_pow(exp[_H_IDX] * n) * ParamPoly.const(c ** n)
            raise ValueError("negative power of a non-unit polynomial")
        out = _PP_ONE
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = ParamPoly.coerce(other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- substitution --------------------------------------------------------

    def substitute(self, assignment: Mapping[str, "ParamPoly | Scalar"]) -> "ParamPoly":
        """Image under parameter -> polynomial assignment.

        Every parameter occurring in self must be assigned
        (MissingAssignmentError otherwise).  An h occurring with negative
        exponent may only be sent to a nonzero constant or to h itself.
        """
        present = self.params_present()
        for p in present:
            if p not in assignment:
                raise MissingAssignmentError(p)
        values = {p: ParamPoly.coerce(v) for p, v in assignment.items() if p in present}
        out = _PP_ZERO
        for exp, c in self.terms.items():
            term = ParamPoly.const(c)
            for i, e in enumerate(exp):
                if e == 0:
                    continue
                v = values[PARAMS[i]]
                term = term * (v ** e)
            out = out + term
        return out

    # -- normal form and rendering -------------------------------------------

    @staticmethod
    def _grlex_key(exp):
        return (sum(exp), exp)

    def sorted_terms(self):
        """Terms in descending graded-lex order (canonical display order)."""
        return sorted(self.terms.items(), key=lambda kv: self._grlex_key(kv[0]), reverse=True)

    def leading(self):
        """(exponent, coefficient) of the graded-lex leading term, or None."""
        if not self.terms:
            return None
        exp = max(self.terms, key=self._grlex_key)
        return exp, self.terms[exp]

    def normalized(self) -> "ParamPoly":
        """Canonical scalar normal form used for constraint comparison.

        Steps: (1) shift h-exponents so the minimum is 0; (2) if all
        coefficients are real rationals, divide by the rational content and
        flip sign so the leading coefficient is positive; otherwise divide
        by the leading coefficient (monic).
        """
        if not self.terms:
            return self
        hmin = min(exp[_H_IDX] for exp in self.terms)
        p = self if hmin == 0 else self * ParamPoly.h_pow(-hmin)
        coeffs = list(p.terms.values())
        if all(c.im == 0 for c in coeffs):
            nums = [c.re.numerator for c in coeffs]
            dens = [c.re.denominator for c in coeffs]
            from math import gcd, lcm
            g = 0
            for n in nums:
                g = gcd(g, abs(n))
            m = 1
            for d in dens:
                m = lcm(m, d)
            content = Fraction(g, m)
            _, lead = p.leading()
            if lead.re < 0:
                content = -content
            inv = GaussianRational(1) / GaussianRational(content)
        else:
            _, lead = p.leading()
            inv = GR_ONE / lead
        return ParamPoly({e: c * inv for e, c in p.terms.items()}, _clean=True)

    def render(self) -> str:
        """Canonical text form, graded-lex descending, '^' powers, no stars."""
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            mon = "".join(
                (PARAMS[i] if e == 1 else f"{PARAMS[i]}^{e}")
                for i, e in enumerate(exp) if e != 0
            )
            if not mon:
                if c.im == 0 and c.re < 0:
                    parts.append(("-", str(-c)))
                else:
                    parts.append(("+", str(c)))
                continue
            if c == GR_ONE:
                parts.append(("+", mon))
            elif c == -GR_ONE:
                parts.append(("-", mon))
            elif c.im == 0:
                sign = "-" if c.re < 0 else "+"
                a = abs(c.re)
                cs = str(a) if a.denominator == 1 else f"({a})"
                parts.append((sign, f"{cs}{mon}"))
            else:
                parts.append(("+", f"({c}){mon}"))
        sign0, body0 = parts[0]
        out = body0 if sign0 == "+" else f"-{body0}"
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"ParamPoly<{self.render()}>"


_PP_ZERO = ParamPoly({}, _clean=True)
_PP_ONE = ParamPoly({_ZEXP: GR_ONE}, _clean=True)


def specialize(p: ParamPoly, **values) -> ParamPoly:
    """Substitute the given parameters, mapping every other one to itself."""
    assignment: dict = {name: ParamPoly.var(name) for name in PARAMS}
    for name, v in values.items():
        if name not in _PIDX:
            raise KeyError(name)
        assignment[name] = ParamPoly.coerce(v)
    return p.substitute(assignment)


def gen_binomial(x, l: int) -> ParamPoly:
    """Generalized binomial x(x-1)...(x-l+1)/l! for l >= 0.

    x may be a rational scalar or a ParamPoly; the result is exact.
    """
    return gen_binomial_step(x, l, 1)


def gen_binomial_step(x, l: int, step) -> ParamPoly:
    """prod_{j=0}^{l-1} (x - j*step) / l!   (scaled falling factorial).

    With step = h this gives the h-graded weights of the xi-power
    conjugation; with step = 1 it is the ordinary generalized binomial.
    """
    if l < 0:
        raise ValueError("binomial index must be non-negative")
    xp = ParamPoly.coerce(x)
    sp = ParamPoly.coerce(step)
    out = ParamPoly.one()
    for j in range(l):
        out = out * (xp - sp * j)
    return out * ParamPoly.const(Fraction(1, factorial(l)))
