"""The Poisson superalgebra of symbols in (x, theta, xi, thetabar).

A symbol is stored in the component form

    S = a(x,xi) + b(x,xi) theta + c(x,xi) thetabar + d(x,xi) theta thetabar

with each component a truncated Laurent series in xi over XFunctions.
The super Poisson bracket differentiates in theta and thetabar, so the
component form implements it literally.  Grassmann signs are fixed once by
the ordering convention theta-before-thetabar and by left derivatives;
the convention is exercised by the {zeta, zeta} = 2 xi test, which mirrors
[eta, eta] = 2 eta^2 under the symbol identification.

zeta = thetabar + theta xi and zetabar = thetabar - theta xi are provided
as derived constructors.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .scalars import GaussianRational, ParamPoly
from .superfunc import ModelMismatchError, SuperFunction, XFunction

__all__ = [
    "PoissonSymbol",
    "sp_mul",
    "poisson_bracket",
    "sp_project",
    "sp_degree",
    "taylor_shift",
    "zeta",
    "zetabar",
    "xi_power",
]

_COMPS = ("a", "b", "c", "d")
# parity of the Grassmann basis element carried by each component
_COMP_PARITY = {"a": 0, "b": 1, "c": 1, "d": 0}

# products of basis elements 1, theta, thetabar, theta*thetabar under the
# fixed ordering: (left, right) -> (target, sign); absent = zero.
_BASIS_MUL = {
    ("a", "a"): ("a", 1),
    ("a", "b"): ("b", 1),
    ("a", "c"): ("c", 1),
    ("a", "d"): ("d", 1),
    ("b", "a"): ("b", 1),
    ("c", "a"): ("c", 1),
    ("d", "a"): ("d", 1),
    ("b", "c"): ("d", 1),    # theta * thetabar = +theta thetabar
    ("c", "b"): ("d", -1),   # thetabar * theta = -theta thetabar
}


class PoissonSymbol:
    """Symbol in component form with a xi-validity floor."""

    __slots__ = ("comps", "floor")

    def __init__(self, comps=None, floor=None, _clean=False):
        if comps is None:
            c = {name: {} for name in _COMPS}
        elif _clean:
            c = comps
        else:
            c = {}
            for name in _COMPS:
                src = comps.get(name, {})
                dst = {}
                for k, f in src.items():
                    if not f.is_zero() and (floor is None or k >= floor):
                        dst[k] = f
                c[name] = dst
        object.__setattr__(self, "comps", c)
        object.__setattr__(self, "floor", floor)

    def __setattr__(self, *a):
        raise AttributeError("PoissonSymbol is immutable")

    # -- constructors ------------------------------------------------------------

    @staticmethod
    def zero(model=None):
        return PoissonSymbol()

    @staticmethod
    def from_components(a=None, b=None, c=None, d=None, floor=None):
        return PoissonSymbol({"a": a or {}, "b": b or {}, "c": c or {}, "d": d or {}},
                             floor=floor)

    @staticmethod
    def from_coeff(F: SuperFunction, k: int, model=None):
        """(f + g theta) xi^k."""
        comps = {"a": {}, "b": {}, "c": {}, "d": {}}
        if not F.even.is_zero():
            comps["a"][k] = F.even
        if not F.odd.is_zero():
            comps["b"][k] = F.odd
        return PoissonSymbol(comps, _clean=True)

    @staticmethod
    def from_coeff_zeta(F: SuperFunction, k: int, model=None):
        """(f + g theta) xi^k zeta with zeta = thetabar + theta xi:
        components c += f xi^k, d += g xi^k, b += f xi^{k+1}."""
        comps = {"a": {}, "b": {}, "c": {}, "d": {}}
        if not F.even.is_zero():
            comps["c"][k] = F.even
            comps["b"][k + 1] = F.even
        if not F.odd.is_zero():
            comps["d"][k] = F.odd
        return PoissonSymbol(comps, _clean=True)

    # -- queries ---------------------------------------------------------------------

    def component(self, name: str) -> dict:
        return self.comps[name]

    def model(self):
        for name in _COMPS:
            for f in self.comps[name].values():
                if f.model:
                    return f.model
        return None

    def is_zero(self):
        return all(not self.comps[name] for name in _COMPS)

    def is_exact_zero(self):
        return self.is_zero() and self.floor is None

    def top(self):
        tops = [max(d) for d in self.comps.values() if d]
        return max(tops) if tops else None

    def parity(self):
        par = None
        for name in _COMPS:
            if self.comps[name]:
                p = _COMP_PARITY[name]
                if par is None:
                    par = p
                elif par != p:
                    return None
        return 0 if par is None else par

    def homogeneous_parts(self):
        out = []
        ev = {"a": self.comps["a"], "b": {}, "c": {}, "d": self.comps["d"]}
        od = {"a": {}, "b": self.comps["b"], "c": self.comps["c"], "d": {}}
        if ev["a"] or ev["d"]:
            out.append((PoissonSymbol(ev, floor=self.floor, _clean=True), 0))
        if od["b"] or od["c"]:
            out.append((PoissonSymbol(od, floor=self.floor, _clean=True), 1))
        return out

    # -- linear structure -----------------------------------------------------------------

    @staticmethod
    def _join_floor(f1, f2):
        if f1 is None:
            return f2
        if f2 is None:
            return f1
        return max(f1, f2)

    def with_floor(self, floor):
        f = self._join_floor(self.floor, floor)
        if f is None:
            return self
        comps = {name: {k: v for k, v in d.items() if k >= f}
                 for name, d in self.comps.items()}
        return PoissonSymbol(comps, floor=f, _clean=True)

    def __add__(self, other):
        if not isinstance(other, PoissonSymbol):
            return NotImplemented
        floor = self._join_floor(self.floor, other.floor)
        comps = {}
        for name in _COMPS:
            d = dict(self.comps[name])
            for k, f in other.comps[name].items():
                s = d.get(k)
                if s is None:
                    d[k] = f
                else:
                    s = s + f
                    if s.is_zero():
                        del d[k]
                    else:
                        d[k] = s
            if floor is not None:
                d = {k: v for k, v in d.items() if k >= floor}
            comps[name] = d
        return PoissonSymbol(comps, floor=floor, _clean=True)

    def __neg__(self):
        return PoissonSymbol({n: {k: -f for k, f in d.items()} for n, d in self.comps.items()},
                             floor=self.floor, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        p = ParamPoly.coerce(c)
        comps = {}
        for name in _COMPS:
            d = {}
            for k, f in self.comps[name].items():
                g = f.scaled(p)
                if not g.is_zero():
                    d[k] = g
            comps[name] = d
        return PoissonSymbol(comps, floor=self.floor, _clean=True)

    def dxi(self):
        comps = {}
        for name in _COMPS:
            d = {}
            for k, f in self.comps[name].items():
                if k != 0:
                    d[k - 1] = f.scaled(k)
            comps[name] = d
        floor = None if self.floor is None else self.floor - 1
        return PoissonSymbol(comps, floor=floor, _clean=True)

    def dx(self):
        comps = {}
        for name in _COMPS:
            d = {}
            for k, f in self.comps[name].items():
                g = f.dx()
                if not g.is_zero():
                    d[k] = g
            comps[name] = d
        return PoissonSymbol(comps, floor=self.floor, _clean=True)

    def dtheta(self):
        """Left derivative in theta: b + d thetabar
        (theta thetabar has theta in front, so the derivative is +thetabar)."""
        comps = {"a": dict(self.comps["b"]), "b": {}, "c": dict(self.comps["d"]), "d": {}}
        return PoissonSymbol(comps, floor=self.floor, _clean=True)

    def dthetabar(self):
        """Left derivative in thetabar: c - d theta
        (theta thetabar = -thetabar theta, so the derivative is -theta)."""
        comps = {"a": dict(self.comps["c"]), "b": {k: -f for k, f in self.comps["d"].items()},
                 "c": {}, "d": {}}
        return PoissonSymbol(comps, floor=self.floor, _clean=True)

    def __eq__(self, other):
        if not isinstance(other, PoissonSymbol):
            return NotImplemented
        return self.floor == other.floor and self.comps == other.comps

    def render(self) -> str:
        """Text form in the (xi, zeta) grading basis F xi^k + G xi^k zeta."""
        if self.is_zero():
            return "0" if self.floor is None else f"0  [floor {self.floor}]"
        model = self.model()
        zero = XFunction.zero(model)
        ks = set()
        for name in _COMPS:
            ks.update(self.comps[name].keys())
        parts = []
        for k in sorted(ks, reverse=True):
            c_k = self.comps["c"].get(k, zero)
            d_k = self.comps["d"].get(k, zero)
            a_k = self.comps["a"].get(k, zero)
            b_k = self.comps["b"].get(k, zero)
            c_km1 = self.comps["c"].get(k - 1, zero)
            F = SuperFunction(a_k, b_k - c_km1)
            G = SuperFunction(c_k, d_k)
            xi = "" if k == 0 else ("xi" if k == 1 else f"xi^{k}")
            if not F.is_zero():
                parts.append(f"({F.render()}){xi}" if xi else f"({F.render()})")
            if not G.is_zero():
                parts.append(f"({G.render()}){xi}*zeta" if xi else f"({G.render()})*zeta")
        body = " + ".join(parts) if parts else "0"
        if self.floor is not None:
            body += f"  [floor {self.floor}]"
        return body

    def to_json(self):
        return {
            "model": self.model(),
            "floor": self.floor,
            "components": {
                name: {str(k): f.render() for k, f in sorted(d.items(), reverse=True)}
                for name, d in self.comps.items()
            },
        }

    def __repr__(self):
        return f"PoissonSymbol<{self.render()}>"


def xi_power(k: int, model="fourier") -> PoissonSymbol:
    return PoissonSymbol({"a": {k: XFunction.const(1, model)}, "b": {}, "c": {}, "d": {}},
                         _clean=True)


def zeta(model="fourier") -> PoissonSymbol:
    """zeta = thetabar + theta xi."""
    one = XFunction.const(1, model)
    return PoissonSymbol({"a": {}, "b": {1: one}, "c": {0: one}, "d": {}}, _clean=True)


def zetabar(model="fourier") -> PoissonSymbol:
    """zetabar = thetabar - theta xi."""
    one = XFunction.const(1, model)
    none = XFunction.const(-1, model)
    return PoissonSymbol({"a": {}, "b": {1: none}, "c": {0: one}, "d": {}}, _clean=True)


def _prop_top(S: PoissonSymbol) -> int:
    t = S.top()
    if t is not None:
        return t
    return S.floor - 1


def sp_mul(S: PoissonSymbol, T: PoissonSymbol) -> PoissonSymbol:
    """Supercommutative product; the x-coefficients are ordinary functions,
    so all signs come from the Grassmann basis table."""
    m1, m2 = S.model(), T.model()
    if m1 and m2 and m1 != m2:
        raise ModelMismatchError(f"{m1} vs {m2}")
    floors = []
    if S.floor is not None:
        floors.append(S.floor + _prop_top(T))
    if T.floor is not None:
        floors.append(T.floor + _prop_top(S))
    floor = max(floors) if floors else None
    comps = {name: {} for name in _COMPS}
    for n1 in _COMPS:
        d1 = S.comps[n1]
        if not d1:
            continue
        for n2 in _COMPS:
            d2 = T.comps[n2]
            if not d2:
                continue
            tgt = _BASIS_MUL.get((n1, n2))
            if tgt is None:
                continue
            name, sign = tgt
            acc = comps[name]
            for k1, f1 in d1.items():
                for k2, f2 in d2.items():
                    k = k1 + k2
                    if floor is not None and k < floor:
                        continue
                    f = f1 * f2
                    if sign < 0:
                        f = -f
                    s = acc.get(k)
                    if s is None:
                        acc[k] = f
                    else:
                        s = s + f
                        if s.is_zero():
                            del acc[k]
                        else:
                            acc[k] = s
    return PoissonSymbol(comps, floor=floor, _clean=True)


def _poisson_homogeneous(S: PoissonSymbol, pS: int, T: PoissonSymbol) -> PoissonSymbol:
    out = sp_mul(S.dxi(), T.dx()) - sp_mul(S.dx(), T.dxi())
    grass = sp_mul(S.dtheta(), T.dthetabar()) + sp_mul(S.dthetabar(), T.dtheta())
    if pS == 0:
        out = out - grass
    else:
        out = out + grass
    return out


def poisson_bracket(S: PoissonSymbol, T: PoissonSymbol) -> PoissonSymbol:
    """{S,T} = dS/dxi dT/dx - dS/dx dT/dxi
               - (-1)^p(S) (dS/dtheta dT/dthetabar + dS/dthetabar dT/dtheta),
    extended to mixed parity by bilinearity."""
    out = PoissonSymbol.zero()
    for Si, p in S.homogeneous_parts():
        out = out + _poisson_homogeneous(Si, p, T)
    return out


def sp_project(S: PoissonSymbol, n: int) -> PoissonSymbol:
    """Projection onto the degree-n homogeneous subspace
    {F xi^{-n} + G xi^{-n-1} zeta}: components a, b at xi^{-n} and
    c, d at xi^{-n-1}."""
    comps = {"a": {}, "b": {}, "c": {}, "d": {}}
    for name, k in (("a", -n), ("b", -n), ("c", -n - 1), ("d", -n - 1)):
        f = S.comps[name].get(k)
        if f is not None:
            comps[name][k] = f
    return PoissonSymbol(comps, floor=S.floor, _clean=True)


def sp_degree(S: PoissonSymbol):
    """Largest n with a nonzero degree-n projection; None for zero."""
    degs = []
    for name, shift in (("a", 0), ("b", 0), ("c", 1), ("d", 1)):
        for k in S.comps[name]:
            degs.append(-k - shift)
    return max(degs) if degs else None


def taylor_shift(S: PoissonSymbol, lam, depth: int) -> PoissonSymbol:
    """Replace every coefficient F(x) by its shifted expansion

        F(x - 2 lam / xi) ~ sum_{j<=depth} (-2 lam)^j / j!  F^(j) xi^{-j},

    truncated at the stated depth."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    lamp = ParamPoly.coerce(lam)
    out = PoissonSymbol.zero()
    top = S.top()
    for name in _COMPS:
        comps = {"a": {}, "b": {}, "c": {}, "d": {}}
        acc = comps[name]
        for k, f in S.comps[name].items():
            seq = f
            for j in range(depth + 1):
                if seq.is_zero():
                    break
                w = (lamp * (-2)) ** j * ParamPoly.const(Fraction(1, factorial(j)))
                g = seq.scaled(w)
                kk = k - j
                s = acc.get(kk)
                if s is None:
                    acc[kk] = g
                else:
                    s = s + g
                    if s.is_zero():
                        del acc[kk]
                    else:
                        acc[kk] = s
                seq = seq.dx()
        out = out + PoissonSymbol(comps, _clean=True)
    floor = S.floor
    if top is not None and not lamp.is_zero():
        shift_floor = top - depth
        floor = shift_floor if floor is None else max(floor, shift_floor)
    return out.with_floor(floor)
