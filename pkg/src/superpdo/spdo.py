"""Truncated Laurent series in eta and their graded Leibniz composition.

An operator is a finite collection of terms F_m eta^m together with a
*validity floor*: coefficients at exponents below the floor are untracked.
A floor of None means the stored terms are exact all the way down (the
zero operator in particular is the exact zero with floor None, so no
minus-infinity arithmetic ever occurs).

Floor propagation under composition is

    floor(A o B) = max(floor_A + top_B, floor_B + top_A)

where top is the highest stored exponent: below that level the result is
contaminated by untracked input coefficients.  Compositions that generate
an infinite Leibniz tail (negative exponent against a non-nilpotent
coefficient) additionally require an explicit cut.

The integer-part convention in the super binomial coefficients and in the
h-graded weights is ambiguous for negative arguments, so it is carried as
an explicit, runtime-selectable pair and recorded in reports.  The default
(floor/floor) is the one under which eta o eta^-1 = 1 extends to the
classical infinite-tail expansion and the h-composition is associative;
the calibration suite re-derives this instead of trusting it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .scalars import GR_ONE, GaussianRational, ParamPoly, gen_binomial_step
from .superfunc import ModelMismatchError, SuperFunction, XFunction, circle_average
from . import symbols as _symbols

__all__ = [
    "SPDOperator",
    "IntPartConvention",
    "DEFAULT_CONVENTION",
    "OperatorAlgebra",
    "TruncationError",
    "InsufficientFloorError",
    "super_binom_s",
    "compose",
    "compose_h",
    "supercommutator",
    "bracket_h",
    "sres",
    "str_trace",
    "etabar_power",
    "ad_log_xi",
    "psi_nu",
    "xi_scaling",
    "exp_ad",
    "to_symbol",
    "from_symbol",
]


class TruncationError(RuntimeError):
    """A composition generated an infinite tail and no cut was supplied."""


class InsufficientFloorError(RuntimeError):
    """A residue/trace was requested below the tracked validity floor."""


_VARIANTS = ("floor", "trunc", "ceil")


def int_half(m: int, variant: str) -> int:
    """[m/2] under the selected reading of "integer part"."""
    if variant == "floor":
        return m // 2
    if variant == "ceil":
        return -((-m) // 2)
    if variant == "trunc":
        return m // 2 if m >= 0 else -((-m) // 2)
    raise ValueError(f"unknown integer-part variant {variant!r}")


@dataclass(frozen=True)
class IntPartConvention:
    """Integer-part choices: one for the super binomial index, one for the
    h-exponents.  Fixed per computation session and recorded in reports."""

    binom: str = "floor"
    hexp: str = "floor"

    def __post_init__(self):
        if self.binom not in _VARIANTS or self.hexp not in _VARIANTS:
            raise ValueError("variant must be floor|trunc|ceil")

    def label(self) -> str:
        return f"binom={self.binom},hexp={self.hexp}"


DEFAULT_CONVENTION = IntPartConvention()


@lru_cache(maxsize=None)
def _binom_frac(top: int, k: int) -> Fraction:
    """Generalized binomial with integer top (possibly negative), k >= 0."""
    if k < 0:
        return Fraction(0)
    if top >= 0:
        return Fraction(comb(top, k)) if k <= top else Fraction(0)
    num = 1
    for j in range(k):
        num *= top - j
    from math import factorial
    return Fraction(num, factorial(k))


@lru_cache(maxsize=None)
def _sbs(m: int, k: int, variant: str) -> Fraction:
    if k % 2 == 1 and m % 2 == 0:
        return Fraction(0)
    return _binom_frac(int_half(m, variant), int_half(k, variant))


def super_binom_s(m: int, k: int, conv: IntPartConvention = DEFAULT_CONVENTION) -> ParamPoly:
    """Super binomial coefficient: 0 when k is odd and m even, otherwise
    the generalized binomial of the integer parts."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return ParamPoly.const(_sbs(m, k, conv.binom))


class SPDOperator:
    """Sum of F_m eta^m terms with a validity floor.

    coeffs: {m: SuperFunction}, no zero values, no entries below the floor.
    floor: int or None (None = exact, nothing untracked).
    """

    __slots__ = ("coeffs", "floor")

    def __init__(self, coeffs=None, floor=None, _clean=False):
        if coeffs is None:
            c = {}
        elif _clean:
            c = dict(coeffs)
        else:
            c = {}
            for m, F in coeffs.items():
                if not F.is_zero() and (floor is None or m >= floor):
                    c[m] = F
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "floor", floor)

    def __setattr__(self, *a):
        raise AttributeError("SPDOperator is immutable")

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zero():
        return _OP_ZERO

    @staticmethod
    def term(F: SuperFunction, m: int, floor=None):
        return SPDOperator({m: F}, floor=floor)

    @staticmethod
    def eta_pow(m: int, model="fourier"):
        return SPDOperator({m: SuperFunction.one(model)}, _clean=True)

    @staticmethod
    def const(value, model="fourier"):
        return SPDOperator({0: SuperFunction.const(value, model)})

    # -- queries -----------------------------------------------------------------

    def model(self):
        for F in self.coeffs.values():
            if F.model:
                return F.model
        return None

    def is_zero(self):
        """Zero within the validity window."""
        return not self.coeffs

    def is_exact_zero(self):
        return not self.coeffs and self.floor is None

    def top(self):
        """Highest stored exponent, or None when nothing is stored."""
        return max(self.coeffs) if self.coeffs else None

    def order(self):
        """Order in the even-indexed canonical form: max ceil(m/2).

        None for an operator with no stored terms (the paper leaves the
        order of zero undefined; a sentinel avoids -inf arithmetic).
        """
        if not self.coeffs:
            return None
        return max(-((-m) // 2) for m in self.coeffs)

    def in_filtration(self, n: int) -> bool:
        o = self.order()
        return o is None or o <= -n

    def coefficient(self, m: int) -> SuperFunction:
        F = self.coeffs.get(m)
        if F is not None:
            return F
        return SuperFunction.zero(self.model())

    def parity(self):
        """0, 1, or None (mixed).  The zero operator counts as even."""
        par = None
        for m, F in self.coeffs.items():
            fp = F.parity()
            if fp is None:
                return None
            p = (fp + m) % 2
            if par is None:
                par = p
            elif par != p:
                return None
        return 0 if par is None else par

    def homogeneous_parts(self):
        """[(even_part), (odd_part)] with the same floor; zero parts dropped."""
        evens: dict = {}
        odds: dict = {}
        model = self.model()
        for m, F in self.coeffs.items():
            fe = SuperFunction(F.even, XFunction.zero(model))
            fo = SuperFunction(XFunction.zero(model), F.odd)
            if m % 2 == 0:
                if not fe.is_zero():
                    evens[m] = fe
                if not fo.is_zero():
                    odds[m] = fo
            else:
                if not fe.is_zero():
                    odds[m] = fe
                if not fo.is_zero():
                    evens[m] = fo
        out = []
        for par, terms in ((0, evens), (1, odds)):
            if terms:
                out.append((SPDOperator(terms, floor=self.floor, _clean=True), par))
        return out

    # -- linear structure -----------------------------------------------------------

    @staticmethod
    def _join_floor(f1, f2):
        if f1 is None:
            return f2
        if f2 is None:
            return f1
        return max(f1, f2)

    def __add__(self, other):
        if not isinstance(other, SPDOperator):
            return NotImplemented
        floor = self._join_floor(self.floor, other.floor)
        t = dict(self.coeffs)
        for m, F in other.coeffs.items():
            s = t.get(m)
            if s is None:
                t[m] = F
            else:
                s = s + F
                if s.is_zero():
                    del t[m]
                else:
                    t[m] = s
        if floor is not None:
            t = {m: F for m, F in t.items() if m >= floor}
        return SPDOperator(t, floor=floor, _clean=True)

    def __neg__(self):
        return SPDOperator({m: -F for m, F in self.coeffs.items()}, floor=self.floor, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c) -> "SPDOperator":
        p = ParamPoly.coerce(c)
        if p.is_zero():
            return SPDOperator({}, floor=self.floor, _clean=True)
        return SPDOperator({m: F.scaled(p) for m, F in self.coeffs.items()},
                           floor=self.floor, _clean=True)

    def func_mul(self, F: SuperFunction) -> "SPDOperator":
        """Left multiplication by a coefficient function (no Leibniz terms)."""
        t = {}
        for m, G in self.coeffs.items():
            P = F * G
            if not P.is_zero():
                t[m] = P
        return SPDOperator(t, floor=self.floor, _clean=True)

    def restricted(self, floor: int) -> "SPDOperator":
        """Forget everything below the given floor."""
        f = self._join_floor(self.floor, floor)
        return SPDOperator({m: F for m, F in self.coeffs.items() if m >= f},
                           floor=f, _clean=True)

    def substitute(self, assignment) -> "SPDOperator":
        t = {}
        for m, F in self.coeffs.items():
            G = F.substitute(assignment)
            if not G.is_zero():
                t[m] = G
        return SPDOperator(t, floor=self.floor, _clean=True)

    def __eq__(self, other):
        """Structural equality (terms and floor).  For equality of the
        represented operators within validity windows, subtract and test
        is_zero()."""
        if not isinstance(other, SPDOperator):
            return NotImplemented
        return self.floor == other.floor and self.coeffs == other.coeffs

    def render(self) -> str:
        if not self.coeffs:
            return "0" if self.floor is None else f"0  [floor {self.floor}]"
        parts = []
        for m in sorted(self.coeffs, reverse=True):
            F = self.coeffs[m]
            fs = F.render()
            if m == 0:
                parts.append(f"({fs})")
            elif m == 1:
                parts.append(f"({fs})*eta")
            else:
                parts.append(f"({fs})*eta^{m}")
        body = " + ".join(parts)
        if self.floor is not None:
            body += f"  [floor {self.floor}]"
        return body

    def to_json(self):
        return {
            "model": self.model(),
            "floor": self.floor,
            "terms": {str(m): self.coeffs[m].render() for m in sorted(self.coeffs, reverse=True)},
        }

    def __repr__(self):
        return f"SPDOperator<{self.render()}>"


_OP_ZERO = SPDOperator({}, floor=None, _clean=True)


def _prop_top(A: SPDOperator) -> int:
    """Top exponent for floor propagation.  An operator with no stored
    terms but a finite floor could hide content just below the floor."""
    t = A.top()
    if t is not None:
        return t
    return A.floor - 1


def _h_weight(m: int, n: int, k: int, h: ParamPoly, variant: str):
    if m % 2 != 0 and n % 2 != 0:
        e = int_half(k, variant)
    else:
        e = int_half(k - 1, variant)
    if e == 0:
        return None
    return h ** e


def compose(A: SPDOperator, B: SPDOperator, cut: int | None = None,
            h: ParamPoly | None = None,
            conv: IntPartConvention = DEFAULT_CONVENTION) -> SPDOperator:
    """Graded Leibniz composition, truncated to the propagated floor.

    With h given, the k-th Leibniz term carries the h-grading weight
    h^[k/2] (both exponents odd) or h^[(k-1)/2] (otherwise) under the
    session convention.
    """
    if A.is_exact_zero() or B.is_exact_zero():
        return _OP_ZERO
    model = A.model()
    bmodel = B.model()
    if model and bmodel and model != bmodel:
        raise ModelMismatchError(f"{model} vs {bmodel}")
    cands = []
    if A.floor is not None:
        cands.append(A.floor + _prop_top(B))
    if B.floor is not None:
        cands.append(B.floor + _prop_top(A))
    if cut is not None:
        cands.append(cut)
    eff = max(cands) if cands else None

    out: dict = {}
    for m, F in A.coeffs.items():
        for n, G in B.coeffs.items():
            if eff is None and m < 0 and not G.eta_nilpotent():
                raise TruncationError(
                    "infinite Leibniz tail (exponent %d against a non-nilpotent "
                    "coefficient); supply a cut" % m)
            seq = G
            k = 0
            while True:
                e = m + n - k
                if eff is not None and e < eff:
                    break
                if m >= 0 and k > m:
                    break
                if seq.is_zero():
                    break
                s = _sbs(m, k, conv.binom)
                if s != 0:
                    if (m - k) % 2 == 0:
                        g = seq
                    else:
                        g = seq.sigma()
                        if k % 2 == 1:
                            g = -g
                    P = F * g
                    if s != 1:
                        P = P.scaled(s)
                    if h is not None:
                        w = _h_weight(m, n, k, h, conv.hexp)
                        if w is not None:
                            P = P.scaled(w)
                    if not P.is_zero():
                        acc = out.get(e)
                        out[e] = P if acc is None else acc + P
                seq = seq.eta()
                k += 1
    out = {e: F for e, F in out.items() if not F.is_zero()}
    if eff is not None:
        out = {e: F for e, F in out.items() if e >= eff}
    return SPDOperator(out, floor=eff, _clean=True)


def compose_h(A: SPDOperator, B: SPDOperator, h, conv: IntPartConvention = DEFAULT_CONVENTION,
              cut: int | None = None) -> SPDOperator:
    """The h-graded associative composition (symbolic or specialized h)."""
    hp = ParamPoly.coerce(h)
    c = hp.is_constant()
    if c is not None and c.is_zero():
        raise ValueError("the h-composition needs nonzero h")
    return compose(A, B, cut=cut, h=hp, conv=conv)


def _comm_sign(pa: int, pb: int) -> int:
    return -1 if (pa and pb) else 1


def supercommutator(A: SPDOperator, B: SPDOperator, cut: int | None = None,
                    h: ParamPoly | None = None,
                    conv: IntPartConvention = DEFAULT_CONVENTION) -> SPDOperator:
    """[A,B] = A o B - (-1)^{p(A)p(B)} B o A, extended to mixed parity by
    bilinearity over the homogeneous parts."""
    out = _OP_ZERO
    for Ai, pa in A.homogeneous_parts():
        for Bj, pb in B.homogeneous_parts():
            AB = compose(Ai, Bj, cut=cut, h=h, conv=conv)
            BA = compose(Bj, Ai, cut=cut, h=h, conv=conv)
            if _comm_sign(pa, pb) == 1:
                out = out + AB - BA
            else:
                out = out + AB + BA
    return out


def bracket_h(A: SPDOperator, B: SPDOperator, h, conv: IntPartConvention = DEFAULT_CONVENTION,
              cut: int | None = None) -> SPDOperator:
    """(1/h) times the h-composition supercommutator.

    With symbolic h the division is an exact h-exponent shift (the scalar
    ring is Laurent in h); whether negative h-powers remain in the result
    is a calibration finding, not an error.
    """
    hp = ParamPoly.coerce(h)
    comm = supercommutator(A, B, cut=cut, h=hp, conv=conv)
    c = hp.is_constant()
    if c is not None:
        if c.is_zero():
            raise ValueError("bracket_h needs nonzero h")
        return comm.scaled(ParamPoly.const(GR_ONE / c))
    return comm.scaled(ParamPoly.h_pow(-1))


def sres(A: SPDOperator) -> SuperFunction:
    """Coefficient at eta^-1.  Requires the floor to reach -1."""
    if A.floor is not None and A.floor > -1:
        raise InsufficientFloorError(f"floor {A.floor} does not track eta^-1")
    return A.coefficient(-1)


def str_trace(A: SPDOperator) -> ParamPoly:
    """Adler supertrace: normalized circle integral of the super residue."""
    return circle_average(sres(A))


def etabar_power(m: int, model="fourier") -> SPDOperator:
    """etabar^m in the canonical eta basis (exact).

    etabar = eta - 2 theta eta^2 and etabar^2 = -eta^2 give
        even m:  (-1)^(m/2) eta^m
        odd m:   (-1)^((m-1)/2) (eta^m - 2 theta eta^(m+1)).
    """
    if m % 2 == 0:
        sign = -1 if (m // 2) % 2 else 1
        return SPDOperator({m: SuperFunction.const(sign, model)})
    sign = -1 if ((m - 1) // 2) % 2 else 1
    one = SuperFunction.const(sign, model)
    th = SuperFunction.from_odd(XFunction.const(-2 * sign, model))
    return SPDOperator({m: one, m + 1: th})


def ad_log_xi(A: SPDOperator, cut: int | None = None) -> SPDOperator:
    """The outer derivation [log xi, .]:

        F_m eta^m  ->  sum_{j>=1} ((-1)^(j-1)/j) (d/dx)^j(F_m) eta^(m-2j)

    xi = eta^2 commutes with eta, so the classical log-xi expansion acts
    coefficientwise; the derivation property is verified behaviorally in
    the test suite rather than taken on faith.
    """
    if A.is_exact_zero():
        return _OP_ZERO
    cands = []
    if A.floor is not None:
        cands.append(A.floor)
    if cut is not None:
        cands.append(cut)
    eff = max(cands) if cands else None
    out: dict = {}
    for m, F in A.coeffs.items():
        if eff is None and not F.eta_nilpotent():
            raise TruncationError("ad log xi generates an infinite tail; supply a cut")
        seq = F.dx()
        j = 1
        while not seq.is_zero():
            e = m - 2 * j
            if eff is not None and e < eff:
                break
            c = Fraction(-1 if j % 2 == 0 else 1, j)
            P = seq.scaled(c)
            acc = out.get(e)
            out[e] = P if acc is None else acc + P
            seq = seq.dx()
            j += 1
    out = {e: F for e, F in out.items() if not F.is_zero()}
    return SPDOperator(out, floor=eff, _clean=True)


def xi_scaling(A: SPDOperator, nu_h, h, cut: int | None = None) -> SPDOperator:
    """Conjugation by the xi-power with exponent nu = nu_h / h, written with
    the h-graded weights that make it an automorphism of the h-composition:

        F_m eta^m -> sum_k w_k (d/dx)^k(F_m) eta^(m-2k),
        w_k = prod_{j<k} (nu_h - j h) / k!

    At h = 1 this is the ordinary xi^nu conjugation; nu_h = -2 lam keeps
    everything polynomial without ever forming -2 lam / h symbolically.
    """
    nu_hp = ParamPoly.coerce(nu_h)
    hp = ParamPoly.coerce(h)
    if A.is_exact_zero():
        return _OP_ZERO
    cands = []
    if A.floor is not None:
        cands.append(A.floor)
    if cut is not None:
        cands.append(cut)
    eff = max(cands) if cands else None
    if eff is None:
        # the weight sequence terminates only when nu is a non-negative integer
        c, hc = nu_hp.is_constant(), hp.is_constant()
        terminating = (
            c is not None and hc is not None and not hc.is_zero()
            and c.im == 0 and hc.im == 0
            and (c.re / hc.re).denominator == 1 and c.re / hc.re >= 0
        )
        if not terminating and any(not F.eta_nilpotent() for F in A.coeffs.values()):
            raise TruncationError("xi-power conjugation needs a cut here")
    out: dict = {}
    for m, F in A.coeffs.items():
        seq = F
        k = 0
        w = ParamPoly.one()
        while True:
            e = m - 2 * k
            if eff is not None and e < eff:
                break
            if seq.is_zero() or w.is_zero():
                break
            P = seq.scaled(w)
            if not P.is_zero():
                acc = out.get(e)
                out[e] = P if acc is None else acc + P
            k += 1
            w = w * (nu_hp - hp * (k - 1)) * ParamPoly.const(Fraction(1, k))
            seq = seq.dx()
    out = {e: F for e, F in out.items() if not F.is_zero()}
    return SPDOperator(out, floor=eff, _clean=True)


def psi_nu(A: SPDOperator, nu, cut: int | None = None) -> SPDOperator:
    """The outer automorphism of the undeformed composition:
    F_m eta^m -> sum_k binom(nu, k) (d/dx)^k(F_m) eta^(m-2k)."""
    return xi_scaling(A, nu, 1, cut=cut)


def exp_ad(S: SPDOperator, A: SPDOperator, depth: int,
           cut: int | None = None, h: ParamPoly | None = None,
           conv: IntPartConvention = DEFAULT_CONVENTION) -> SPDOperator:
    """sum_{j<=depth} (1/j!) (ad S)^j (A) for even S."""
    if S.parity() == 1:
        raise ValueError("exp_ad needs an even generator")
    out = A
    term = A
    fact = Fraction(1)
    for j in range(1, depth + 1):
        term = supercommutator(S, term, cut=cut, h=h, conv=conv)
        if term.is_zero():
            break
        fact = fact / j
        out = out + term.scaled(fact)
    return out


def to_symbol(A: SPDOperator) -> "_symbols.PoissonSymbol":
    """Vector-space identification with symbols:
    F eta^{2k} -> F xi^k,  F eta^{2k+1} -> F xi^k zeta."""
    model = A.model()
    S = _symbols.PoissonSymbol.zero(model)
    floor = None if A.floor is None else A.floor // 2
    for m, F in A.coeffs.items():
        k = m // 2
        if m % 2 == 0:
            S = S + _symbols.PoissonSymbol.from_coeff(F, k, model)
        else:
            S = S + _symbols.PoissonSymbol.from_coeff_zeta(F, k, model)
    return S.with_floor(floor)


def from_symbol(S: "_symbols.PoissonSymbol") -> SPDOperator:
    """Inverse of to_symbol on its image."""
    model = S.model()
    terms: dict = {}
    ks = set()
    for comp in ("a", "b", "c", "d"):
        ks.update(S.component(comp).keys())
    for k in ks:
        a_k = S.component("a").get(k, XFunction.zero(model))
        b_k = S.component("b").get(k, XFunction.zero(model))
        c_k = S.component("c").get(k, XFunction.zero(model))
        d_k = S.component("d").get(k, XFunction.zero(model))
        c_km1 = S.component("c").get(k - 1, XFunction.zero(model))
        even = SuperFunction(a_k, b_k - c_km1)
        odd = SuperFunction(c_k, d_k)
        if not even.is_zero():
            terms[2 * k] = even.__add__(terms[2 * k]) if 2 * k in terms else even
        if not odd.is_zero():
            terms[2 * k + 1] = odd.__add__(terms[2 * k + 1]) if 2 * k + 1 in terms else odd
    floor = None if S.floor is None else 2 * S.floor
    return SPDOperator(terms, floor=floor)


@dataclass(frozen=True)
class OperatorAlgebra:
    """Composition context: undeformed (h=None) or h-graded, with the
    session convention and truncation cut."""

    h: ParamPoly | None = None
    conv: IntPartConvention = DEFAULT_CONVENTION
    cut: int | None = None

    def compose(self, A, B):
        return compose(A, B, cut=self.cut, h=self.h, conv=self.conv)

    def commutator(self, A, B):
        return supercommutator(A, B, cut=self.cut, h=self.h, conv=self.conv)

    def label(self) -> str:
        if self.h is None:
            return "plain"
        c = self.h.is_constant()
        return f"h={self.h.render()}" if c is None else f"h={c}"
