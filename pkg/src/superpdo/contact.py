"""Contact vector fields, their embeddings, and the cohomology layer.

The bracket on contact fields is defined operationally: the commutator of
the operator images is again an operator image, and the Hamiltonian is
read back off without integration.  A residual-zero assertion guards the
extraction, so the bracket's sign conventions have a single source of
truth.

Cochains are finite formal combinations of named generators; coboundaries
and cup products are evaluated exhaustively on finite windows of Fourier
fields or on generic jet arguments (which make an identity universal).
The degree-2 coboundary signs follow the convention under which the
composite of the two differentials vanishes; this is machine-checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .scalars import ParamPoly
from .superfunc import SuperFunction, XFunction, fourier_mode, generic_pair
from .spdo import OperatorAlgebra, SPDOperator, etabar_power, supercommutator
from .symbols import PoissonSymbol, poisson_bracket, sp_mul, zetabar

__all__ = [
    "ContactField",
    "CalculusError",
    "rho",
    "pibar",
    "contact_bracket",
    "act",
    "OneCochain",
    "TwoCochain",
    "SpdoModule",
    "SpModule",
    "coboundary0",
    "coboundary1",
    "coboundary2",
    "cup",
    "is_cocycle",
    "window_fields",
    "jet_fields",
]


class CalculusError(AssertionError):
    """An internal consistency assertion failed (calculus bug)."""


class ContactField:
    """v_F, the contact field with Hamiltonian F."""

    __slots__ = ("F", "label")

    def __init__(self, F: SuperFunction, label: str = ""):
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "label", label or F.render())

    def __setattr__(self, *a):
        raise AttributeError("ContactField is immutable")

    def parity(self):
        return self.F.parity()

    def __eq__(self, other):
        return isinstance(other, ContactField) and self.F == other.F

    def __repr__(self):
        return f"v[{self.label}]"


def rho(v: ContactField) -> SPDOperator:
    """The canonical operator image F eta^2 + (1/2) eta(F) etabar, written
    in the eta basis (exact; exponents 1 and 2 only)."""
    F = v.F
    model = F.model
    etaF = F.eta()
    half = etaF.scaled(ParamPoly.const(_half()))
    theta = SuperFunction.theta(model)
    top = F - (etaF * theta)
    terms = {}
    if not top.is_zero():
        terms[2] = top
    if not half.is_zero():
        terms[1] = half
    return SPDOperator(terms, _clean=True)


def _half():
    from fractions import Fraction
    return Fraction(1, 2)


def pibar(v: ContactField) -> PoissonSymbol:
    """The symbol image F xi + (1/2) eta(F) zetabar."""
    F = v.F
    model = F.model
    out = PoissonSymbol.from_coeff(F, 1, model)
    half = F.eta().scaled(ParamPoly.const(_half()))
    out = out + sp_mul(PoissonSymbol.from_coeff(half, 0, model), zetabar(model))
    return out


def contact_bracket(u: ContactField, w: ContactField) -> ContactField:
    """The unique H with [rho(u), rho(w)] = rho(v_H).

    H is extracted from the eta^2 and eta^1 coefficients; a residual-zero
    assertion guards against any calculus drift.
    """
    C = supercommutator(rho(u), rho(w))
    model = u.F.model or w.F.model
    C1 = C.coefficient(1)
    C2 = C.coefficient(2)
    theta = SuperFunction.theta(model)
    H = C2 + (C1 * theta).scaled(2)
    residual = C - rho(ContactField(H))
    if not residual.is_zero():
        raise CalculusError(
            f"contact bracket extraction residual nonzero: {residual.render()}")
    return ContactField(H, label=f"[{u.label},{w.label}]")


def act(v: ContactField, A):
    """Natural action: supercommutator with rho(v) on operators, Poisson
    bracket with pibar(v) on symbols."""
    if isinstance(A, SPDOperator):
        return supercommutator(rho(v), A)
    if isinstance(A, PoissonSymbol):
        return poisson_bracket(pibar(v), A)
    raise TypeError(f"cannot act on {type(A)!r}")


# -- modules ---------------------------------------------------------------------


@dataclass(frozen=True)
class SpdoModule:
    """Operator-valued coefficients with the bracket of a composition
    context (undeformed or h-graded)."""

    algebra: OperatorAlgebra = field(default_factory=OperatorAlgebra)

    def embed(self, v: ContactField) -> SPDOperator:
        return rho(v)

    def bracket(self, A, B):
        return self.algebra.commutator(A, B)

    def zero(self):
        return SPDOperator.zero()

    def label(self):
        return f"SPDO[{self.algebra.label()}]"


@dataclass(frozen=True)
class SpModule:
    """Symbol-valued coefficients with the super Poisson bracket."""

    def embed(self, v: ContactField) -> PoissonSymbol:
        return pibar(v)

    def bracket(self, S, T):
        return poisson_bracket(S, T)

    def zero(self):
        return PoissonSymbol.zero()

    def label(self):
        return "SP"


# -- cochains ----------------------------------------------------------------------


@dataclass(frozen=True)
class OneCochain:
    """Finite formal combination of named generators; evaluation is linear
    in the generators with ParamPoly coefficients.  All generators used in
    this artifact are even."""

    target: str                      # "spdo" | "sp"
    terms: tuple                     # ((coeff: ParamPoly, name: str, fn), ...)
    label: str = ""

    def evaluate(self, v: ContactField):
        out = None
        for coeff, _name, fn in self.terms:
            val = fn(v).scaled(coeff)
            out = val if out is None else out + val
        if out is None:
            out = SPDOperator.zero() if self.target == "spdo" else PoissonSymbol.zero()
        return out

    def __call__(self, v: ContactField):
        return self.evaluate(v)

    def scaled(self, c) -> "OneCochain":
        p = ParamPoly.coerce(c)
        return OneCochain(self.target,
                          tuple((coeff * p, name, fn) for coeff, name, fn in self.terms),
                          label=f"({self.label})*{p.render()}")

    def __add__(self, other: "OneCochain") -> "OneCochain":
        if self.target != other.target:
            raise ValueError("cochain targets differ")
        return OneCochain(self.target, self.terms + other.terms,
                          label=f"{self.label}+{other.label}")


@dataclass(frozen=True)
class TwoCochain:
    """Bilinear map on pairs of contact fields, given by an evaluator."""

    target: str
    fn: Callable
    label: str = ""

    def evaluate(self, u: ContactField, w: ContactField):
        return self.fn(u, w)

    def __call__(self, u, w):
        return self.fn(u, w)


def single_cochain(target: str, name: str, fn) -> OneCochain:
    return OneCochain(target, ((ParamPoly.one(), name, fn),), label=name)


def coboundary0(m, module) -> OneCochain:
    """delta of a degree-0 cochain (a fixed even element m): X -> [rho(X), m]."""
    def fn(v):
        return module.bracket(module.embed(v), m)
    target = "spdo" if isinstance(module, SpdoModule) else "sp"
    return single_cochain(target, "coboundary0", fn)


def coboundary1(gamma: OneCochain, module) -> TwoCochain:
    """(delta gamma)(X,Y) =
    [rho(X), gamma(Y)] - (-1)^{p(X)p(Y)} [rho(Y), gamma(X)] - gamma([X,Y])."""
    def fn(u, w):
        pu, pw = u.parity(), w.parity()
        if pu is None or pw is None:
            raise ValueError("coboundary evaluation needs homogeneous fields")
        t1 = module.bracket(module.embed(u), gamma.evaluate(w))
        t2 = module.bracket(module.embed(w), gamma.evaluate(u))
        t3 = gamma.evaluate(contact_bracket(u, w))
        if pu and pw:
            return t1 + t2 - t3
        return t1 - t2 - t3
    return TwoCochain(gamma.target, fn, label=f"d({gamma.label})")


def coboundary2(c: TwoCochain, module) -> Callable:
    """Degree-2 coboundary with the sign convention that makes the square
    of the differential vanish (machine-checked):

    (delta c)(x,y,z) = x.c(y,z) - (-1)^{xy} y.c(x,z) + (-1)^{z(x+y)} z.c(x,y)
                       - c([x,y],z) + (-1)^{yz} c([x,z],y) + c(x,[y,z]).
    """
    def fn(x, y, z):
        px, py, pz = x.parity(), y.parity(), z.parity()
        def s(e):
            return -1 if e % 2 else 1
        out = module.bracket(module.embed(x), c(y, z))
        t = module.bracket(module.embed(y), c(x, z))
        out = out + (t if s(px * py) < 0 else -t)
        t = module.bracket(module.embed(z), c(x, y))
        out = out + (t if s(pz * (px + py)) > 0 else -t)
        out = out - c(contact_bracket(x, y), z)
        t = c(contact_bracket(x, z), y)
        out = out + (t if s(py * pz) > 0 else -t)
        out = out + c(x, contact_bracket(y, z))
        return out
    return fn


def cup(g1: OneCochain, g2: OneCochain, module) -> TwoCochain:
    """[[g1,g2]](X,Y) = [g1(X), g2(Y)] + [g2(X), g1(Y)]."""
    def fn(u, w):
        return module.bracket(g1.evaluate(u), g2.evaluate(w)) \
            + module.bracket(g2.evaluate(u), g1.evaluate(w))
    return TwoCochain(g1.target, fn, label=f"[[{g1.label},{g2.label}]]")


# -- windows and scans --------------------------------------------------------------------


def window_fields(modes: int) -> list[ContactField]:
    """Parity-homogeneous Fourier Hamiltonians for |n| <= modes."""
    out = []
    for n in range(-modes, modes + 1):
        out.append(ContactField(fourier_mode(n, "even"), label=f"E{n}"))
        out.append(ContactField(fourier_mode(n, "odd"), label=f"O{n}"))
    return out


def jet_fields() -> list[ContactField]:
    """Generic homogeneous jet Hamiltonians a, 2b theta, c, 2d theta."""
    F, G = generic_pair()
    return [
        ContactField(SuperFunction.from_even(F.even), label="a"),
        ContactField(SuperFunction.from_odd(F.odd), label="2b*theta"),
        ContactField(SuperFunction.from_even(G.even), label="c"),
        ContactField(SuperFunction.from_odd(G.odd), label="2d*theta"),
    ]


def is_cocycle(gamma: OneCochain, module, fields: Sequence[ContactField],
               label: str = "") -> dict:
    """Evaluate the coboundary on every unordered pair (diagonal included)
    and report the verdict with the first counterexample, if any."""
    d = coboundary1(gamma, module)
    checked = 0
    for i, u in enumerate(fields):
        for w in fields[i:]:
            if u.parity() == 0 and w is u:
                continue
            val = d(u, w)
            checked += 1
            if not val.is_zero():
                return {
                    "cochain": label or gamma.label,
                    "module": module.label(),
                    "verdict": "fail",
                    "pairs_checked": checked,
                    "counterexample": {
                        "X": u.label,
                        "Y": w.label,
                        "value": val.render(),
                    },
                }
    return {
        "cochain": label or gamma.label,
        "module": module.label(),
        "verdict": "pass",
        "pairs_checked": checked,
        "counterexample": None,
    }
