"""The central-extension layer: the supertrace 2-cocycle, the
Neveu-Schwarz cocycle, and the pullback ratio under the deformed
embeddings.

All integrals are normalized (constant Fourier mode, i.e. 1/2pi of the
circle integral).  "Coincides" statements are therefore tested as
proportionality with one window-wide constant; both cocycles here use the
same normalization, so the constant cancels from the ratio.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .scalars import GaussianRational, ParamPoly
from .superfunc import SuperFunction, circle_average
from .spdo import SPDOperator, ad_log_xi, compose, str_trace
from .contact import ContactField

__all__ = [
    "ScalarTwoCocycle",
    "ctilde1",
    "neveu_schwarz",
    "pullback_ratio",
    "NonConstantRatioError",
]


class NonConstantRatioError(RuntimeError):
    """The pullback ratio varied across the window (falsification or
    miscalibration); carries the offending pair."""


@dataclass(frozen=True)
class ScalarTwoCocycle:
    """Scalar-valued 2-cocycle with a normalization note for reports."""

    name: str
    evaluator: object
    normalization: str = "circle integral normalized by 1/(2 pi)"

    def __call__(self, A, B):
        return self.evaluator(A, B)


def ctilde1(A: SPDOperator, B: SPDOperator, cut: int | None = None) -> ParamPoly:
    """Str([log xi, A] o B), the supertrace 2-cocycle.

    The cut is chosen automatically deep enough that the eta^-1
    coefficient of the product is tracked.
    """
    if cut is None:
        top_b = B.top()
        cut = -3 - max(top_b if top_b is not None else 0, 0)
    la = ad_log_xi(A, cut=cut)
    return str_trace(compose(la, B, cut=-1))


def supertrace_cocycle() -> ScalarTwoCocycle:
    return ScalarTwoCocycle("ctilde1", ctilde1)


def neveu_schwarz(F: SuperFunction, G: SuperFunction) -> ParamPoly:
    """-(1/4) of the normalized integral of the Berezin form of F eta^5(G)."""
    from fractions import Fraction
    val = circle_average(F * G.eta_power(5))
    return val * ParamPoly.const(Fraction(-1, 4))


def pullback_ratio(D, fields: Sequence[ContactField], cut: int | None = None) -> ParamPoly:
    """Common value of ctilde1(D(vF), D(vG)) / neveu_schwarz(F, G) over all
    window pairs with nonzero denominator.

    Raises NonConstantRatioError with the offending pair if the ratio is
    not pair-independent.  A zero ratio (total degeneration) is legal and
    returned as 0.
    """
    ratio = None
    witness = None
    images = {id(f): D.evaluate(f) for f in fields}
    for i, u in enumerate(fields):
        for w in fields[i:]:
            ns = neveu_schwarz(u.F, w.F)
            nsc = ns.is_constant()
            if nsc is None or nsc.is_zero():
                continue
            num = ctilde1(images[id(u)], images[id(w)], cut=cut)
            nc = num.is_constant()
            if nc is None:
                raise NonConstantRatioError(
                    f"non-scalar cocycle value at ({u.label},{w.label}): {num.render()}")
            r = ParamPoly.const(nc / nsc)
            if ratio is None:
                ratio = r
                witness = (u.label, w.label)
            elif ratio != r:
                raise NonConstantRatioError(
                    f"ratio {r.render()} at ({u.label},{w.label}) differs from "
                    f"{ratio.render()} at {witness}")
    if ratio is None:
        raise NonConstantRatioError("no window pair had a nonzero denominator")
    return ratio
