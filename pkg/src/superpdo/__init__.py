"""Exact symbolic calculus for superpseudodifferential operators on the
supercircle, with a verification CLI for the deformation and central-charge
identities the package is built around."""

from .scalars import (GaussianRational, ParamPoly, PARAMS, gen_binomial,
                      gen_binomial_step, specialize)
from .superfunc import (SuperFunction, XFunction, circle_average, fourier_mode,
                        generic_pair)
from .spdo import (DEFAULT_CONVENTION, IntPartConvention, OperatorAlgebra,
                   SPDOperator, ad_log_xi, bracket_h, compose, compose_h,
                   etabar_power, exp_ad, from_symbol, psi_nu, sres, str_trace,
                   super_binom_s, supercommutator, to_symbol, xi_scaling)
from .symbols import (PoissonSymbol, poisson_bracket, sp_degree, sp_mul,
                      sp_project, taylor_shift, xi_power, zeta, zetabar)
from .contact import (ContactField, OneCochain, SpModule, SpdoModule, TwoCochain,
                      act, coboundary0, coboundary1, contact_bracket, cup,
                      is_cocycle, jet_fields, pibar, rho, window_fields)
from .deformation import (ConstraintSet, DeformationMap, H_coeff, L_coeff,
                          apply_branch, build_ansatz, calibrate_conventions,
                          curve_polynomial, defect, extract_constraints,
                          parameterize, reduce_to_curves, rho1_lambda,
                          rho2_lambda, rho3_lambda, rho_nu_lambda, sp_cocycle,
                          sp_deformation, theta, theta_tilde)
from .charge import ctilde1, neveu_schwarz, pullback_ratio

__version__ = "0.1.0"
