"""Infinitely divisible GCD and LCM matrices of arithmetical functions."""

from .arith import (AffineCombo, ArithFn, Conv, ConvPower, Delta, Factorization, Jordan, Mu, Mult,
                    PointwisePower, Session, Table, Xi, affine_combo, conv_power, dirichlet_conv,
                    divisors, evaluate, factorize, load_table, mobius_conv_prime_power,
                    pointwise_power)
from .dsl import parse_fn_expr, to_expr
from .matrix import (InfDivMode, InfDivVerdict, MatrixKind, PsdVerdict, SymMatrix, Verdict,
                     build_matrix, determinant, diag_scale, hadamard_power, infdiv_check,
                     min_psd_exponent, psd_check)
from .sets import (AlphaVector, ClassReport, DivisorClosure, IntegerSet, alpha_vector,
                   class_membership, divisor_closure, gcd_pair, lcm_pair)

__version__ = "0.1.0"
