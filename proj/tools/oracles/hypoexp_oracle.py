#!/usr/bin/env python3
"""Reference values for sums of independent exponentials (hypoexponential laws).

Computes survival P(Y_1/g_1 + ... + Y_k/g_k > t) and the density at t by exact
partial-fraction decomposition of the Laplace transform prod_i g_i/(s+g_i),
using sympy rationals throughout. Repeated rates are handled exactly (higher
order poles), so this covers both the distinct-rate and the confluent paths of
the C++ implementation. Output is frozen into tests/test_loadsharing.cpp.
"""
from fractions import Fraction

import sympy as sp


def survival_and_density(rates, t_val):
    s, t = sp.symbols("s t", positive=True)
    gs = [sp.Rational(Fraction(str(g))) for g in rates]
    lt_density = sp.prod([g / (s + g) for g in gs])
    density = sp.inverse_laplace_transform(lt_density, s, t)
    # survival has transform (1 - LT_density)/s
    surv = sp.inverse_laplace_transform((1 - lt_density) / s, s, t)
    f = sp.N(density.subs(t, sp.Rational(Fraction(str(t_val)))), 30)
    S = sp.N(surv.subs(t, sp.Rational(Fraction(str(t_val)))), 30)
    return S, f


CASES = [
    # (rates, t)
    ((1, 2), 1),
    ((1, 1, 2), 0.7),          # the (L(3),L(2),L(1)) = (1,1,2) staged law
    ((1, 1, 2), 2.5),
    ((2, 2), 1.3),             # Erlang
    ((1.3, 1.3, 1.3), 0.9),    # triple repeated rate
    ((0.5, 1.7, 3.1, 0.9), 1.1),
    ((2.0, 2.0, 5.0), 0.6),
    ((0.25, 4.0, 0.25, 4.0, 1.0), 3.0),
]


def main():
    print("// frozen by tools/oracles/hypoexp_oracle.py")
    for rates, tv in CASES:
        S, f = survival_and_density(rates, tv)
        rs = ", ".join(repr(float(r)) for r in rates)
        svalue = sp.Float(S, 20)
        fvalue = sp.Float(f, 20)
        print(f"    {{{{{rs}}}, {float(tv)!r}, {svalue}, {fvalue}}},")


if __name__ == "__main__":
    main()
