#!/usr/bin/env python3
"""Reference values for a time-varying exchangeable hazard model.

Model: r units, all exchangeable; while k units have failed, every surviving
unit fails at rate  mu_k(t) = a_k * (1 + t)  (depends on wall-clock time and
count only). The failure count N(t) is then a pure-birth process with rate
(r-k) * a_k * (1+t) out of state k, which is a deterministic time change
tau(t) = t + t^2/2 of the constant-rate pure birth with stage rates
rho_k = (r-k) * a_k. Hence

    P(N(t) = k) = S_{k+1}(tau(t)) - S_k(tau(t))

with S_k the hypoexponential survival for stage rates (rho_0..rho_{k-1})
(S_0 = 0, S_{r+1} = 1), and every ordered failure sequence j with |j| = d has

    Psi(t; j) = P(N(t) = d) / (r)_d .

The C++ library evaluates Psi by nested quadrature / QMC over the ordered
simplex with no knowledge of the time change, so these numbers are an
independent cross-check. Also emits the joint density at a few points
(elementary closed form) and marginal/min survivals. Frozen into
tests/test_hazard.cpp.
"""
from fractions import Fraction

import sympy as sp

from hypoexp_oracle import survival_and_density


def staged_survivals(rho, tau):
    """S_k(tau) for k = 0..len(rho): P(sum of first k stages > tau)."""
    out = [sp.Integer(0)]
    for k in range(1, len(rho) + 1):
        S, _ = survival_and_density(rho[:k], tau)
        out.append(S)
    return out


def falling(n, k):
    v = 1
    for i in range(k):
        v *= n - i
    return v


def count_pmf(r, a, t):
    tau = Fraction(str(t)) + Fraction(str(t)) ** 2 / 2
    rho = [(r - k) * Fraction(str(a[k])) for k in range(r)]
    S = staged_survivals(rho, tau)
    S.append(sp.Integer(1))  # S_{r+1}
    return [sp.N(S[k + 1] - S[k], 25) for k in range(r + 1)]


def joint_density(r, a, xs):
    """Joint density of the full failure-time vector at x (pairwise distinct).

    With u_(1) < ... < u_(r) the sorted failure times,
      f(x) = prod_k mu_{k-1}(u_k) * exp(-sum_k (r-k+1) * M_{k-1}(u_{k-1}, u_k))
    where M_k(s0, s1) = a_k * (tau(s1) - tau(s0)).
    """
    us = sorted(sp.Rational(Fraction(str(x))) for x in xs)
    tau = lambda s: s + s**2 / 2
    prev = sp.Integer(0)
    val = sp.Integer(1)
    expo = sp.Integer(0)
    for k, u in enumerate(us):
        ak = sp.Rational(Fraction(str(a[k])))
        val *= ak * (1 + u)
        expo += (len(us) - k) * ak * (tau(u) - tau(prev))
        prev = u
    return sp.N(val * sp.exp(-expo), 25)


R3_A = (0.5, 0.8, 1.4)
R5_A = (0.5, 0.8, 1.4, 2.2, 3.0)


def main():
    print("// frozen by tools/oracles/timevarying_oracle.py")
    for t in (0.8, 2.0):
        pmf = count_pmf(3, R3_A, t)
        psis = [sp.N(pmf[d] / falling(3, d), 25) for d in range(4)]
        print(f"// r=3 a=(0.5,0.8,1.4) t={t}")
        print("//   P(N=k):", ", ".join(f"{sp.Float(p, 20)}" for p in pmf))
        print("//   Psi(|j|=d):", ", ".join(f"{sp.Float(p, 20)}" for p in psis))
    for t in (0.8,):
        pmf = count_pmf(5, R5_A, t)
        psis = [sp.N(pmf[d] / falling(5, d), 25) for d in range(6)]
        print(f"// r=5 a=(0.5,0.8,1.4,2.2,3.0) t={t}")
        print("//   P(N=k):", ", ".join(f"{sp.Float(p, 20)}" for p in pmf))
        print("//   Psi(|j|=d):", ", ".join(f"{sp.Float(p, 20)}" for p in psis))
    for xs in ((0.3, 1.1, 0.6), (0.2, 0.9, 1.7)):
        print(f"// r=3 joint density at {xs}: {sp.Float(joint_density(3, R3_A, xs), 20)}")


if __name__ == "__main__":
    main()
