#pragma once

#include <string>
#include <vector>

#include "lifeline/families.hpp"
#include "lifeline/numerics.hpp"

namespace lifeline {

// Declared properties of a generator pair, set by the factories below.
//
// `strict`: psi diverges as u -> 0+ (probed at construction); a non-strict
// generator instead needs a finite cap psi(0) > 0.
//
// `involutive`: psi_inv is the exact functional inverse of psi, enforced as
// psi_inv(psi(u)) = u within 1e-9 on the check grid.  The power-ratio
// family deliberately pairs psi with a pseudo-inverse of mismatched scale
// for alpha != 1 (see power_ratio_generator); such pairs skip the identity
// check and delta_1 stays pinned to the identity map.
//
// `check_convexity`: enforce convex second differences of psi.  True for
// every genuine generator; the power-ratio factory waives it for beta > 1,
// where the printed psi behaves like (1-u)^{1/beta} near u = 1 and is not
// convex, yet the composite diagonals it defines remain valid sections
// (DiagonalFamily re-validates them independently).
struct GeneratorTraits {
    bool strict = true;
    bool involutive = true;
    bool check_convexity = true;
};

// An Archimedean generator pair.  psi maps (0,1] onto [0, inf) with
// psi(1) = 0, decreasing and (unless waived) convex; psi_inv maps back to
// [0,1].  Construction spot-checks the shape requirements on a 64-point
// grid (psi(1) = 0, monotone decrease, convex second differences) and that
// psi_inv(0) = 1.  The strictness probe at u = 1e-8 compares against a
// multiple of psi(1/4) so that tabulated generators, whose evaluation
// clamps at their first grid knot, still qualify.
class GeneratorSpec {
public:
    GeneratorSpec(RealFn psi, RealFn psi_inv, RealFn psi_prime = nullptr,
                  GeneratorTraits traits = {});

    double psi(double u) const;       // u in (0,1] (strict) or [0,1] (non-strict)
    double psi_inv(double x) const;   // x in [0, inf)
    double psi_prime(double u) const; // analytic derivative; ContractError if absent

    bool has_prime() const { return static_cast<bool>(psi_prime_); }
    bool strict() const { return strict_; }
    bool involutive() const { return involutive_; }
    // Finite cap psi(0) of a non-strict generator (+inf when strict).
    double zero_cap() const { return zero_cap_; }

    const std::vector<std::string>& notes() const { return notes_; }
    void add_note(std::string n) { notes_.push_back(std::move(n)); }

private:
    RealFn psi_;
    RealFn psi_inv_;
    RealFn psi_prime_;
    bool strict_;
    bool involutive_;
    double zero_cap_;
    std::vector<std::string> notes_;
};

// Generator of the independence model: psi(u) = -log u, psi_inv = exp(-x).
GeneratorSpec log_generator();

// psi(u) = u^{-theta} - 1 with psi_inv(x) = (1 + x)^{-1/theta}; theta > 0.
GeneratorSpec clayton_generator(double theta);

// The alpha-beta power-ratio family: psi(u) = (u^{-alpha} - 1)^{1/beta}
// paired with psi_inv(x) = (x^beta + 1)^{-alpha}.  The pair is mutually
// inverse only for alpha = 1, and psi is convex only for beta = 1; both
// checks are waived outside those cases because the pair is kept verbatim:
// the composite delta_ell(u) = psi_inv(ell psi(u)) is exactly the model
// this family is meant to produce
// (delta_ell(e^{-t}) = (ell^beta e^{alpha t} - ell^beta + 1)^{-alpha}).
struct PowerRatioParams {
    double alpha = 1.0; // > 0
    double beta = 1.0;  // >= 1
};
GeneratorSpec power_ratio_generator(const PowerRatioParams& p);

// Diagonal section delta_ell(u) = psi_inv(ell * psi(u)); delta_1 is the
// identity.  Endpoints map exactly: delta_ell(0) = 0, delta_ell(1) = 1.
// For a non-strict generator, arguments ell*psi(u) at or beyond the cap
// psi(0) yield 0 (the zero-clamp convention); scalar calls document this
// here, and arch_diagonal_family records it as a note.
double arch_diagonal(const GeneratorSpec& gen, int ell, double u);

// The diagonal sections delta_2..delta_r bundled as a DiagonalFamily
// (which re-validates endpoints, monotonicity, and the ordering in ell).
DiagonalFamily arch_diagonal_family(const GeneratorSpec& gen, int r);

// Failure rate of the minimum over a set of ell components, given no
// failures so far, for the Archimedean model with marginal survival Gbar:
//
//   mu^[ell](t | no failures) = -(1/ell) (d/dt) log delta_ell(Gbar(t)),
//
// evaluated by central differences (the defining chain-rule form).  A
// second, independent route — the ratio psi'(Gbar(t)) g(t) / [psi'(delta)
// delta] for involutive pairs, or a finite-difference derivative of
// psi_inv for non-involutive ones — must agree within 1e-6 or a
// ContractError is thrown.  Requires a strict generator with psi', and a
// marginal with an analytic density.  psi' vanishing at the evaluation
// point raises a singularity ContractError.
double arch_mu(const GeneratorSpec& gen, const MarginalSurvival& marg, int ell, double t);

// Schur-constant shortcut: when the survival copula's generator inverse
// coincides with the marginal (Gbar = psi_inv up to time scale), minima
// satisfy P(T_{1:A} > t) = Gbar(ell t), the diagonals satisfy
// delta_ell(u) = Gbar(ell Gbar^{-1}(u)), and the no-failure m.c.h.r. is
// g(ell t) / Gbar(ell t).  These helpers need only the marginal.
double schur_mu(const MarginalSurvival& marg, int ell, double t);
double schur_min_survival(const MarginalSurvival& marg, int ell, double t);
double schur_diagonal(const MarginalSurvival& marg, int ell, double u);
DiagonalFamily schur_diagonal_family(const MarginalSurvival& marg, int r);

// Result of recovering a generator from the top diagonal section delta_r:
// the iterate psi_m(u) = r^m (1 - delta_r^{o -m}(u)) converges (up to
// scale) to a generator of the model as m grows.  `gen` is normalized so
// psi(1/2) = 1; `iterations` is the last m evaluated; `converged` reports
// whether consecutive normalized profiles came within 1e-4 sup-norm
// (measured on u in [0.01, 1], where the profile is finite and tabulation
// noise does not dominate) before m_max.
struct RecoveredGenerator {
    GeneratorSpec gen;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> notes;
};

// Iterated monotone inversion of delta_r on a 4096-point grid.
// Preconditions: delta_r strictly increasing with delta_r(1) = 1,
// delta_r(u) <= u, and boundary slope delta_r'(1-) = r within 5% (the
// normalization under which the recovered generator is unique); violations
// raise ContractError.  Non-convergence within m_max returns the best
// iterate with a warning note.
RecoveredGenerator recover_generator(const RealFn& delta_r, int r, int m_max = 40);

} // namespace lifeline
