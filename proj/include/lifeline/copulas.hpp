#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lifeline/errors.hpp"

namespace lifeline {

// Joint distribution function on [0,1]^r with uniform margins.  Evaluation
// closures receive the coordinate vector (size r, each entry in [0,1]).
using CopulaFn = std::function<double(const std::vector<double>&)>;

// An r-dimensional copula given by its distribution function and, optionally,
// its density.  Construction validates what can be validated cheaply:
//   * one-dimensional margins are uniform: evaluating with a single
//     coordinate set to u and every other coordinate set to 1 returns u
//     (within 1e-10, checked on a 33-point grid per axis);
//   * the function is componentwise nondecreasing on a check grid
//     (full 9-points-per-axis product grid when r <= 3; for larger r a
//     deterministic sample of 3-dimensional faces plus the diagonal ray).
// Full r-increasingness (nonnegative rectangle volumes) is NOT verified:
// for r >= 3 an exhaustive check costs 2^r evaluations per cell of a full
// product grid, so it is left to the density check of the constructions
// that need it.  Callers that supply a density promise it is the actual
// mixed partial derivative of eval.
class CopulaSpec {
public:
    CopulaSpec(int r, CopulaFn eval, CopulaFn density = nullptr,
               std::string provenance = "");

    int r() const { return r_; }

    // C(u).  Validates the dimension and that coordinates lie in [0,1]
    // (up to a tiny slack, then clamped).
    double operator()(const std::vector<double>& u) const;

    bool has_density() const { return static_cast<bool>(density_); }
    double density(const std::vector<double>& u) const;

    // Diagonal section of the coordinate subset A (0-based indices):
    // delta_A(u) = C(v) with v_i = u for i in A and v_i = 1 otherwise.
    double subset_diagonal(const std::vector<int>& subset, double u) const;

    // delta_ell(u) over the leading subset {0,..,ell-1}.
    double diagonal(int ell, double u) const;

    const std::string& provenance() const { return provenance_; }

private:
    void validate() const;

    int r_;
    CopulaFn eval_;
    CopulaFn density_;
    std::string provenance_;
};

// ---------------------------------------------------------------------------
// Stock copulas used as seeds.

// Independence copula: C(u) = prod_i u_i with density 1.
CopulaSpec product_copula(int r);

// Asymmetric two-dimensional seed C(u,v) = uv + theta * u^2 v (1-u)(1-v),
// a polynomial perturbation of independence with uniform margins and
// density 1 + theta (2u - 3u^2)(1 - 2v) >= 0 for 0 <= theta <= 1.
// C(u,v) - C(v,u) = theta uv (1-u)(1-v)(u - v), so the copula is genuinely
// non-exchangeable for theta > 0.
CopulaSpec quadratic_seed(double theta);

// ---------------------------------------------------------------------------
// Symmetry diagnostics.

// One verified symmetry property.  On failure the witness fields identify a
// concrete violation:
//  * diagonal comparison: witness_a / witness_b are the two coordinate
//    subsets (0-based) whose diagonal sections differ, witness_point = {u};
//  * exchangeability: witness_a is the permutation (as images of 0..r-1),
//    witness_point is the full coordinate vector.
struct SymmetryCheck {
    bool pass = true;
    double max_dev = 0.0;
    std::vector<double> witness_point;
    std::vector<int> witness_a;
    std::vector<int> witness_b;
    std::string note;
};

struct SymmetryReport {
    SymmetryCheck dd;            // all equal-size subsets share diagonal sections
    SymmetryCheck exchangeable;  // K(u) invariant under coordinate permutations
};

// Diagonal comparison only: for every ell <= r and every pair of ell-subsets
// A, B, max_u |delta_A(u) - delta_B(u)| <= tol on a grid_n-point u-grid.
SymmetryCheck check_dd(const CopulaSpec& c, int grid_n = 33, double tol = 1e-9);

// Both checks.  Exchangeability compares K(u) against K(u_sigma) for a
// deterministic set of permutations (all of them when r <= 4, a fixed
// sample including all adjacent transpositions otherwise) at grid points
// (full 9-per-axis product grid when r <= 3, a seeded sample otherwise).
// Requires grid_n >= 8.
SymmetryReport check_symmetries(const CopulaSpec& c, int grid_n = 33,
                                double tol = 1e-9);

// ---------------------------------------------------------------------------
// Cyclic constructions.

// Coefficients alpha_{n,d} of the diagonal sections of the recursive cyclic
// family: alpha_{n,1} = 1, alpha_{2,2} = 0, and
//   alpha_{n,d} = (d/n) alpha_{n-1,d-1} + (1 - d/n) alpha_{n-1,d}
// (with alpha_{n,0} := 1 so the d = 1 row stays at 1).  All values lie in
// [0,1].  Row n lists alpha_{n,1}, .., alpha_{n,n}.
std::vector<double> cyclic_alpha_row(int n);

// Both orientations of the three-dimensional cyclic mixture of a 2-copula:
//   forward : (1/3) [ C(u1,u2) u3 + C(u2,u3) u1 + C(u3,u1) u2 ]
//   reversed: same with the argument pairs flipped (cycle traversed the
//             other way).
// Each output has uniform margins, identical two-dimensional margins
// (1/3)[C(u,v) + 2uv] on every coordinate pair, and identical diagonal
// sections on equal-size subsets, while remaining non-exchangeable
// whenever C is not symmetric.  Densities propagate when C has one.
struct CyclicPair {
    CopulaSpec forward;
    CopulaSpec reversed;
};
CyclicPair cyclic3(const CopulaSpec& seed);

// One step of the recursive cyclic extension: from an (n-1)-dimensional
// diagonal-dependent copula to an n-dimensional one,
//   C_n(u) = (1/n) sum_{k=0}^{n-1} C_{n-1}(u_{1+k},..,u_{n-1+k}) u_{n+k}
// (indices mod n).  `base_diag` must be the diagonal section u -> C(u,u)
// of the original two-dimensional seed; the constructor cross-checks the
// closed-form diagonals
//   delta^{C_n}_d(u) = alpha_{n,d} u^d + (1 - alpha_{n,d}) base_diag(u) u^{d-2}
// against direct evaluation (within 1e-10) and fails loudly on mismatch.
// `perm`, when supplied, relabels the coordinates before the cyclic sums
// (1-based images; identity reproduces the plain construction).  The input
// must pass check_dd at 1e-9.
struct ExtendedCyclic {
    CopulaSpec copula;
    std::vector<double> alpha_row;  // alpha_{n,1}, .., alpha_{n,n}
};
ExtendedCyclic extend_cyclic(const CopulaSpec& prev,
                             const std::function<double(double)>& base_diag,
                             const std::vector<int>& perm = {});

// ---------------------------------------------------------------------------
// Signed mixtures and symmetrization.

// K_alpha = D + alpha (C1 - C2) for an exchangeable D and diagonal-dependent
// C1, C2 of the same dimension, all with densities.  `d_low` and `c_high`
// are the caller's bound certificates: the density of D dominates
// d_low * rho and the densities of C1, C2 are below c_high * rho for one
// shared positive profile rho, so alpha <= d_low / c_high guarantees the
// mixture density d + alpha (c1 - c2) stays nonnegative.  alpha beyond the
// certified bound raises a DomainError; the resulting density is verified
// nonnegative on a 64^min(r,3)-point grid regardless, and a negative cell
// (possible only if a certificate was wrong) raises a ContractError naming
// the witness point.
CopulaSpec negative_mixture(const CopulaSpec& D, const CopulaSpec& C1,
                            const CopulaSpec& C2, double alpha, double d_low,
                            double c_high);

// Full permutation average (1/r!) sum_sigma K(u_sigma): the exchangeable
// copula sharing every diagonal section of K.  Densities propagate.
// Evaluation cost grows like r!, so r <= 8 is enforced.
CopulaSpec symmetrize(const CopulaSpec& k);

} // namespace lifeline
