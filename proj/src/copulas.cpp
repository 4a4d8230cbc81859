#include "lifeline/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <utility>

#include "lifeline/combinatorics.hpp"
#include "lifeline/families.hpp"
#include "lifeline/rng.hpp"

namespace lifeline {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt_point(const std::vector<double>& u) {
    std::string s = "(";
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i) s += ", ";
        s += fmt(u[i]);
    }
    return s + ")";
}

std::string fmt_subset(const std::vector<int>& a) {
    std::string s = "{";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(a[i] + 1);  // report 1-based component labels
    }
    return s + "}";
}

// Odometer over an index tuple of length `dims`, each index in [0, n).
bool advance(std::vector<int>& idx, int n) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (++idx[i] < n) return true;
        idx[i] = 0;
    }
    return false;
}

constexpr double kMarginTol = 1e-10;
constexpr double kMonotoneSlack = 1e-10;

} // namespace

// ---------------------------------------------------------------------------
// CopulaSpec

CopulaSpec::CopulaSpec(int r, CopulaFn eval, CopulaFn density,
                       std::string provenance)
    : r_(r), eval_(std::move(eval)), density_(std::move(density)),
      provenance_(std::move(provenance)) {
    check_dimension(r_);
    if (!eval_) throw DomainError("CopulaSpec: evaluation function is empty");
    validate();
}

void CopulaSpec::validate() const {
    // Uniform one-dimensional margins: all other coordinates at 1.
    const auto margin_grid = make_uniform_grid(0.0, 1.0, 33);
    std::vector<double> point(static_cast<std::size_t>(r_), 1.0);
    for (int axis = 0; axis < r_; ++axis) {
        for (double u : margin_grid) {
            point.assign(static_cast<std::size_t>(r_), 1.0);
            point[static_cast<std::size_t>(axis)] = u;
            const double v = eval_(point);
            if (!std::isfinite(v) || std::fabs(v - u) > kMarginTol)
                throw ContractError("CopulaSpec: margin along axis " +
                                    std::to_string(axis + 1) +
                                    " is not uniform: C at u=" + fmt(u) +
                                    " returned " + fmt(v));
        }
    }

    // Componentwise monotonicity.  Full product grid for r <= 3; for larger
    // r, sampled 3-dimensional faces plus the main diagonal ray.
    const int g = 9;
    const auto axis_grid = make_uniform_grid(0.0, 1.0, g);
    auto check_face = [&](const std::vector<int>& axes,
                          const std::vector<double>& fixed) {
        const int dims = static_cast<int>(axes.size());
        std::vector<int> idx(static_cast<std::size_t>(dims), 0);
        auto point_at = [&](const std::vector<int>& ix) {
            std::vector<double> u = fixed;
            for (int j = 0; j < dims; ++j)
                u[static_cast<std::size_t>(axes[static_cast<std::size_t>(j)])] =
                    axis_grid[static_cast<std::size_t>(ix[static_cast<std::size_t>(j)])];
            return u;
        };
        do {
            const auto u0 = point_at(idx);
            const double base = eval_(u0);
            if (!std::isfinite(base))
                throw ContractError("CopulaSpec: non-finite value at " + fmt_point(u0));
            for (int j = 0; j < dims; ++j) {
                auto& step = idx[static_cast<std::size_t>(j)];
                if (step + 1 >= g) continue;
                ++step;
                const double up = eval_(point_at(idx));
                --step;
                if (up < base - kMonotoneSlack)
                    throw ContractError(
                        "CopulaSpec: not nondecreasing in component " +
                        std::to_string(axes[static_cast<std::size_t>(j)] + 1) +
                        " near " + fmt_point(u0) + " (drops from " + fmt(base) +
                        " to " + fmt(up) + ")");
            }
        } while (advance(idx, g));
    };

    if (r_ <= 3) {
        std::vector<int> all_axes(static_cast<std::size_t>(r_));
        std::iota(all_axes.begin(), all_axes.end(), 0);
        check_face(all_axes, std::vector<double>(static_cast<std::size_t>(r_), 1.0));
    } else {
        Rng rng(20260814u);
        const auto faces = subsets_of_size(r_, 3);
        const int n_faces = std::min<int>(4, static_cast<int>(faces.size()));
        for (int f = 0; f < n_faces; ++f) {
            const auto& axes =
                faces[static_cast<std::size_t>(rng.next_u64() % faces.size())];
            std::vector<double> fixed(static_cast<std::size_t>(r_));
            for (auto& x : fixed) x = 0.2 + 0.75 * rng.uniform01();
            check_face(axes, fixed);
        }
        // Main diagonal ray.
        double prev = 0.0;
        for (double t : make_uniform_grid(0.0, 1.0, 33)) {
            std::vector<double> u(static_cast<std::size_t>(r_), t);
            const double v = eval_(u);
            if (v < prev - kMonotoneSlack)
                throw ContractError("CopulaSpec: diagonal section decreases near t=" +
                                    fmt(t));
            prev = v;
        }
    }
}

double CopulaSpec::operator()(const std::vector<double>& u) const {
    if (static_cast<int>(u.size()) != r_)
        throw DomainError("CopulaSpec: expected " + std::to_string(r_) +
                          " coordinates, got " + std::to_string(u.size()));
    std::vector<double> v(u);
    for (auto& x : v) {
        if (!(x >= -1e-9 && x <= 1.0 + 1e-9))
            throw DomainError("CopulaSpec: coordinate " + fmt(x) +
                              " outside [0,1]");
        x = std::min(1.0, std::max(0.0, x));
    }
    const double c = eval_(v);
    // Constructions below can undershoot 0 or overshoot 1 by rounding only.
    return std::min(1.0, std::max(0.0, c));
}

double CopulaSpec::density(const std::vector<double>& u) const {
    if (!density_)
        throw ContractError("CopulaSpec: no density attached" +
                            (provenance_.empty() ? std::string()
                                                 : " (" + provenance_ + ")"));
    if (static_cast<int>(u.size()) != r_)
        throw DomainError("CopulaSpec: expected " + std::to_string(r_) +
                          " coordinates, got " + std::to_string(u.size()));
    return density_(u);
}

double CopulaSpec::subset_diagonal(const std::vector<int>& subset, double u) const {
    if (subset.empty())
        throw DomainError("CopulaSpec: diagonal subset is empty");
    std::vector<double> point(static_cast<std::size_t>(r_), 1.0);
    for (int i : subset) {
        if (i < 0 || i >= r_)
            throw DomainError("CopulaSpec: subset index " + std::to_string(i) +
                              " outside [0," + std::to_string(r_ - 1) + "]");
        if (point[static_cast<std::size_t>(i)] != 1.0)
            throw DomainError("CopulaSpec: subset index " + std::to_string(i) +
                              " repeated");
        point[static_cast<std::size_t>(i)] = u;
    }
    return (*this)(point);
}

double CopulaSpec::diagonal(int ell, double u) const {
    if (ell < 1 || ell > r_)
        throw DomainError("CopulaSpec: diagonal order " + std::to_string(ell) +
                          " outside [1," + std::to_string(r_) + "]");
    std::vector<int> subset(static_cast<std::size_t>(ell));
    std::iota(subset.begin(), subset.end(), 0);
    return subset_diagonal(subset, u);
}

// ---------------------------------------------------------------------------
// Stock copulas

CopulaSpec product_copula(int r) {
    check_dimension(r);
    auto eval = [](const std::vector<double>& u) {
        double p = 1.0;
        for (double x : u) p *= x;
        return p;
    };
    auto dens = [](const std::vector<double>&) { return 1.0; };
    return CopulaSpec(r, eval, dens, "product(r=" + std::to_string(r) + ")");
}

CopulaSpec quadratic_seed(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw DomainError("quadratic_seed: need 0 <= theta <= 1, got " + fmt(theta));
    auto eval = [theta](const std::vector<double>& u) {
        const double x = u[0], y = u[1];
        return x * y + theta * x * x * y * (1.0 - x) * (1.0 - y);
    };
    auto dens = [theta](const std::vector<double>& u) {
        const double x = u[0], y = u[1];
        return 1.0 + theta * (2.0 * x - 3.0 * x * x) * (1.0 - 2.0 * y);
    };
    return CopulaSpec(2, eval, dens, "quadratic_seed(theta=" + fmt(theta) + ")");
}

// ---------------------------------------------------------------------------
// Symmetry diagnostics

SymmetryCheck check_dd(const CopulaSpec& c, int grid_n, double tol) {
    if (grid_n < 8)
        throw DomainError("check_dd: need grid_n >= 8, got " + std::to_string(grid_n));
    if (!(tol > 0.0)) throw DomainError("check_dd: tolerance must be positive");

    SymmetryCheck out;
    const auto grid = make_uniform_grid(0.0, 1.0, grid_n);
    const int r = c.r();
    for (int ell = 2; ell < r; ++ell) {
        const auto subs = subsets_of_size(r, ell);
        const auto& ref = subs.front();
        std::vector<double> ref_vals(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            ref_vals[i] = c.subset_diagonal(ref, grid[i]);
        for (std::size_t s = 1; s < subs.size(); ++s) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double dev =
                    std::fabs(c.subset_diagonal(subs[s], grid[i]) - ref_vals[i]);
                if (dev > out.max_dev) {
                    out.max_dev = dev;
                    out.witness_a = ref;
                    out.witness_b = subs[s];
                    out.witness_point = {grid[i]};
                }
            }
        }
    }
    out.pass = out.max_dev <= tol;
    if (!out.pass)
        out.note = "diagonal sections of " + fmt_subset(out.witness_a) + " and " +
                   fmt_subset(out.witness_b) + " differ by " + fmt(out.max_dev) +
                   " at u=" + fmt(out.witness_point.front());
    return out;
}

SymmetryReport check_symmetries(const CopulaSpec& c, int grid_n, double tol) {
    if (grid_n < 8)
        throw DomainError("check_symmetries: need grid_n >= 8, got " +
                          std::to_string(grid_n));
    SymmetryReport report;
    report.dd = check_dd(c, grid_n, tol);

    const int r = c.r();
    std::vector<int> identity(static_cast<std::size_t>(r));
    std::iota(identity.begin(), identity.end(), 0);

    // Permutations to probe: all of them for small r, otherwise all adjacent
    // transpositions, the reversal, and a fixed pseudo-random sample.
    std::vector<std::vector<int>> perms;
    if (r <= 4) {
        perms = permutations_of(identity);
    } else {
        for (int i = 0; i + 1 < r; ++i) {
            auto p = identity;
            std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i) + 1]);
            perms.push_back(std::move(p));
        }
        auto rev = identity;
        std::reverse(rev.begin(), rev.end());
        perms.push_back(std::move(rev));
        Rng rng(20260814u);
        for (int k = 0; k < 16; ++k) {
            auto p = identity;
            for (int i = r - 1; i > 0; --i)
                std::swap(p[static_cast<std::size_t>(i)],
                          p[static_cast<std::size_t>(rng.next_u64() %
                                                     static_cast<std::uint64_t>(i + 1))]);
            perms.push_back(std::move(p));
        }
    }

    // Probe points: full interior grid for r <= 3, a seeded sample otherwise.
    std::vector<std::vector<double>> points;
    if (r <= 3) {
        const int g = 9;
        std::vector<int> idx(static_cast<std::size_t>(r), 0);
        do {
            std::vector<double> u(static_cast<std::size_t>(r));
            for (int j = 0; j < r; ++j)
                u[static_cast<std::size_t>(j)] =
                    (idx[static_cast<std::size_t>(j)] + 1) / static_cast<double>(g + 1);
            points.push_back(std::move(u));
        } while (advance(idx, g));
    } else {
        Rng rng(472882027u);
        for (int k = 0; k < 256; ++k) {
            std::vector<double> u(static_cast<std::size_t>(r));
            for (auto& x : u) x = 0.05 + 0.9 * rng.uniform01();
            points.push_back(std::move(u));
        }
    }

    auto& ex = report.exchangeable;
    std::vector<double> permuted(static_cast<std::size_t>(r));
    for (const auto& u : points) {
        const double base = c(u);
        for (const auto& sigma : perms) {
            for (int i = 0; i < r; ++i)
                permuted[static_cast<std::size_t>(i)] =
                    u[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])];
            const double dev = std::fabs(c(permuted) - base);
            if (dev > ex.max_dev) {
                ex.max_dev = dev;
                ex.witness_a = sigma;
                ex.witness_point = u;
            }
        }
    }
    ex.pass = ex.max_dev <= tol;
    if (!ex.pass) {
        std::string sig = "(";
        for (std::size_t i = 0; i < ex.witness_a.size(); ++i) {
            if (i) sig += ",";
            sig += std::to_string(ex.witness_a[i] + 1);
        }
        sig += ")";
        ex.note = "K(u) and K(u_sigma) differ by " + fmt(ex.max_dev) +
                  " for sigma=" + sig + " at u=" + fmt_point(ex.witness_point);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Cyclic constructions

std::vector<double> cyclic_alpha_row(int n) {
    check_dimension(n);
    std::vector<double> row = {1.0, 0.0};  // alpha_{2,1}, alpha_{2,2}
    for (int m = 3; m <= n; ++m) {
        std::vector<double> next(static_cast<std::size_t>(m));
        for (int d = 1; d <= m; ++d) {
            const double prev_dm1 =
                (d - 1 == 0) ? 1.0 : row[static_cast<std::size_t>(d - 2)];
            const double prev_d =
                (d > m - 1) ? 0.0 : row[static_cast<std::size_t>(d - 1)];
            next[static_cast<std::size_t>(d - 1)] =
                (static_cast<double>(d) / m) * prev_dm1 +
                (1.0 - static_cast<double>(d) / m) * prev_d;
        }
        row = std::move(next);
    }
    for (double a : row)
        if (!(a >= 0.0 && a <= 1.0))
            throw ContractError("cyclic_alpha_row: coefficient " + fmt(a) +
                                " escaped [0,1]");
    return row;
}

CyclicPair cyclic3(const CopulaSpec& seed) {
    if (seed.r() != 2)
        throw DomainError("cyclic3: seed must be two-dimensional, got r=" +
                          std::to_string(seed.r()));
    auto sp = std::make_shared<CopulaSpec>(seed);

    auto fwd_eval = [sp](const std::vector<double>& u) {
        return ((*sp)({u[0], u[1]}) * u[2] + (*sp)({u[1], u[2]}) * u[0] +
                (*sp)({u[2], u[0]}) * u[1]) / 3.0;
    };
    auto rev_eval = [sp](const std::vector<double>& u) {
        return ((*sp)({u[1], u[0]}) * u[2] + (*sp)({u[2], u[1]}) * u[0] +
                (*sp)({u[0], u[2]}) * u[1]) / 3.0;
    };
    CopulaFn fwd_dens, rev_dens;
    if (sp->has_density()) {
        fwd_dens = [sp](const std::vector<double>& u) {
            return (sp->density({u[0], u[1]}) + sp->density({u[1], u[2]}) +
                    sp->density({u[2], u[0]})) / 3.0;
        };
        rev_dens = [sp](const std::vector<double>& u) {
            return (sp->density({u[1], u[0]}) + sp->density({u[2], u[1]}) +
                    sp->density({u[0], u[2]})) / 3.0;
        };
    }
    const std::string tag = seed.provenance().empty() ? "seed" : seed.provenance();
    return CyclicPair{
        CopulaSpec(3, fwd_eval, fwd_dens, "cyclic3(" + tag + ")"),
        CopulaSpec(3, rev_eval, rev_dens, "cyclic3-reversed(" + tag + ")")};
}

ExtendedCyclic extend_cyclic(const CopulaSpec& prev,
                             const std::function<double(double)>& base_diag,
                             const std::vector<int>& perm) {
    const int n = prev.r() + 1;
    check_dimension(n);
    if (!base_diag)
        throw DomainError("extend_cyclic: base_diag (seed diagonal) is empty");

    std::vector<int> p0(static_cast<std::size_t>(n));
    if (perm.empty()) {
        std::iota(p0.begin(), p0.end(), 0);
    } else {
        if (static_cast<int>(perm.size()) != n)
            throw DomainError("extend_cyclic: perm must have " + std::to_string(n) +
                              " entries");
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        for (int i = 0; i < n; ++i) {
            const int v = perm[static_cast<std::size_t>(i)];
            if (v < 1 || v > n || seen[static_cast<std::size_t>(v - 1)])
                throw DomainError("extend_cyclic: perm is not a permutation of 1.." +
                                  std::to_string(n));
            seen[static_cast<std::size_t>(v - 1)] = true;
            p0[static_cast<std::size_t>(i)] = v - 1;
        }
    }

    const auto pre = check_dd(prev, 33, 1e-9);
    if (!pre.pass)
        throw ContractError(
            "extend_cyclic: input copula is not diagonal-dependent: " + pre.note);

    auto sp = std::make_shared<CopulaSpec>(prev);
    const auto p0s = std::make_shared<const std::vector<int>>(p0);
    auto eval = [sp, p0s, n](const std::vector<double>& u) {
        std::vector<double> w(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            w[static_cast<std::size_t>(i)] =
                u[static_cast<std::size_t>((*p0s)[static_cast<std::size_t>(i)])];
        std::vector<double> args(static_cast<std::size_t>(n - 1));
        double total = 0.0;
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j + 1 < n; ++j)
                args[static_cast<std::size_t>(j)] =
                    w[static_cast<std::size_t>((j + k) % n)];
            total += (*sp)(args) * w[static_cast<std::size_t>((n - 1 + k) % n)];
        }
        return total / n;
    };
    CopulaFn dens;
    if (sp->has_density()) {
        dens = [sp, p0s, n](const std::vector<double>& u) {
            std::vector<double> w(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                w[static_cast<std::size_t>(i)] =
                    u[static_cast<std::size_t>((*p0s)[static_cast<std::size_t>(i)])];
            std::vector<double> args(static_cast<std::size_t>(n - 1));
            double total = 0.0;
            for (int k = 0; k < n; ++k) {
                for (int j = 0; j + 1 < n; ++j)
                    args[static_cast<std::size_t>(j)] =
                        w[static_cast<std::size_t>((j + k) % n)];
                total += sp->density(args);
            }
            return total / n;
        };
    }

    const std::string tag = prev.provenance().empty() ? "inner" : prev.provenance();
    ExtendedCyclic out{CopulaSpec(n, eval, dens,
                                  "extend_cyclic(" + tag + ", n=" + std::to_string(n) + ")"),
                       cyclic_alpha_row(n)};

    // Cross-check the closed-form diagonals against direct evaluation.  This
    // only holds when the whole chain grew from one two-dimensional seed with
    // diagonal base_diag, which is exactly the promised usage.
    for (int d = 2; d <= n; ++d) {
        const double alpha = out.alpha_row[static_cast<std::size_t>(d - 1)];
        for (double u : make_uniform_grid(0.0, 1.0, 33)) {
            const double closed = alpha * std::pow(u, d) +
                                  (1.0 - alpha) * base_diag(u) * std::pow(u, d - 2);
            const double direct = out.copula.diagonal(d, u);
            if (std::fabs(closed - direct) > 1e-10)
                throw ContractError(
                    "extend_cyclic: diagonal of order " + std::to_string(d) +
                    " deviates from its closed form by " +
                    fmt(std::fabs(closed - direct)) + " at u=" + fmt(u) +
                    "; base_diag must be the diagonal of the seed this chain grew from");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Signed mixtures and symmetrization

CopulaSpec negative_mixture(const CopulaSpec& D, const CopulaSpec& C1,
                            const CopulaSpec& C2, double alpha, double d_low,
                            double c_high) {
    const int r = D.r();
    if (C1.r() != r || C2.r() != r)
        throw DomainError("negative_mixture: dimensions differ (" +
                          std::to_string(r) + ", " + std::to_string(C1.r()) + ", " +
                          std::to_string(C2.r()) + ")");
    if (!D.has_density() || !C1.has_density() || !C2.has_density())
        throw ContractError(
            "negative_mixture: all three inputs need densities with bound certificates");
    if (!(d_low > 0.0) || !(c_high > 0.0))
        throw DomainError("negative_mixture: bound certificates must be positive");
    if (!(alpha >= 0.0))
        throw DomainError("negative_mixture: alpha must be nonnegative");
    if (alpha > d_low / c_high)
        throw DomainError("negative_mixture: bound violation: alpha=" + fmt(alpha) +
                          " exceeds the certified d_low/c_high=" +
                          fmt(d_low / c_high));

    const auto d_sym = check_symmetries(D, 17, 1e-9);
    if (!d_sym.exchangeable.pass)
        throw ContractError("negative_mixture: D must be exchangeable: " +
                            d_sym.exchangeable.note);

    auto dp = std::make_shared<CopulaSpec>(D);
    auto c1p = std::make_shared<CopulaSpec>(C1);
    auto c2p = std::make_shared<CopulaSpec>(C2);
    auto eval = [dp, c1p, c2p, alpha](const std::vector<double>& u) {
        return (*dp)(u) + alpha * ((*c1p)(u) - (*c2p)(u));
    };
    auto dens = [dp, c1p, c2p, alpha](const std::vector<double>& u) {
        return dp->density(u) + alpha * (c1p->density(u) - c2p->density(u));
    };
    CopulaSpec out(r, eval, dens,
                   "negative_mixture(alpha=" + fmt(alpha) + ")");

    // Verify the density really is nonnegative; a violation means a bound
    // certificate was wrong, so name the offending cell.
    const int g = 64;
    std::vector<double> u(static_cast<std::size_t>(r), 0.5);
    if (r <= 3) {
        std::vector<int> idx(static_cast<std::size_t>(r), 0);
        do {
            for (int j = 0; j < r; ++j)
                u[static_cast<std::size_t>(j)] =
                    (idx[static_cast<std::size_t>(j)] + 0.5) / g;
            const double k = out.density(u);
            if (k < -1e-12)
                throw ContractError("negative_mixture: density is negative (" +
                                    fmt(k) + ") at " + fmt_point(u) +
                                    "; a bound certificate must be wrong");
        } while (advance(idx, g));
    } else {
        Rng rng(911617233u);
        for (int s = 0; s < g * g * g; ++s) {
            for (auto& x : u) x = rng.uniform01();
            const double k = out.density(u);
            if (k < -1e-12)
                throw ContractError("negative_mixture: density is negative (" +
                                    fmt(k) + ") at " + fmt_point(u) +
                                    "; a bound certificate must be wrong");
        }
    }

    // The mixture keeps diagonal-dependence whenever both signed parts have it.
    if (check_dd(C1, 17, 1e-9).pass && check_dd(C2, 17, 1e-9).pass) {
        const auto out_dd = check_dd(out, 17, 1e-9);
        if (!out_dd.pass)
            throw ContractError(
                "negative_mixture: output lost diagonal-dependence: " + out_dd.note);
    }
    return out;
}

CopulaSpec symmetrize(const CopulaSpec& k) {
    const int r = k.r();
    if (r > 8)
        throw DomainError("symmetrize: r=" + std::to_string(r) +
                          " exceeds the factorial-cost cap of 8");
    std::vector<int> identity(static_cast<std::size_t>(r));
    std::iota(identity.begin(), identity.end(), 0);
    auto perms = std::make_shared<const std::vector<std::vector<int>>>(
        permutations_of(identity));
    auto kp = std::make_shared<CopulaSpec>(k);

    auto average = [kp, perms, r](const std::vector<double>& u, bool density) {
        std::vector<double> v(static_cast<std::size_t>(r));
        double total = 0.0;
        for (const auto& sigma : *perms) {
            for (int i = 0; i < r; ++i)
                v[static_cast<std::size_t>(i)] =
                    u[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])];
            total += density ? kp->density(v) : (*kp)(v);
        }
        return total / static_cast<double>(perms->size());
    };
    auto eval = [average](const std::vector<double>& u) { return average(u, false); };
    CopulaFn dens;
    if (k.has_density())
        dens = [average](const std::vector<double>& u) { return average(u, true); };

    const std::string tag = k.provenance().empty() ? "K" : k.provenance();
    return CopulaSpec(r, eval, dens, "symmetrize(" + tag + ")");
}

} // namespace lifeline
