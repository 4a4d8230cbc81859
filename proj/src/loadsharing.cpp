#include "lifeline/loadsharing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "lifeline/combinatorics.hpp"
#include "lifeline/rng.hpp"

namespace lifeline {

namespace {

std::string prefix_str(const std::vector<int>& prefix) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < prefix.size(); ++i) os << (i ? "," : "") << prefix[i];
    os << ")";
    return os.str();
}

bool rates_distinct(const std::vector<double>& g, int k) {
    std::vector<double> s(g.begin(), g.begin() + k);
    std::sort(s.begin(), s.end());
    for (int i = 0; i + 1 < k; ++i)
        if (close_rel(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(i + 1)], 1e-9))
            return false;
    return true;
}

// Phase probabilities of the pure-birth chain with per-phase exit rates
// `rates`, starting from distribution p, after time t (uniformization).
// The absorbing state is implicit: mass that leaves the last phase is
// dropped, so sum(p) is the survival probability of the stage sum.
std::vector<double> propagate_phases(std::vector<double> p, const std::vector<double>& rates,
                                     double t) {
    const int k = static_cast<int>(rates.size());
    const double lam = *std::max_element(rates.begin(), rates.end());
    const double m = lam * t;
    if (m > 500.0) {
        // Semigroup split keeps the Poisson weights representable.
        p = propagate_phases(std::move(p), rates, t / 2.0);
        return propagate_phases(std::move(p), rates, t / 2.0);
    }
    const int trunc = static_cast<int>(m + 12.0 * std::sqrt(m + 1.0) + 30.0);
    std::vector<double> acc(static_cast<std::size_t>(k), 0.0);
    std::vector<double> v = std::move(p);
    double w = std::exp(-m);
    for (int n = 0;; ++n) {
        for (int i = 0; i < k; ++i) acc[static_cast<std::size_t>(i)] += w * v[static_cast<std::size_t>(i)];
        if (n >= trunc) break;
        double carry = 0.0;
        for (int i = 0; i < k; ++i) {
            const double q = rates[static_cast<std::size_t>(i)] / lam;
            const double nv = v[static_cast<std::size_t>(i)] * (1.0 - q) + carry;
            carry = v[static_cast<std::size_t>(i)] * q;
            v[static_cast<std::size_t>(i)] = nv;
        }
        w *= m / (n + 1);
    }
    return acc;
}

void check_hyperexp_args(const HyperexpParams& p, int k, double t) {
    if (k < 1 || k > static_cast<int>(p.gamma.size()))
        throw DomainError("hyperexp: stage count k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(p.gamma.size()) + "]");
    if (t < 0.0) throw DomainError("hyperexp: t must be >= 0");
    for (int i = 0; i < k; ++i)
        if (!(p.gamma[static_cast<std::size_t>(i)] > 0.0))
            throw DomainError("hyperexp: rate " + std::to_string(i + 1) + " must be positive");
}

} // namespace

double hyperexp_survival(const HyperexpParams& p, int k, double t) {
    check_hyperexp_args(p, k, t);
    if (t == 0.0) return 1.0;
    if (rates_distinct(p.gamma, k)) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) {
            double theta = 1.0;
            for (int h = 0; h < k; ++h) {
                if (h == j) continue;
                theta *= p.gamma[static_cast<std::size_t>(h)] /
                         (p.gamma[static_cast<std::size_t>(h)] - p.gamma[static_cast<std::size_t>(j)]);
            }
            s += theta * std::exp(-p.gamma[static_cast<std::size_t>(j)] * t);
        }
        return std::clamp(s, 0.0, 1.0);
    }
    std::vector<double> rates(p.gamma.begin(), p.gamma.begin() + k);
    std::vector<double> p0(static_cast<std::size_t>(k), 0.0);
    p0[0] = 1.0;
    const auto ph = propagate_phases(std::move(p0), rates, t);
    double s = 0.0;
    for (double v : ph) s += v;
    return std::clamp(s, 0.0, 1.0);
}

double hyperexp_density(const HyperexpParams& p, int k, double t) {
    check_hyperexp_args(p, k, t);
    if (rates_distinct(p.gamma, k)) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) {
            double theta = 1.0;
            for (int h = 0; h < k; ++h) {
                if (h == j) continue;
                theta *= p.gamma[static_cast<std::size_t>(h)] /
                         (p.gamma[static_cast<std::size_t>(h)] - p.gamma[static_cast<std::size_t>(j)]);
            }
            s += theta * p.gamma[static_cast<std::size_t>(j)] *
                 std::exp(-p.gamma[static_cast<std::size_t>(j)] * t);
        }
        return std::max(s, 0.0);
    }
    std::vector<double> rates(p.gamma.begin(), p.gamma.begin() + k);
    std::vector<double> p0(static_cast<std::size_t>(k), 0.0);
    p0[0] = 1.0;
    const auto ph = propagate_phases(std::move(p0), rates, t);
    return std::max(rates.back() * ph.back(), 0.0);
}

// ---------------------------------------------------------------------------
// OdThlsSpec

namespace {
// Explicit tables keep every ordered prefix; sum_k (r)_k grows too fast
// beyond this.
constexpr int kMaxTableR = 8;

void enumerate_prefixes(int r, int k, std::vector<int>& current,
                        std::vector<std::vector<int>>& out) {
    if (static_cast<int>(current.size()) == k) {
        out.push_back(current);
        return;
    }
    for (int j = 1; j <= r; ++j) {
        if (std::find(current.begin(), current.end(), j) != current.end()) continue;
        current.push_back(j);
        enumerate_prefixes(r, k, current, out);
        current.pop_back();
    }
}

std::vector<std::vector<int>> all_prefixes_of_length(int r, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    enumerate_prefixes(r, k, cur, out);
    return out;
}
} // namespace

OdThlsSpec::OdThlsSpec(int r, RateTable rates) : r_(r), rates_(std::move(rates)) {
    check_dimension(r_);
    if (r_ > kMaxTableR)
        throw DomainError("OdThlsSpec: explicit rate tables supported up to r=" +
                          std::to_string(kMaxTableR) + ", got r=" + std::to_string(r_));
    std::size_t expected = 0;
    for (int k = 0; k < r_; ++k) {
        for (const auto& prefix : all_prefixes_of_length(r_, k)) {
            ++expected;
            auto it = rates_.find(prefix);
            if (it == rates_.end())
                throw ContractError("OdThlsSpec: missing rates for prefix " + prefix_str(prefix));
            const auto& succ = it->second;
            if (succ.size() != static_cast<std::size_t>(r_ - k))
                throw ContractError("OdThlsSpec: prefix " + prefix_str(prefix) + " must list " +
                                    std::to_string(r_ - k) + " successor rates, has " +
                                    std::to_string(succ.size()));
            for (const auto& [j, lam] : succ) {
                if (j < 1 || j > r_ ||
                    std::find(prefix.begin(), prefix.end(), j) != prefix.end())
                    throw ContractError("OdThlsSpec: invalid successor " + std::to_string(j) +
                                        " for prefix " + prefix_str(prefix));
                if (!(lam > 0.0) || !std::isfinite(lam))
                    throw ContractError("OdThlsSpec: rate for unit " + std::to_string(j) +
                                        " after " + prefix_str(prefix) + " must be positive, got " +
                                        std::to_string(lam));
            }
        }
    }
    if (rates_.size() != expected)
        throw ContractError("OdThlsSpec: table has " + std::to_string(rates_.size()) +
                            " prefixes, expected " + std::to_string(expected));
}

double OdThlsSpec::rate(const std::vector<int>& prefix, int j) const {
    auto it = rates_.find(prefix);
    if (it == rates_.end())
        throw DomainError("OdThlsSpec::rate: unknown prefix " + prefix_str(prefix));
    auto jt = it->second.find(j);
    if (jt == it->second.end())
        throw DomainError("OdThlsSpec::rate: unit " + std::to_string(j) +
                          " not a successor of prefix " + prefix_str(prefix));
    return jt->second;
}

double OdThlsSpec::total_rate(const std::vector<int>& prefix) const {
    auto it = rates_.find(prefix);
    if (it == rates_.end())
        throw DomainError("OdThlsSpec::total_rate: unknown prefix " + prefix_str(prefix));
    double s = 0.0;
    for (const auto& [j, lam] : it->second) s += lam;
    return s;
}

bool OdThlsSpec::order_independent(double rel_tol) const {
    std::map<std::pair<std::vector<int>, int>, double> canon;
    for (const auto& [prefix, succ] : rates_) {
        std::vector<int> key = prefix;
        std::sort(key.begin(), key.end());
        for (const auto& [j, lam] : succ) {
            auto [it, inserted] = canon.try_emplace({key, j}, lam);
            if (!inserted && !close_rel(it->second, lam, rel_tol)) return false;
        }
    }
    return true;
}

bool OdThlsSpec::exchangeable_rates(double rel_tol) const {
    std::map<std::size_t, double> by_len;
    for (const auto& [prefix, succ] : rates_) {
        for (const auto& [j, lam] : succ) {
            auto [it, inserted] = by_len.try_emplace(prefix.size(), lam);
            if (!inserted && !close_rel(it->second, lam, rel_tol)) return false;
        }
    }
    return true;
}

std::vector<double> OdThlsSpec::lambda_vector(const std::vector<int>& j) const {
    const int d = static_cast<int>(j.size());
    if (d > r_) throw DomainError("OdThlsSpec::lambda_vector: tuple longer than r");
    std::set<int> seen;
    for (int idx : j) {
        if (idx < 1 || idx > r_ || !seen.insert(idx).second)
            throw DomainError("OdThlsSpec::lambda_vector: indices must be distinct and in [1, r]");
    }
    std::vector<double> vec;
    std::vector<int> prefix;
    for (int l = 0; l <= std::min(d, r_ - 1); ++l) {
        vec.push_back(total_rate(prefix));
        if (l < d) prefix.push_back(j[static_cast<std::size_t>(l)]);
    }
    return vec;
}

double OdThlsSpec::order_probability(const std::vector<int>& j) const {
    if (static_cast<int>(j.size()) != r_)
        throw DomainError("OdThlsSpec::order_probability: need a full permutation");
    double p = 1.0;
    std::vector<int> prefix;
    for (int idx : j) {
        p *= rate(prefix, idx) / total_rate(prefix);
        prefix.push_back(idx);
    }
    return p;
}

double thls_psi(const OdThlsSpec& spec, const std::vector<int>& j, double t) {
    if (t < 0.0) throw DomainError("thls_psi: t must be >= 0");
    const int d = static_cast<int>(j.size());
    double pre = 1.0;
    std::vector<int> prefix;
    for (int idx : j) {
        pre *= spec.rate(prefix, idx) / spec.total_rate(prefix);
        prefix.push_back(idx);
    }
    const HyperexpParams hp{spec.lambda_vector(j)};
    if (d == spec.r())
        return pre * (1.0 - hyperexp_survival(hp, d, t));
    const double s_hi = hyperexp_survival(hp, d + 1, t);
    const double s_lo = (d == 0) ? 0.0 : hyperexp_survival(hp, d, t);
    return pre * (s_hi - s_lo);
}

// ---------------------------------------------------------------------------
// Partition by total-rate vectors

ThlsPartition lambda_partition(const OdThlsSpec& spec) {
    ThlsPartition part;
    std::vector<int> units(static_cast<std::size_t>(spec.r()));
    std::iota(units.begin(), units.end(), 1);
    for (const auto& perm : permutations_of(units)) {
        auto vec = spec.lambda_vector(perm);
        const double prob = spec.order_probability(perm);
        ThlsClass* home = nullptr;
        for (auto& cls : part.classes) {
            bool same = true;
            for (std::size_t i = 0; i < vec.size(); ++i)
                if (!close_rel(cls.L[i], vec[i], 1e-12)) { same = false; break; }
            if (same) { home = &cls; break; }
        }
        if (!home) {
            part.classes.push_back(ThlsClass{vec, {}, 0.0});
            home = &part.classes.back();
        }
        home->perms.push_back(perm);
        home->order_probability += prob;
    }
    std::sort(part.classes.begin(), part.classes.end(),
              [](const ThlsClass& a, const ThlsClass& b) { return a.L < b.L; });
    return part;
}

// ---------------------------------------------------------------------------
// ExThlsModel

ExThlsModel::ExThlsModel(std::vector<double> L) : L_(std::move(L)) {
    r_ = static_cast<int>(L_.size());
    check_dimension(r_);
    for (std::size_t i = 0; i < L_.size(); ++i)
        if (!(L_[i] > 0.0) || !std::isfinite(L_[i]))
            throw DomainError("ExThlsModel: stage total L(" + std::to_string(r_ - static_cast<int>(i)) +
                              ") must be positive");
    stages_.gamma = L_;
}

double ExThlsModel::stage_total(int failed) const {
    if (failed < 0 || failed >= r_)
        throw DomainError("ExThlsModel::stage_total: failed count outside [0, r-1]");
    return L_[static_cast<std::size_t>(failed)];
}

double ExThlsModel::mu(int failed) const { return stage_total(failed) / (r_ - failed); }

double ExThlsModel::orderstat_survival(int k, double t) const {
    return hyperexp_survival(stages_, k, t);
}

double ExThlsModel::orderstat_density(int k, double t) const {
    return hyperexp_density(stages_, k, t);
}

double ExThlsModel::orderstat_mean(int k) const {
    if (k < 1 || k > r_) throw DomainError("ExThlsModel::orderstat_mean: k outside [1, r]");
    double m = 0.0;
    for (int j = 0; j < k; ++j) m += 1.0 / L_[static_cast<std::size_t>(j)];
    return m;
}

double ExThlsModel::marginal(double t) const {
    double s = 0.0;
    for (int k = 1; k <= r_; ++k) s += orderstat_survival(k, t);
    return s / r_;
}

double ExThlsModel::marginal_density(double t) const {
    double s = 0.0;
    for (int k = 1; k <= r_; ++k) s += orderstat_density(k, t);
    return s / r_;
}

double ExThlsModel::min_survival(int d, double t) const {
    if (d < 1 || d > r_) throw DomainError("ExThlsModel::min_survival: d outside [1, r]");
    double s = 0.0;
    for (int k = 1; k <= r_ - d + 1; ++k)
        s += static_cast<double>(falling_factorial(r_ - k, d - 1)) * orderstat_survival(k, t);
    return clamp_probability(s * d / static_cast<double>(falling_factorial(r_, d)),
                             "ExThlsModel::min_survival");
}

double ExThlsModel::mu_profile(int d, double t) const {
    if (d < 1 || d > r_) throw DomainError("ExThlsModel::mu_profile: d outside [1, r]");
    double num = 0.0, den = 0.0;
    for (int k = 1; k <= r_ - d + 1; ++k) {
        const double w = static_cast<double>(falling_factorial(r_ - k, d - 1));
        num += w * orderstat_density(k, t);
        den += w * orderstat_survival(k, t);
    }
    if (!(den > 0.0))
        throw ContractError("ExThlsModel::mu_profile: no surviving mass at t=" + std::to_string(t));
    return num / den / d;
}

OrderStatFamily ExThlsModel::orderstat_family() const {
    std::vector<RealFn> gbars, dens;
    for (int k = 1; k <= r_; ++k) {
        gbars.push_back([m = *this, k](double t) { return m.orderstat_survival(k, t); });
        dens.push_back([m = *this, k](double t) { return m.orderstat_density(k, t); });
    }
    return OrderStatFamily(r_, std::move(gbars), std::move(dens));
}

MarginalSurvival ExThlsModel::marginal_family() const {
    return MarginalSurvival([m = *this](double t) { return m.marginal(t); },
                            [m = *this](double t) { return m.marginal_density(t); });
}

DiagonalFamily ExThlsModel::diagonal_family() const {
    auto marg = std::make_shared<MarginalSurvival>(marginal_family());
    std::vector<RealFn> deltas;
    for (int d = 2; d <= r_; ++d) {
        deltas.push_back([m = *this, marg, d](double u) {
            if (u <= 0.0) return 0.0;
            if (u >= 1.0) return 1.0;
            return m.min_survival(d, marg->invert(u));
        });
    }
    return DiagonalFamily(r_, std::move(deltas));
}

RateProfile ExThlsModel::rate_profile() const {
    std::vector<RealFn> lams;
    for (int d = 1; d <= r_; ++d)
        lams.push_back([m = *this, d](double t) { return d * m.mu_profile(d, t); });
    const double t_end = find_tail_time([this](double t) { return orderstat_survival(r_, t); });
    return RateProfile(r_, std::move(lams), make_uniform_grid(0.0, t_end, kDefaultGridN),
                       /*exchangeable_form=*/true);
}

OdThlsSpec ExThlsModel::as_odthls() const {
    if (r_ > kMaxTableR)
        throw DomainError("ExThlsModel::as_odthls: explicit tables supported up to r=" +
                          std::to_string(kMaxTableR));
    OdThlsSpec::RateTable table;
    for (int k = 0; k < r_; ++k) {
        const double lam = L_[static_cast<std::size_t>(k)] / (r_ - k);
        for (const auto& prefix : all_prefixes_of_length(r_, k)) {
            auto& succ = table[prefix];
            for (int j = 1; j <= r_; ++j)
                if (std::find(prefix.begin(), prefix.end(), j) == prefix.end()) succ[j] = lam;
        }
    }
    return OdThlsSpec(r_, std::move(table));
}

// ---------------------------------------------------------------------------
// Minimal-stability checks

NecessaryReport necessary_min_stable(const OdThlsSpec& spec) {
    NecessaryReport rep;
    const std::vector<int> empty;
    const int r = spec.r();
    const double lam1 = spec.rate(empty, 1);
    for (int j = 2; j <= r; ++j) {
        const double lamj = spec.rate(empty, j);
        if (!close_rel(lam1, lamj, 1e-10)) {
            rep.witness = "initial rates differ: lambda(1|-) = " + std::to_string(lam1) +
                          " but lambda(" + std::to_string(j) + "|-) = " + std::to_string(lamj);
            return rep;
        }
    }
    rep.initial_total = spec.total_rate(empty);
    const double tot1 = spec.total_rate({1});
    for (int i = 2; i <= r; ++i) {
        const double toti = spec.total_rate({i});
        if (!close_rel(tot1, toti, 1e-10)) {
            rep.witness = "post-first-failure totals differ: Lambda(1) = " + std::to_string(tot1) +
                          " but Lambda(" + std::to_string(i) + ") = " + std::to_string(toti);
            return rep;
        }
    }
    rep.after_one = tot1;
    rep.pass = true;
    return rep;
}

R3Report check_min_stable_r3(const OdThlsSpec& spec) {
    if (spec.r() != 3) throw DomainError("check_min_stable_r3: spec must have r = 3");
    R3Report rep;
    constexpr double tol = 1e-12;

    // Equal initial rates.
    const std::vector<int> empty;
    const double a1 = spec.rate(empty, 1), a2 = spec.rate(empty, 2), a3 = spec.rate(empty, 3);
    if (!close_rel(a1, a2, tol) || !close_rel(a1, a3, tol)) {
        rep.detail = "initial rates unequal (" + std::to_string(a1) + ", " + std::to_string(a2) +
                     ", " + std::to_string(a3) + ")";
        return rep;
    }
    rep.L3 = a1 + a2 + a3;

    // Equal totals after one failure.
    const double t1 = spec.total_rate({1}), t2 = spec.total_rate({2}), t3 = spec.total_rate({3});
    if (!close_rel(t1, t2, tol) || !close_rel(t1, t3, tol)) {
        rep.detail = "post-first-failure totals unequal (" + std::to_string(t1) + ", " +
                     std::to_string(t2) + ", " + std::to_string(t3) + ")";
        return rep;
    }
    rep.L2 = (t1 + t2 + t3) / 3.0;

    // Third-stage rates, keyed by the ordered pair that failed.
    std::map<std::pair<int, int>, double> third, pairrate;
    for (int a = 1; a <= 3; ++a) {
        for (int b = 1; b <= 3; ++b) {
            if (a == b) continue;
            pairrate[{a, b}] = spec.rate({a}, b);
            third[{a, b}] = spec.rate({a, b}, 6 - a - b);
        }
    }
    std::vector<double> reps;  // distinct third-stage values
    for (const auto& [k, v] : third) {
        bool found = false;
        for (double rce : reps)
            if (close_rel(rce, v, tol)) { found = true; break; }
        if (!found) reps.push_back(v);
    }
    std::sort(reps.begin(), reps.end());

    const std::vector<std::pair<int, int>> pairs = {{1, 2}, {1, 3}, {2, 3}};

    if (reps.size() == 1) {
        rep.L1 = reps[0];
        // Pair multisets must share a common {gamma1, gamma2} with sum L(2).
        double lo0 = 0, hi0 = 0;
        for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
            const auto [a, b] = pairs[pi];
            const double lo = std::min(pairrate[{a, b}], pairrate[{b, a}]);
            const double hi = std::max(pairrate[{a, b}], pairrate[{b, a}]);
            if (pi == 0) { lo0 = lo; hi0 = hi; }
            else if (!close_rel(lo, lo0, tol) || !close_rel(hi, hi0, tol)) {
                rep.detail = "pair-rate multisets differ: pair {1,2} has {" + std::to_string(lo0) +
                             ", " + std::to_string(hi0) + "} but pair {" + std::to_string(a) + "," +
                             std::to_string(b) + "} has {" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "}";
                return rep;
            }
        }
        if (!close_rel(lo0 + hi0, rep.L2, tol)) {
            rep.detail = "pair rates sum to " + std::to_string(lo0 + hi0) +
                         ", expected L(2) = " + std::to_string(rep.L2);
            return rep;
        }
        rep.gamma1 = lo0;
        rep.gamma2 = hi0;
        rep.verdict = R3Verdict::ExchangeableA3;
        rep.detail = "single third-stage rate with common pair multiset";
        return rep;
    }

    if (reps.size() == 2) {
        rep.L1_lo = reps[0];
        rep.L1_hi = reps[1];
        // Every pair must see one low and one high third-stage rate, and the
        // pair rate coupled to each third-stage value must be common.
        double g_lo = 0, g_hi = 0;
        for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
            const auto [a, b] = pairs[pi];
            const bool ab_low = close_rel(third[{a, b}], reps[0], tol);
            const bool ba_low = close_rel(third[{b, a}], reps[0], tol);
            if (ab_low == ba_low) {
                rep.detail = "pair {" + std::to_string(a) + "," + std::to_string(b) +
                             "} sees the same third-stage rate in both orders; the two values must "
                             "alternate within every pair";
                return rep;
            }
            const double x_lo = ab_low ? pairrate[{a, b}] : pairrate[{b, a}];
            const double x_hi = ab_low ? pairrate[{b, a}] : pairrate[{a, b}];
            if (pi == 0) { g_lo = x_lo; g_hi = x_hi; }
            else if (!close_rel(x_lo, g_lo, tol) || !close_rel(x_hi, g_hi, tol)) {
                rep.detail = "third-stage coupling inconsistent across pairs: pair {" +
                             std::to_string(a) + "," + std::to_string(b) + "} couples " +
                             std::to_string(x_lo) + " to the lower third-stage rate, expected " +
                             std::to_string(g_lo);
                return rep;
            }
        }
        if (!close_rel(g_lo + g_hi, rep.L2, tol)) {
            rep.detail = "coupled pair rates sum to " + std::to_string(g_lo + g_hi) +
                         ", expected L(2) = " + std::to_string(rep.L2);
            return rep;
        }
        rep.gamma1 = g_lo;  // coupled to L1_lo
        rep.gamma2 = g_hi;  // coupled to L1_hi
        rep.verdict = R3Verdict::StrictOrderA3Prime;
        rep.detail = "two third-stage rates, consistently coupled to the pair rates";
        return rep;
    }

    rep.detail = "third-stage rates take " + std::to_string(reps.size()) +
                 " distinct values; at most two are compatible with minimal stability";
    return rep;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

double standard_normal(Rng& rng) {
    const double u1 = rng.uniform01_open_left();
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Uniform draw from the unit ball in `dim` dimensions.
Eigen::VectorXd ball_point(Rng& rng, int dim) {
    Eigen::VectorXd z(dim);
    for (int i = 0; i < dim; ++i) z(i) = standard_normal(rng);
    const double norm = z.norm();
    if (norm == 0.0) return Eigen::VectorXd::Zero(dim);
    const double radius = std::pow(rng.uniform01(), 1.0 / dim);
    return z * (radius / norm);
}

} // namespace

GeneratedModel generate_singleton_min_stable(const std::vector<double>& L, std::uint64_t seed,
                                             bool uniform_frailty) {
    const int r = static_cast<int>(L.size());
    if (r < kMinR || r > 6)
        throw DomainError("generate_singleton_min_stable: r must be in [2, 6], got " +
                          std::to_string(r));
    for (int k = 0; k < r; ++k)
        if (!(L[static_cast<std::size_t>(k)] > 0.0))
            throw DomainError("generate_singleton_min_stable: all stage totals must be positive");

    GeneratedModel out;
    Rng rng(seed);
    OdThlsSpec::RateTable table;
    for (int j = 1; j <= r; ++j) table[{}][j] = L[0] / r;

    if (uniform_frailty) {
        if (r != 3) {
            for (int k = 1; k < r; ++k)
                for (const auto& prefix : all_prefixes_of_length(r, k)) {
                    auto& succ = table[prefix];
                    for (int j = 1; j <= r; ++j)
                        if (std::find(prefix.begin(), prefix.end(), j) == prefix.end())
                            succ[j] = L[static_cast<std::size_t>(k)] / (r - k);
                }
            out.degenerate_to_exchangeable = true;
            out.notes.push_back("uniform frailty leaves no freedom except at the r=3 third stage; "
                                "returning the exchangeable model");
            out.spec = OdThlsSpec(r, std::move(table));
            return out;
        }
        // r = 3: second stage pinned to L(2)/2; third stage takes two values,
        // one per order within each pair.
        for (const auto& prefix : all_prefixes_of_length(3, 1)) {
            auto& succ = table[prefix];
            for (int j = 1; j <= 3; ++j)
                if (j != prefix[0]) succ[j] = L[1] / 2.0;
        }
        const double spread = 0.1 + 0.5 * rng.uniform01();
        const double lo = L[2] * (1.0 - spread), hi = L[2] * (1.0 + spread);
        for (const auto& [a, b] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 3}}) {
            const bool flip = rng.uniform01() < 0.5;
            table[{a, b}][6 - a - b] = flip ? hi : lo;
            table[{b, a}][6 - a - b] = flip ? lo : hi;
        }
        out.notes.push_back("uniform frailty with a strictly order-dependent third stage: values " +
                            std::to_string(lo) + " / " + std::to_string(hi));
        out.spec = OdThlsSpec(3, std::move(table));
        const auto verdict = check_min_stable_r3(*out.spec);
        if (verdict.verdict != R3Verdict::StrictOrderA3Prime)
            throw ContractError("generate_singleton_min_stable: uniform-frailty construction failed "
                                "its own coupling check: " + verdict.detail);
        return out;
    }

    for (int k = 1; k < r; ++k) {
        const auto prefixes = all_prefixes_of_length(r, k);
        const double x0 = L[static_cast<std::size_t>(k)] / (r - k);
        if (k == r - 1) {
            // Single successor per prefix: the row-sum constraint pins it.
            for (const auto& prefix : prefixes) {
                for (int j = 1; j <= r; ++j)
                    if (std::find(prefix.begin(), prefix.end(), j) == prefix.end())
                        table[prefix][j] = L[static_cast<std::size_t>(k)];
            }
            continue;
        }

        // Unknowns: one rate per (prefix, successor).
        std::map<std::pair<std::size_t, int>, int> col_of;
        int ncols = 0;
        for (std::size_t pi = 0; pi < prefixes.size(); ++pi)
            for (int j = 1; j <= r; ++j)
                if (std::find(prefixes[pi].begin(), prefixes[pi].end(), j) == prefixes[pi].end())
                    col_of[{pi, j}] = ncols++;

        const auto subsets = subsets_of_size(r, k + 1);
        const int nrows = static_cast<int>(prefixes.size() + subsets.size());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nrows, ncols);
        Eigen::VectorXd b(nrows);

        int row = 0;
        for (std::size_t pi = 0; pi < prefixes.size(); ++pi, ++row) {
            for (int j = 1; j <= r; ++j)
                if (std::find(prefixes[pi].begin(), prefixes[pi].end(), j) == prefixes[pi].end())
                    A(row, col_of[{pi, j}]) = 1.0;
            b(row) = L[static_cast<std::size_t>(k)];
        }
        // Product constraints: for each (k+1)-subset I (0-based in `subsets`,
        // units are 1-based), sum over orderings of I of
        //   [product of already-fixed rates along the first k failures] * x.
        double rhs = 1.0;
        for (int l = 0; l <= k; ++l) rhs *= L[static_cast<std::size_t>(l)];
        rhs /= static_cast<double>(binomial(r, k + 1));
        std::map<std::vector<int>, std::size_t> prefix_index;
        for (std::size_t pi = 0; pi < prefixes.size(); ++pi) prefix_index[prefixes[pi]] = pi;
        for (const auto& sub0 : subsets) {
            std::vector<int> units(sub0.size());
            for (std::size_t i = 0; i < sub0.size(); ++i) units[i] = sub0[i] + 1;
            for (const auto& perm : permutations_of(units)) {
                std::vector<int> prefix(perm.begin(), perm.end() - 1);
                double w = 1.0;
                std::vector<int> partial;
                for (int idx : prefix) {
                    w *= table[partial][idx];
                    partial.push_back(idx);
                }
                A(row, col_of[{prefix_index[prefix], perm.back()}]) += w;
            }
            b(row) = rhs;
            ++row;
        }

        Eigen::VectorXd x = Eigen::VectorXd::Constant(ncols, x0);
        const double residual0 = (A * x - b).norm();
        if (residual0 > 1e-9 * b.norm())
            throw ContractError("generate_singleton_min_stable: exchangeable rates violate the "
                                "stage constraints (residual " + std::to_string(residual0) + ")");

        Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double sv_tol = std::max(nrows, ncols) * 1e-14 * sv(0);
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > sv_tol) ++rank;
        const int nullity = ncols - rank;

        if (nullity > 0) {
            const Eigen::MatrixXd kernel = svd.matrixV().rightCols(nullity);
            double radius = 0.8 * x0;
            bool accepted = false;
            for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
                const Eigen::VectorXd cand = x + radius * (kernel * ball_point(rng, nullity));
                if (cand.minCoeff() > 1e-6 * x0) {
                    x = cand;
                    accepted = true;
                }
                radius *= 0.7;
            }
            if (!accepted) {
                out.degenerate_to_exchangeable = true;
                out.notes.push_back("null-space draw at stage " + std::to_string(k) +
                                    " could not keep rates positive; using exchangeable rates");
            }
        }

        for (const auto& [key, col] : col_of)
            table[prefixes[key.first]][key.second] = x(col);
    }

    out.spec = OdThlsSpec(r, std::move(table));
    const auto nec = necessary_min_stable(*out.spec);
    if (!nec.pass)
        throw ContractError("generate_singleton_min_stable: generated spec fails the necessary "
                            "conditions: " + nec.witness);
    return out;
}

std::vector<double> conditional_orderstat_law(const OdThlsSpec& spec,
                                              const std::vector<int>& ordering) {
    if (static_cast<int>(ordering.size()) != spec.r())
        throw DomainError("conditional_orderstat_law: ordering must be a full permutation");
    return spec.lambda_vector(ordering);
}

OrderStatFamily mixture_orderstats(const OdThlsSpec& spec, bool require_min_stable) {
    const auto nec = necessary_min_stable(spec);
    if (!nec.pass && require_min_stable)
        throw ContractError("mixture_orderstats: spec fails necessary minimal-stability "
                            "conditions (" + nec.witness + "); pass require_min_stable=false to "
                            "build the mixture anyway");
    const auto part = lambda_partition(spec);
    const int r = spec.r();
    std::vector<RealFn> gbars, dens;
    for (int k = 1; k <= r; ++k) {
        gbars.push_back([part, k](double t) {
            double s = 0.0;
            for (const auto& cls : part.classes)
                s += cls.order_probability * hyperexp_survival(HyperexpParams{cls.L}, k, t);
            return s;
        });
        dens.push_back([part, k](double t) {
            double s = 0.0;
            for (const auto& cls : part.classes)
                s += cls.order_probability * hyperexp_density(HyperexpParams{cls.L}, k, t);
            return s;
        });
    }
    OrderStatFamily fam(r, std::move(gbars), std::move(dens));
    if (!nec.pass)
        fam.add_note("minimal-stability requirement overridden: " + nec.witness);
    return fam;
}

} // namespace lifeline
