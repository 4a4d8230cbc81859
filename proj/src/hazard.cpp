#include "lifeline/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "lifeline/combinatorics.hpp"
#include "lifeline/numerics.hpp"
#include "lifeline/rng.hpp"
#include "lifeline/sobol.hpp"
#include "lifeline/threads.hpp"

namespace lifeline {

namespace {

std::string history_str(const History& history) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (i) os << ", ";
        os << "(" << history[i].unit << ", t=" << history[i].time << ")";
    }
    os << "]";
    return os.str();
}

double total_rate_unchecked(const HazardModel& m, const History& history, double t) {
    double s = 0.0;
    for (int j = 1; j <= m.r(); ++j) {
        bool failed = false;
        for (const auto& ev : history)
            if (ev.unit == j) { failed = true; break; }
        if (!failed) s += m.rate_unchecked(j, history, t);
    }
    return s;
}

} // namespace

struct HazardModel::LevelCaches {
    std::vector<std::unique_ptr<IntegralCache>> cum;  // index = failures so far
};

HazardModel::HazardModel(int r, RateFn rate, HazardFlags flags, ClosedPsiFn closed_psi,
                         double time_scale)
    : r_(r), rate_(std::move(rate)), flags_(flags), closed_psi_(std::move(closed_psi)),
      time_scale_(time_scale) {
    check_dimension(r_);
    if (!rate_) throw ContractError("HazardModel: rate callable must be set");
    if (!(time_scale_ > 0.0)) throw ContractError("HazardModel: time scale must be positive");
    if (flags_.count_only_history) {
        caches_ = std::make_shared<LevelCaches>();
        for (int k = 0; k < r_; ++k) {
            // Count-only rates ignore the history payload, so a placeholder
            // history of the right size is enough to pin the level.
            History dummy;
            for (int i = 1; i <= k; ++i) dummy.push_back({i, 0.0});
            caches_->cum.push_back(std::make_unique<IntegralCache>(
                [rate = rate_, dummy, r = r_, k](double u) {
                    double s = 0.0;
                    for (int j = k + 1; j <= r; ++j) s += rate(j, dummy, u);
                    return s;
                },
                0.0, 1e-11));
        }
    }
}

double HazardModel::level_cumulative(int k, double t) const {
    if (k >= r_) return 0.0;
    if (!caches_)
        throw ContractError("HazardModel::level_cumulative: only available for count-only models");
    return (*caches_->cum[static_cast<std::size_t>(k)])(t);
}

void validate_history(const HazardModel& model, const History& history, double t) {
    if (static_cast<int>(history.size()) > model.r())
        throw DomainError("hazard history longer than the number of units");
    double prev = -1.0;
    std::vector<bool> seen(static_cast<std::size_t>(model.r()) + 1, false);
    for (const auto& ev : history) {
        if (ev.unit < 1 || ev.unit > model.r())
            throw DomainError("hazard history unit " + std::to_string(ev.unit) +
                              " outside [1, r]");
        if (seen[static_cast<std::size_t>(ev.unit)])
            throw DomainError("hazard history repeats unit " + std::to_string(ev.unit));
        seen[static_cast<std::size_t>(ev.unit)] = true;
        if (!(ev.time > prev))
            throw DomainError("hazard history times must be strictly increasing");
        prev = ev.time;
    }
    if (t < prev) throw DomainError("hazard evaluation time precedes the last failure");
}

double HazardModel::rate(int j, const History& history, double t) const {
    validate_history(*this, history, t);
    if (j < 1 || j > r_) throw DomainError("hazard rate: unit outside [1, r]");
    for (const auto& ev : history)
        if (ev.unit == j)
            throw DomainError("hazard rate: unit " + std::to_string(j) + " already failed");
    const double v = rate_(j, history, t);
    if (!(v >= 0.0) || !std::isfinite(v))
        throw ContractError("hazard rate: callable returned " + std::to_string(v) +
                            " for unit " + std::to_string(j) + " with history " +
                            history_str(history));
    return v;
}

double total_rate(const HazardModel& model, const History& history, double t) {
    validate_history(model, history, t);
    return total_rate_unchecked(model, history, t);
}

static double joint_density_impl(const HazardModel& model, const std::vector<double>& x);

double joint_density(const HazardModel& model, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != model.r())
        throw DomainError("joint_density: expected " + std::to_string(model.r()) +
                          " coordinates, got " + std::to_string(x.size()));
    for (double v : x)
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError("joint_density: coordinates must be positive reals");
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = i + 1; k < x.size(); ++k)
            if (x[i] == x[k])
                throw ContractError("joint_density: tied coordinates violate the no-ties "
                                    "assumption");
    return joint_density_impl(model, x);
}

// ---------------------------------------------------------------------------
// Integrated total rate over an inter-failure interval.

namespace {

class SegmentIntegrator {
public:
    explicit SegmentIntegrator(const HazardModel& m) : m_(m) {}

    // int_a^b Lambda_{history}(u) du with a at or after the last failure.
    double operator()(const History& history, double a, double b) const {
        if (b <= a) return 0.0;
        if (m_.flags().count_only_history)
            return m_.level_cumulative(static_cast<int>(history.size()), b) -
                   m_.level_cumulative(static_cast<int>(history.size()), a);
        if (m_.flags().time_homogeneous)
            return total_rate_unchecked(m_, history, a) * (b - a);
        return gk_integrate([&](double u) { return total_rate_unchecked(m_, history, u); }, a, b,
                            1e-10, 12);
    }

    const HazardModel& model() const { return m_; }

private:
    const HazardModel& m_;
};

// Integrand of the Psi simplex integral at a full failure path
// (times ascending, times[l] paired with j[l]).
double psi_integrand(const SegmentIntegrator& seg, const std::vector<int>& j,
                     const std::vector<double>& times, double t) {
    const HazardModel& m = seg.model();
    double prod = 1.0, expo = 0.0, prev = 0.0;
    History hist;
    hist.reserve(j.size());
    for (std::size_t l = 0; l < j.size(); ++l) {
        const double x = times[l];
        prod *= m.rate_unchecked(j[l], hist, x);
        expo += seg(hist, prev, x);
        hist.push_back({j[l], x});
        prev = x;
    }
    expo += seg(hist, prev, t);
    return prod * std::exp(-expo);
}

// Nested quadrature, t_1 outermost: each level integrates one failure time
// over [previous failure, t] and reuses the partially accumulated factors.
double psi_first_outer(const SegmentIntegrator& seg, const std::vector<int>& j, double t,
                       std::size_t level, History& hist, double s) {
    const HazardModel& m = seg.model();
    if (level == j.size()) return std::exp(-seg(hist, s, t));
    // For rates that vary with both time and history, memoize the cumulative
    // total rate of this node so the quadrature points share sub-intervals.
    std::optional<IntegralCache> node_cache;
    if (!m.flags().count_only_history && !m.flags().time_homogeneous)
        node_cache.emplace([&m, &hist](double u) { return total_rate_unchecked(m, hist, u); }, s,
                           1e-11);
    const int unit = j[level];
    auto f = [&](double x) {
        const double expo = node_cache ? (*node_cache)(x) : seg(hist, s, x);
        const double lam = m.rate_unchecked(unit, hist, x);
        hist.push_back({unit, x});
        const double inner = psi_first_outer(seg, j, t, level + 1, hist, x);
        hist.pop_back();
        return lam * std::exp(-expo) * inner;
    };
    return gk_integrate(f, s, t, 1e-8, 12);
}

// Nested quadrature in the reverse order, t_d outermost: levels fix the
// coordinates from the last failure down, and the integrand is evaluated on
// complete paths only.
double psi_last_outer(const SegmentIntegrator& seg, const std::vector<int>& j, double t,
                      std::vector<double>& times, int pos, double upper) {
    if (pos < 0) return psi_integrand(seg, j, times, t);
    auto f = [&](double x) {
        times[static_cast<std::size_t>(pos)] = x;
        return psi_last_outer(seg, j, t, times, pos - 1, x);
    };
    return gk_integrate(f, 0.0, upper, 1e-8, 12);
}

PsiResult psi_qmc(const SegmentIntegrator& seg, const std::vector<int>& j, double t,
                  int log2_points) {
    const int d = static_cast<int>(j.size());
    if (log2_points < 6 || log2_points > 24)
        throw DomainError("psi: qmc_log2_points must lie in [6, 24]");
    const std::uint64_t total = 1ull << log2_points;
    constexpr std::uint64_t kBatches = 16;
    const std::uint64_t per_batch = total / kBatches;

    SobolSequence sob(d);
    std::vector<double> point(static_cast<std::size_t>(d));
    std::vector<double> times(static_cast<std::size_t>(d));
    std::vector<double> batch_means;
    for (std::uint64_t b = 0; b < kBatches; ++b) {
        double sum = 0.0;
        for (std::uint64_t i = 0; i < per_batch; ++i) {
            sob.next(point);
            times.assign(point.begin(), point.end());
            std::sort(times.begin(), times.end());
            for (double& x : times) x *= t;
            sum += psi_integrand(seg, j, times, t);
        }
        batch_means.push_back(sum / static_cast<double>(per_batch));
    }
    // Volume of the scaled ordered simplex.
    const double volume = std::pow(t, d) / static_cast<double>(factorial(d));
    double mean = 0.0;
    for (double v : batch_means) mean += v;
    mean /= static_cast<double>(kBatches);
    double var = 0.0;
    for (double v : batch_means) var += (v - mean) * (v - mean);
    var /= static_cast<double>(kBatches - 1);
    PsiResult res;
    res.value = volume * mean;
    // Heuristic spread of consecutive Sobol blocks, not an iid CI.
    res.abs_error = volume * std::sqrt(var / static_cast<double>(kBatches));
    res.method = "qmc";
    return res;
}

void validate_psi_tuple(const HazardModel& model, const std::vector<int>& j) {
    if (static_cast<int>(j.size()) > model.r())
        throw DomainError("psi: tuple longer than the number of units");
    std::vector<bool> seen(static_cast<std::size_t>(model.r()) + 1, false);
    for (int idx : j) {
        if (idx < 1 || idx > model.r())
            throw DomainError("psi: index " + std::to_string(idx) + " outside [1, r]");
        if (seen[static_cast<std::size_t>(idx)])
            throw DomainError("psi: repeated index " + std::to_string(idx));
        seen[static_cast<std::size_t>(idx)] = true;
    }
}

} // namespace

// Density of the full failure-time vector: sort the coordinates, walk the
// induced failure order, and multiply each stage's hazard by the exponential
// of minus the total rate integrated over the inter-failure gap.
static double joint_density_impl(const HazardModel& model, const std::vector<double>& x) {
    const int r = model.r();
    std::vector<int> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), 1);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return x[static_cast<std::size_t>(a - 1)] < x[static_cast<std::size_t>(b - 1)];
    });
    SegmentIntegrator seg(model);
    History hist;
    hist.reserve(static_cast<std::size_t>(r));
    double prod = 1.0, expo = 0.0, prev = 0.0;
    for (int unit : order) {
        const double xt = x[static_cast<std::size_t>(unit - 1)];
        prod *= model.rate_unchecked(unit, hist, xt);
        expo += seg(hist, prev, xt);
        hist.push_back({unit, xt});
        prev = xt;
    }
    return prod * std::exp(-expo);
}

PsiResult psi_detail(const HazardModel& model, const std::vector<int>& j, double t,
                     const PsiOptions& options) {
    validate_psi_tuple(model, j);
    if (t < 0.0) throw DomainError("psi: t must be nonnegative");
    const int d = static_cast<int>(j.size());
    if (t == 0.0) return {d == 0 ? 1.0 : 0.0, 0.0, "exact"};

    if (model.closed_form_psi() && !options.force_generic) {
        const double v = model.closed_form_psi()(j, t);
        return {v, 1e-14 * std::max(1.0, std::abs(v)), "closed-form"};
    }

    SegmentIntegrator seg(model);
    if (d == 0) {
        const double v = std::exp(-seg({}, 0.0, t));
        return {v, 1e-9 * std::max(1.0, v), "nested-quadrature"};
    }
    if (d <= 3) {
        double v;
        if (options.order == PsiOrder::FirstFailureOuter) {
            History hist;
            hist.reserve(j.size());
            v = psi_first_outer(seg, j, t, 0, hist, 0.0);
        } else {
            std::vector<double> times(j.size(), 0.0);
            v = psi_last_outer(seg, j, t, times, d - 1, t);
        }
        return {v, 1e-7 * std::max(1.0, std::abs(v)), "nested-quadrature"};
    }
    return psi_qmc(seg, j, t, options.qmc_log2_points);
}

double psi(const HazardModel& model, const std::vector<int>& j, double t) {
    return psi_detail(model, j, t).value;
}

// ---------------------------------------------------------------------------
// Survivor sets and minima

namespace {

std::vector<int> sorted_valid_subset(const HazardModel& model, std::vector<int> A,
                                     const char* what) {
    std::sort(A.begin(), A.end());
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i] < 1 || A[i] > model.r())
            throw DomainError(std::string(what) + ": unit " + std::to_string(A[i]) +
                              " outside [1, r]");
        if (i && A[i] == A[i - 1])
            throw DomainError(std::string(what) + ": repeated unit " + std::to_string(A[i]));
    }
    return A;
}

std::vector<int> complement_of(int r, const std::vector<int>& A) {
    std::vector<int> comp;
    for (int j = 1; j <= r; ++j)
        if (!std::binary_search(A.begin(), A.end(), j)) comp.push_back(j);
    return comp;
}

// Sum of Psi over a list of orderings, evaluated in parallel and reduced in
// list order so the result never depends on scheduling.
double psi_order_sum(const HazardModel& model, const std::vector<std::vector<int>>& orders,
                     double t) {
    std::vector<double> vals(orders.size(), 0.0);
    run_indexed(static_cast<int>(orders.size()), [&](int i) {
        vals[static_cast<std::size_t>(i)] = psi(model, orders[static_cast<std::size_t>(i)], t);
    });
    double s = 0.0;
    for (double v : vals) s += v;
    return s;
}

} // namespace

double survivor_set_prob(const HazardModel& model, std::vector<int> A, double t) {
    A = sorted_valid_subset(model, std::move(A), "survivor_set_prob");
    if (t < 0.0) throw DomainError("survivor_set_prob: t must be nonnegative");
    const auto comp = complement_of(model.r(), A);
    if (comp.empty()) return psi(model, {}, t);
    return psi_order_sum(model, permutations_of(comp), t);
}

SurvivorSetReport survivor_report(const HazardModel& model, double t) {
    if (model.r() > 8)
        throw DomainError("survivor_report: full enumeration supported up to r = 8");
    SurvivorSetReport rep;
    rep.t = t;
    rep.pmf.assign(static_cast<std::size_t>(model.r()) + 1, 0.0);

    // Flatten all (survivor set, failure order) pairs into one task list.
    std::vector<std::vector<int>> subsets;
    std::vector<std::pair<std::size_t, std::vector<int>>> tasks;  // (subset idx, order)
    for (int m = model.r(); m >= 0; --m) {
        for (const auto& pick : subsets_of_size(model.r(), m)) {
            std::vector<int> A(pick.size());
            for (std::size_t i = 0; i < pick.size(); ++i) A[i] = pick[i] + 1;
            const std::size_t idx = subsets.size();
            subsets.push_back(A);
            const auto comp = complement_of(model.r(), A);
            if (comp.empty()) tasks.emplace_back(idx, std::vector<int>{});
            else
                for (auto& ord : permutations_of(comp)) tasks.emplace_back(idx, std::move(ord));
        }
    }
    std::vector<double> vals(tasks.size(), 0.0);
    run_indexed(static_cast<int>(tasks.size()), [&](int i) {
        const auto& [idx, order] = tasks[static_cast<std::size_t>(i)];
        (void)idx;
        vals[static_cast<std::size_t>(i)] = psi(model, order, t);
    });
    std::vector<double> probs(subsets.size(), 0.0);
    for (std::size_t i = 0; i < tasks.size(); ++i) probs[tasks[i].first] += vals[i];
    for (std::size_t s = 0; s < subsets.size(); ++s) {
        rep.survivor_probs[subsets[s]] = probs[s];
        rep.pmf[subsets[s].size()] += probs[s];
        rep.total_probability += probs[s];
    }
    return rep;
}

double min_survival(const HazardModel& model, std::vector<int> A, double t) {
    A = sorted_valid_subset(model, std::move(A), "min_survival");
    if (A.empty()) throw DomainError("min_survival: subset must be nonempty");
    if (t < 0.0) throw DomainError("min_survival: t must be nonnegative");

    if (static_cast<int>(A.size()) == model.r()) {
        SegmentIntegrator seg(model);
        const double direct = std::exp(-seg({}, 0.0, t));
        const double engine = psi(model, {}, t);
        if (std::abs(direct - engine) > 1e-7 * std::max(1.0, direct))
            throw ContractError("min_survival: direct exponential identity (" +
                                std::to_string(direct) + ") disagrees with the Psi engine (" +
                                std::to_string(engine) + ")");
        return direct;
    }

    // Sum survivor-set probabilities over all supersets of A, flattened to
    // (failed set, failure order) tasks.
    const auto others = complement_of(model.r(), A);
    std::vector<std::vector<int>> orders;
    for (std::size_t mask = 0; mask < (1ull << others.size()); ++mask) {
        std::vector<int> failed;
        for (std::size_t b = 0; b < others.size(); ++b)
            if (mask & (1ull << b)) failed.push_back(others[b]);
        if (failed.empty()) orders.push_back({});
        else
            for (auto& ord : permutations_of(failed)) orders.push_back(std::move(ord));
    }
    return psi_order_sum(model, orders, t);
}

// ---------------------------------------------------------------------------
// Probes

ExchangeableReport check_exchangeable(const HazardModel& model, int probe_budget,
                                      std::uint64_t seed) {
    ExchangeableReport rep;
    if (probe_budget < 1) throw DomainError("check_exchangeable: probe budget must be >= 1");
    Rng rng(seed);
    const int r = model.r();
    const double horizon = 1.5 * model.time_scale();
    std::vector<int> labels(static_cast<std::size_t>(r));

    for (int probe = 0; probe < probe_budget; ++probe) {
        ++rep.probes_run;
        const int k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(r));
        std::iota(labels.begin(), labels.end(), 1);
        for (int i = 0; i < r - 1; ++i) {
            const int pick = i + static_cast<int>(rng.next_u64() %
                                                  static_cast<std::uint64_t>(r - i));
            std::swap(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(pick)]);
        }
        std::vector<double> times(static_cast<std::size_t>(k));
        for (double& x : times) x = horizon * rng.uniform01_open_left();
        std::sort(times.begin(), times.end());
        bool degenerate = false;
        for (std::size_t i = 0; i + 1 < times.size(); ++i)
            if (times[i] == times[i + 1]) degenerate = true;
        if (degenerate) continue;  // measure-zero tie in the probe draw
        History hist;
        for (int i = 0; i < k; ++i)
            hist.push_back({labels[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(i)]});
        const double t = (k ? times.back() : 0.0) + horizon * rng.uniform01_open_left();

        // (i) The rate must not depend on which surviving unit is queried.
        const int j0 = labels[static_cast<std::size_t>(k)];
        const double base = model.rate(j0, hist, t);
        for (int i = k + 1; i < r; ++i) {
            const int j = labels[static_cast<std::size_t>(i)];
            const double v = model.rate(j, hist, t);
            if (!close_abs_or_rel(v, base, 1e-9)) {
                std::ostringstream os;
                os << "rate(j=" << j0 << " | history=" << history_str(hist) << ", t=" << t
                   << ") = " << base << " but rate(j=" << j << " | same history) = " << v;
                rep.pass = false;
                rep.witness = os.str();
                return rep;
            }
        }
        // (ii) Relabeling all units while keeping the failure times fixed
        // must leave the rate unchanged.
        std::vector<int> relabel(static_cast<std::size_t>(r) + 1, 0);
        std::vector<int> perm(static_cast<std::size_t>(r));
        std::iota(perm.begin(), perm.end(), 1);
        for (int i = 0; i < r - 1; ++i) {
            const int pick = i + static_cast<int>(rng.next_u64() %
                                                  static_cast<std::uint64_t>(r - i));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick)]);
        }
        for (int u = 1; u <= r; ++u) relabel[static_cast<std::size_t>(u)] = perm[static_cast<std::size_t>(u - 1)];
        History hist2 = hist;
        for (auto& ev : hist2) ev.unit = relabel[static_cast<std::size_t>(ev.unit)];
        const int j2 = relabel[static_cast<std::size_t>(j0)];
        const double v2 = model.rate(j2, hist2, t);
        if (!close_abs_or_rel(v2, base, 1e-9)) {
            std::ostringstream os;
            os << "rate(j=" << j0 << " | history=" << history_str(hist) << ", t=" << t << ") = "
               << base << " but after relabeling rate(j=" << j2 << " | history="
               << history_str(hist2) << ") = " << v2;
            rep.pass = false;
            rep.witness = os.str();
            return rep;
        }
    }
    return rep;
}

MinStableReport check_minimally_stable(const HazardModel& model,
                                       const std::vector<double>& time_grid, double tol) {
    if (!(tol > 0.0)) throw DomainError("check_minimally_stable: tol must be positive");
    if (time_grid.empty())
        throw DomainError("check_minimally_stable: time grid must be nonempty");
    MinStableReport rep;
    rep.tol = tol;
    const int r = model.r();

    for (double t : time_grid) {
        if (t < 0.0) throw DomainError("check_minimally_stable: grid times must be nonnegative");
        for (int c = 1; c <= r - 1; ++c) {
            // Failed-set mass for every c-subset, evaluated from one flat
            // task list over (subset, ordering).
            const auto picks = subsets_of_size(r, c);
            std::vector<std::vector<int>> failed_sets;
            std::vector<std::pair<std::size_t, std::vector<int>>> tasks;
            for (const auto& pick : picks) {
                std::vector<int> A(pick.size());
                for (std::size_t i = 0; i < pick.size(); ++i) A[i] = pick[i] + 1;
                const std::size_t idx = failed_sets.size();
                failed_sets.push_back(A);
                for (auto& ord : permutations_of(A)) tasks.emplace_back(idx, std::move(ord));
            }
            std::vector<double> vals(tasks.size(), 0.0);
            run_indexed(static_cast<int>(tasks.size()), [&](int i) {
                vals[static_cast<std::size_t>(i)] =
                    psi(model, tasks[static_cast<std::size_t>(i)].second, t);
            });
            std::vector<double> mass(failed_sets.size(), 0.0);
            for (std::size_t i = 0; i < tasks.size(); ++i) mass[tasks[i].first] += vals[i];

            std::size_t lo = 0, hi = 0;
            for (std::size_t s = 1; s < mass.size(); ++s) {
                if (mass[s] < mass[lo]) lo = s;
                if (mass[s] > mass[hi]) hi = s;
            }
            const double gap = mass[hi] - mass[lo];
            if (gap > rep.max_violation) {
                rep.max_violation = gap;
                rep.witness_A = failed_sets[hi];
                rep.witness_B = failed_sets[lo];
                rep.witness_t = t;
            }
        }
    }
    rep.pass = rep.max_violation <= tol;
    std::ostringstream os;
    os << (rep.pass ? "pass" : "fail") << ": max |P(failed = A) - P(failed = B)| = "
       << rep.max_violation << " (tol " << tol << ")";
    if (!rep.witness_A.empty()) {
        os << " at t = " << rep.witness_t << ", A = {";
        for (std::size_t i = 0; i < rep.witness_A.size(); ++i)
            os << (i ? "," : "") << rep.witness_A[i];
        os << "}, B = {";
        for (std::size_t i = 0; i < rep.witness_B.size(); ++i)
            os << (i ? "," : "") << rep.witness_B[i];
        os << "}";
    }
    rep.summary = os.str();
    return rep;
}

// ---------------------------------------------------------------------------
// Factories

HazardModel hazard_from_odthls(const OdThlsSpec& spec) {
    auto sp = std::make_shared<OdThlsSpec>(spec);
    HazardFlags flags;
    flags.time_homogeneous = true;
    flags.order_independent = sp->order_independent();
    flags.exchangeable_form = sp->exchangeable_rates();
    flags.count_only_history = flags.exchangeable_form;
    auto rate = [sp](int j, const History& history, double) {
        std::vector<int> prefix;
        prefix.reserve(history.size());
        for (const auto& ev : history) prefix.push_back(ev.unit);
        return sp->rate(prefix, j);
    };
    auto closed = [sp](const std::vector<int>& j, double t) { return thls_psi(*sp, j, t); };
    std::vector<int> ordered(static_cast<std::size_t>(spec.r()));
    std::iota(ordered.begin(), ordered.end(), 1);
    double scale = 0.0;
    for (double lam : sp->lambda_vector(ordered)) scale += 1.0 / lam;
    return HazardModel(spec.r(), std::move(rate), flags, std::move(closed), scale);
}

HazardModel hazard_from_exthls(const ExThlsModel& model) {
    HazardFlags flags;
    flags.time_homogeneous = true;
    flags.order_independent = true;
    flags.exchangeable_form = true;
    flags.count_only_history = true;
    auto rate = [m = model](int, const History& history, double) {
        return m.mu(static_cast<int>(history.size()));
    };
    auto closed = [m = model](const std::vector<int>& j, double t) {
        const int r = m.r();
        const int d = static_cast<int>(j.size());
        const double pre = static_cast<double>(factorial(r - d)) / static_cast<double>(factorial(r));
        if (d == r) return pre * (1.0 - m.orderstat_survival(r, t));
        const double lo = (d == 0) ? 0.0 : m.orderstat_survival(d, t);
        return pre * (m.orderstat_survival(d + 1, t) - lo);
    };
    return HazardModel(model.r(), std::move(rate), flags, std::move(closed),
                       model.orderstat_mean(model.r()));
}

HazardModel hazard_exchangeable(int r, std::function<double(int k, double t)> mu,
                                bool time_homogeneous) {
    if (!mu) throw ContractError("hazard_exchangeable: rate callable must be set");
    HazardFlags flags;
    flags.time_homogeneous = time_homogeneous;
    flags.order_independent = true;
    flags.exchangeable_form = true;
    flags.count_only_history = true;
    auto rate = [mu, r](int, const History& history, double t) {
        (void)r;
        return mu(static_cast<int>(history.size()), t);
    };
    // Characteristic time: where the no-failure probability drops to ~0.3.
    IntegralCache cum([mu, r](double u) { return r * mu(0, u); }, 0.0, 1e-9);
    double scale = 1.0 / 64.0;
    while (std::exp(-cum(scale)) > 0.3 && scale < 1e12) scale *= 2.0;
    return HazardModel(r, std::move(rate), flags, nullptr, scale);
}

} // namespace lifeline
