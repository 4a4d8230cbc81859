#include "lifeline/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>

#include "lifeline/rng.hpp"
#include "lifeline/threads.hpp"

namespace lifeline {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

constexpr int kMaxTieRedraws = 1000;      // per row; exact ties have measure zero
constexpr long long kMaxThinningRejects = 1000000;  // per stage

// One full row draw from the row's private stream.  The draw order within a
// stage (gap first, winner second; thinning: gap, acceptance, winner) is part
// of the determinism contract and must not be reordered.
std::vector<double> draw_row(const HazardModel& model, Rng& rng,
                             const std::vector<double>& bounds) {
    const int r = model.r();
    const bool homogeneous = model.flags().time_homogeneous;
    std::vector<double> times(static_cast<std::size_t>(r), 0.0);
    std::vector<int> alive(static_cast<std::size_t>(r));
    std::iota(alive.begin(), alive.end(), 1);
    History history;
    history.reserve(static_cast<std::size_t>(r));
    std::vector<double> weights;
    double t = 0.0;

    for (int stage = 0; stage < r; ++stage) {
        const int n_alive = static_cast<int>(alive.size());
        weights.resize(static_cast<std::size_t>(n_alive));
        int winner_idx = -1;
        if (homogeneous) {
            double total = 0.0;
            for (int i = 0; i < n_alive; ++i) {
                const double lam = model.rate_unchecked(
                    alive[static_cast<std::size_t>(i)], history, t);
                if (!(lam >= 0.0) || !std::isfinite(lam))
                    throw ContractError("sample: rate of unit " +
                                        std::to_string(alive[static_cast<std::size_t>(i)]) +
                                        " is " + fmt(lam) + " at t=" + fmt(t));
                weights[static_cast<std::size_t>(i)] = lam;
                total += lam;
            }
            if (!(total > 0.0))
                throw ContractError("sample: total rate vanished at t=" + fmt(t) +
                                    " with " + std::to_string(stage) +
                                    " failures; survivors would be immortal");
            t += rng.exponential(total);
            winner_idx = rng.categorical(weights);
        } else {
            const double bound = bounds[static_cast<std::size_t>(stage)];
            long long rejects = 0;
            for (;;) {
                t += rng.exponential(bound);
                double total = 0.0;
                for (int i = 0; i < n_alive; ++i) {
                    const double lam = model.rate_unchecked(
                        alive[static_cast<std::size_t>(i)], history, t);
                    if (!(lam >= 0.0) || !std::isfinite(lam))
                        throw ContractError(
                            "sample: rate of unit " +
                            std::to_string(alive[static_cast<std::size_t>(i)]) +
                            " is " + fmt(lam) + " at t=" + fmt(t));
                    weights[static_cast<std::size_t>(i)] = lam;
                    total += lam;
                }
                if (total > bound * (1.0 + 1e-9))
                    throw ContractError("sample: stage " + std::to_string(stage) +
                                        " rate bound violated: total rate " +
                                        fmt(total) + " exceeds the supplied bound " +
                                        fmt(bound) + " at t=" + fmt(t));
                if (rng.uniform01() * bound < total) {
                    winner_idx = rng.categorical(weights);
                    break;
                }
                if (++rejects > kMaxThinningRejects)
                    throw ConvergenceError(
                        "sample: thinning acceptance is vanishing at stage " +
                        std::to_string(stage) + " (bound " + fmt(bound) +
                        " is far above the realized rates)");
            }
        }
        const int unit = alive[static_cast<std::size_t>(winner_idx)];
        times[static_cast<std::size_t>(unit - 1)] = t;
        history.push_back({unit, t});
        alive.erase(alive.begin() + winner_idx);
    }
    return times;
}

bool has_tie(const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i)
        for (std::size_t j = i + 1; j < row.size(); ++j)
            if (row[i] == row[j]) return true;
    return false;
}

} // namespace

SampleBatch sample(const HazardModel& model, int n, std::uint64_t seed,
                   const SampleOptions& options) {
    if (n < 1) throw DomainError("sample: need n >= 1, got " + std::to_string(n));
    const int r = model.r();
    std::vector<double> bounds = options.stage_rate_bounds;
    if (!model.flags().time_homogeneous) {
        if (static_cast<int>(bounds.size()) != r)
            throw ContractError(
                "sample: time-varying model needs one stage rate bound per stage (" +
                std::to_string(r) + "), got " + std::to_string(bounds.size()));
        for (double b : bounds)
            if (!(b > 0.0) || !std::isfinite(b))
                throw DomainError("sample: stage rate bounds must be positive");
    }

    SampleBatch batch;
    batch.r = r;
    batch.seed = seed;
    batch.model_fingerprint = options.fingerprint;
    batch.rows.assign(static_cast<std::size_t>(n), {});

    std::atomic<long long> ties{0};
    run_indexed(n, [&](int i) {
        Rng rng = Rng::for_row(seed, static_cast<std::uint64_t>(i));
        long long redraws = 0;
        for (;;) {
            auto row = draw_row(model, rng, bounds);
            if (!has_tie(row)) {
                batch.rows[static_cast<std::size_t>(i)] = std::move(row);
                break;
            }
            if (++redraws > kMaxTieRedraws)
                throw ContractError("sample: row " + std::to_string(i) +
                                    " keeps producing tied failure times");
        }
        if (redraws > 0) ties.fetch_add(redraws);
    });
    batch.ties_resampled = ties.load();
    if (static_cast<double>(batch.ties_resampled) > 1e-4 * n)
        throw ContractError("sample: tie rate " +
                            fmt(static_cast<double>(batch.ties_resampled) / n) +
                            " exceeds 0.01%; the model looks degenerate");
    return batch;
}

double pairwise_sum(const std::vector<double>& v) {
    // Recursive halving with a small linear base case; the bracketing is a
    // function of the length alone.
    struct Reducer {
        static double run(const double* p, std::size_t len) {
            if (len <= 8) {
                double s = 0.0;
                for (std::size_t i = 0; i < len; ++i) s += p[i];
                return s;
            }
            const std::size_t half = len / 2;
            return run(p, half) + run(p + half, len - half);
        }
    };
    return v.empty() ? 0.0 : Reducer::run(v.data(), v.size());
}

namespace {

// Per-chunk accumulators merged in chunk order; counts are integers so the
// merged totals are independent of threading.
struct ChunkCounts {
    std::vector<std::vector<long long>> orderstat;           // [k][grid]
    std::map<std::vector<int>, std::vector<long long>> survivors;
    std::map<std::vector<int>, std::vector<long long>> psi_diff;  // difference arrays
};

void merge_map(std::map<std::vector<int>, std::vector<long long>>& into,
               const std::map<std::vector<int>, std::vector<long long>>& from,
               std::size_t width) {
    for (const auto& [key, counts] : from) {
        auto& slot = into[key];
        if (slot.empty()) slot.assign(width, 0);
        for (std::size_t g = 0; g < width; ++g) slot[g] += counts[g];
    }
}

EmpiricalCurve finalize_curve(const std::vector<long long>& counts, int n) {
    EmpiricalCurve c;
    c.value.resize(counts.size());
    c.half_width.resize(counts.size());
    for (std::size_t g = 0; g < counts.size(); ++g) {
        const double p = static_cast<double>(counts[g]) / n;
        c.value[g] = p;
        c.half_width[g] = 1.96 * std::sqrt(p * (1.0 - p) / n);
    }
    return c;
}

} // namespace

EmpiricalReport empirical_stats(const SampleBatch& batch,
                                const std::vector<double>& t_grid,
                                int max_psi_len) {
    const int n = batch.n();
    if (n < 1) throw ContractError("empirical_stats: zero-sample batch");
    if (t_grid.empty()) throw DomainError("empirical_stats: empty time grid");
    for (std::size_t g = 0; g + 1 < t_grid.size(); ++g)
        if (!(t_grid[g] < t_grid[g + 1]))
            throw DomainError("empirical_stats: time grid must be strictly increasing");
    if (!(t_grid.front() >= 0.0))
        throw DomainError("empirical_stats: negative times in the grid");
    const int r = batch.r;
    if (max_psi_len < 0 || max_psi_len > r)
        throw DomainError("empirical_stats: max_psi_len outside [0, r]");
    const std::size_t G = t_grid.size();

    // Fixed chunking (independent of the worker count) plus integer counts
    // keeps every estimate bit-identical however the work is distributed.
    const int chunks = std::min(64, n);
    const int per = (n + chunks - 1) / chunks;
    std::vector<ChunkCounts> partial(static_cast<std::size_t>(chunks));

    run_indexed(chunks, [&](int c) {
        auto& acc = partial[static_cast<std::size_t>(c)];
        acc.orderstat.assign(static_cast<std::size_t>(r),
                             std::vector<long long>(G + 1, 0));
        const int lo = c * per;
        const int hi = std::min(n, lo + per);
        std::vector<std::pair<double, int>> order(static_cast<std::size_t>(r));
        for (int i = lo; i < hi; ++i) {
            const auto& row = batch.rows[static_cast<std::size_t>(i)];
            if (static_cast<int>(row.size()) != r)
                throw ContractError("empirical_stats: row " + std::to_string(i) +
                                    " has " + std::to_string(row.size()) +
                                    " entries, expected " + std::to_string(r));
            for (int u = 0; u < r; ++u)
                order[static_cast<std::size_t>(u)] = {row[static_cast<std::size_t>(u)], u + 1};
            std::sort(order.begin(), order.end());

            // Order statistics: T_{k:r} > t on the grid prefix t < s_k,
            // recorded as a difference array.
            for (int k = 0; k < r; ++k) {
                const double sk = order[static_cast<std::size_t>(k)].first;
                const auto cut = std::lower_bound(t_grid.begin(), t_grid.end(), sk) -
                                 t_grid.begin();
                auto& diff = acc.orderstat[static_cast<std::size_t>(k)];
                diff[0] += 1;
                diff[static_cast<std::size_t>(cut)] -= 1;
            }

            // Survivor sets: between consecutive order statistics the set is
            // constant, so accumulate difference-array ranges per subset.
            for (int k = 0; k <= r; ++k) {
                const double from = (k == 0) ? 0.0 : order[static_cast<std::size_t>(k - 1)].first;
                const double to =
                    (k == r) ? std::numeric_limits<double>::infinity()
                             : order[static_cast<std::size_t>(k)].first;
                // grid points with from <= t < to
                const auto a = std::lower_bound(t_grid.begin(), t_grid.end(), from) -
                               t_grid.begin();
                const auto b = std::lower_bound(t_grid.begin(), t_grid.end(), to) -
                               t_grid.begin();
                if (a >= b) continue;
                std::vector<int> alive;
                alive.reserve(static_cast<std::size_t>(r - k));
                for (int m = k; m < r; ++m)
                    alive.push_back(order[static_cast<std::size_t>(m)].second);
                std::sort(alive.begin(), alive.end());
                auto& diff = acc.survivors[alive];
                if (diff.empty()) diff.assign(G + 1, 0);
                diff[static_cast<std::size_t>(a)] += 1;
                diff[static_cast<std::size_t>(b)] -= 1;
            }

            // Ordered failure prefixes: indicator lives on s_d <= t < s_{d+1}.
            for (int d = 1; d <= max_psi_len; ++d) {
                const double sd = order[static_cast<std::size_t>(d - 1)].first;
                const double next =
                    (d == r) ? std::numeric_limits<double>::infinity()
                             : order[static_cast<std::size_t>(d)].first;
                const auto a = std::lower_bound(t_grid.begin(), t_grid.end(), sd) -
                               t_grid.begin();
                const auto b = std::lower_bound(t_grid.begin(), t_grid.end(), next) -
                               t_grid.begin();
                if (a >= b) continue;
                std::vector<int> prefix(static_cast<std::size_t>(d));
                for (int m = 0; m < d; ++m)
                    prefix[static_cast<std::size_t>(m)] = order[static_cast<std::size_t>(m)].second;
                auto& diff = acc.psi_diff[prefix];
                if (diff.empty()) diff.assign(G + 1, 0);
                diff[static_cast<std::size_t>(a)] += 1;
                diff[static_cast<std::size_t>(b)] -= 1;
            }
        }
    });

    // Merge in chunk order, then turn difference arrays into prefix counts.
    std::vector<std::vector<long long>> os_counts(
        static_cast<std::size_t>(r), std::vector<long long>(G + 1, 0));
    std::map<std::vector<int>, std::vector<long long>> sv_counts, psi_counts;
    for (const auto& acc : partial) {
        if (acc.orderstat.empty()) continue;
        for (int k = 0; k < r; ++k)
            for (std::size_t g = 0; g <= G; ++g)
                os_counts[static_cast<std::size_t>(k)][g] +=
                    acc.orderstat[static_cast<std::size_t>(k)][g];
        merge_map(sv_counts, acc.survivors, G + 1);
        merge_map(psi_counts, acc.psi_diff, G + 1);
    }
    auto scan = [&](std::vector<long long>& diff) {
        long long run = 0;
        for (std::size_t g = 0; g < G; ++g) {
            run += diff[g];
            diff[g] = run;
        }
        diff.resize(G);
    };

    EmpiricalReport report;
    report.n = n;
    report.r = r;
    report.t_grid = t_grid;
    report.orderstat.reserve(static_cast<std::size_t>(r));
    for (int k = 0; k < r; ++k) {
        scan(os_counts[static_cast<std::size_t>(k)]);
        report.orderstat.push_back(finalize_curve(os_counts[static_cast<std::size_t>(k)], n));
    }
    for (auto& [key, diff] : sv_counts) {
        scan(diff);
        report.survivor_sets.emplace(key, finalize_curve(diff, n));
    }
    for (auto& [key, diff] : psi_counts) {
        scan(diff);
        report.psi.emplace(key, finalize_curve(diff, n));
    }
    return report;
}

double empirical_orderstat_mean(const SampleBatch& batch, int k) {
    const int n = batch.n();
    if (n < 1) throw ContractError("empirical_orderstat_mean: zero-sample batch");
    if (k < 1 || k > batch.r)
        throw DomainError("empirical_orderstat_mean: k outside [1, r]");
    std::vector<double> kth(static_cast<std::size_t>(n));
    run_indexed(n, [&](int i) {
        std::vector<double> row = batch.rows[static_cast<std::size_t>(i)];
        std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
        kth[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(k - 1)];
    });
    return pairwise_sum(kth) / n;
}

GofVerdict gof_compare(const std::vector<GofSeries>& series, int n,
                       double sigma_mult) {
    if (n < 1)
        throw ContractError("gof_compare: zero-sample batch cannot support a verdict");
    if (!(sigma_mult > 0.0))
        throw DomainError("gof_compare: sigma_mult must be positive");
    if (series.empty())
        throw ContractError("gof_compare: nothing to compare");

    GofVerdict verdict;
    verdict.sigma_mult = sigma_mult;
    for (const auto& s : series) {
        if (s.analytic.size() != s.empirical.size() || s.analytic.empty())
            throw ContractError("gof_compare: grid mismatch for series '" + s.name +
                                "' (" + std::to_string(s.analytic.size()) +
                                " analytic vs " + std::to_string(s.empirical.size()) +
                                " empirical points)");
        for (std::size_t i = 0; i < s.analytic.size(); ++i) {
            const double p = s.analytic[i];
            if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
                throw ContractError("gof_compare: analytic value " + fmt(p) +
                                    " of '" + s.name + "' is not a probability");
            const double pc = std::min(1.0, std::max(0.0, p));
            const double var = pc * (1.0 - pc) / n;
            double z;
            if (var < 1e-300) {
                z = (std::fabs(s.empirical[i] - pc) <= 1e-12)
                        ? 0.0
                        : std::numeric_limits<double>::infinity();
            } else {
                z = (s.empirical[i] - pc) / std::sqrt(var);
            }
            ++verdict.points;
            const double az = std::fabs(z);
            if (az > verdict.max_abs_z) {
                verdict.max_abs_z = az;
                verdict.worst = {s.name, static_cast<int>(i), pc, s.empirical[i], z};
            }
            if (az > sigma_mult && verdict.failures.size() < 32)
                verdict.failures.push_back(
                    {s.name, static_cast<int>(i), pc, s.empirical[i], z});
        }
    }
    verdict.pass = verdict.max_abs_z <= sigma_mult;
    const double per_point = std::erfc(sigma_mult / std::sqrt(2.0));
    verdict.bonferroni =
        std::to_string(verdict.points) + " points at |z| <= " + fmt(sigma_mult) +
        ": family-wise false-alarm rate <= " + fmt(verdict.points * per_point) +
        " (Bonferroni)";
    return verdict;
}

} // namespace lifeline
