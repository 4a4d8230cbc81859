#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lifeline/hazard.hpp"

namespace lifeline {

// One simulated batch: n rows of r failure times (row[i-1] is unit i's time).
struct SampleBatch {
    int r = 0;
    std::uint64_t seed = 0;
    std::string model_fingerprint;
    long long ties_resampled = 0;  // rows redrawn because of exact float ties
    std::vector<std::vector<double>> rows;

    int n() const { return static_cast<int>(rows.size()); }
};

struct SampleOptions {
    // Per-stage proposal rates for time-varying models: stage_rate_bounds[k]
    // must dominate the total rate over every history with k failures for
    // all times the sampler can reach.  Required when the model is not
    // time-homogeneous (thinning proposes at this rate); ignored otherwise.
    std::vector<double> stage_rate_bounds;
    // Free-form identifier stored in the batch (e.g. a model-file digest).
    std::string fingerprint;
};

// Draws n independent rows from the joint law the hazard model defines.
// Time-homogeneous models run stage-by-stage competing exponentials: the
// inter-failure gap is exponential in the surviving total rate, then the
// failing unit is categorical in the individual rates.  Time-varying models
// run thinning against the supplied stage bounds, with a hard error if the
// realized total rate ever exceeds its bound.  Each row consumes its own
// counter-derived stream (Rng::for_row), so batches are bit-identical for a
// fixed (model, n, seed) regardless of worker count or chunking.  Rows with
// exact floating-point ties are redrawn from the same stream and counted;
// a tie rate above 0.01% aborts as a model-pathology signal.
SampleBatch sample(const HazardModel& model, int n, std::uint64_t seed,
                   const SampleOptions& options = {});

// Fixed-order pairwise summation: a deterministic reduction whose result
// depends only on the order of v, never on threading or chunk sizes.
double pairwise_sum(const std::vector<double>& v);

// One estimated curve on the report's time grid with 95% binomial
// confidence half-widths 1.96 * sqrt(p(1-p)/n).
struct EmpiricalCurve {
    std::vector<double> value;
    std::vector<double> half_width;
};

struct EmpiricalReport {
    int n = 0;
    int r = 0;
    std::vector<double> t_grid;
    // orderstat[k-1](t) estimates P(T_{k:r} > t).
    std::vector<EmpiricalCurve> orderstat;
    // P(surviving set equals A at t), keyed by sorted unit labels; only
    // subsets realized in the batch appear, and values at each t sum to 1.
    std::map<std::vector<int>, EmpiricalCurve> survivor_sets;
    // Psi(t; j): mean of the indicator "the first |j| failures are exactly
    // j in that order, all by time t, everyone else alive at t", for every
    // ordered prefix of length <= max_psi_len realized in the batch.
    std::map<std::vector<int>, EmpiricalCurve> psi;
};

EmpiricalReport empirical_stats(const SampleBatch& batch,
                                const std::vector<double>& t_grid,
                                int max_psi_len = 2);

// Mean of the k-th order statistic, reduced by pairwise summation.
double empirical_orderstat_mean(const SampleBatch& batch, int k);

// ---------------------------------------------------------------------------
// Goodness-of-fit: z-score comparison of analytic probability curves against
// their empirical estimates.

struct GofSeries {
    std::string name;
    std::vector<double> analytic;   // probabilities on the shared grid
    std::vector<double> empirical;  // same length
};

struct GofPoint {
    std::string curve;
    int index = -1;
    double analytic = 0.0;
    double empirical = 0.0;
    double z = 0.0;
};

struct GofVerdict {
    bool pass = true;
    double max_abs_z = 0.0;
    GofPoint worst;
    int points = 0;
    double sigma_mult = 4.0;
    std::string bonferroni;          // family-wise false-alarm remark
    std::vector<GofPoint> failures;  // points beyond the threshold (capped)
};

// Pass iff every point satisfies |empirical - analytic| <= sigma_mult
// standard errors, with the standard error sqrt(p(1-p)/n) taken at the
// analytic p (the null).  Points where that variance vanishes (p = 0 or 1)
// pass only when the empirical value matches exactly.  Mismatched series
// lengths or a zero-sample batch are contract errors, never a pass.
GofVerdict gof_compare(const std::vector<GofSeries>& series, int n,
                       double sigma_mult = 4.0);

} // namespace lifeline
