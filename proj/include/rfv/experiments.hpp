#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rfv/activation.hpp"
#include "rfv/asymptotics.hpp"
#include "rfv/simulator.hpp"
#include "rfv/stats.hpp"

namespace rfv {

// Runs body(0..count-1) on up to `threads` workers. Results must be written to
// per-index slots; together with pairwise aggregation this keeps every report
// byte-identical whatever the thread count. The first exception thrown by a
// body is rethrown on the calling thread after all workers join.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

enum class SweepAxis { n_features, n, lambda };

struct SweepSpec {
    SimulationConfig base;
    SweepAxis axis = SweepAxis::n_features;
    std::vector<double> grid;  // strictly monotone
    int replications = 20;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct ReplicationRow {
    int replication = 0;
    std::uint64_t seed = 0;
    double risk = 0.0;
    double ppv = 0.0;
    double train_error = 0.0;
    bool jitter_applied = false;
    bool failed = false;
    std::string error;
};

struct ComparisonRecord {
    double psi1 = 0.0;
    double psi2 = 0.0;
    double lambda = 0.0;
    double s2_limit = 0.0;
    // Wide / large-sample closed form, filled only when one shape ratio is
    // past the proxy threshold; NaN otherwise.
    double risk_limit = std::numeric_limits<double>::quiet_NaN();
    bool risk_limit_available = false;
    double mean_risk = 0.0, se_risk = 0.0;
    double mean_ppv = 0.0, se_ppv = 0.0, sd_ppv = 0.0;
    double mean_train = 0.0, se_train = 0.0;
    // risk / (s2_limit - tau^2); limit risk when available, else the
    // empirical mean. NaN when the denominator vanishes.
    double ratio = std::numeric_limits<double>::quiet_NaN();
    int replications_done = 0;
    int failures = 0;
    std::string first_error;
    std::vector<ReplicationRow> rows;
};

// One record per grid value, in grid order. Replication failures are captured
// in the record (rows keep their error text), never dropped.
std::vector<ComparisonRecord> run_sweep(const SweepSpec& spec, int threads = 1);

enum class RatioAxis { psi1, psi2 };

struct RatioCurveSettings {
    Activation activation = Activation::relu();
    ModelParams params;
    RatioAxis axis = RatioAxis::psi1;
    std::vector<double> grid;
    double fixed_other = 3.0;
    // Points whose psi1 reaches this threshold use the closed-form wide-limit
    // risk; below it the risk is measured by simulation.
    double proxy_threshold = 100.0;
    double ridgeless_lambda = 1e-8;  // stands in for lambda -> 0 past the phase boundary
    int d = 100;                     // simulator scale for empirical points
    int replications = 10;
    int n_test = 1000;
    std::uint64_t master_seed = 0;
};

struct RatioPoint {
    double axis_value = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
    double lambda = 0.0;  // chosen per phase, unbarred units
    double risk = 0.0;
    bool risk_is_empirical = false;
    double s2 = 0.0;
    double excess_ppv = 0.0;  // s2 - tau^2
    double ratio = 0.0;
    // Closed-form wide-limit ratio at the same point, kept alongside the
    // measured one as a diagnostic column.
    double ratio_wide_formula = 0.0;
};

std::vector<RatioPoint> ratio_curve(const RatioCurveSettings& settings, int threads = 1);

enum class FluctStatistic { risk, ppv_minus_tau_sq };

struct FluctuationReport {
    FluctStatistic statistic = FluctStatistic::risk;
    std::size_t count = 0;
    double mean = 0.0;      // raw statistic
    double variance = 0.0;  // raw statistic, n-1 divisor
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double jarque_bera_stat = 0.0;
    double rescale = 1.0;            // the dimension factor d
    std::vector<double> rescaled;    // d * (x - sample mean)
    Histogram hist;                  // histogram of the rescaled deviations
};

inline constexpr int kOverlapBins = 60;

// Edges spanning the pooled 0.1%..99.9% quantile range of two samples.
std::vector<double> pooled_edges(const std::vector<double>& a,
                                 const std::vector<double>& b, int bins = kOverlapBins);

// replications >= 500. Histogram edges default to the sample's own
// 0.1%..99.9% range; pass `edges` to force a common grid.
FluctuationReport fluctuation_study(const SimulationConfig& config, FluctStatistic stat,
                                    int replications, std::uint64_t master_seed,
                                    int threads = 1,
                                    const std::vector<double>* edges = nullptr);

struct FluctuationPair {
    FluctuationReport risk;
    FluctuationReport excess_ppv;
    double overlap_value = 0.0;
};

// Both statistics from the same replications (shared dataset, features and
// test points per draw), histogrammed on a common pooled bin grid.
FluctuationPair fluctuation_pair(const SimulationConfig& config, int replications,
                                 std::uint64_t master_seed, int threads = 1);

// Histogram-intersection coefficient in [0, 1]; requires identical bin edges.
double overlap(const FluctuationReport& a, const FluctuationReport& b);

struct VarianceOrderingRow {
    double psi1 = 0.0;
    double psi2 = 0.0;
    double lambda = 0.0;
    double var_risk_rescaled = 0.0;
    double var_ppv_rescaled = 0.0;
    double ratio = 0.0;  // var_ppv / var_risk
    bool ppv_var_smaller = false;
    bool same_order = false;  // ratio within [0.1, 10]
};

// replications >= 1000 per config.
std::vector<VarianceOrderingRow> variance_ordering(
    const std::vector<SimulationConfig>& grid, int replications,
    std::uint64_t master_seed, int threads = 1);

// Self-calibration hook: each trial draws `sample_size` i.i.d. standard
// normals and tests them; returns the fraction exceeding the chi-squared
// cutoff kChi2TwoDof99.
double jb_rejection_rate(int sample_size, int trials, std::uint64_t master_seed,
                         int threads = 1);

}  // namespace rfv
