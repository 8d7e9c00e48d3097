#include "rfv/experiments.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "rfv/errors.hpp"
#include "rfv/rng.hpp"

namespace rfv {
namespace {

ModelParams model_params_of(const SimulationConfig& config) {
    ModelParams p;
    p.f0_sq = config.f0_sq;
    p.f1_sq = config.f1_sq;
    p.fstar_sq = 0.0;  // synthetic truth is linear
    p.tau_sq = config.tau_sq;
    return p;
}

struct BatchStats {
    double mean = 0.0;
    double se = 0.0;
    double sd = 0.0;
};

BatchStats batch_stats(const std::vector<double>& values) {
    BatchStats s;
    s.mean = mean(values);
    if (values.size() >= 2) {
        const double var = sample_variance(values);
        s.sd = std::sqrt(var);
        s.se = std::sqrt(var / double(values.size()));
    }
    return s;
}

std::vector<ReplicationSample> run_samples(const SimulationConfig& base, int replications,
                                           std::uint64_t master_seed,
                                           std::uint64_t point_index, int threads) {
    std::vector<ReplicationSample> samples(replications);
    parallel_for(replications, threads, [&](int rep) {
        SimulationConfig config = base;
        config.seed = derive_subseed(master_seed, point_index, std::uint64_t(rep));
        samples[rep] = run_replication(config);
    });
    return samples;
}

FluctuationReport build_report(std::vector<double> values, double dim,
                               FluctStatistic stat, const std::vector<double>* edges) {
    FluctuationReport report;
    report.statistic = stat;
    report.count = values.size();
    report.rescale = dim;

    const MomentSummary m = moment_summary(values);
    report.mean = m.mean;
    report.variance = m.variance;
    report.skewness = m.skewness;
    report.excess_kurtosis = m.excess_kurtosis;
    report.jarque_bera_stat = jarque_bera(report.count, m.skewness, m.excess_kurtosis);

    report.rescaled.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        report.rescaled[i] = dim * (values[i] - m.mean);

    if (edges) {
        report.hist = histogram(report.rescaled, *edges);
    } else {
        double lo = quantile(report.rescaled, 0.001);
        double hi = quantile(report.rescaled, 0.999);
        if (!(hi > lo)) {
            const double pad = 1e-9 * std::max(1.0, std::abs(lo));
            lo -= pad;
            hi += pad;
        }
        report.hist = histogram(report.rescaled, uniform_edges(lo, hi, kOverlapBins));
    }
    return report;
}

double statistic_value(const ReplicationSample& sample, FluctStatistic stat,
                       double tau_sq) {
    return stat == FluctStatistic::risk ? sample.risk : sample.ppv - tau_sq;
}

}  // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    if (count <= 0) return;
    if (threads < 1) threads = 1;
    const int workers = std::min(threads, count);
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto drain = [&] {
        for (;;) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

void SweepSpec::validate() const {
    base.validate();
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    if (grid.size() > 1) {
        const bool increasing = grid[1] > grid[0];
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const bool step_up = grid[i] > grid[i - 1];
            if (step_up != increasing || grid[i] == grid[i - 1])
                throw ConfigError("sweep grid must be strictly monotone");
        }
    }
    for (double v : grid) {
        if (axis == SweepAxis::lambda) {
            if (!(v > 0.0)) throw ConfigError("lambda grid values must be positive");
        } else if (!(v >= 1.0) || v != std::floor(v)) {
            throw ConfigError("count grid values must be positive integers");
        }
    }
}

std::vector<ComparisonRecord> run_sweep(const SweepSpec& spec, int threads) {
    spec.validate();
    const ActivationCoefficients coeffs = gaussian_coefficients(spec.base.activation);
    const ModelParams params = model_params_of(spec.base);
    const double lambda_bar_scale = 1.0 / coeffs.mu_star_sq;

    std::vector<ComparisonRecord> records;
    records.reserve(spec.grid.size());

    for (std::size_t point = 0; point < spec.grid.size(); ++point) {
        SimulationConfig config = spec.base;
        switch (spec.axis) {
            case SweepAxis::n_features:
                config.n_features = int(std::lround(spec.grid[point]));
                break;
            case SweepAxis::n:
                config.n = int(std::lround(spec.grid[point]));
                break;
            case SweepAxis::lambda:
                config.lambda = spec.grid[point];
                break;
        }

        ComparisonRecord rec;
        rec.psi1 = double(config.n_features) / config.d;
        rec.psi2 = double(config.n) / config.d;
        rec.lambda = config.lambda;

        const ShapeRatios ratios{rec.psi1, rec.psi2};
        rec.s2_limit = ppv_limit(params, ratios, coeffs, config.lambda);
        const double lambda_bar = config.lambda * lambda_bar_scale;
        if (rec.psi1 >= 100.0) {
            rec.risk_limit = risk_wide(params.rho(), coeffs.zeta, rec.psi2, lambda_bar, params);
            rec.risk_limit_available = true;
        } else if (rec.psi2 >= 100.0) {
            rec.risk_limit = risk_large_sample(coeffs.zeta, rec.psi1, lambda_bar, params);
            rec.risk_limit_available = true;
        }

        rec.rows.assign(std::size_t(spec.replications), ReplicationRow{});
        parallel_for(spec.replications, threads, [&](int rep) {
            ReplicationRow& row = rec.rows[rep];
            row.replication = rep;
            SimulationConfig rep_config = config;
            rep_config.seed =
                derive_subseed(spec.master_seed, std::uint64_t(point), std::uint64_t(rep));
            row.seed = rep_config.seed;
            try {
                const ReplicationSample sample = run_replication(rep_config);
                row.risk = sample.risk;
                row.ppv = sample.ppv;
                row.train_error = sample.train_error;
                row.jitter_applied = sample.jitter_applied;
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
        });

        std::vector<double> risks, ppvs, trains;
        risks.reserve(rec.rows.size());
        for (const ReplicationRow& row : rec.rows) {
            if (row.failed) {
                ++rec.failures;
                if (rec.first_error.empty()) rec.first_error = row.error;
                continue;
            }
            risks.push_back(row.risk);
            ppvs.push_back(row.ppv);
            trains.push_back(row.train_error);
        }
        rec.replications_done = int(risks.size());
        if (!risks.empty()) {
            const BatchStats r = batch_stats(risks);
            const BatchStats p = batch_stats(ppvs);
            const BatchStats t = batch_stats(trains);
            rec.mean_risk = r.mean;
            rec.se_risk = r.se;
            rec.mean_ppv = p.mean;
            rec.se_ppv = p.se;
            rec.sd_ppv = p.sd;
            rec.mean_train = t.mean;
            rec.se_train = t.se;
        }
        const double denom = rec.s2_limit - params.tau_sq;
        if (denom > 0.0 && (rec.risk_limit_available || rec.replications_done > 0))
            rec.ratio = (rec.risk_limit_available ? rec.risk_limit : rec.mean_risk) / denom;
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<RatioPoint> ratio_curve(const RatioCurveSettings& settings, int threads) {
    if (!(settings.params.f1_sq > 0.0))
        throw DegenerateDenominator("ratio curve needs f1_sq > 0");
    if (settings.grid.empty()) throw ConfigError("ratio grid is empty");
    if (!(settings.fixed_other > 0.0)) throw ConfigError("fixed ratio must be positive");

    const ActivationCoefficients coeffs = gaussian_coefficients(settings.activation);
    const double rho = settings.params.rho();

    std::vector<RatioPoint> points;
    points.reserve(settings.grid.size());

    for (std::size_t i = 0; i < settings.grid.size(); ++i) {
        RatioPoint pt;
        pt.axis_value = settings.grid[i];
        pt.psi1 = settings.axis == RatioAxis::psi1 ? pt.axis_value : settings.fixed_other;
        pt.psi2 = settings.axis == RatioAxis::psi2 ? pt.axis_value : settings.fixed_other;

        // Past the phase boundary the optimum sits at lambda -> 0.
        double lambda_bar;
        try {
            lambda_bar = lambda_opt_bar(rho, coeffs.zeta, pt.psi2);
        } catch (const PhaseViolation&) {
            lambda_bar = settings.ridgeless_lambda / coeffs.mu_star_sq;
        }
        pt.lambda = lambda_bar * coeffs.mu_star_sq;

        const ShapeRatios ratios{pt.psi1, pt.psi2};
        pt.s2 = ppv_limit(settings.params, ratios, coeffs, pt.lambda);
        pt.excess_ppv = pt.s2 - settings.params.tau_sq;
        if (!(pt.excess_ppv > 0.0))
            throw DegenerateDenominator("ratio denominator vanished");

        const double wide_risk =
            risk_wide(rho, coeffs.zeta, pt.psi2, lambda_bar, settings.params);
        pt.ratio_wide_formula = wide_risk / pt.excess_ppv;

        if (pt.psi1 >= settings.proxy_threshold) {
            pt.risk = wide_risk;
            pt.risk_is_empirical = false;
        } else {
            if (settings.params.fstar_sq > 0.0)
                throw ConfigError(
                    "empirical ratio points require a purely linear target (fstar_sq = 0)");
            SimulationConfig config;
            config.d = settings.d;
            config.n = int(std::lround(pt.psi2 * settings.d));
            config.n_features = int(std::lround(pt.psi1 * settings.d));
            config.lambda = pt.lambda;
            config.activation = settings.activation;
            config.f1_sq = settings.params.f1_sq;
            config.f0_sq = settings.params.f0_sq;
            config.tau_sq = settings.params.tau_sq;
            config.n_test = settings.n_test;
            const std::vector<ReplicationSample> samples = run_samples(
                config, settings.replications, settings.master_seed, i, threads);
            std::vector<double> risks(samples.size());
            for (std::size_t k = 0; k < samples.size(); ++k) risks[k] = samples[k].risk;
            pt.risk = mean(risks);
            pt.risk_is_empirical = true;
        }
        pt.ratio = pt.risk / pt.excess_ppv;
        points.push_back(std::move(pt));
    }
    return points;
}

std::vector<double> pooled_edges(const std::vector<double>& a,
                                 const std::vector<double>& b, int bins) {
    double lo = std::min(quantile(a, 0.001), quantile(b, 0.001));
    double hi = std::max(quantile(a, 0.999), quantile(b, 0.999));
    if (!(hi > lo)) {
        const double pad = 1e-9 * std::max(1.0, std::abs(lo));
        lo -= pad;
        hi += pad;
    }
    return uniform_edges(lo, hi, bins);
}

FluctuationReport fluctuation_study(const SimulationConfig& config, FluctStatistic stat,
                                    int replications, std::uint64_t master_seed,
                                    int threads, const std::vector<double>* edges) {
    if (replications < 500)
        throw ConfigError("fluctuation study needs at least 500 replications");
    const std::vector<ReplicationSample> samples =
        run_samples(config, replications, master_seed, 0, threads);
    std::vector<double> values(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        values[i] = statistic_value(samples[i], stat, config.tau_sq);
    return build_report(std::move(values), double(config.d), stat, edges);
}

FluctuationPair fluctuation_pair(const SimulationConfig& config, int replications,
                                 std::uint64_t master_seed, int threads) {
    if (replications < 500)
        throw ConfigError("fluctuation study needs at least 500 replications");
    const std::vector<ReplicationSample> samples =
        run_samples(config, replications, master_seed, 0, threads);

    std::vector<double> risk_values(samples.size()), ppv_values(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        risk_values[i] = statistic_value(samples[i], FluctStatistic::risk, config.tau_sq);
        ppv_values[i] =
            statistic_value(samples[i], FluctStatistic::ppv_minus_tau_sq, config.tau_sq);
    }

    const double dim = double(config.d);
    const double risk_mean = mean(risk_values);
    const double ppv_mean = mean(ppv_values);
    std::vector<double> risk_dev(samples.size()), ppv_dev(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        risk_dev[i] = dim * (risk_values[i] - risk_mean);
        ppv_dev[i] = dim * (ppv_values[i] - ppv_mean);
    }
    const std::vector<double> edges = pooled_edges(risk_dev, ppv_dev);

    FluctuationPair pair;
    pair.risk = build_report(std::move(risk_values), dim, FluctStatistic::risk, &edges);
    pair.excess_ppv =
        build_report(std::move(ppv_values), dim, FluctStatistic::ppv_minus_tau_sq, &edges);
    pair.overlap_value = overlap(pair.risk, pair.excess_ppv);
    return pair;
}

double overlap(const FluctuationReport& a, const FluctuationReport& b) {
    return histogram_overlap(a.hist, b.hist);
}

std::vector<VarianceOrderingRow> variance_ordering(
    const std::vector<SimulationConfig>& grid, int replications,
    std::uint64_t master_seed, int threads) {
    if (replications < 1000)
        throw ConfigError("variance ordering needs at least 1000 replications");

    std::vector<VarianceOrderingRow> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const SimulationConfig& config = grid[i];
        const std::vector<ReplicationSample> samples =
            run_samples(config, replications, master_seed, i, threads);
        std::vector<double> risks(samples.size()), ppvs(samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k) {
            risks[k] = samples[k].risk;
            ppvs[k] = samples[k].ppv;
        }
        VarianceOrderingRow row;
        row.psi1 = double(config.n_features) / config.d;
        row.psi2 = double(config.n) / config.d;
        row.lambda = config.lambda;
        const double scale = double(config.d) * double(config.d);
        row.var_risk_rescaled = scale * sample_variance(risks);
        row.var_ppv_rescaled = scale * sample_variance(ppvs);
        row.ratio = row.var_risk_rescaled > 0.0
                        ? row.var_ppv_rescaled / row.var_risk_rescaled
                        : std::numeric_limits<double>::infinity();
        row.ppv_var_smaller = row.var_ppv_rescaled < row.var_risk_rescaled;
        row.same_order = row.ratio >= 0.1 && row.ratio <= 10.0;
        rows.push_back(row);
    }
    return rows;
}

double jb_rejection_rate(int sample_size, int trials, std::uint64_t master_seed,
                         int threads) {
    if (sample_size < 8) throw ConfigError("calibration sample size too small");
    if (trials < 1) throw ConfigError("calibration needs at least one trial");

    std::vector<double> rejected(trials, 0.0);
    parallel_for(trials, threads, [&](int trial) {
        RngStream stream(derive_subseed(master_seed, std::uint64_t(trial), 1));
        std::vector<double> draws(sample_size);
        for (int k = 0; k < sample_size; ++k) draws[k] = stream.normal();
        const MomentSummary m = moment_summary(draws);
        const double jb = jarque_bera(draws.size(), m.skewness, m.excess_kurtosis);
        rejected[trial] = jb > kChi2TwoDof99 ? 1.0 : 0.0;
    });
    return pairwise_sum(rejected) / double(trials);
}

}  // namespace rfv
