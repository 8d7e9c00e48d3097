#include "rfv/runners.hpp"

#include <cmath>
#include <limits>

#include "rfv/activation.hpp"
#include "rfv/asymptotics.hpp"
#include "rfv/errors.hpp"
#include "rfv/experiments.hpp"
#include "rfv/io/csv.hpp"
#include "rfv/io/svg.hpp"
#include "rfv/rng.hpp"
#include "rfv/stats.hpp"

namespace rfv {
namespace {

std::string kv_int(long long v) { return std::to_string(v); }
std::string kv_u64(std::uint64_t v) { return std::to_string(v); }

RunOutputs finalize(const std::string& command, const ConfigKv& kv, std::uint64_t seed,
                    const std::string& out_dir, std::string csv, std::string svg) {
    RunOutputs out;
    out.csv_text = std::move(csv);
    out.svg_text = std::move(svg);
    out.csv_digest = digest_hex(out.csv_text);
    out.files.push_back({"results.csv", out.csv_digest});
    out.files.push_back({"plot.svg", digest_hex(out.svg_text)});
    if (!out_dir.empty()) {
        write_text_file(out_dir + "/results.csv", out.csv_text);
        write_text_file(out_dir + "/plot.svg", out.svg_text);
        write_text_file(out_dir + "/manifest.json",
                        manifest_json(command, kv, seed, out.files));
    }
    return out;
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "n_features") return SweepAxis::n_features;
    if (name == "n") return SweepAxis::n;
    if (name == "lambda") return SweepAxis::lambda;
    throw ConfigError("axis must be n_features, n or lambda, got '" + name + "'");
}

RatioAxis parse_ratio_axis(const std::string& name) {
    if (name == "psi1") return RatioAxis::psi1;
    if (name == "psi2") return RatioAxis::psi2;
    throw ConfigError("axis must be psi1 or psi2, got '" + name + "'");
}

const std::string kEmpty;

}  // namespace

CoeffsRun CoeffsRun::from_config(const KeyValueConfig& config) {
    CoeffsRun run;
    run.activation = config.get_string("activation", run.activation);
    run.order = config.get_int("order", run.order);
    config.ensure_all_consumed();
    return run;
}

ConfigKv CoeffsRun::to_kv() const {
    return {{"activation", activation}, {"order", kv_int(order)}};
}

RunOutputs run_coeffs(const CoeffsRun& run, const std::string& out_dir) {
    const Activation act = parse_activation(run.activation);
    const ActivationCoefficients coeffs = gaussian_coefficients(act, run.order);

    CsvTable table("rfvar-coeffs-v1", {"activation", "mu0", "mu1", "mu_star_sq", "zeta"});
    table.add_row({act.name(), format17g(coeffs.mu0), format17g(coeffs.mu1),
                   format17g(coeffs.mu_star_sq), format17g(coeffs.zeta)});

    SvgPlot plot("activation profile", "x", "sigma(x)");
    std::vector<double> xs, ys;
    for (int i = 0; i <= 160; ++i) {
        const double x = -4.0 + 8.0 * i / 160.0;
        xs.push_back(x);
        ys.push_back(act(x));
    }
    plot.add_line(act.name(), xs, ys);

    return finalize("coeffs", run.to_kv(), 0, out_dir, table.str(), plot.str());
}

AsymptoteRun AsymptoteRun::from_config(const KeyValueConfig& config) {
    AsymptoteRun run;
    run.activation = config.get_string("activation", run.activation);
    run.axis = config.get_string("axis", run.axis);
    run.grid_text = config.get_string("grid", run.grid_text);
    run.psi1 = config.get_double("psi1", run.psi1);
    run.psi2 = config.get_double("psi2", run.psi2);
    run.lambda = config.get_double("lambda", run.lambda);
    run.f1_sq = config.get_double("f1_sq", run.f1_sq);
    run.f0_sq = config.get_double("f0_sq", run.f0_sq);
    run.fstar_sq = config.get_double("fstar_sq", run.fstar_sq);
    run.tau_sq = config.get_double("tau_sq", run.tau_sq);
    config.ensure_all_consumed();
    return run;
}

ConfigKv AsymptoteRun::to_kv() const {
    return {{"activation", activation},
            {"axis", axis},
            {"grid", grid_text},
            {"psi1", format17g(psi1)},
            {"psi2", format17g(psi2)},
            {"lambda", format17g(lambda)},
            {"f1_sq", format17g(f1_sq)},
            {"f0_sq", format17g(f0_sq)},
            {"fstar_sq", format17g(fstar_sq)},
            {"tau_sq", format17g(tau_sq)}};
}

RunOutputs run_asymptote(const AsymptoteRun& run, const std::string& out_dir) {
    if (run.axis != "psi1" && run.axis != "psi2" && run.axis != "lambda")
        throw ConfigError("axis must be psi1, psi2 or lambda, got '" + run.axis + "'");
    const Activation act = parse_activation(run.activation);
    const ActivationCoefficients coeffs = gaussian_coefficients(act);
    const std::vector<double> grid = parse_grid(run.grid_text);

    ModelParams params;
    params.f1_sq = run.f1_sq;
    params.f0_sq = run.f0_sq;
    params.fstar_sq = run.fstar_sq;
    params.tau_sq = run.tau_sq;

    CsvTable table("rfvar-asymptote-v1",
                   {"axis", "axis_value", "psi1", "psi2", "lambda", "s2_limit", "chi",
                    "train_error_limit", "r_limit", "risk_wide", "risk_lsamp"});
    std::vector<double> xs, s2s, trains;

    for (double v : grid) {
        const double p1 = run.axis == "psi1" ? v : run.psi1;
        const double p2 = run.axis == "psi2" ? v : run.psi2;
        const double lambda = run.axis == "lambda" ? v : run.lambda;
        const ShapeRatios ratios{p1, p2};
        double s2, chi, train, r;
        try {
            chi = chi_at(ratios, coeffs, lambda);
            s2 = ppv_limit(params, ratios, coeffs, lambda);
            train = training_error_limit(params, ratios, coeffs, lambda);
            r = resolvent_trace_limit(ratios, coeffs, lambda);
        } catch (const NumericalError& e) {
            throw NumericalError("grid point " + run.axis + " = " + format17g(v) + ": " +
                                 e.what());
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double lambda_bar = lambda / coeffs.mu_star_sq;
        const double wide =
            p1 >= 100.0 ? risk_wide(params.rho(), coeffs.zeta, p2, lambda_bar, params) : nan;
        const double lsamp =
            p2 >= 100.0 ? risk_large_sample(coeffs.zeta, p1, lambda_bar, params) : nan;

        table.add_row({run.axis, format17g(v), format17g(p1), format17g(p2),
                       format17g(lambda), format17g(s2), format17g(chi), format17g(train),
                       format17g(r), format17g(wide), format17g(lsamp)});
        xs.push_back(v);
        s2s.push_back(s2);
        trains.push_back(train);
    }

    SvgPlot plot("limiting curves", run.axis, "value");
    plot.set_log_x(run.axis == "lambda");
    plot.add_line("predictive variance limit", xs, s2s);
    plot.add_line("training error limit", xs, trains);

    return finalize("asymptote", run.to_kv(), 0, out_dir, table.str(), plot.str());
}

SimulateRun SimulateRun::from_config(const KeyValueConfig& config) {
    SimulateRun run;
    run.d = config.get_int("d", run.d);
    run.n = config.get_int("n", run.n);
    run.n_features = config.get_int("n_features", run.n_features);
    run.lambda = config.get_double("lambda", run.lambda);
    run.activation = config.get_string("activation", run.activation);
    run.f1_sq = config.get_double("f1_sq", run.f1_sq);
    run.f0_sq = config.get_double("f0_sq", run.f0_sq);
    run.tau_sq = config.get_double("tau_sq", run.tau_sq);
    run.n_test = config.get_int("n_test", run.n_test);
    run.axis = config.get_string("axis", run.axis);
    run.grid_text = config.get_string("grid", run.grid_text);
    run.replications = config.get_int("replications", run.replications);
    run.seed = config.get_u64("seed", run.seed);
    config.ensure_all_consumed();
    return run;
}

ConfigKv SimulateRun::to_kv() const {
    return {{"d", kv_int(d)},
            {"n", kv_int(n)},
            {"n_features", kv_int(n_features)},
            {"lambda", format17g(lambda)},
            {"activation", activation},
            {"f1_sq", format17g(f1_sq)},
            {"f0_sq", format17g(f0_sq)},
            {"tau_sq", format17g(tau_sq)},
            {"n_test", kv_int(n_test)},
            {"axis", axis},
            {"grid", grid_text},
            {"replications", kv_int(replications)},
            {"seed", kv_u64(seed)}};
}

RunOutputs run_simulate(const SimulateRun& run, const std::string& out_dir, int threads) {
    SweepSpec spec;
    spec.base.d = run.d;
    spec.base.n = run.n;
    spec.base.n_features = run.n_features;
    spec.base.lambda = run.lambda;
    spec.base.activation = parse_activation(run.activation);
    spec.base.f1_sq = run.f1_sq;
    spec.base.f0_sq = run.f0_sq;
    spec.base.tau_sq = run.tau_sq;
    spec.base.n_test = run.n_test;
    spec.axis = parse_sweep_axis(run.axis);
    spec.grid = parse_grid(run.grid_text);
    spec.replications = run.replications;
    spec.master_seed = run.seed;

    const std::vector<ComparisonRecord> records = run_sweep(spec, threads);

    CsvTable table(
        "rfvar-simulate-v1",
        {"row_type",  "axis",       "axis_value", "psi1",       "psi2",
         "lambda",    "replication", "seed",       "risk",       "ppv",
         "train_error", "jitter_applied", "failed", "error",     "mean_risk",
         "se_risk",   "mean_ppv",   "se_ppv",     "sd_ppv",     "mean_train",
         "se_train",  "s2_limit",   "risk_limit", "rel_gap",    "ratio",
         "replications_done", "failures"});

    std::vector<double> scatter_x, scatter_y, mean_x, mean_y, limit_y;
    int total_successes = 0;

    for (std::size_t i = 0; i < records.size(); ++i) {
        const ComparisonRecord& rec = records[i];
        const double axis_value = spec.grid[i];
        const std::string axis_cell = format17g(axis_value);
        const std::string p1 = format17g(rec.psi1), p2 = format17g(rec.psi2),
                          lam = format17g(rec.lambda);

        for (const ReplicationRow& row : rec.rows) {
            table.add_row({"replication", run.axis, axis_cell, p1, p2, lam,
                           kv_int(row.replication), kv_u64(row.seed),
                           row.failed ? kEmpty : format17g(row.risk),
                           row.failed ? kEmpty : format17g(row.ppv),
                           row.failed ? kEmpty : format17g(row.train_error),
                           row.jitter_applied ? "1" : "0", row.failed ? "1" : "0",
                           row.error, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty,
                           kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty});
            if (!row.failed) {
                scatter_x.push_back(axis_value);
                scatter_y.push_back(row.ppv);
                ++total_successes;
            }
        }

        const double rel_gap = rec.s2_limit > 0.0 && rec.replications_done > 0
                                   ? std::abs(rec.mean_ppv - rec.s2_limit) / rec.s2_limit
                                   : std::numeric_limits<double>::quiet_NaN();
        table.add_row({"summary", run.axis, axis_cell, p1, p2, lam, kEmpty, kEmpty,
                       kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, rec.first_error,
                       format17g(rec.mean_risk), format17g(rec.se_risk),
                       format17g(rec.mean_ppv), format17g(rec.se_ppv),
                       format17g(rec.sd_ppv), format17g(rec.mean_train),
                       format17g(rec.se_train), format17g(rec.s2_limit),
                       format17g(rec.risk_limit), format17g(rel_gap), format17g(rec.ratio),
                       kv_int(rec.replications_done), kv_int(rec.failures)});
        mean_x.push_back(axis_value);
        mean_y.push_back(rec.mean_ppv);
        limit_y.push_back(rec.s2_limit);
    }

    SvgPlot plot("simulated predictive variance vs limit", run.axis,
                 "predictive variance");
    plot.set_log_x(run.axis == "lambda");
    plot.add_line("limit curve", mean_x, limit_y);
    plot.add_line("replicate mean", mean_x, mean_y);
    plot.add_scatter("replicates", scatter_x, scatter_y);

    RunOutputs out =
        finalize("simulate", run.to_kv(), run.seed, out_dir, table.str(), plot.str());
    if (total_successes == 0)
        throw NumericalError("every replication failed; first error: " +
                             (records.empty() ? std::string("empty sweep")
                                              : records.front().first_error));
    return out;
}

RatioRun RatioRun::from_config(const KeyValueConfig& config) {
    RatioRun run;
    run.activation = config.get_string("activation", run.activation);
    run.axis = config.get_string("axis", run.axis);
    run.grid_text = config.get_string("grid", run.grid_text);
    run.fixed_other = config.get_double("fixed_other", run.fixed_other);
    run.f1_sq = config.get_double("f1_sq", run.f1_sq);
    run.f0_sq = config.get_double("f0_sq", run.f0_sq);
    run.fstar_sq = config.get_double("fstar_sq", run.fstar_sq);
    run.tau_sq = config.get_double("tau_sq", run.tau_sq);
    run.proxy_threshold = config.get_double("proxy_threshold", run.proxy_threshold);
    run.ridgeless_lambda = config.get_double("ridgeless_lambda", run.ridgeless_lambda);
    run.d = config.get_int("d", run.d);
    run.replications = config.get_int("replications", run.replications);
    run.n_test = config.get_int("n_test", run.n_test);
    run.seed = config.get_u64("seed", run.seed);
    config.ensure_all_consumed();
    return run;
}

ConfigKv RatioRun::to_kv() const {
    return {{"activation", activation},
            {"axis", axis},
            {"grid", grid_text},
            {"fixed_other", format17g(fixed_other)},
            {"f1_sq", format17g(f1_sq)},
            {"f0_sq", format17g(f0_sq)},
            {"fstar_sq", format17g(fstar_sq)},
            {"tau_sq", format17g(tau_sq)},
            {"proxy_threshold", format17g(proxy_threshold)},
            {"ridgeless_lambda", format17g(ridgeless_lambda)},
            {"d", kv_int(d)},
            {"replications", kv_int(replications)},
            {"n_test", kv_int(n_test)},
            {"seed", kv_u64(seed)}};
}

RunOutputs run_ratio(const RatioRun& run, const std::string& out_dir, int threads) {
    RatioCurveSettings settings;
    settings.activation = parse_activation(run.activation);
    settings.params.f1_sq = run.f1_sq;
    settings.params.f0_sq = run.f0_sq;
    settings.params.fstar_sq = run.fstar_sq;
    settings.params.tau_sq = run.tau_sq;
    settings.axis = parse_ratio_axis(run.axis);
    settings.grid = parse_grid(run.grid_text);
    settings.fixed_other = run.fixed_other;
    settings.proxy_threshold = run.proxy_threshold;
    settings.ridgeless_lambda = run.ridgeless_lambda;
    settings.d = run.d;
    settings.replications = run.replications;
    settings.n_test = run.n_test;
    settings.master_seed = run.seed;

    const std::vector<RatioPoint> points = ratio_curve(settings, threads);

    CsvTable table("rfvar-ratio-v1",
                   {"axis", "axis_value", "psi1", "psi2", "lambda", "risk",
                    "risk_source", "s2", "excess_ppv", "ratio", "ratio_wide_formula"});
    std::vector<double> xs, ratios;
    for (const RatioPoint& pt : points) {
        table.add_row({run.axis, format17g(pt.axis_value), format17g(pt.psi1),
                       format17g(pt.psi2), format17g(pt.lambda), format17g(pt.risk),
                       pt.risk_is_empirical ? "empirical" : "formula", format17g(pt.s2),
                       format17g(pt.excess_ppv), format17g(pt.ratio),
                       format17g(pt.ratio_wide_formula)});
        xs.push_back(pt.axis_value);
        ratios.push_back(pt.ratio);
    }

    SvgPlot plot("risk to excess predictive variance", run.axis, "ratio");
    plot.add_line("measured ratio", xs, ratios);
    plot.add_line("unity", {xs.front(), xs.back()}, {1.0, 1.0});

    return finalize("ratio", run.to_kv(), run.seed, out_dir, table.str(), plot.str());
}

FluctRun FluctRun::from_config(const KeyValueConfig& config) {
    FluctRun run;
    run.d = config.get_int("d", run.d);
    run.n = config.get_int("n", run.n);
    run.lambda = config.get_double("lambda", run.lambda);
    run.activation = config.get_string("activation", run.activation);
    run.f1_sq = config.get_double("f1_sq", run.f1_sq);
    run.f0_sq = config.get_double("f0_sq", run.f0_sq);
    run.tau_sq = config.get_double("tau_sq", run.tau_sq);
    run.n_test = config.get_int("n_test", run.n_test);
    run.panels_text = config.get_string("panels", run.panels_text);
    run.replications = config.get_int("replications", run.replications);
    run.seed = config.get_u64("seed", run.seed);
    config.ensure_all_consumed();
    return run;
}

ConfigKv FluctRun::to_kv() const {
    return {{"d", kv_int(d)},
            {"n", kv_int(n)},
            {"lambda", format17g(lambda)},
            {"activation", activation},
            {"f1_sq", format17g(f1_sq)},
            {"f0_sq", format17g(f0_sq)},
            {"tau_sq", format17g(tau_sq)},
            {"n_test", kv_int(n_test)},
            {"panels", panels_text},
            {"replications", kv_int(replications)},
            {"seed", kv_u64(seed)}};
}

RunOutputs run_fluct(const FluctRun& run, const std::string& out_dir, int threads) {
    const std::vector<double> panels = parse_grid(run.panels_text);

    CsvTable table("rfvar-fluct-v1",
                   {"row_type", "psi1", "statistic", "bin_lo", "bin_hi", "count",
                    "probability", "mean", "variance", "skewness", "excess_kurtosis",
                    "jarque_bera", "overlap", "var_risk_rescaled", "var_ppv_rescaled",
                    "var_ratio", "ppv_var_smaller", "same_order"});
    SvgPlot plot("rescaled deviation histograms", "d * (x - mean)", "probability");

    for (std::size_t i = 0; i < panels.size(); ++i) {
        SimulationConfig config;
        config.d = run.d;
        config.n = run.n;
        config.n_features = int(std::lround(panels[i] * run.d));
        config.lambda = run.lambda;
        config.activation = parse_activation(run.activation);
        config.f1_sq = run.f1_sq;
        config.f0_sq = run.f0_sq;
        config.tau_sq = run.tau_sq;
        config.n_test = run.n_test;

        const FluctuationPair pair = fluctuation_pair(
            config, run.replications, derive_subseed(run.seed, i, 0), threads);

        const double psi1 = double(config.n_features) / config.d;
        const std::string p1 = format17g(psi1);

        const auto emit = [&](const FluctuationReport& report, const std::string& name) {
            const double total = pairwise_sum(report.hist.counts);
            for (std::size_t b = 0; b < report.hist.counts.size(); ++b)
                table.add_row({"hist", p1, name, format17g(report.hist.edges[b]),
                               format17g(report.hist.edges[b + 1]),
                               format17g(report.hist.counts[b]),
                               format17g(report.hist.counts[b] / total), kEmpty, kEmpty,
                               kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty,
                               kEmpty, kEmpty});
            table.add_row({"moments", p1, name, kEmpty, kEmpty,
                           kv_int(static_cast<long long>(report.count)), kEmpty,
                           format17g(report.mean),
                           format17g(report.variance), format17g(report.skewness),
                           format17g(report.excess_kurtosis),
                           format17g(report.jarque_bera_stat), kEmpty, kEmpty, kEmpty,
                           kEmpty, kEmpty, kEmpty});

            std::vector<double> probs(report.hist.counts.size());
            for (std::size_t b = 0; b < probs.size(); ++b)
                probs[b] = report.hist.counts[b] / total;
            plot.add_step(name + " (psi1 = " + p1 + ")", report.hist.edges, probs);
        };
        emit(pair.risk, "risk");
        emit(pair.excess_ppv, "excess_ppv");

        table.add_row({"overlap", p1, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty,
                       kEmpty, kEmpty, kEmpty, kEmpty, format17g(pair.overlap_value),
                       kEmpty, kEmpty, kEmpty, kEmpty, kEmpty});

        const double var_risk = sample_variance(pair.risk.rescaled);
        const double var_ppv = sample_variance(pair.excess_ppv.rescaled);
        const double ratio = var_risk > 0.0 ? var_ppv / var_risk
                                            : std::numeric_limits<double>::infinity();
        table.add_row({"variance_ordering", p1, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty,
                       kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, format17g(var_risk),
                       format17g(var_ppv), format17g(ratio), var_ppv < var_risk ? "1" : "0",
                       ratio >= 0.1 && ratio <= 10.0 ? "1" : "0"});
    }

    return finalize("fluct", run.to_kv(), run.seed, out_dir, table.str(), plot.str());
}

}  // namespace rfv
