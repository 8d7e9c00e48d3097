// Release gate: one check per shipped guarantee, each printing a single
// [PASS]/[FAIL] line with the measured margins. Tolerances are pinned here,
// not configurable. Run with a criterion number 1..9, or no argument for all.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rfv/activation.hpp"
#include "rfv/asymptotics.hpp"
#include "rfv/errors.hpp"
#include "rfv/experiments.hpp"
#include "rfv/rng.hpp"
#include "rfv/runners.hpp"
#include "rfv/simulator.hpp"
#include "rfv/stats.hpp"

using namespace rfv;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
// coeffs relu within 1e-6 of the analytic Gaussian integrals, < 1 s.
Outcome criterion1() {
    const RunOutputs out = run_coeffs(CoeffsRun{}, "");
    // Row layout: activation,mu0,mu1,mu_star_sq,zeta on the third line.
    std::istringstream stream(out.csv_text);
    std::string line, row;
    while (std::getline(stream, line)) {
        if (!line.empty() && line[0] != '#' && line.rfind("activation", 0) != 0) row = line;
    }
    double mu0 = 0.0, mu1 = 0.0, mu_star_sq = 0.0;
    {
        std::istringstream cells(row);
        std::string cell;
        std::getline(cells, cell, ',');  // activation
        std::getline(cells, cell, ',');
        mu0 = std::strtod(cell.c_str(), nullptr);
        std::getline(cells, cell, ',');
        mu1 = std::strtod(cell.c_str(), nullptr);
        std::getline(cells, cell, ',');
        mu_star_sq = std::strtod(cell.c_str(), nullptr);
    }
    const double e0 = std::abs(mu0 - 1.0 / std::sqrt(2.0 * kPi));
    const double e1 = std::abs(mu1 - 0.5);
    const double e2 = std::abs(mu_star_sq - (0.25 - 1.0 / (2.0 * kPi)));
    Outcome outcome;
    outcome.pass = e0 <= 1e-6 && e1 <= 1e-6 && e2 <= 1e-6;
    outcome.detail = "relu coefficient errors vs closed forms: " + fmt(e0) + ", " +
                     fmt(e1) + ", " + fmt(e2) + " (tolerance 1e-6 each)";
    return outcome;
}

// ---------------------------------------------------------------- criterion 2
// 5x5x5 grid: residual <= 1e-12, Im nu > 0, chi <= 0, and the predictive
// variance factorization to 1e-8 relative.
Outcome criterion2() {
    const ActivationCoefficients coeffs = gaussian_coefficients(Activation::relu());
    ModelParams params;
    params.f1_sq = 1.0;
    params.fstar_sq = 0.3;
    params.tau_sq = 0.1;
    const std::vector<double> psis = {0.5, 1.0, 2.0, 3.0, 6.0};
    const std::vector<double> lambdas = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    double worst_residual = 0.0, worst_identity = 0.0, worst_chi = -1.0;
    bool half_plane_ok = true;
    for (double p1 : psis) {
        for (double p2 : psis) {
            for (double lam : lambdas) {
                const ShapeRatios ratios{p1, p2};
                const double t =
                    std::sqrt(p1 * p2 * lam) / std::sqrt(coeffs.mu_star_sq);
                const FixedPointSolution sol =
                    solve_nu_imaginary(ratios, coeffs.zeta, t);
                worst_residual = std::max(worst_residual, sol.residual);
                worst_chi = std::max(worst_chi, sol.chi);
                if (sol.nu1.imag() <= 0.0 || sol.nu2.imag() <= 0.0)
                    half_plane_ok = false;
                const double s2 = ppv_limit(params, ratios, coeffs, lam);
                const double train = training_error_limit(params, ratios, coeffs, lam);
                const double r = resolvent_trace_limit(ratios, coeffs, lam);
                worst_identity = std::max(
                    worst_identity, std::abs(s2 - train * (1.0 + r)) / std::abs(s2));
            }
        }
    }
    Outcome outcome;
    outcome.pass = worst_residual <= 1e-12 && half_plane_ok && worst_chi <= 0.0 &&
                   worst_identity <= 1e-8;
    outcome.detail = "125 grid points: max residual " + fmt(worst_residual) +
                     " (<= 1e-12), Im nu > 0 " + (half_plane_ok ? "held" : "VIOLATED") +
                     ", max chi " + fmt(worst_chi) + " (<= 0), worst factorization gap " +
                     fmt(worst_identity) + " rel (<= 1e-8)";
    return outcome;
}

// ---------------------------------------------------------------- criterion 3
// Ridge monotonicity of the predictive variance limit on a 50-point log grid,
// plus the boundary clause: at psi1 = psi2 = 3 the 1e-8 vs 1e-6 values must
// agree to 1e-3 relative.
Outcome criterion3() {
    const ActivationCoefficients coeffs = gaussian_coefficients(Activation::relu());
    ModelParams params;
    params.f1_sq = 1.0;
    bool monotone = true;
    double worst_drop = 0.0;
    for (const ShapeRatios& r :
         {ShapeRatios{3.0, 3.0}, ShapeRatios{6.0, 3.0}, ShapeRatios{1.0, 3.0}}) {
        double prev = -1.0;
        for (int i = 0; i < 50; ++i) {
            const double lam = std::pow(10.0, -8.0 + 9.0 * i / 49.0);
            const double s2 = ppv_limit(params, r, coeffs, lam);
            if (prev >= 0.0 && s2 < prev - 1e-12) {
                monotone = false;
                worst_drop = std::max(worst_drop, prev - s2);
            }
            prev = s2;
        }
    }
    const ShapeRatios boundary{3.0, 3.0};
    const double a = ppv_limit(params, boundary, coeffs, 1e-8);
    const double b = ppv_limit(params, boundary, coeffs, 1e-6);
    const double rel = std::abs(a - b) / b;
    Outcome outcome;
    outcome.pass = monotone && rel < 1e-3;
    outcome.detail = std::string("monotone on all three slices: ") +
                     (monotone ? "yes" : ("NO, worst drop " + fmt(worst_drop))) +
                     "; boundary (3,3) gap |S2(1e-8)-S2(1e-6)|/S2(1e-6) = " + fmt(rel) +
                     " (required < 1e-3; the boundary limit is approached at sqrt(lambda)"
                     " rate, so this clause measures ~5e-3)";
    return outcome;
}

// ---------------------------------------------------------------- criterion 4
// Phase transition at psi2 = 3 with the relu zeta. Ridge levels are quoted in
// unbarred units and divided by mu_star_sq when fed to the closed forms.
Outcome criterion4() {
    const ActivationCoefficients coeffs = gaussian_coefficients(Activation::relu());
    const double z = coeffs.zeta;
    const double psi2 = 3.0;
    const double rs = rho_star(z, psi2);
    const ShapeRatios wide_ratios{1e4, psi2};
    std::ostringstream detail;
    bool pass = true;

    // Shared log grid over the unbarred ridge level.
    const int grid_n = 120;
    std::vector<double> grid(grid_n);
    for (int i = 0; i < grid_n; ++i)
        grid[i] = std::pow(10.0, -6.0 + 7.0 * i / (grid_n - 1.0));
    const double log_step = 7.0 / (grid_n - 1.0) * std::log(10.0);

    auto grid_argmin = [&](double rho, const ModelParams& params) {
        int best = 0;
        double best_value = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid_n; ++i) {
            const double value =
                risk_wide(rho, z, psi2, grid[i] / coeffs.mu_star_sq, params);
            if (value < best_value) {
                best_value = value;
                best = i;
            }
        }
        return best;
    };

    {  // (a) low snr: interior minimizer matching lambda_opt, identity at 1e4.
        const double rho = 0.9 * rs;
        ModelParams params;
        params.f1_sq = 1.0;
        params.tau_sq = 1.0 / rho;
        const double lam_opt = lambda_opt_bar(rho, z, psi2) * coeffs.mu_star_sq;
        const int best = grid_argmin(rho, params);
        const double log_gap = std::abs(std::log(grid[best]) - std::log(lam_opt));
        const bool interior = best > 0 && best < grid_n - 1;
        const bool matches = log_gap <= 1.05 * log_step;
        const double risk_at_opt =
            risk_wide(rho, z, psi2, lam_opt / coeffs.mu_star_sq, params);
        const double s2_at_opt =
            ppv_limit(params, wide_ratios, coeffs, lam_opt) - params.tau_sq;
        const double rel_a = std::abs(risk_at_opt - s2_at_opt) / std::abs(s2_at_opt);
        pass = pass && interior && matches && rel_a <= 1e-3;
        detail << "(a) rho=0.9rho*: argmin lambda " << fmt(grid[best]) << " vs opt "
               << fmt(lam_opt) << ", log gap " << fmt(log_gap) << " <= step "
               << fmt(log_step) << "; risk vs excess ppv rel gap " << fmt(rel_a)
               << " (<= 1e-3). ";
    }

    {  // (b) high snr: minimizer pinned at the smallest grid ridge.
        const double rho = 1.1 * rs;
        ModelParams params;
        params.f1_sq = 1.0;
        params.tau_sq = 1.0 / rho;
        const int best = grid_argmin(rho, params);
        const double risk_small =
            risk_wide(rho, z, psi2, 1e-8 / coeffs.mu_star_sq, params);
        const double s2_small =
            ppv_limit(params, wide_ratios, coeffs, 1e-8) - params.tau_sq;
        const double margin = s2_small - risk_small;
        pass = pass && best == 0 && margin > 0.0;
        detail << "(b) rho=1.1rho*: argmin index " << best
               << " (want 0), ridgeless margin excess_ppv - risk = " << fmt(margin)
               << " (> 0). ";
    }

    {  // (c) large-sample closed form against the psi2 = 1e4 fixed point.
        ModelParams params;
        params.f1_sq = 1.0;
        params.tau_sq = 1.0 / (0.9 * rs);
        const double lsamp =
            risk_large_sample(z, 3.0, 1e-8 / coeffs.mu_star_sq, params);
        const double s2 =
            ppv_limit(params, {3.0, 1e4}, coeffs, 1e-8) - params.tau_sq;
        const double rel_c = std::abs(lsamp - s2) / std::abs(s2);
        pass = pass && rel_c <= 1e-3;
        detail << "(c) large-sample identity rel gap " << fmt(rel_c) << " (<= 1e-3)";
    }

    return {pass, detail.str()};
}

// ---------------------------------------------------------------- criterion 5
// Simulation vs limit, d = 100, n = 300, ridge 1e-3, 20 replications: mean
// predictive variance within 10% of the limit at every non-boundary point.
Outcome criterion5() {
    SweepSpec spec;
    spec.base.d = 100;
    spec.base.n = 300;
    spec.base.lambda = 1e-3;
    spec.base.f1_sq = 1.0;
    spec.base.tau_sq = 0.0;
    spec.base.n_test = 2000;
    spec.axis = SweepAxis::n_features;
    spec.grid = {50, 100, 200, 300, 400, 600, 1000};
    spec.replications = 20;
    spec.master_seed = 11;
    const auto records = run_sweep(spec);
    std::ostringstream detail;
    bool pass = true;
    detail << "rel gap |mean ppv - limit|/limit per N (tolerance 0.10 off-boundary): ";
    for (const auto& rec : records) {
        const double gap = std::abs(rec.mean_ppv - rec.s2_limit) / rec.s2_limit;
        const bool boundary = rec.psi1 == rec.psi2;
        if (!boundary && gap > 0.10) pass = false;
        if (rec.failures > 0) pass = false;
        detail << "N=" << int(rec.psi1 * 100) << ": " << fmt(gap, 3)
               << (boundary ? " (boundary, exempt)" : "") << "  ";
    }
    return {pass, detail.str()};
}

// ---------------------------------------------------------------- criterion 6
// Same sweep, ridgeless: interpolation (tiny train error wherever N > n) and
// boundary instability (replicate spread peaks at psi1 = psi2).
Outcome criterion6() {
    SweepSpec spec;
    spec.base.d = 100;
    spec.base.n = 300;
    spec.base.lambda = 1e-8;
    spec.base.f1_sq = 1.0;
    spec.base.tau_sq = 0.0;
    spec.base.n_test = 2000;
    spec.axis = SweepAxis::n_features;
    spec.grid = {50, 100, 200, 300, 400, 600, 1000};
    spec.replications = 20;
    spec.master_seed = 11;
    const auto records = run_sweep(spec);
    // Var(y) = f1_sq = 1 for the noiseless linear target on the sphere.
    const double var_y = spec.base.f1_sq;
    double max_train = 0.0;
    double sd_boundary = -1.0, sd_double = -1.0;
    int failures = 0;
    for (const auto& rec : records) {
        failures += rec.failures;
        const int N = int(rec.psi1 * 100);
        if (N > spec.base.n) {
            for (const auto& row : rec.rows) {
                if (!row.failed) max_train = std::max(max_train, row.train_error);
            }
        }
        if (N == 300) sd_boundary = rec.sd_ppv;
        if (N == 600) sd_double = rec.sd_ppv;
    }
    const bool interpolates = max_train / var_y <= 1e-6;
    const bool unstable = sd_boundary > sd_double;
    Outcome outcome;
    outcome.pass = interpolates && unstable && failures == 0;
    outcome.detail = "max train error/Var(y) over N > n replicates: " + fmt(max_train) +
                     " (<= 1e-6); ppv replicate sd at boundary " + fmt(sd_boundary) +
                     " vs at 2x samples " + fmt(sd_double) + " (must exceed); " +
                     std::to_string(failures) + " failed replications";
    return outcome;
}

// ---------------------------------------------------------------- criterion 7
// Risk to excess predictive variance below one across psi1 in [1, 20] at
// rho = 5, psi2 = 3, ridge chosen per phase.
Outcome criterion7() {
    RatioCurveSettings settings;
    settings.params.f1_sq = 1.0;
    settings.params.tau_sq = 0.2;
    settings.axis = RatioAxis::psi1;
    settings.grid = {1, 2, 4, 6, 8, 12, 16, 20};
    settings.fixed_other = 3.0;
    settings.proxy_threshold = 100.0;
    settings.ridgeless_lambda = 1e-8;
    settings.d = 100;
    settings.replications = 10;
    settings.n_test = 1000;
    settings.master_seed = 0;
    const auto points = ratio_curve(settings);
    std::ostringstream detail;
    bool pass = true;
    detail << "measured ratio per psi1 (required < 1 everywhere; wide-limit formula "
              "value in parentheses): ";
    for (const auto& p : points) {
        if (!(p.ratio < 1.0)) pass = false;
        detail << fmt(p.axis_value, 3) << ": " << fmt(p.ratio, 3) << " ("
               << fmt(p.ratio_wide_formula, 3) << ")  ";
    }
    detail << "-- empirical finite-size risk at d = 100 sits above the excess ppv "
              "for psi1 below ~psi2, where risk >= its large-sample limit = the "
              "min(psi1, psi2) plateau of the excess ppv";
    return {pass, detail.str()};
}

// ---------------------------------------------------------------- criterion 8
// Fluctuation study at d = 60, n = 180: overlap minimized at the boundary
// panel, JB self-calibration inside 1% +/- 1pp, variance table recorded.
Outcome criterion8() {
    std::ostringstream detail;
    bool pass = true;

    SimulationConfig base;
    base.d = 60;
    base.n = 180;
    base.lambda = 1e-4;
    base.f1_sq = 1.0;
    base.tau_sq = 0.2;
    base.n_test = 2000;
    const std::vector<int> panels = {90, 180, 360};  // psi1 = 1.5, 3, 6
    std::vector<double> overlaps;
    std::vector<VarianceOrderingRow> var_rows;
    for (std::size_t k = 0; k < panels.size(); ++k) {
        SimulationConfig config = base;
        config.n_features = panels[k];
        const FluctuationPair pair =
            fluctuation_pair(config, 2000, derive_subseed(0, k, 0));
        overlaps.push_back(pair.overlap_value);
        VarianceOrderingRow row;
        row.psi1 = double(panels[k]) / base.d;
        row.psi2 = double(base.n) / base.d;
        row.lambda = base.lambda;
        row.var_risk_rescaled = sample_variance(pair.risk.rescaled);
        row.var_ppv_rescaled = sample_variance(pair.excess_ppv.rescaled);
        row.ratio = row.var_ppv_rescaled / row.var_risk_rescaled;
        var_rows.push_back(row);
    }
    const bool min_at_boundary = overlaps[1] < overlaps[0] && overlaps[1] < overlaps[2];
    pass = pass && min_at_boundary;
    detail << "(a) overlap per panel psi1={1.5,3,6}: " << fmt(overlaps[0], 3) << ", "
           << fmt(overlaps[1], 3) << ", " << fmt(overlaps[2], 3)
           << " (middle must be smallest). ";

    const double jb_rate = jb_rejection_rate(2000, 10000, 7);
    const bool jb_ok = jb_rate >= 0.0 && jb_rate <= 0.02;
    pass = pass && jb_ok;
    detail << "(b) JB null rejection at the 1% cutoff: " << fmt(jb_rate, 3)
           << " over 10000 trials of 2000 draws (required within [0, 0.02]). ";

    detail << "(c) variance table (recorded, not asserted):";
    for (const auto& row : var_rows) {
        detail << " [psi1=" << fmt(row.psi1, 3)
               << " var_risk=" << fmt(row.var_risk_rescaled, 3)
               << " var_ppv=" << fmt(row.var_ppv_rescaled, 3)
               << " ratio=" << fmt(row.ratio, 3) << "]";
    }
    return {pass, detail.str()};
}

// ---------------------------------------------------------------- criterion 9
// Byte-identical csv digests across thread counts for the criterion 5 sweep
// and a criterion 8 shaped fluctuation run (600 replications to fit the
// timeout; threading and aggregation are scale-free).
Outcome criterion9() {
    SimulateRun sim;
    sim.d = 100;
    sim.n = 300;
    sim.lambda = 1e-3;
    sim.tau_sq = 0.0;
    sim.n_test = 2000;
    sim.grid_text = "50,100,200,300,400,600,1000";
    sim.replications = 20;
    sim.seed = 11;
    const std::string sim_digest_1 = run_simulate(sim, "", 1).csv_digest;
    const std::string sim_digest_3 = run_simulate(sim, "", 3).csv_digest;

    FluctRun fluct;
    fluct.d = 60;
    fluct.n = 180;
    fluct.lambda = 1e-4;
    fluct.tau_sq = 0.2;
    fluct.n_test = 2000;
    fluct.panels_text = "1.5,3,6";
    fluct.replications = 600;
    fluct.seed = 0;
    const std::string fluct_digest_1 = run_fluct(fluct, "", 1).csv_digest;
    const std::string fluct_digest_3 = run_fluct(fluct, "", 3).csv_digest;

    Outcome outcome;
    outcome.pass = sim_digest_1 == sim_digest_3 && fluct_digest_1 == fluct_digest_3;
    outcome.detail = "sweep digest " + sim_digest_1 + " (threads 1) vs " + sim_digest_3 +
                     " (threads 3); fluct digest " + fluct_digest_1 + " vs " +
                     fluct_digest_3;
    return outcome;
}

Outcome run_criterion(int n) {
    switch (n) {
        case 1: return criterion1();
        case 2: return criterion2();
        case 3: return criterion3();
        case 4: return criterion4();
        case 5: return criterion5();
        case 6: return criterion6();
        case 7: return criterion7();
        case 8: return criterion8();
        case 9: return criterion9();
        default: return {false, "unknown criterion"};
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    if (argc > 1) {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > 9) {
            std::cerr << "usage: acceptance [1..9]\n";
            return 2;
        }
        selected.push_back(n);
    } else {
        for (int n = 1; n <= 9; ++n) selected.push_back(n);
    }

    bool all_pass = true;
    for (int n : selected) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = run_criterion(n);
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion " << n << " ("
                  << fmt(seconds, 3) << " s): " << outcome.detail << "\n";
        if (!outcome.pass) all_pass = false;
    }
    return all_pass ? 0 : 1;
}
