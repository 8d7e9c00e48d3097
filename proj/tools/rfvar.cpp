#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rfv/errors.hpp"
#include "rfv/io/config.hpp"
#include "rfv/runners.hpp"

namespace {

void print_kv(const rfv::ConfigKv& kv) {
    for (const auto& entry : kv) std::cout << entry.first << " = " << entry.second << "\n";
}

void report_outputs(const rfv::RunOutputs& outputs, const std::string& out_dir) {
    for (const rfv::ManifestEntry& file : outputs.files)
        std::cout << out_dir << "/" << file.filename << "  " << file.digest << "\n";
    std::cout << out_dir << "/manifest.json\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-features ridge regression: limiting formulas, simulations and "
                 "fluctuation diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int threads = 1;
    bool print_config = false;

    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "master seed override");
    app.add_option("--threads", threads, "worker thread cap")->capture_default_str();
    app.add_flag("--print-config", print_config,
                 "print the fully resolved config and exit");

    std::string coeffs_activation;
    CLI::App* coeffs = app.add_subcommand("coeffs", "Gaussian activation coefficients");
    coeffs->add_option("activation", coeffs_activation,
                       "relu | tanh | linear | shifted_relu:<c>");
    CLI::App* asymptote =
        app.add_subcommand("asymptote", "limiting curves over a parameter grid");
    CLI::App* simulate =
        app.add_subcommand("simulate", "replicated sweeps compared to the limits");
    CLI::App* ratio = app.add_subcommand("ratio", "risk to excess predictive variance");
    CLI::App* fluct = app.add_subcommand("fluct", "fluctuation histograms and overlap");
    for (CLI::App* sub : {coeffs, asymptote, simulate, ratio, fluct}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const rfv::KeyValueConfig config = config_path.empty()
                                               ? rfv::KeyValueConfig::from_text("")
                                               : rfv::KeyValueConfig::from_file(config_path);
        if (threads < 1) throw rfv::UsageError("--threads must be at least 1");

        if (coeffs->parsed()) {
            rfv::CoeffsRun run = rfv::CoeffsRun::from_config(config);
            if (!coeffs_activation.empty()) run.activation = coeffs_activation;
            if (print_config) {
                print_kv(run.to_kv());
                return 0;
            }
            const rfv::RunOutputs outputs = rfv::run_coeffs(run, out_dir);
            std::cout << outputs.csv_text;
            return 0;
        }
        if (asymptote->parsed()) {
            const rfv::AsymptoteRun run = rfv::AsymptoteRun::from_config(config);
            if (print_config) {
                print_kv(run.to_kv());
                return 0;
            }
            report_outputs(rfv::run_asymptote(run, out_dir), out_dir);
            return 0;
        }
        if (simulate->parsed()) {
            rfv::SimulateRun run = rfv::SimulateRun::from_config(config);
            if (seed_opt->count()) run.seed = seed;
            if (print_config) {
                print_kv(run.to_kv());
                return 0;
            }
            report_outputs(rfv::run_simulate(run, out_dir, threads), out_dir);
            return 0;
        }
        if (ratio->parsed()) {
            rfv::RatioRun run = rfv::RatioRun::from_config(config);
            if (seed_opt->count()) run.seed = seed;
            if (print_config) {
                print_kv(run.to_kv());
                return 0;
            }
            report_outputs(rfv::run_ratio(run, out_dir, threads), out_dir);
            return 0;
        }
        if (fluct->parsed()) {
            rfv::FluctRun run = rfv::FluctRun::from_config(config);
            if (seed_opt->count()) run.seed = seed;
            if (print_config) {
                print_kv(run.to_kv());
                return 0;
            }
            report_outputs(rfv::run_fluct(run, out_dir, threads), out_dir);
            return 0;
        }
        throw rfv::UsageError("no subcommand selected");
    } catch (const rfv::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
