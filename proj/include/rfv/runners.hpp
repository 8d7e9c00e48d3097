#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rfv/io/config.hpp"
#include "rfv/io/manifest.hpp"

namespace rfv {

using ConfigKv = std::vector<std::pair<std::string, std::string>>;

// Every run writes <out>/results.csv, <out>/plot.svg and <out>/manifest.json
// (out_dir empty: nothing is written, the texts are still produced).
struct RunOutputs {
    std::string csv_text;
    std::string svg_text;
    std::string csv_digest;
    std::vector<ManifestEntry> files;
};

struct CoeffsRun {
    std::string activation = "relu";
    int order = 200;

    static CoeffsRun from_config(const KeyValueConfig& config);
    ConfigKv to_kv() const;
};
RunOutputs run_coeffs(const CoeffsRun& run, const std::string& out_dir);

struct AsymptoteRun {
    std::string activation = "relu";
    std::string axis = "psi1";  // psi1 | psi2 | lambda
    std::string grid_text = "linspace:0.5:10:40";
    double psi1 = 3.0;
    double psi2 = 3.0;
    double lambda = 1e-3;
    double f1_sq = 1.0;
    double f0_sq = 0.0;
    double fstar_sq = 0.0;
    double tau_sq = 0.0;

    static AsymptoteRun from_config(const KeyValueConfig& config);
    ConfigKv to_kv() const;
};
RunOutputs run_asymptote(const AsymptoteRun& run, const std::string& out_dir);

struct SimulateRun {
    int d = 100;
    int n = 300;
    int n_features = 300;
    double lambda = 1e-3;
    std::string activation = "relu";
    double f1_sq = 1.0;
    double f0_sq = 0.0;
    double tau_sq = 0.0;
    int n_test = 2000;
    std::string axis = "n_features";  // n_features | n | lambda
    std::string grid_text = "50,100,200,300,400,600,1000";
    int replications = 20;
    std::uint64_t seed = 0;

    static SimulateRun from_config(const KeyValueConfig& config);
    ConfigKv to_kv() const;
};
RunOutputs run_simulate(const SimulateRun& run, const std::string& out_dir,
                        int threads = 1);

struct RatioRun {
    std::string activation = "relu";
    std::string axis = "psi1";  // psi1 | psi2
    std::string grid_text = "1,2,4,6,8,12,16,20";
    double fixed_other = 3.0;
    double f1_sq = 1.0;
    double f0_sq = 0.0;
    double fstar_sq = 0.0;
    double tau_sq = 0.2;
    double proxy_threshold = 100.0;
    double ridgeless_lambda = 1e-8;
    int d = 100;
    int replications = 10;
    int n_test = 1000;
    std::uint64_t seed = 0;

    static RatioRun from_config(const KeyValueConfig& config);
    ConfigKv to_kv() const;
};
RunOutputs run_ratio(const RatioRun& run, const std::string& out_dir, int threads = 1);

struct FluctRun {
    int d = 60;
    int n = 180;
    double lambda = 1e-4;
    std::string activation = "relu";
    double f1_sq = 1.0;
    double f0_sq = 0.0;
    double tau_sq = 0.2;
    int n_test = 2000;
    std::string panels_text = "1.5,3,6";  // psi1 per panel
    int replications = 2000;
    std::uint64_t seed = 0;

    static FluctRun from_config(const KeyValueConfig& config);
    ConfigKv to_kv() const;
};
RunOutputs run_fluct(const FluctRun& run, const std::string& out_dir, int threads = 1);

}  // namespace rfv
