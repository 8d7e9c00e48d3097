#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cstdint>
#include <utility>

#include "rfv/activation.hpp"
#include "rfv/rng.hpp"

namespace rfv {

struct SimulationConfig {
    int d = 100;
    int n = 300;
    int n_features = 300;
    double lambda = 1e-3;
    Activation activation = Activation::relu();
    double f1_sq = 1.0;   // squared norm of the linear coefficient vector
    double f0_sq = 0.0;   // squared intercept
    double tau_sq = 0.0;  // response noise variance
    int n_test = 2000;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticDataset {
    Eigen::MatrixXd inputs;     // n x d, rows on the sphere of radius sqrt(d)
    Eigen::VectorXd responses;  // n
    Eigen::VectorXd beta;       // d, norm sqrt(f1_sq)
    double beta0 = 0.0;
    std::uint64_t seed = 0;
};

struct FeatureSet {
    Eigen::MatrixXd theta;  // N x d, rows on the sphere of radius sqrt(d)
    std::uint64_t seed = 0;
};

// count x d matrix of rows drawn uniformly on the sphere of radius sqrt(d).
Eigen::MatrixXd sample_sphere(int count, int d, RngStream& stream);

SyntheticDataset generate_dataset(const SimulationConfig& config,
                                  RngStream& data_stream, RngStream& noise_stream);

// Z = sigma(X theta^T / sqrt(d)) / sqrt(d), n x N.
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& inputs, const FeatureSet& features,
                              const Activation& act);

// Ridge solution a_hat = (Z^T Z + c I)^{-1} Z^T y / sqrt(d) with
// c = (N/d)(n/d)lambda. Factorizes the smaller Gram matrix: N x N when
// N <= n, else the n x n kernel side via the push-through identity. The
// factorization is cached for later quadratic forms.
struct RidgeFit {
    enum class Path { primal, dual };

    Eigen::VectorXd a_hat;
    Path path = Path::primal;
    double ridge_constant = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt;  // of Z^T Z + cI (primal) or Z Z^T + cI (dual)
    bool jitter_applied = false;
    int d = 0, n = 0, n_features = 0;
};

RidgeFit ridge_fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, int d,
                   double lambda);

// Mean squared gap between the noiseless target beta0 + <x, beta> and the
// fitted predictor over the given test inputs.
double empirical_risk(const RidgeFit& fit, const FeatureSet& features,
                      const Activation& act, const Eigen::MatrixXd& test_inputs,
                      const Eigen::VectorXd& beta, double beta0);

// Returns {ppv, train_error}:
//   train_error = <y, y - sqrt(d) Z a_hat> / n
//   ppv         = train_error * (1 + mean_x q(x)),
// q(x) the ridge-resolvent quadratic form of the unscaled feature vector.
std::pair<double, double> empirical_ppv(const RidgeFit& fit, const Eigen::MatrixXd& Z,
                                        const Eigen::VectorXd& y,
                                        const FeatureSet& features, const Activation& act,
                                        const Eigen::MatrixXd& test_inputs);

struct ReplicationSample {
    double risk = 0.0;
    double ppv = 0.0;
    double train_error = 0.0;
    std::uint64_t seed = 0;
    bool jitter_applied = false;
};

// Draws a fresh dataset, feature set and test set from streams derived from
// config.seed, fits, and evaluates risk and predictive variance on shared
// test inputs. Bit-deterministic for a fixed config.
ReplicationSample run_replication(const SimulationConfig& config);

}  // namespace rfv
