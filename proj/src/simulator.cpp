#include "rfv/simulator.hpp"

#include <cmath>
#include <string>

#include "rfv/errors.hpp"

namespace rfv {
namespace {

// Residual acceptance threshold for the normal equations, relative to |rhs|.
constexpr double kResidualTol = 1e-8;
constexpr double kJitter = 1e-12;

Eigen::MatrixXd feature_matrix(const Eigen::MatrixXd& inputs, const FeatureSet& features,
                               const Activation& act) {
    const int d = static_cast<int>(features.theta.cols());
    Eigen::MatrixXd S = inputs * features.theta.transpose() / std::sqrt(double(d));
    return S.unaryExpr([&act](double v) { return act(v); });
}

struct SolveOutcome {
    RidgeFit fit;
    bool ok = false;
    double residual = 0.0;
    double rhs_norm = 0.0;
};

SolveOutcome try_ridge(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, int d,
                       double lambda, double extra_diag) {
    const int n = static_cast<int>(Z.rows());
    const int N = static_cast<int>(Z.cols());
    const double gamma =
        (double(N) / d) * (double(n) / d) * lambda + extra_diag;
    const double sqrt_d = std::sqrt(double(d));

    SolveOutcome out;
    out.fit.path = (N <= n) ? RidgeFit::Path::primal : RidgeFit::Path::dual;
    out.fit.ridge_constant = gamma;
    out.fit.d = d;
    out.fit.n = n;
    out.fit.n_features = N;

    const Eigen::VectorXd rhs = Z.transpose() * y / sqrt_d;
    out.rhs_norm = rhs.norm();

    const double target = kResidualTol * std::max(out.rhs_norm, 1e-300);

    // Refinement runs until the normal-equation residual meets the invariant;
    // near the interpolation boundary one pass is not always enough.
    if (out.fit.path == RidgeFit::Path::primal) {
        Eigen::MatrixXd G = Z.transpose() * Z;
        G.diagonal().array() += gamma;
        out.fit.llt.compute(G);
        if (out.fit.llt.info() != Eigen::Success) return out;
        Eigen::VectorXd a = out.fit.llt.solve(rhs);
        out.residual = (G * a - rhs).norm();
        for (int pass = 0; pass < 4 && out.residual > target; ++pass) {
            a += out.fit.llt.solve(rhs - G * a);
            out.residual = (G * a - rhs).norm();
        }
        out.fit.a_hat = std::move(a);
    } else {
        Eigen::MatrixXd C = Z * Z.transpose();
        C.diagonal().array() += gamma;
        out.fit.llt.compute(C);
        if (out.fit.llt.info() != Eigen::Success) return out;
        Eigen::VectorXd w = out.fit.llt.solve(y);
        // (Z^T Z + cI) a - rhs = Z^T (C w - y) / sqrt(d) by push-through.
        out.residual = (Z.transpose() * (C * w - y)).norm() / sqrt_d;
        for (int pass = 0; pass < 4 && out.residual > target; ++pass) {
            w += out.fit.llt.solve(y - C * w);
            out.residual = (Z.transpose() * (C * w - y)).norm() / sqrt_d;
        }
        out.fit.a_hat = Z.transpose() * w / sqrt_d;
    }
    out.ok = out.residual <= target;
    return out;
}

double mean_quadratic_form(const RidgeFit& fit, const Eigen::MatrixXd& Z,
                           const Eigen::MatrixXd& S_test) {
    const int m = static_cast<int>(S_test.rows());
    const double d = fit.d;
    if (fit.path == RidgeFit::Path::primal) {
        const Eigen::MatrixXd St = S_test.transpose();
        const Eigen::MatrixXd T = fit.llt.solve(St);
        const double total = St.cwiseProduct(T).sum();
        return total / (d * m);
    }
    const Eigen::MatrixXd W = Z * S_test.transpose();
    const Eigen::MatrixXd V = fit.llt.solve(W);
    const double cross = W.cwiseProduct(V).sum();
    const double direct = S_test.cwiseProduct(S_test).sum();
    return (direct - cross) / (fit.ridge_constant * d * m);
}

}  // namespace

void SimulationConfig::validate() const {
    if (d < 1 || n < 1 || n_features < 1)
        throw ConfigError("d, n and n_features must be positive");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (n_test < 1) throw ConfigError("n_test must be positive");
    if (f1_sq < 0.0 || f0_sq < 0.0 || tau_sq < 0.0)
        throw ConfigError("energies must be nonnegative");
}

Eigen::MatrixXd sample_sphere(int count, int d, RngStream& stream) {
    Eigen::MatrixXd rows(count, d);
    const double radius = std::sqrt(double(d));
    for (int i = 0; i < count; ++i) {
        double norm_sq = 0.0;
        do {
            for (int j = 0; j < d; ++j) {
                const double g = stream.normal();
                rows(i, j) = g;
            }
            norm_sq = rows.row(i).squaredNorm();
        } while (!(norm_sq > 0.0));  // zero draw has probability zero
        rows.row(i) *= radius / std::sqrt(norm_sq);
    }
    return rows;
}

SyntheticDataset generate_dataset(const SimulationConfig& config,
                                  RngStream& data_stream, RngStream& noise_stream) {
    SyntheticDataset ds;
    ds.seed = config.seed;
    ds.beta0 = std::sqrt(config.f0_sq);

    ds.beta = Eigen::VectorXd::Zero(config.d);
    if (config.f1_sq > 0.0) {
        double norm_sq = 0.0;
        do {
            for (int j = 0; j < config.d; ++j) ds.beta(j) = data_stream.normal();
            norm_sq = ds.beta.squaredNorm();
        } while (!(norm_sq > 0.0));
        ds.beta *= std::sqrt(config.f1_sq / norm_sq);
    }

    ds.inputs = sample_sphere(config.n, config.d, data_stream);
    ds.responses = ds.inputs * ds.beta;
    ds.responses.array() += ds.beta0;
    if (config.tau_sq > 0.0) {
        const double tau = std::sqrt(config.tau_sq);
        for (int i = 0; i < config.n; ++i) ds.responses(i) += tau * noise_stream.normal();
    }
    return ds;
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& inputs, const FeatureSet& features,
                              const Activation& act) {
    const int d = static_cast<int>(inputs.cols());
    return feature_matrix(inputs, features, act) / std::sqrt(double(d));
}

RidgeFit ridge_fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, int d,
                   double lambda) {
    if (Z.rows() != y.size()) throw ConfigError("Z and y disagree on sample count");
    if (d < 1) throw ConfigError("dimension must be positive");
    if (!(lambda > 0.0)) throw ConfigError("ridge level must be positive");
    SolveOutcome out = try_ridge(Z, y, d, lambda, 0.0);
    if (!out.ok) {
        out = try_ridge(Z, y, d, lambda, kJitter);
        out.fit.jitter_applied = true;
        if (!out.ok)
            throw FactorizationFailure(
                "ridge normal equations failed (residual " +
                std::to_string(out.residual) + " vs rhs norm " +
                std::to_string(out.rhs_norm) + ", jitter retry exhausted)");
    }
    return std::move(out.fit);
}

double empirical_risk(const RidgeFit& fit, const FeatureSet& features,
                      const Activation& act, const Eigen::MatrixXd& test_inputs,
                      const Eigen::VectorXd& beta, double beta0) {
    const Eigen::MatrixXd S_test = feature_matrix(test_inputs, features, act);
    Eigen::VectorXd truth = test_inputs * beta;
    truth.array() += beta0;
    const Eigen::VectorXd preds = S_test * fit.a_hat;
    return (truth - preds).squaredNorm() / double(test_inputs.rows());
}

std::pair<double, double> empirical_ppv(const RidgeFit& fit, const Eigen::MatrixXd& Z,
                                        const Eigen::VectorXd& y,
                                        const FeatureSet& features, const Activation& act,
                                        const Eigen::MatrixXd& test_inputs) {
    const double sqrt_d = std::sqrt(double(fit.d));
    const double train =
        y.dot(y - sqrt_d * (Z * fit.a_hat)) / double(y.size());
    const Eigen::MatrixXd S_test = feature_matrix(test_inputs, features, act);
    const double q_bar = mean_quadratic_form(fit, Z, S_test);
    return {train * (1.0 + q_bar), train};
}

ReplicationSample run_replication(const SimulationConfig& config) {
    config.validate();

    RngStream data_stream(derive_stream_key(config.seed, 0, StreamPurpose::data));
    RngStream features_stream(derive_stream_key(config.seed, 0, StreamPurpose::features));
    RngStream noise_stream(derive_stream_key(config.seed, 0, StreamPurpose::noise));
    RngStream test_stream(derive_stream_key(config.seed, 0, StreamPurpose::test));

    const SyntheticDataset ds = generate_dataset(config, data_stream, noise_stream);
    FeatureSet features;
    features.seed = config.seed;
    features.theta = sample_sphere(config.n_features, config.d, features_stream);
    const Eigen::MatrixXd test_inputs = sample_sphere(config.n_test, config.d, test_stream);

    const Eigen::MatrixXd Z = design_matrix(ds.inputs, features, config.activation);
    const RidgeFit fit = ridge_fit(Z, ds.responses, config.d, config.lambda);

    // Shared feature evaluations for both test-set statistics.
    const Eigen::MatrixXd S_test = feature_matrix(test_inputs, features, config.activation);

    ReplicationSample sample;
    sample.seed = config.seed;
    sample.jitter_applied = fit.jitter_applied;

    Eigen::VectorXd truth = test_inputs * ds.beta;
    truth.array() += ds.beta0;
    sample.risk = (truth - S_test * fit.a_hat).squaredNorm() / double(config.n_test);

    const double sqrt_d = std::sqrt(double(config.d));
    sample.train_error =
        ds.responses.dot(ds.responses - sqrt_d * (Z * fit.a_hat)) / double(config.n);
    const double q_bar = mean_quadratic_form(fit, Z, S_test);
    sample.ppv = sample.train_error * (1.0 + q_bar);
    return sample;
}

}  // namespace rfv
