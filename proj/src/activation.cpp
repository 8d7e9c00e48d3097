#include "rfv/activation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rfv/errors.hpp"
#include "rfv/rng.hpp"

namespace rfv {
namespace {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come from
// the first components of its eigenvectors.
QuadRule golub_welsch(const std::vector<double>& offdiag, double weight_total) {
    const int n = static_cast<int>(offdiag.size()) + 1;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        jacobi(k, k + 1) = offdiag[static_cast<size_t>(k)];
        jacobi(k + 1, k) = offdiag[static_cast<size_t>(k)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    QuadRule rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<size_t>(i)] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[static_cast<size_t>(i)] = weight_total * v0 * v0;
    }
    return rule;
}

// Physicists' Hermite rule (weight exp(-x^2), total sqrt(pi)).
QuadRule gauss_hermite(int order) {
    std::vector<double> off(static_cast<size_t>(order - 1));
    for (int k = 1; k < order; ++k) off[static_cast<size_t>(k - 1)] = std::sqrt(k / 2.0);
    return golub_welsch(off, std::sqrt(kPi));
}

// Legendre rule on [-1, 1] (weight 1, total 2).
QuadRule gauss_legendre(int order) {
    std::vector<double> off(static_cast<size_t>(order - 1));
    for (int k = 1; k < order; ++k)
        off[static_cast<size_t>(k - 1)] = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(off, 2.0);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

}  // namespace

double Activation::operator()(double x) const {
    switch (kind) {
        case ActivationKind::relu:
            return x > 0.0 ? x : 0.0;
        case ActivationKind::tanh_:
            return std::tanh(x);
        case ActivationKind::shifted_relu:
            return x > shift ? x - shift : 0.0;
        case ActivationKind::linear:
            return x;
    }
    return 0.0;
}

std::vector<double> Activation::breakpoints() const {
    switch (kind) {
        case ActivationKind::relu:
            return {0.0};
        case ActivationKind::shifted_relu:
            return {shift};
        default:
            return {};
    }
}

std::string Activation::name() const {
    switch (kind) {
        case ActivationKind::relu:
            return "relu";
        case ActivationKind::tanh_:
            return "tanh";
        case ActivationKind::shifted_relu: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "shifted_relu:%.17g", shift);
            return buf;
        }
        case ActivationKind::linear:
            return "linear";
    }
    return "?";
}

Activation parse_activation(const std::string& text) {
    if (text == "relu") return Activation::relu();
    if (text == "tanh") return Activation::tanh();
    if (text == "linear") return Activation::linear();
    const std::string prefix = "shifted_relu:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string arg = text.substr(prefix.size());
        try {
            size_t used = 0;
            const double c = std::stod(arg, &used);
            if (used == arg.size()) return Activation::shifted_relu(c);
        } catch (const std::exception&) {
        }
        throw UnknownActivation("bad shifted_relu parameter: '" + arg + "'");
    }
    throw UnknownActivation("unknown activation '" + text + "'");
}

double zeta(const ActivationCoefficients& c) {
    if (c.mu_star_sq <= 1e-10)
        throw NonPositiveMuStar("mu_star_sq must be positive to form zeta");
    return c.mu1 / std::sqrt(c.mu_star_sq);
}

GaussianMoments gaussian_moments(const std::function<double(double)>& f,
                                 int order,
                                 const std::vector<double>& breakpoints) {
    if (order < 20) throw ConfigError("quadrature order must be >= 20");

    GaussianMoments m;
    if (breakpoints.empty()) {
        // E[g(G)] = (1/sqrt(pi)) sum w_i g(sqrt(2) x_i)
        const QuadRule rule = gauss_hermite(order);
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = std::sqrt(2.0) * rule.nodes[i];
            const double w = rule.weights[i] / std::sqrt(kPi);
            const double fx = f(x);
            m.m0 += w * fx;
            m.m1 += w * x * fx;
            m.m2 += w * fx * fx;
        }
        return m;
    }

    // Piecewise-smooth path: panel boundaries at the kinks, normal density
    // written out explicitly. 40 sigmas of truncation is far below double
    // precision resolution.
    const double kTail = 40.0;
    std::vector<double> cuts;
    cuts.push_back(-kTail);
    for (double b : breakpoints)
        if (b > -kTail && b < kTail) cuts.push_back(b);
    cuts.push_back(kTail);
    std::sort(cuts.begin(), cuts.end());

    const QuadRule rule = gauss_legendre(order);
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        if (b - a <= 0.0) continue;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = mid + half * rule.nodes[i];
            const double w = half * rule.weights[i] * normal_pdf(x);
            const double fx = f(x);
            m.m0 += w * fx;
            m.m1 += w * x * fx;
            m.m2 += w * fx * fx;
        }
    }
    return m;
}

ActivationCoefficients gaussian_coefficients(const Activation& act, int order) {
    const Activation local = act;
    const GaussianMoments m =
        gaussian_moments([local](double x) { return local(x); }, order, act.breakpoints());

    ActivationCoefficients c;
    c.mu0 = m.m0;
    c.mu1 = m.m1;
    c.mu_star_sq = m.m2 - m.m0 * m.m0 - m.m1 * m.m1;
    if (c.mu_star_sq <= 1e-10)
        throw NonPositiveMuStar("activation '" + act.name() +
                                "' has non-positive residual variance (mu_star_sq = " +
                                std::to_string(c.mu_star_sq) + ")");
    c.zeta = c.mu1 / std::sqrt(c.mu_star_sq);
    return c;
}

}  // namespace rfv
