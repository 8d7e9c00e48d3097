#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rfv {

enum class ActivationKind { relu, tanh_, shifted_relu, linear };

// Pointwise feature nonlinearity. `linear` exists only to demonstrate the
// degenerate-coefficient rejection path; it is not usable downstream.
struct Activation {
    ActivationKind kind = ActivationKind::relu;
    double shift = 0.0;  // shifted_relu only

    static Activation relu() { return {ActivationKind::relu, 0.0}; }
    static Activation tanh() { return {ActivationKind::tanh_, 0.0}; }
    static Activation shifted_relu(double c) { return {ActivationKind::shifted_relu, c}; }
    static Activation linear() { return {ActivationKind::linear, 0.0}; }

    double operator()(double x) const;

    // Kink locations; quadrature splits the integration domain here.
    std::vector<double> breakpoints() const;

    std::string name() const;
};

// Accepts "relu", "tanh", "linear", "shifted_relu:<c>".
Activation parse_activation(const std::string& text);

// First two Hermite-ish moments of sigma under the standard normal plus the
// residual second moment:
//   mu0 = E[sigma(G)], mu1 = E[G sigma(G)],
//   mu_star_sq = E[sigma(G)^2] - mu0^2 - mu1^2,  zeta = mu1 / sqrt(mu_star_sq).
struct ActivationCoefficients {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double mu_star_sq = 0.0;
    double zeta = 0.0;
};

double zeta(const ActivationCoefficients& c);

// Raw moments of an arbitrary scalar function under N(0,1); exposed so tests
// can probe scaled or synthetic activations directly.
struct GaussianMoments {
    double m0 = 0.0;  // E[f(G)]
    double m1 = 0.0;  // E[G f(G)]
    double m2 = 0.0;  // E[f(G)^2]
};

// `breakpoints` lists kinks of f; the integral is split there. Smooth
// functions (no breakpoints) use a Gauss-Hermite rule of the given order
// rescaled to the normal weight; kinked ones use per-segment Gauss-Legendre
// panels with the normal density folded in, truncated at |x| = 40.
GaussianMoments gaussian_moments(const std::function<double(double)>& f,
                                 int order,
                                 const std::vector<double>& breakpoints);

// Throws NonPositiveMuStar when mu_star_sq <= 1e-10 (e.g. linear sigma) and
// ConfigError when order < 20.
ActivationCoefficients gaussian_coefficients(const Activation& act, int order = 200);

}  // namespace rfv
