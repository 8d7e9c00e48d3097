#pragma once

#include <complex>
#include <limits>

#include "rfv/activation.hpp"

namespace rfv {

// psi1 = features/dimension, psi2 = samples/dimension.
struct ShapeRatios {
    double psi1 = 1.0;
    double psi2 = 1.0;
};

// Target and noise energies. rho is the signal-to-noise ratio
// f1_sq / (fstar_sq + tau_sq); +inf when the denominator vanishes.
struct ModelParams {
    double f0_sq = 0.0;
    double f1_sq = 1.0;
    double fstar_sq = 0.0;
    double tau_sq = 0.0;

    double rho() const {
        const double denom = fstar_sq + tau_sq;
        if (denom <= 0.0) return std::numeric_limits<double>::infinity();
        return f1_sq / denom;
    }
};

struct SolverSettings {
    double tolerance = 1e-12;
    long max_iterations = 100000;  // per continuation step
    double damping = 0.5;
    double continuation_start = 1e3;
    int continuation_steps = 40;
};

struct FixedPointSolution {
    std::complex<double> nu1;
    std::complex<double> nu2;
    double chi = 0.0;  // Re(nu1 * nu2)
    std::complex<double> xi;
    long iterations = 0;
    double residual = 0.0;
    // Largest defect observed immediately after a continuation warm start.
    double warm_start_defect = 0.0;
};

// Damped alternating iteration in the upper half plane with geometric
// continuation in Im(xi). General-purpose path; throws NoConvergence or
// LeftUpperHalfPlane.
FixedPointSolution solve_nu(const ShapeRatios& ratios, double zeta,
                            std::complex<double> xi,
                            const SolverSettings& settings = {});

// Production path at xi = i*t: with nu_j = i*b_j the system is real and, for
// fixed u = b1*b2, linear-quadratic; the consistency equation in u is solved
// by bracketing bisection. Exact bounds, no damping parameters to tune.
FixedPointSolution solve_nu_imaginary(const ShapeRatios& ratios, double zeta,
                                      double t, const SolverSettings& settings = {});

// chi = nu1*nu2 evaluated at xi = i*sqrt(psi1*psi2*lambda)/mu_star; always a
// nonpositive real at this point.
double chi_at(const ShapeRatios& ratios, const ActivationCoefficients& coeffs,
              double lambda, const SolverSettings& settings = {});

// Limiting posterior predictive variance f1^2/(1 - chi zeta^2) + fstar^2 + tau^2.
double ppv_limit(const ModelParams& params, const ShapeRatios& ratios,
                 const ActivationCoefficients& coeffs, double lambda,
                 const SolverSettings& settings = {});

// Limit of the fitted noise level (inverse precision) of the empirical-Bayes
// plug-in, and of the mean ridge-resolvent quadratic form. They satisfy
// train * (1 + resolvent) = ppv.
double training_error_limit(const ModelParams& params, const ShapeRatios& ratios,
                            const ActivationCoefficients& coeffs, double lambda,
                            const SolverSettings& settings = {});
double resolvent_trace_limit(const ShapeRatios& ratios,
                             const ActivationCoefficients& coeffs, double lambda,
                             const SolverSettings& settings = {});

// Nonpositive root of (lb*psi+1) w^2 + (psi z^2 - z^2 - lb*psi - 1) w - z^2 psi = 0
// where z = zeta_like; equals the limit of zeta^2 * chi as the other shape
// ratio grows. Derivation sketch in the implementation.
double omega(double zeta_like, double psi, double lambda_bar);

// Wide-network limiting frequentist risk; rho may be +inf (noiseless).
double risk_wide(double rho, double zeta_coef, double psi2, double lambda_bar,
                 const ModelParams& params);

// Large-sample limiting risk at finite psi1.
double risk_large_sample(double zeta_coef, double psi1, double lambda_bar,
                         const ModelParams& params);

// SNR threshold separating the interior-minimum phase from the
// ridgeless-optimal phase.
double rho_star(double zeta_coef, double psi2);

// Optimal ridge level in lambda_bar units; requires rho < rho_star else
// PhaseViolation. Multiply by mu_star_sq for the unbarred lambda.
double lambda_opt_bar(double rho, double zeta_coef, double psi2);

}  // namespace rfv
