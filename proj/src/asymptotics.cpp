#include "rfv/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfv/errors.hpp"

namespace rfv {
namespace {

using cd = std::complex<double>;

void check_ratios(const ShapeRatios& r) {
    if (!(r.psi1 > 0.0) || !(r.psi2 > 0.0))
        throw ConfigError("shape ratios must be positive");
}

// Right-hand sides of the coupled fixed point
//   nu1 = psi1 / (-xi - nu2 - z2*nu2/(1 - z2*nu1*nu2))
//   nu2 = psi2 / (-xi - nu1 - z2*nu1/(1 - z2*nu1*nu2))
cd rhs1(const ShapeRatios& r, double z2, cd xi, cd nu1, cd nu2) {
    const cd coupling = 1.0 - z2 * nu1 * nu2;
    return r.psi1 / (-xi - nu2 - z2 * nu2 / coupling);
}

cd rhs2(const ShapeRatios& r, double z2, cd xi, cd nu1, cd nu2) {
    const cd coupling = 1.0 - z2 * nu1 * nu2;
    return r.psi2 / (-xi - nu1 - z2 * nu1 / coupling);
}

double defect(const ShapeRatios& r, double z2, cd xi, cd nu1, cd nu2) {
    return std::max(std::abs(nu1 - rhs1(r, z2, xi, nu1, nu2)),
                    std::abs(nu2 - rhs2(r, z2, xi, nu1, nu2)));
}

// For fixed coupling factor A = 1 + z2/(1 + z2*u) the imaginary-axis system
//   b1*(t + A*b2) = psi1,  b2*(t + A*b1) = psi2
// gives t*(b1 - b2) = psi1 - psi2 exactly, so the smaller of the pair solves
//   A*b^2 + (t + A*|psi1-psi2|/t)*b - min(psi1,psi2) = 0.
// Returns (b1, b2); always positive.
std::pair<double, double> solve_pair_for_u(const ShapeRatios& r, double z2,
                                           double t, double u) {
    const double A = 1.0 + z2 / (1.0 + z2 * u);
    const double delta = std::abs(r.psi1 - r.psi2);
    const double psi_small = std::min(r.psi1, r.psi2);
    const double beta = t + A * delta / t;
    // Stable positive quadratic root: 2c / (beta + sqrt(beta^2 + 4Ac)).
    const double b_small =
        2.0 * psi_small / (beta + std::sqrt(beta * beta + 4.0 * A * psi_small));
    const double b_large = b_small + delta / t;
    if (r.psi1 >= r.psi2) return {b_large, b_small};
    return {b_small, b_large};
}

}  // namespace

FixedPointSolution solve_nu_imaginary(const ShapeRatios& ratios, double zeta,
                                      double t, const SolverSettings& settings) {
    check_ratios(ratios);
    if (!(t > 0.0)) throw ConfigError("imaginary part of xi must be positive");
    const double z2 = zeta * zeta;

    // u = b1*b2 lies in [0, psi1*psi2/t^2]; the consistency gap
    // g(u) = b1(u)*b2(u) - u is positive at 0 and nonpositive at the upper
    // bound, so bisection always brackets a root.
    double lo = 0.0;
    double hi = ratios.psi1 * ratios.psi2 / (t * t);
    long iters = 0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const auto [b1, b2] = solve_pair_for_u(ratios, z2, t, mid);
        const double g = b1 * b2 - mid;
        if (g > 0.0)
            lo = mid;
        else
            hi = mid;
        ++iters;
        if (hi - lo <= 1e-17 * std::max(1.0, hi)) break;
    }
    const double u = 0.5 * (lo + hi);
    const auto [b1, b2] = solve_pair_for_u(ratios, z2, t, u);

    FixedPointSolution sol;
    sol.xi = cd(0.0, t);
    sol.nu1 = cd(0.0, b1);
    sol.nu2 = cd(0.0, b2);
    sol.chi = -b1 * b2;
    sol.iterations = iters;
    sol.residual = defect(ratios, z2, sol.xi, sol.nu1, sol.nu2);
    if (!(sol.residual <= settings.tolerance) &&
        !(sol.residual <= 1e-11 * std::max({1.0, b1, b2})))
        throw NoConvergence("imaginary-axis fixed point residual " +
                                std::to_string(sol.residual),
                            sol.residual);
    return sol;
}

FixedPointSolution solve_nu(const ShapeRatios& ratios, double zeta,
                            std::complex<double> xi,
                            const SolverSettings& settings) {
    check_ratios(ratios);
    if (!(xi.imag() > 0.0)) throw ConfigError("xi must lie in the upper half plane");
    const double z2 = zeta * zeta;

    const double im_target = xi.imag();
    const double im_start = std::max(settings.continuation_start, 2.0 * im_target);
    const int steps = std::max(1, settings.continuation_steps);

    cd nu1 = -ratios.psi1 / cd(xi.real(), im_start);
    cd nu2 = -ratios.psi2 / cd(xi.real(), im_start);

    FixedPointSolution sol;
    sol.xi = xi;
    long total_iters = 0;
    double warm_max = 0.0;

    for (int s = 0; s <= steps; ++s) {
        const double frac = static_cast<double>(s) / steps;
        const double im = im_start * std::pow(im_target / im_start, frac);
        const cd xi_s(xi.real(), im);

        double res = defect(ratios, z2, xi_s, nu1, nu2);
        if (s > 0) warm_max = std::max(warm_max, res);

        long it = 0;
        while (res > settings.tolerance && it < settings.max_iterations) {
            const cd n1 = rhs1(ratios, z2, xi_s, nu1, nu2);
            nu1 = (1.0 - settings.damping) * nu1 + settings.damping * n1;
            const cd n2 = rhs2(ratios, z2, xi_s, nu1, nu2);
            nu2 = (1.0 - settings.damping) * nu2 + settings.damping * n2;
            if (!(nu1.imag() > 0.0) || !(nu2.imag() > 0.0))
                throw LeftUpperHalfPlane("iterate escaped the upper half plane");
            res = defect(ratios, z2, xi_s, nu1, nu2);
            ++it;
        }
        total_iters += it;
        if (res > settings.tolerance)
            throw NoConvergence("fixed point stalled at Im(xi) = " + std::to_string(im) +
                                    " with residual " + std::to_string(res),
                                res);
    }

    sol.nu1 = nu1;
    sol.nu2 = nu2;
    sol.chi = (nu1 * nu2).real();
    sol.iterations = total_iters;
    sol.residual = defect(ratios, z2, xi, nu1, nu2);
    sol.warm_start_defect = warm_max;
    return sol;
}

namespace {

double xi_imag_for(const ShapeRatios& ratios, const ActivationCoefficients& coeffs,
                   double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(coeffs.mu_star_sq > 0.0))
        throw NonPositiveMuStar("coefficients carry non-positive mu_star_sq");
    return std::sqrt(ratios.psi1 * ratios.psi2 * lambda) / std::sqrt(coeffs.mu_star_sq);
}

}  // namespace

double chi_at(const ShapeRatios& ratios, const ActivationCoefficients& coeffs,
              double lambda, const SolverSettings& settings) {
    const double t = xi_imag_for(ratios, coeffs, lambda);
    return solve_nu_imaginary(ratios, coeffs.zeta, t, settings).chi;
}

double ppv_limit(const ModelParams& params, const ShapeRatios& ratios,
                 const ActivationCoefficients& coeffs, double lambda,
                 const SolverSettings& settings) {
    const double z2 = coeffs.zeta * coeffs.zeta;
    const double chi = chi_at(ratios, coeffs, lambda, settings);
    return params.f1_sq / (1.0 - chi * z2) + params.fstar_sq + params.tau_sq;
}

double training_error_limit(const ModelParams& params, const ShapeRatios& ratios,
                            const ActivationCoefficients& coeffs, double lambda,
                            const SolverSettings& settings) {
    const double t = xi_imag_for(ratios, coeffs, lambda);
    const FixedPointSolution sol = solve_nu_imaginary(ratios, coeffs.zeta, t, settings);
    const double z2 = coeffs.zeta * coeffs.zeta;
    const double s2 =
        params.f1_sq / (1.0 - sol.chi * z2) + params.fstar_sq + params.tau_sq;
    const double b2 = sol.nu2.imag();
    return std::sqrt(lambda * ratios.psi1 / (ratios.psi2 * coeffs.mu_star_sq)) * b2 * s2;
}

double resolvent_trace_limit(const ShapeRatios& ratios,
                             const ActivationCoefficients& coeffs, double lambda,
                             const SolverSettings& settings) {
    const double t = xi_imag_for(ratios, coeffs, lambda);
    const FixedPointSolution sol = solve_nu_imaginary(ratios, coeffs.zeta, t, settings);
    const double z2 = coeffs.zeta * coeffs.zeta;
    const double b1 = sol.nu1.imag();
    return b1 * std::sqrt(coeffs.mu_star_sq / (lambda * ratios.psi1 * ratios.psi2)) *
           (z2 / (1.0 - z2 * sol.chi) + 1.0);
}

double omega(double zeta_like, double psi, double lambda_bar) {
    if (!(psi > 0.0)) throw ConfigError("psi must be positive");
    if (lambda_bar < 0.0) throw ConfigError("lambda_bar must be nonnegative");
    // Send one shape ratio to infinity in the imaginary-axis system: with
    // t = sqrt(psi1*psi*lb) the large ratio forces b_large ~ psi1/t, so
    // u = b1*b2 solves u = psi / (psi*lb + 1 + z2/(1 + z2*u)). Clearing
    // denominators in w = -z2*u gives the quadratic below; w <= 0 picks the
    // root with the negative branch.
    const double z2 = zeta_like * zeta_like;
    const double C = lambda_bar * psi + 1.0;
    const double B = psi * z2 - z2 - lambda_bar * psi - 1.0;
    const double R = B * B + 4.0 * C * z2 * psi;
    if (R < 0.0) throw NegativeRadicand("omega radicand negative");
    const double s = std::sqrt(R);
    // B + s without cancellation for B < 0: (s^2 - B^2)/(s - B).
    const double sum = (B <= 0.0) ? (4.0 * C * z2 * psi) / (s - B) : (B + s);
    return -sum / (2.0 * C);
}

namespace {

double wide_denominator(double psi, double w) {
    return psi - 2.0 * w * psi + w * w * psi - w * w;
}

}  // namespace

double risk_wide(double rho, double zeta_coef, double psi2, double lambda_bar,
                 const ModelParams& params) {
    const double w = omega(zeta_coef, psi2, lambda_bar);
    const double D = wide_denominator(psi2, w);
    const double energy = params.f1_sq + params.fstar_sq + params.tau_sq;
    if (std::isinf(rho)) {
        if (std::abs(D) < 1e-300) throw DegenerateDenominator("risk_wide denominator ~ 0");
        return energy * psi2 / D + params.fstar_sq;
    }
    if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
    const double den = (1.0 + rho) * D;
    if (std::abs(den) < 1e-300) throw DegenerateDenominator("risk_wide denominator ~ 0");
    return energy * (psi2 * rho + w * w) / den + params.fstar_sq;
}

double risk_large_sample(double zeta_coef, double psi1, double lambda_bar,
                         const ModelParams& params) {
    const double w = omega(zeta_coef, psi1, lambda_bar);
    const double z2 = zeta_coef * zeta_coef;
    const double den = z2 * wide_denominator(psi1, w);
    if (std::abs(den) < 1e-300)
        throw DegenerateDenominator("risk_large_sample denominator ~ 0");
    return params.f1_sq * (psi1 * z2 + w * w) / den + params.fstar_sq;
}

double rho_star(double zeta_coef, double psi2) {
    const double w0 = omega(zeta_coef, psi2, 0.0);
    const double den = (1.0 - psi2) * w0 + psi2;
    if (std::abs(den) < 1e-300) throw DegenerateDenominator("rho_star denominator ~ 0");
    return (w0 * w0 - w0) / den;
}

double lambda_opt_bar(double rho, double zeta_coef, double psi2) {
    if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
    const double threshold = rho_star(zeta_coef, psi2);
    if (!(rho < threshold))
        throw PhaseViolation("rho >= rho_star: optimal ridge level is zero");
    const double z2 = zeta_coef * zeta_coef;
    const double ws = omega(std::sqrt(rho), psi2, 0.0);
    const double num = z2 * psi2 - z2 * ws * psi2 + z2 * ws + ws - ws * ws;
    const double den = (ws * ws - ws) * psi2;
    if (std::abs(den) < 1e-300)
        throw DegenerateDenominator("lambda_opt denominator ~ 0");
    return num / den;
}

}  // namespace rfv
