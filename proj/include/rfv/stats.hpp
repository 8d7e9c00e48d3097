#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rfv {

// Deterministic summation: recursive pairwise split, independent of thread count.
double pairwise_sum(const std::vector<double>& values);

double mean(const std::vector<double>& values);
// Sample variance with the n-1 divisor; 0 for fewer than two values.
double sample_variance(const std::vector<double>& values);

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;   // n-1 divisor
    double skewness = 0.0;   // m3 / m2^{3/2}, biased central moments
    double excess_kurtosis = 0.0;  // m4 / m2^2 - 3
};

MomentSummary moment_summary(const std::vector<double>& values);

// Jarque-Bera statistic for a sample with the given size and shape moments.
double jarque_bera(std::size_t count, double skewness, double excess_kurtosis);

// 99% quantile of the chi-squared distribution with two degrees of freedom.
inline constexpr double kChi2TwoDof99 = 9.21034037197618;

// Linear-interpolation quantile on an unsorted copy of the data, p in [0, 1].
double quantile(std::vector<double> values, double p);

struct Histogram {
    std::vector<double> edges;   // size bins + 1, strictly increasing
    std::vector<double> counts;  // size bins
};

// Counts fall into half-open cells [e_i, e_{i+1}); values outside the edge
// range are clamped into the first or last cell so the counts always sum to
// the sample size.
Histogram histogram(const std::vector<double>& values, const std::vector<double>& edges);

// Equal-width edges spanning [lo, hi].
std::vector<double> uniform_edges(double lo, double hi, int bins);

// Overlap of two normalized histograms on identical edges: sum of cellwise
// minima of the probability masses. 1 means identical, 0 disjoint.
double histogram_overlap(const Histogram& a, const Histogram& b);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64(const std::string& text);

// Shortest round-trip decimal rendering used across all text outputs.
std::string format17g(double value);

}  // namespace rfv
