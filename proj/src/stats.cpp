#include "rfv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rfv/errors.hpp"

namespace rfv {
namespace {

double pairwise_range(const double* data, std::size_t count) {
    if (count <= 8) {
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) acc += data[i];
        return acc;
    }
    const std::size_t half = count / 2;
    return pairwise_range(data, half) + pairwise_range(data + half, count - half);
}

}  // namespace

double pairwise_sum(const std::vector<double>& values) {
    return values.empty() ? 0.0 : pairwise_range(values.data(), values.size());
}

double mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return pairwise_sum(values) / double(values.size());
}

double sample_variance(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double mu = mean(values);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = values[i] - mu;
        sq[i] = c * c;
    }
    return pairwise_sum(sq) / double(n - 1);
}

MomentSummary moment_summary(const std::vector<double>& values) {
    MomentSummary s;
    const std::size_t n = values.size();
    if (n == 0) return s;
    s.mean = mean(values);
    if (n < 2) return s;

    std::vector<double> p2(n), p3(n), p4(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = values[i] - s.mean;
        const double c2 = c * c;
        p2[i] = c2;
        p3[i] = c2 * c;
        p4[i] = c2 * c2;
    }
    const double m2 = pairwise_sum(p2) / double(n);
    const double m3 = pairwise_sum(p3) / double(n);
    const double m4 = pairwise_sum(p4) / double(n);
    s.variance = pairwise_sum(p2) / double(n - 1);
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

double jarque_bera(std::size_t count, double skewness, double excess_kurtosis) {
    return double(count) *
           (skewness * skewness / 6.0 + excess_kurtosis * excess_kurtosis / 24.0);
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ConfigError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = p * double(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - double(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

Histogram histogram(const std::vector<double>& values, const std::vector<double>& edges) {
    if (edges.size() < 2) throw ConfigError("histogram needs at least two edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw ConfigError("histogram edges must be strictly increasing");

    Histogram h;
    h.edges = edges;
    h.counts.assign(edges.size() - 1, 0.0);
    const std::size_t last = h.counts.size() - 1;
    for (double v : values) {
        std::size_t cell;
        if (v < edges.front()) {
            cell = 0;
        } else if (v >= edges.back()) {
            cell = last;
        } else {
            cell = static_cast<std::size_t>(
                       std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()) -
                   1;
            if (cell > last) cell = last;
        }
        h.counts[cell] += 1.0;
    }
    return h;
}

std::vector<double> uniform_edges(double lo, double hi, int bins) {
    if (bins < 1) throw ConfigError("histogram needs at least one bin");
    if (!(hi > lo)) throw ConfigError("histogram range is empty");
    std::vector<double> edges(bins + 1);
    for (int i = 0; i <= bins; ++i)
        edges[i] = lo + (hi - lo) * double(i) / double(bins);
    edges.back() = hi;
    return edges;
}

double histogram_overlap(const Histogram& a, const Histogram& b) {
    if (a.edges != b.edges)
        throw BinMismatch("histogram overlap requires identical bin edges");
    const double total_a = pairwise_sum(a.counts);
    const double total_b = pairwise_sum(b.counts);
    if (!(total_a > 0.0) || !(total_b > 0.0))
        throw ConfigError("histogram overlap of an empty histogram");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.counts.size(); ++i)
        acc += std::min(a.counts[i] / total_a, b.counts[i] / total_b);
    return acc;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const unsigned char* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t fnv1a64(const std::string& text) {
    return fnv1a64(text.data(), text.size());
}

std::string format17g(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace rfv
