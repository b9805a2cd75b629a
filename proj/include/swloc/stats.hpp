#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace swloc::stats {

// Median with the usual midpoint convention for even counts.
double median(std::span<const double> xs);

// Linear-interpolation percentile, p in [0, 100].
double percentile(std::span<const double> xs, double p);

struct BootstrapDiff {
    double point = 0.0;  // median(a) - median(b)
    double lo = 0.0;     // 2.5th percentile of the bootstrap distribution
    double hi = 0.0;     // 97.5th percentile
};

// Bootstrap CI on the difference of medians, independent resampling of both
// samples. Deterministic for a fixed seed.
BootstrapDiff bootstrap_median_diff(std::span<const double> a, std::span<const double> b,
                                    int resamples, std::uint64_t seed);

}  // namespace swloc::stats
