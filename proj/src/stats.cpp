#include "swloc/stats.hpp"

#include <algorithm>
#include <cmath>

#include "swloc/error.hpp"
#include "swloc/rng.hpp"

namespace swloc::stats {

namespace {
double sorted_percentile(const std::vector<double>& s, double p) {
    if (s.empty()) throw DegenerateInputError("percentile of empty sample");
    if (s.size() == 1) return s[0];
    const double pos = p / 100.0 * static_cast<double>(s.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return s[lo] * (1.0 - w) + s[hi] * w;
}
}  // namespace

double median(std::span<const double> xs) {
    std::vector<double> s(xs.begin(), xs.end());
    std::sort(s.begin(), s.end());
    return sorted_percentile(s, 50.0);
}

double percentile(std::span<const double> xs, double p) {
    std::vector<double> s(xs.begin(), xs.end());
    std::sort(s.begin(), s.end());
    return sorted_percentile(s, p);
}

BootstrapDiff bootstrap_median_diff(std::span<const double> a, std::span<const double> b,
                                    int resamples, std::uint64_t seed) {
    if (a.empty() || b.empty()) throw DegenerateInputError("bootstrap on empty sample");
    BootstrapDiff out;
    out.point = median(a) - median(b);
    Rng rng(seed);
    std::vector<double> ra(a.size()), rb(b.size()), diffs;
    diffs.reserve(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        for (auto& x : ra) x = a[rng.below(a.size())];
        for (auto& x : rb) x = b[rng.below(b.size())];
        diffs.push_back(median(ra) - median(rb));
    }
    std::sort(diffs.begin(), diffs.end());
    out.lo = sorted_percentile(diffs, 2.5);
    out.hi = sorted_percentile(diffs, 97.5);
    return out;
}

}  // namespace swloc::stats
