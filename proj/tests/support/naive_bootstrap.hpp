#pragma once

// Independent resampling oracle: Mersenne Twister draws, nth_element
// percentiles, no shared code with the library.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

inline std::pair<double, double> naive_bootstrap(const std::vector<double>& xs, int iterations, double confidence,
                                                 unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(iterations));
    for (int b = 0; b < iterations; ++b) {
        long double s = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) s += xs[pick(gen)];
        means.push_back(static_cast<double>(s / static_cast<long double>(xs.size())));
    }
    const double a = (1.0 - confidence) / 2.0;
    const auto at = [&](double p) {
        auto idx = static_cast<std::size_t>(std::lround(p * static_cast<double>(means.size() - 1)));
        std::nth_element(means.begin(), means.begin() + static_cast<long>(idx), means.end());
        return means[idx];
    };
    const double lo = at(a);
    const double hi = at(1.0 - a);
    return {lo, hi};
}

} // namespace oracle
