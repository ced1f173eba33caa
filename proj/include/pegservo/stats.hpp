#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "pegservo/errors.hpp"

namespace pegservo {

struct SuccessCount {
    long successes = 0;
    long trials = 0;
};

namespace detail {

inline long double log_choose(long n, long k) {
    return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(k) + 1) -
           std::lgamma(static_cast<long double>(n - k) + 1);
}

}  // namespace detail

/// One-sided Fisher exact test: probability, under equal success rates, that
/// group `a` scores `a.successes` or fewer given the pooled margins.
/// Small p means group a is significantly lower than group b.
inline double fisher_lower_tail(const SuccessCount& a, const SuccessCount& b) {
    const long n = a.trials + b.trials;
    const long k = a.successes + b.successes;
    const long draws = a.trials;
    const long lo = std::max(0L, draws - (n - k));
    const long double log_total = detail::log_choose(n, draws);
    long double p = 0.0L;
    for (long x = lo; x <= a.successes; ++x) {
        p += std::exp(detail::log_choose(k, x) + detail::log_choose(n - k, draws - x) - log_total);
    }
    return static_cast<double>(std::min(p, 1.0L));
}

/// Marks the entry with the highest success rate and every entry that is not
/// significantly lower than it (one-sided Fisher exact, p >= alpha).
inline std::vector<bool> significance_flags(const std::vector<SuccessCount>& counts, double alpha = 0.05) {
    if (counts.empty()) {
        throw InvalidArgumentError("significance_flags needs at least one entry");
    }
    for (const auto& c : counts) {
        if (c.trials <= 0 || c.successes < 0 || c.successes > c.trials) {
            throw InvalidArgumentError("each entry needs 0 <= successes <= trials and trials > 0");
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        // exact rate comparison s_i/n_i > s_best/n_best
        if (counts[i].successes * counts[best].trials > counts[best].successes * counts[i].trials) {
            best = i;
        }
    }
    std::vector<bool> flags(counts.size(), false);
    flags[best] = true;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i != best) {
            // p-values that equal alpha in exact arithmetic must not drop below it through rounding
            flags[i] = fisher_lower_tail(counts[i], counts[best]) >= alpha * (1.0 - 1e-12);
        }
    }
    return flags;
}

}  // namespace pegservo
