#pragma once

#include <cstdint>
#include <vector>

// Exact-integer reference for the one-sided Fisher test. Independent of the
// library implementation: no floating point and no log-gamma.
namespace oracle {

inline std::uint64_t choose(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

/// Lower tail P(X <= s1) of the hypergeometric law with the margins of the
/// 2x2 table, returned as numerator/denominator.
struct Fraction {
    std::uint64_t num;
    std::uint64_t den;
};

inline Fraction lower_tail(int s1, int n1, int s2, int n2) {
    const int k = s1 + s2;
    const int n = n1 + n2;
    std::uint64_t num = 0;
    for (int x = 0; x <= s1; ++x) {
        num += choose(k, x) * choose(n - k, n1 - x);
    }
    return {num, choose(n, n1)};
}

/// True when p >= 1/20, decided in integers.
inline bool not_significant(const Fraction& p) { return 20 * p.num >= p.den; }

inline std::vector<bool> flags(const std::vector<std::pair<int, int>>& counts) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i].first * counts[best].second > counts[best].first * counts[i].second) {
            best = i;
        }
    }
    std::vector<bool> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out[i] = i == best ||
                 not_significant(lower_tail(counts[i].first, counts[i].second, counts[best].first, counts[best].second));
    }
    return out;
}

}  // namespace oracle
