#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace toolchain {

/// Classic longest-common-subsequence length, O(|a|*|b|) time, O(min) space.
template <class Seq>
std::size_t lcs_length(const Seq& a, const Seq& b) {
    const std::size_t n = std::size(a), m = std::size(b);
    if (n == 0 || m == 0) return 0;
    std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

inline std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    return lcs_length<std::span<const std::string>>(a, b);
}

/// Character-level LCS length normalized by the shorter string; the lexical
/// proximity measure between two canonical keys.
inline double char_lcs_ratio(std::string_view a, std::string_view b) {
    if (a.empty() || b.empty()) return 0.0;
    return static_cast<double>(lcs_length(a, b)) /
           static_cast<double>(std::min(a.size(), b.size()));
}

}  // namespace toolchain
