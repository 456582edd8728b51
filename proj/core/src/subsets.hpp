#pragma once

#include <vector>

namespace sfd::detail {

/// Visits every size-k subset of {0,...,d-1} in lexicographic order.
template <typename Fn>
void for_each_subset(int d, int k, Fn&& fn) {
    std::vector<int> subset(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
    while (true) {
        fn(const_cast<const std::vector<int>&>(subset));
        int i = k - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] == d - k + i) --i;
        if (i < 0) break;
        ++subset[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double result = 1.0;
    for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
}

}  // namespace sfd::detail
