#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "lifeline/errors.hpp"

namespace lifeline {

// Falling factorial (n)_k = n(n-1)...(n-k+1), the number of k-permutations
// of n items; (n)_0 = 1.  Sizes stay small (n <= 12) so exact integers fit
// comfortably in 64 bits.
inline long long falling_factorial(int n, int k) {
    if (n < 0 || k < 0 || k > n)
        throw DomainError("falling_factorial: need 0 <= k <= n, got n=" +
                          std::to_string(n) + " k=" + std::to_string(k));
    long long p = 1;
    for (int i = 0; i < k; ++i) p *= (n - i);
    return p;
}

inline long long factorial(int n) { return falling_factorial(n, n); }

inline long long binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n)
        throw DomainError("binomial: need 0 <= k <= n, got n=" + std::to_string(n) +
                          " k=" + std::to_string(k));
    k = std::min(k, n - k);
    long long num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        num *= (n - i);
        den *= (i + 1);
    }
    return num / den;  // exact: product of any k consecutive integers is divisible by k!
}

// All subsets of {0,..,n-1} of a given size, in lexicographic order.
inline std::vector<std::vector<int>> subsets_of_size(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) return out;
    std::vector<int> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        out.push_back(pick);
        int i = k - 1;
        while (i >= 0 && pick[i] == n - k + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return out;
}

// All orderings of the given items (each ordering is a full permutation of `items`).
inline std::vector<std::vector<int>> permutations_of(std::vector<int> items) {
    std::sort(items.begin(), items.end());
    std::vector<std::vector<int>> out;
    do {
        out.push_back(items);
    } while (std::next_permutation(items.begin(), items.end()));
    return out;
}

} // namespace lifeline
