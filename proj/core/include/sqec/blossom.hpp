#pragma once

#include <cstdint>
#include <vector>

namespace sqec {

// Exact minimum-weight perfect matching on a complete graph with
// non-negative integer weights (primal-dual blossom algorithm, O(n^3)).
// `w` is a full symmetric matrix; n = w.size() must be even. Returns the
// mate of each vertex.
std::vector<int> min_weight_perfect_matching(
    const std::vector<std::vector<long long>>& w);

}  // namespace sqec
