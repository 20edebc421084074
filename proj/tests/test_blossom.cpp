#include <doctest.h>

#include <numeric>
#include <vector>

#include "sqec/blossom.hpp"
#include "sqec/rng.hpp"

using namespace sqec;

namespace {

long long matching_weight(const std::vector<std::vector<long long>>& w,
                          const std::vector<int>& mate) {
    long long total = 0;
    for (int u = 0; u < static_cast<int>(mate.size()); ++u)
        if (mate[u] > u) total += w[u][mate[u]];
    return total;
}

long long brute_force_min(const std::vector<std::vector<long long>>& w,
                          std::vector<int>& left) {
    if (left.empty()) return 0;
    int u = left.front();
    long long best = std::numeric_limits<long long>::max() / 2;
    for (std::size_t i = 1; i < left.size(); ++i) {
        int v = left[i];
        std::vector<int> rest;
        for (int x : left)
            if (x != u && x != v) rest.push_back(x);
        best = std::min(best, w[u][v] + brute_force_min(w, rest));
    }
    return best;
}

long long brute_force_min(const std::vector<std::vector<long long>>& w) {
    std::vector<int> all(w.size());
    std::iota(all.begin(), all.end(), 0);
    return brute_force_min(w, all);
}

}  // namespace

TEST_CASE("blossom handles tiny fixed instances") {
    std::vector<std::vector<long long>> w = {{0, 5}, {5, 0}};
    auto mate = min_weight_perfect_matching(w);
    CHECK(mate[0] == 1);
    CHECK(mate[1] == 0);

    // square: cheap diagonal pairing must win
    w = {{0, 1, 10, 10},
         {1, 0, 10, 10},
         {10, 10, 0, 1},
         {10, 10, 1, 0}};
    mate = min_weight_perfect_matching(w);
    CHECK(matching_weight(w, mate) == 2);
}

TEST_CASE("blossom equals brute force on random dense instances") {
    for (int n : {2, 4, 6, 8, 10}) {
        const int trials = n <= 6 ? 600 : 250;
        for (int trial = 0; trial < trials; ++trial) {
            std::vector<std::vector<long long>> w(n, std::vector<long long>(n, 0));
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v) {
                    long long x = 1 + static_cast<long long>(
                        rng::value(trial * 31 + n, rng::Stream::Generic, u, v) % 1000);
                    w[u][v] = w[v][u] = x;
                }
            auto mate = min_weight_perfect_matching(w);
            for (int u = 0; u < n; ++u) {
                REQUIRE(mate[u] >= 0);
                REQUIRE(mate[mate[u]] == u);
                REQUIRE(mate[u] != u);
            }
            REQUIRE(matching_weight(w, mate) == brute_force_min(w));
        }
    }
}

TEST_CASE("blossom equals brute force with clustered weights") {
    // many ties and near-ties, the regime matching decoders produce
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 8;
        std::vector<std::vector<long long>> w(n, std::vector<long long>(n, 0));
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
                long long x = 1 + static_cast<long long>(
                    rng::value(trial, rng::Stream::Generic, u, v, 7) % 4);
                w[u][v] = w[v][u] = x;
            }
        auto mate = min_weight_perfect_matching(w);
        REQUIRE(matching_weight(w, mate) == brute_force_min(w));
    }
}

TEST_CASE("blossom tolerates forbidden-edge sentinels") {
    // mimic the event/virtual construction: enormous weights on disallowed
    // pairs never enter the optimum
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 10;
        const long long forbid = 1'000'000'000;
        std::vector<std::vector<long long>> w(n, std::vector<long long>(n, forbid));
        for (int u = 0; u < n; ++u) w[u][u] = 0;
        // allowed ring + a few chords
        for (int u = 0; u < n; ++u) {
            int v = (u + 1) % n;
            long long x = 1 + static_cast<long long>(
                rng::value(trial, rng::Stream::Generic, u, v) % 50);
            w[u][v] = w[v][u] = x;
        }
        w[0][5] = w[5][0] = 3;
        w[2][7] = w[7][2] = 4;
        auto mate = min_weight_perfect_matching(w);
        long long got = matching_weight(w, mate);
        REQUIRE(got == brute_force_min(w));
        CHECK(got < forbid);
    }
}
