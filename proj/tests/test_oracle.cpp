#include <doctest.h>

#include "sequential_oracle.hpp"
#include "sqec/rng.hpp"

using namespace sqec;

// Shot-for-shot agreement between the vectorised path (backward propagation
// plus parity sums) and the forward gate-by-gate reference, on shared raw
// samples. The full-size acceptance run repeats this at 10^4 shots.
TEST_CASE("vectorised path matches sequential reference") {
    for (int d : {3, 5}) {
        CodeLayout layout = CodeLayout::build(d);
        for (Basis basis : {Basis::X, Basis::Z}) {
            for (int cycles : {1, 2, 4}) {
                for (double p : {0.005, 0.02}) {
                    NoiseConfig cfg{p, cycles, basis, 0};
                    for (int shot = 0; shot < 300; ++shot) {
                        cfg.seed = rng::shot_seed(0xabcdef, shot);
                        RawErrorBits raw = sample_shot(layout, cfg);

                        ErrorVolume vol = propagate_backward(raw, layout);
                        SyndromeVolume syn = detection_events(vol);
                        int flip = logical_flip(vol, basis);

                        auto ref = testing::sequential_decode_reference(raw, layout);
                        REQUIRE(syn == ref.events);
                        REQUIRE(flip == ref.tracked_flip);
                    }
                }
            }
        }
    }
}
