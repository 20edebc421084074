#include <doctest.h>

#include "sqec/bit_plane.hpp"
#include "sqec/rng.hpp"

using namespace sqec;

TEST_CASE("bit plane basics") {
    BitPlane p(4, 6);
    CHECK_FALSE(p.any());
    p.set(1, 2, true);
    p.set(3, 5, true);
    CHECK(p.count() == 2);
    CHECK(p.get(1, 2));
    p.toggle(1, 2);
    CHECK_FALSE(p.get(1, 2));
    CHECK(p.count() == 1);
}

TEST_CASE("translation drops bits at edges") {
    BitPlane p(3, 3);
    p.set(0, 0, true);
    p.set(2, 2, true);

    BitPlane down = BitPlane::translated(p, 1, 1);
    CHECK(down.count() == 1);
    CHECK(down.get(1, 1));

    BitPlane up = BitPlane::translated(p, -1, -1);
    CHECK(up.count() == 1);
    CHECK(up.get(1, 1));
}

TEST_CASE("xor_translated matches translated") {
    BitPlane p(5, 7);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 7; ++c)
            p.set(r, c, rng::unit(7, rng::Stream::Generic, r, c) < 0.5);
    for (int dr = -2; dr <= 2; ++dr) {
        for (int dc = -2; dc <= 2; ++dc) {
            BitPlane a(5, 7);
            a.xor_translated(p, dr, dc);
            CHECK(a == BitPlane::translated(p, dr, dc));
        }
    }
}

TEST_CASE("counter rng is stateless and seed-sensitive") {
    CHECK(rng::value(1, rng::Stream::Class0, 2, 3) ==
          rng::value(1, rng::Stream::Class0, 2, 3));
    CHECK(rng::value(1, rng::Stream::Class0, 2, 3) !=
          rng::value(2, rng::Stream::Class0, 2, 3));
    CHECK(rng::value(1, rng::Stream::Class0, 2, 3) !=
          rng::value(1, rng::Stream::Class1, 2, 3));
    double u = rng::unit(42, rng::Stream::Generic, 0);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
}
