#include <doctest.h>

#include <algorithm>

#include "sqec/rng.hpp"
#include "sqec/simplifier.hpp"

using namespace sqec;

namespace {

ErrorVolume sample_volume(const CodeLayout& layout, int cycles, Basis basis, double p,
                          std::uint64_t seed) {
    NoiseConfig cfg{p, cycles, basis, seed};
    return propagate_backward(sample_shot(layout, cfg), layout);
}

}  // namespace

TEST_CASE("generator counts") {
    // d=3, one cycle: only the eight stabiliser loops (a pair pattern needs
    // two consecutive cycles).
    CodeLayout layout = CodeLayout::build(3);
    auto gens1 = simplifier_generators(layout, 1);
    CHECK(gens1.size() == 8);
    CHECK(std::all_of(gens1.begin(), gens1.end(), [](const Simplifier& g) {
        return g.kind == Simplifier::Kind::Stabiliser;
    }));

    // two cycles: 8 stabilisers per cycle plus 9 data qubits x 2 components
    // at the single cycle boundary
    auto gens2 = simplifier_generators(layout, 2);
    CHECK(gens2.size() == 8 * 2 + 9 * 2);
}

TEST_CASE("a full bulk cell owns 4 stabiliser and 8 pair patterns per boundary") {
    CodeLayout layout = CodeLayout::build(7);
    auto gens = simplifier_generators(layout, 2);
    const int cr = 2, cc = 2;  // bulk cell: all slots present
    for (int a = 0; a < 4; ++a) REQUIRE(layout.anc_presence(a).get(cr, cc));

    int stab = 0, pair = 0;
    for (const auto& g : gens) {
        if (g.kind == Simplifier::Kind::Stabiliser) {
            // anchor: the stabiliser's ancilla cell; count via time-free atoms
            // belonging to the cell's own ancillas is indirect, so recount by
            // construction below
            continue;
        }
    }
    // recount directly from construction rules
    for (const auto& g : gens) {
        if (g.kind == Simplifier::Kind::Pair) {
            const auto& a = g.atoms.front();
            if (a.cycle == 0 && a.cell_row == cr && a.cell_col == cc &&
                a.kind != VolumeAtom::Kind::Time)
                ++pair;
        }
    }
    for (const auto& s : layout.anc_sites()) {
        if (s.cell_row == cr && s.cell_col == cc) ++stab;
    }
    CHECK(stab == 4);
    CHECK(pair == 8);
}

TEST_CASE("every generator is syndrome-neutral and logically trivial") {
    for (int d : {3, 5}) {
        CodeLayout layout = CodeLayout::build(d);
        for (Basis basis : {Basis::X, Basis::Z}) {
            const int cycles = 3;
            auto gens = simplifier_generators(layout, cycles);
            ErrorVolume empty = ErrorVolume::zero(layout, cycles, basis);
            for (const auto& g : gens) {
                ErrorVolume pattern = apply_simplifier(empty, g);
                CHECK_FALSE(detection_events(pattern).any());
                CHECK(logical_flip(pattern, Basis::X) == 0);
                CHECK(logical_flip(pattern, Basis::Z) == 0);

                // self-inverse
                CHECK(apply_simplifier(pattern, g) == empty);
            }
        }
    }
}

TEST_CASE("application preserves syndrome and logical class on random volumes") {
    CodeLayout layout = CodeLayout::build(5);
    const int cycles = 4;
    auto gens = simplifier_generators(layout, cycles);
    for (int trial = 0; trial < 30; ++trial) {
        ErrorVolume vol = sample_volume(layout, cycles, Basis::Z, 0.01, 600 + trial);
        const auto& g = gens[rng::value(3, rng::Stream::Generic, trial) % gens.size()];
        ErrorVolume mod = apply_simplifier(vol, g);
        CHECK(detection_events(mod) == detection_events(vol));
        CHECK(logical_flip(mod, Basis::Z) == logical_flip(vol, Basis::Z));
        CHECK(logical_flip(mod, Basis::X) == logical_flip(vol, Basis::X));
    }
}

TEST_CASE("group laws over sampled generator pairs") {
    CodeLayout layout = CodeLayout::build(3);
    auto gens = simplifier_generators(layout, 2);
    ErrorVolume empty = ErrorVolume::zero(layout, 2, Basis::Z);
    for (std::size_t i = 0; i < gens.size(); i += 3) {
        for (std::size_t j = 0; j < gens.size(); j += 5) {
            ErrorVolume ab = apply_simplifier(apply_simplifier(empty, gens[i]), gens[j]);
            ErrorVolume ba = apply_simplifier(apply_simplifier(empty, gens[j]), gens[i]);
            CHECK(ab == ba);  // commutative composition
            // composition stays syndrome-neutral (closure onto the group)
            CHECK_FALSE(detection_events(ab).any());
        }
    }
}

TEST_CASE("one full stabiliser loop reduces to nothing") {
    CodeLayout layout = CodeLayout::build(5);
    const int cycles = 2;
    auto gens = simplifier_generators(layout, cycles);
    ErrorVolume empty = ErrorVolume::zero(layout, cycles, Basis::Z);
    // pick a weight-4 stabiliser loop
    for (const auto& g : gens) {
        if (g.kind != Simplifier::Kind::Stabiliser || g.atoms.size() != 4) continue;
        ErrorVolume vol = apply_simplifier(empty, g);
        CHECK(greedy_reduce(vol, gens).active_bits() == 0);
        break;
    }
}

TEST_CASE("volumes with no majority-active generator are fixed points") {
    CodeLayout layout = CodeLayout::build(5);
    const int cycles = 3;
    auto gens = simplifier_generators(layout, cycles);
    // a single isolated error activates at most 1 bit of any generator of
    // size >= 3, and exactly half of no generator it meets first
    ErrorVolume vol = ErrorVolume::zero(layout, cycles, Basis::Z);
    DataSite q = layout.data_site(2, 2);
    vol.c[1].space_z[q.slot].set(q.cell_row, q.cell_col, true);
    CHECK(greedy_reduce(vol, gens) == vol);
}

TEST_CASE("greedy reduction preserves equivalence and never grows") {
    for (Basis basis : {Basis::X, Basis::Z}) {
        CodeLayout layout = CodeLayout::build(5);
        const int cycles = 5;
        auto gens = simplifier_generators(layout, cycles);
        for (int trial = 0; trial < 25; ++trial) {
            ErrorVolume vol =
                sample_volume(layout, cycles, basis, 0.008, 7000 + trial);
            ErrorVolume red = greedy_reduce(vol, gens);
            CHECK(red.active_bits() <= vol.active_bits());
            CHECK(detection_events(red) == detection_events(vol));
            CHECK(logical_flip(red, Basis::X) == logical_flip(vol, Basis::X));
            CHECK(logical_flip(red, Basis::Z) == logical_flip(vol, Basis::Z));
        }
    }
}

TEST_CASE("near-threshold shots strictly shrink") {
    // at p' = 0.005 and d = 15 full stabiliser loops appear regularly
    CodeLayout layout = CodeLayout::build(15);
    const int cycles = 15;
    auto gens = simplifier_generators(layout, cycles);
    ErrorVolume vol = sample_volume(layout, cycles, Basis::Z, 0.005, 424242);
    ErrorVolume red = greedy_reduce(vol, gens);
    CHECK(red.active_bits() < vol.active_bits());
    CHECK(detection_events(red) == detection_events(vol));
}
