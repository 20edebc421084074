#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "sqec/matching.hpp"
#include "sqec/rng.hpp"

using namespace sqec;

namespace {

SyndromeVolume restrict_to(const SyndromeVolume& syn, StabType t) {
    SyndromeVolume out = SyndromeVolume::zero(*syn.layout, syn.cycles, syn.basis);
    for (int l = 0; l <= syn.cycles; ++l)
        for (int a = 0; a < 4; ++a)
            if (anc_type(a) == t) out.layers[l][a] = syn.layers[l][a];
    return out;
}

// exhaustive minimum over all pairings with optional boundary assignment
long long brute_force_pairing(const BasisGraph& bg, std::vector<int> ev) {
    if (ev.empty()) return 0;
    int u = ev.back();
    ev.pop_back();
    long long best = bg.distance(u, bg.boundary()) + brute_force_pairing(bg, ev);
    for (std::size_t i = 0; i < ev.size(); ++i) {
        std::vector<int> rest = ev;
        rest.erase(rest.begin() + i);
        best = std::min(best, bg.distance(u, ev[i]) + brute_force_pairing(bg, rest));
    }
    return best;
}

std::vector<int> syndrome_events(const BasisGraph& bg, const SyndromeVolume& syn) {
    std::vector<int> out;
    for (std::size_t i = 0; i < bg.sites.size(); ++i) {
        const auto& s = bg.sites[i];
        for (int l = 0; l <= bg.cycles; ++l)
            if (syn.layers[l][s.slot].get(s.cell_row, s.cell_col))
                out.push_back(bg.node_id(static_cast<int>(i), l));
    }
    return out;
}

}  // namespace

TEST_CASE("uniform graphs carry unit weights and reach the boundary") {
    CodeLayout layout = CodeLayout::build(3);
    DecodingGraph g = build_graph(layout, 2, GraphMode::Uniform);
    for (Basis b : {Basis::X, Basis::Z}) {
        const BasisGraph& bg = g.graph(b);
        CHECK_FALSE(bg.edges.empty());
        for (const auto& e : bg.edges) {
            CHECK(e.weight == 1.0);
            CHECK(e.iweight == kWeightScale);
        }
        // connected through the boundary: all finite distances
        for (int u = 0; u <= bg.num_nodes(); ++u)
            CHECK(bg.distance(u, bg.boundary()) < kWeightScale * 1000LL);
    }
}

TEST_CASE("weighted graphs put lighter time edges on the noisier ancillas") {
    CodeLayout layout = CodeLayout::build(5);
    DecodingGraph g = build_graph(layout, 3, GraphMode::Weighted, 0.004);

    auto min_time_edge_weight = [&](Basis b) {
        const BasisGraph& bg = g.graph(b);
        double best = 1e30;
        for (const auto& e : bg.edges) {
            if (e.v == bg.boundary() || e.atoms.size() != 1) continue;
            if (e.atoms[0].kind != VolumeAtom::Kind::Time) continue;
            // same site, consecutive layers
            if (std::abs(e.u - e.v) == 1) best = std::min(best, e.weight);
        }
        return best;
    };
    // X-ancilla time edges (basis Z graph) are noisier, hence lighter
    double x_anc = min_time_edge_weight(Basis::Z);
    double z_anc = min_time_edge_weight(Basis::X);
    CHECK(x_anc < z_anc);

    for (Basis b : {Basis::X, Basis::Z})
        for (const auto& e : g.graph(b).edges) CHECK(e.weight >= 0.0);
}

TEST_CASE("weighted edge set covers uniform plus diagonal hooks") {
    CodeLayout layout = CodeLayout::build(5);
    const int cycles = 3;
    DecodingGraph gu = build_graph(layout, cycles, GraphMode::Uniform);
    DecodingGraph gw = build_graph(layout, cycles, GraphMode::Weighted, 0.003);

    for (Basis b : {Basis::X, Basis::Z}) {
        const BasisGraph& u = gu.graph(b);
        const BasisGraph& w = gw.graph(b);
        std::set<std::pair<int, int>> we;
        for (const auto& e : w.edges) we.insert({e.u, e.v});
        for (const auto& e : u.edges) CHECK(we.count({e.u, e.v}) == 1);

        // hook edges: a mid-cycle ancilla fault lands a data pair plus the
        // partner's measurement flip, so the new diagonals join detectors two
        // plaquette steps apart across one layer step
        bool saw_hook = false;
        bool saw_diagonal = false;
        for (const auto& e : w.edges) {
            if (e.v == w.boundary()) continue;
            int lu = e.u % (cycles + 1), lv = e.v % (cycles + 1);
            auto su = w.sites[e.u / (cycles + 1)], sv = w.sites[e.v / (cycles + 1)];
            auto [ri, rj] = layout.plaquette_coord(su);
            auto [qi, qj] = layout.plaquette_coord(sv);
            int dr = std::abs(ri - qi), dc = std::abs(rj - qj);
            if (std::abs(lu - lv) == 1 && dr + dc > 0) saw_diagonal = true;
            if (std::abs(lu - lv) <= 1 && ((dr == 2 && dc == 0) || (dr == 0 && dc == 2)))
                saw_hook = true;
        }
        CHECK(saw_hook);
        CHECK(saw_diagonal);
    }
}

TEST_CASE("two bulk neighbours match each other, not the boundary") {
    CodeLayout layout = CodeLayout::build(7);
    DecodingGraph g = build_graph(layout, 3, GraphMode::Uniform);
    const Basis basis = Basis::X;

    // a single bulk data error makes two adjacent events deep in the bulk
    ErrorVolume vol = ErrorVolume::zero(layout, 3, basis);
    DataSite q = layout.data_site(3, 3);
    vol.c[1].space_x[q.slot].set(q.cell_row, q.cell_col, true);
    SyndromeVolume syn = detection_events(vol);

    Matching m = match_events(g, syn, basis);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].second != -1);
    CHECK(m.iweight == kWeightScale);  // one unit edge
}

TEST_CASE("empty syndrome decodes to nothing") {
    CodeLayout layout = CodeLayout::build(5);
    DecodingGraph g = build_graph(layout, 2, GraphMode::Uniform);
    SyndromeVolume syn = SyndromeVolume::zero(layout, 2, Basis::Z);
    Matching m = match_events(g, syn, Basis::Z);
    CHECK(m.pairs.empty());
    CHECK(m.iweight == 0);
    auto res = decode(g, syn, Basis::Z);
    CHECK_FALSE(res.correction.any());
    CHECK(res.predicted_flip == 0);
}

TEST_CASE("matching weight equals exhaustive pairing optimum") {
    CodeLayout layout = CodeLayout::build(7);
    const int cycles = 3;
    for (GraphMode mode : {GraphMode::Uniform, GraphMode::Weighted}) {
        DecodingGraph g = build_graph(layout, cycles, mode, 0.01);
        for (Basis basis : {Basis::X, Basis::Z}) {
            const BasisGraph& bg = g.graph(basis);
            int tested = 0;
            for (int trial = 0; tested < 120; ++trial) {
                NoiseConfig cfg{0.006, cycles, basis, rng::shot_seed(99, trial)};
                SyndromeVolume syn =
                    detection_events(propagate_backward(sample_shot(layout, cfg), layout));
                auto ev = syndrome_events(bg, syn);
                if (ev.empty() || ev.size() > 8) continue;
                ++tested;
                Matching m = match_events(g, syn, basis);
                CHECK(m.iweight == brute_force_pairing(bg, ev));
            }
        }
    }
}

TEST_CASE("corrections close the syndrome") {
    CodeLayout layout = CodeLayout::build(5);
    const int cycles = 5;
    for (GraphMode mode : {GraphMode::Uniform, GraphMode::Weighted}) {
        DecodingGraph g = build_graph(layout, cycles, mode, 0.008);
        for (Basis basis : {Basis::X, Basis::Z}) {
            for (int trial = 0; trial < 100; ++trial) {
                NoiseConfig cfg{0.008, cycles, basis, rng::shot_seed(1234, trial)};
                ErrorVolume vol = propagate_backward(sample_shot(layout, cfg), layout);
                SyndromeVolume syn = detection_events(vol);
                auto res = decode(g, syn, basis);

                StabType t = tracked_stab(basis);
                SyndromeVolume closed = detection_events(res.correction);
                CHECK(restrict_to(closed, t) == restrict_to(syn, t));
                CHECK(res.predicted_flip == logical_flip(res.correction, basis));
            }
        }
    }
}

TEST_CASE("single bulk error decodes to an equivalent correction") {
    CodeLayout layout = CodeLayout::build(5);
    DecodingGraph g = build_graph(layout, 3, GraphMode::Uniform);
    ErrorVolume vol = ErrorVolume::zero(layout, 3, Basis::X);
    DataSite q = layout.data_site(2, 2);
    vol.c[1].space_x[q.slot].set(q.cell_row, q.cell_col, true);
    SyndromeVolume syn = detection_events(vol);

    auto res = decode(g, syn, Basis::X);
    CHECK(restrict_to(detection_events(res.correction), StabType::Z) ==
          restrict_to(syn, StabType::Z));
    CHECK(logical_flip(res.correction ^ vol, Basis::X) == 0);
}

TEST_CASE("majority chains flip the prediction across the support") {
    // X chain hugging the right boundary, longer than d/2: the decoder
    // completes it through the left boundary, crossing the support.
    CodeLayout layout = CodeLayout::build(5);
    DecodingGraph g = build_graph(layout, 2, GraphMode::Uniform);
    ErrorVolume vol = ErrorVolume::zero(layout, 2, Basis::X);
    for (int j = 2; j < 5; ++j) {  // weight 3 > 5/2
        DataSite q = layout.data_site(2, j);
        vol.c[0].space_x[q.slot].set(q.cell_row, q.cell_col, true);
    }
    SyndromeVolume syn = detection_events(vol);
    auto res = decode(g, syn, Basis::X);
    CHECK(res.predicted_flip == 1);
    CHECK(logical_flip(res.correction ^ vol, Basis::X) == 1);
}

TEST_CASE("greedy fallback still closes the syndrome") {
    CodeLayout layout = CodeLayout::build(5);
    const int cycles = 3;
    DecodingGraph g = build_graph(layout, cycles, GraphMode::Uniform);
    for (int trial = 0; trial < 20; ++trial) {
        NoiseConfig cfg{0.01, cycles, Basis::Z, rng::shot_seed(777, trial)};
        SyndromeVolume syn =
            detection_events(propagate_backward(sample_shot(layout, cfg), layout));
        auto res = decode(g, syn, Basis::Z, /*greedy=*/true);
        CHECK(restrict_to(detection_events(res.correction), StabType::X) ==
              restrict_to(syn, StabType::X));
    }
}

TEST_CASE("build_graph validates arguments") {
    CodeLayout layout = CodeLayout::build(3);
    CHECK_THROWS_AS(build_graph(layout, 0, GraphMode::Uniform), std::invalid_argument);
    CHECK_THROWS_AS(build_graph(layout, 2, GraphMode::Weighted, 0.0), std::invalid_argument);
}
