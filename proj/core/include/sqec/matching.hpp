#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sqec/layout.hpp"
#include "sqec/propagation.hpp"

namespace sqec {

enum class GraphMode : int { Uniform = 0, Weighted = 1 };

// Integer weight scale used for exact shortest-path and matching arithmetic.
inline constexpr long long kWeightScale = 1 << 20;

// Weighted detector graph for one basis. Nodes are (tracked-type stabiliser
// site, comparison layer); a single virtual boundary node absorbs unpaired
// events. Each edge carries the error pattern realising it and the parity of
// logical-support crossings along that pattern.
struct BasisGraph {
    struct Edge {
        int u = 0, v = 0;  // node ids; v may be the boundary node
        double weight = 1.0;
        long long iweight = kWeightScale;
        double prob = 0.0;  // aggregated flip probability (weighted mode)
        int crossing = 0;
        std::vector<VolumeAtom> atoms;
    };

    Basis basis = Basis::Z;
    int cycles = 0;
    std::vector<AncSite> sites;           // tracked-type sites, build order
    std::vector<Edge> edges;
    std::vector<std::vector<int>> adjacency;  // node -> edge ids (boundary last node)
    std::vector<std::vector<long long>> dist; // all pairs, boundary included

    int num_nodes() const { return static_cast<int>(sites.size()) * (cycles + 1); }
    int boundary() const { return num_nodes(); }
    int node_id(int site_index, int layer) const {
        return site_index * (cycles + 1) + layer;
    }
    int site_index(const AncSite& s) const;
    long long distance(int u, int v) const { return dist[u][v]; }
};

struct DecodingGraph {
    const CodeLayout* layout = nullptr;
    int cycles = 0;
    GraphMode mode = GraphMode::Uniform;
    double p_prime = 0.0;
    std::array<BasisGraph, 2> per_basis;  // indexed by Basis

    const BasisGraph& graph(Basis b) const {
        return per_basis[static_cast<int>(b)];
    }
};

// Uniform mode: unit-weight space and time edges from the stabiliser
// structure alone. Weighted mode: one edge per distinct primitive error
// class of the sampled noise model, weighted ln((1-q)/q) with parallel
// classes combined by q = q1 (1-q2) + q2 (1-q1); hook and space-time
// diagonal edges appear here. p_prime is required in weighted mode.
DecodingGraph build_graph(const CodeLayout& layout, int cycles, GraphMode mode,
                          double p_prime = 0.0);

struct Matching {
    // (u, v) node pairs; v == -1 denotes the boundary.
    std::vector<std::pair<int, int>> pairs;
    long long iweight = 0;
    double weight = 0.0;
};

// Minimum-weight perfect matching of the syndrome's tracked-type detection
// events over shortest-path distances; the boundary may absorb any number of
// events. With `greedy` set, a fast non-optimal pairing is used instead.
Matching match_events(const DecodingGraph& graph, const SyndromeVolume& syn, Basis basis,
                      bool greedy = false);

struct DecodeResult {
    ErrorVolume correction;
    int predicted_flip = 0;
    Matching matching;
};

DecodeResult decode(const DecodingGraph& graph, const SyndromeVolume& syn, Basis basis,
                    bool greedy = false);

}  // namespace sqec
