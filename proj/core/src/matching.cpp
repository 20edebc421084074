#include "sqec/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

#include "sqec/blossom.hpp"
#include "sqec/noise.hpp"

namespace sqec {

namespace {

constexpr long long kDistInf = std::numeric_limits<long long>::max() / 8;

struct Mechanism {
    double prob = 0.0;
    std::vector<VolumeAtom> atoms;
};

// XOR-reduced list of node ids hit by a pattern of atoms.
std::vector<int> signature_nodes(const BasisGraph& bg, const CodeLayout& layout,
                                 const std::vector<VolumeAtom>& atoms,
                                 const std::vector<int>& site_lut) {
    std::vector<int> nodes;
    for (const auto& a : atoms) {
        for (const auto& [site, layer] : atom_events(layout, bg.cycles, bg.basis, a)) {
            // the site lookup holds only tracked-type sites, so events of the
            // other family fall out here
            int idx = site_lut[(site.cell_row * layout.cols() + site.cell_col) * 4 + site.slot];
            if (idx < 0) continue;
            nodes.push_back(bg.node_id(idx, layer));
        }
    }
    std::sort(nodes.begin(), nodes.end());
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size();) {
        std::size_t j = i;
        while (j < nodes.size() && nodes[j] == nodes[i]) ++j;
        if ((j - i) % 2 == 1) out.push_back(nodes[i]);
        i = j;
    }
    return out;
}

int crossing_parity(const std::vector<VolumeAtom>& atoms, const CodeLayout& layout,
                    Basis basis, const std::vector<char>& support_lut) {
    const auto comp = basis == Basis::X ? VolumeAtom::Kind::SpaceX : VolumeAtom::Kind::SpaceZ;
    int parity = 0;
    for (const auto& a : atoms) {
        if (a.kind != comp) continue;
        if (support_lut[(a.cell_row * layout.cols() + a.cell_col) * 4 + a.slot]) parity ^= 1;
    }
    return parity;
}

std::vector<VolumeAtom> volume_atoms(const ErrorVolume& vol) {
    std::vector<VolumeAtom> out;
    for (int t = 0; t < vol.cycles; ++t) {
        for (int s = 0; s < 4; ++s) {
            vol.c[t].space_x[s].for_each_set([&](int r, int c) {
                out.push_back({VolumeAtom::Kind::SpaceX, t, r, c, s});
            });
            vol.c[t].space_z[s].for_each_set([&](int r, int c) {
                out.push_back({VolumeAtom::Kind::SpaceZ, t, r, c, s});
            });
            vol.c[t].time_like[s].for_each_set([&](int r, int c) {
                out.push_back({VolumeAtom::Kind::Time, t, r, c, s});
            });
        }
    }
    return out;
}

struct EdgeAccumulator {
    // key: (u, v, crossing), v == boundary id for boundary edges
    std::map<std::tuple<int, int, int>, std::pair<double, std::vector<VolumeAtom>>> acc;

    void add(int u, int v, int crossing, double prob, const std::vector<VolumeAtom>& atoms) {
        if (u > v) std::swap(u, v);
        auto key = std::make_tuple(u, v, crossing);
        auto it = acc.find(key);
        if (it == acc.end()) {
            acc.emplace(key, std::make_pair(prob, atoms));
        } else {
            double q1 = it->second.first;
            it->second.first = q1 * (1.0 - prob) + prob * (1.0 - q1);
        }
    }
};

void accumulate_mechanism(EdgeAccumulator& acc, const BasisGraph& bg,
                          const CodeLayout& layout, const Mechanism& mech,
                          const std::vector<int>& site_lut,
                          const std::vector<char>& support_lut) {
    auto nodes = signature_nodes(bg, layout, mech.atoms, site_lut);
    int crossing = crossing_parity(mech.atoms, layout, bg.basis, support_lut);
    if (nodes.empty()) {
        if (crossing)
            throw std::logic_error("decoding graph: undetectable single fault crosses logical");
        return;
    }
    if (nodes.size() == 1) {
        acc.add(nodes[0], bg.boundary(), crossing, mech.prob, mech.atoms);
    } else if (nodes.size() == 2) {
        acc.add(nodes[0], nodes[1], crossing, mech.prob, mech.atoms);
    } else {
        // more than two detectors: split into per-atom components, dropping
        // the correlations between them
        for (const auto& a : mech.atoms) {
            Mechanism part{mech.prob, {a}};
            auto part_nodes = signature_nodes(bg, layout, part.atoms, site_lut);
            if (part_nodes.size() > 2)
                throw std::logic_error("decoding graph: primitive atom with >2 detectors");
            accumulate_mechanism(acc, bg, layout, part, site_lut, support_lut);
        }
    }
}

void compute_distances(BasisGraph& bg) {
    const int n = bg.num_nodes() + 1;  // + boundary
    bg.dist.assign(n, std::vector<long long>(n, kDistInf));
    using Item = std::pair<long long, int>;
    for (int src = 0; src < n; ++src) {
        auto& dist = bg.dist[src];
        dist[src] = 0;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.push({0, src});
        while (!heap.empty()) {
            auto [du, u] = heap.top();
            heap.pop();
            if (du != dist[u]) continue;
            for (int eid : bg.adjacency[u]) {
                const auto& e = bg.edges[eid];
                int v = e.u == u ? e.v : e.u;
                long long nd = du + e.iweight;
                if (nd < dist[v]) {
                    dist[v] = nd;
                    heap.push({nd, v});
                }
            }
        }
    }
}

BasisGraph build_basis_graph(const CodeLayout& layout, int cycles, GraphMode mode,
                             Basis basis, double p_prime) {
    BasisGraph bg;
    bg.basis = basis;
    bg.cycles = cycles;
    bg.sites = layout.anc_sites(tracked_stab(basis));

    std::vector<int> site_lut(layout.rows() * layout.cols() * 4, -1);
    for (std::size_t i = 0; i < bg.sites.size(); ++i) {
        const auto& s = bg.sites[i];
        site_lut[(s.cell_row * layout.cols() + s.cell_col) * 4 + s.slot] =
            static_cast<int>(i);
    }
    std::vector<char> support_lut(layout.rows() * layout.cols() * 4, 0);
    for (const auto& q : layout.logical_support(conjugate(basis)))
        support_lut[(q.cell_row * layout.cols() + q.cell_col) * 4 + q.slot] = 1;

    const auto comp_kind =
        basis == Basis::X ? VolumeAtom::Kind::SpaceX : VolumeAtom::Kind::SpaceZ;
    auto data = layout.data_sites();

    EdgeAccumulator acc;

    if (mode == GraphMode::Uniform) {
        for (int t = 0; t < cycles; ++t) {
            for (const auto& q : data) {
                Mechanism m{0.0, {{comp_kind, t, q.cell_row, q.cell_col, q.slot}}};
                accumulate_mechanism(acc, bg, layout, m, site_lut, support_lut);
            }
            for (const auto& s : bg.sites) {
                Mechanism m{0.0, {{VolumeAtom::Kind::Time, t, s.cell_row, s.cell_col, s.slot}}};
                accumulate_mechanism(acc, bg, layout, m, site_lut, support_lut);
            }
        }
    } else {
        NoiseConfig cfg{p_prime, cycles, basis, 0};
        const auto [z_flip, x_flip] = class1_flip_probs(p_prime);

        // class 0: one idle event per data qubit per cycle; the basis
        // component fires with half the compound parameter
        for (int t = 0; t < cycles; ++t) {
            double q_idle = compound_depol(p_prime, idle_steps(cfg, t)) / 2.0;
            for (const auto& q : data) {
                Mechanism m{q_idle, {{comp_kind, t, q.cell_row, q.cell_col, q.slot}}};
                accumulate_mechanism(acc, bg, layout, m, site_lut, support_lut);
            }
        }

        // class 1: measurement flips of the tracked stabilisers
        const double q_flip = tracked_stab(basis) == StabType::Z ? z_flip : x_flip;
        for (int t = 0; t < cycles; ++t)
            for (const auto& s : bg.sites) {
                Mechanism m{q_flip, {{VolumeAtom::Kind::Time, t, s.cell_row, s.cell_col, s.slot}}};
                accumulate_mechanism(acc, bg, layout, m, site_lut, support_lut);
            }

        // class 2: each Pauli-bit marginal of every gate slot, probed through
        // the backward propagation so hook and space-time patterns come out
        // exactly as the sampler produces them. The within-cycle pattern is
        // cycle-invariant except for the first cycle's preparation gauge, so
        // probe cycle 0 directly and translate a generic probe elsewhere.
        const int probe_cycles = std::min(cycles, 2);
        NoiseConfig probe_cfg{0.0, probe_cycles, basis, 0};
        for (int a = 0; a < 4; ++a) {
            for (int k = 0; k < 4; ++k) {
                const int g = a * 4 + k;
                for (int r = 0; r < layout.rows(); ++r) {
                    for (int c = 0; c < layout.cols(); ++c) {
                        const bool anc_here = layout.anc_presence(a).get(r, c);
                        const bool data_here = layout.partner_data_mask(a, k).get(r, c);
                        if (!anc_here && !data_here) continue;
                        for (int side = 0; side < 4; ++side) {
                            if ((side < 2 && !anc_here) || (side >= 2 && !data_here))
                                continue;
                            for (int probe_t = 0; probe_t < probe_cycles; ++probe_t) {
                                RawErrorBits raw = RawErrorBits::zero(layout, probe_cfg);
                                auto& ge = raw.cycles[probe_t].gate[g];
                                (side == 0 ? ge.anc_x
                                 : side == 1 ? ge.anc_z
                                 : side == 2 ? ge.data_x
                                             : ge.data_z)
                                    .set(r, c, true);
                                auto atoms =
                                    volume_atoms(propagate_backward(raw, layout));
                                if (atoms.empty()) continue;
                                const int t_lo = probe_t == 0 ? 0 : 1;
                                const int t_hi = probe_t == 0 ? 0 : cycles - 1;
                                for (int t = t_lo; t <= t_hi; ++t) {
                                    Mechanism m;
                                    m.prob = p_prime / 2.0;
                                    m.atoms = atoms;
                                    for (auto& atom : m.atoms)
                                        atom.cycle += t - probe_t;
                                    accumulate_mechanism(acc, bg, layout, m, site_lut,
                                                         support_lut);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // materialise edges; parallel edges with different crossing keep only the
    // lighter representative (the matching would never traverse the other)
    std::map<std::pair<int, int>, BasisGraph::Edge> best;
    for (const auto& [key, val] : acc.acc) {
        auto [u, v, crossing] = key;
        auto [q, atoms] = val;
        BasisGraph::Edge e;
        e.u = u;
        e.v = v;
        e.crossing = crossing;
        e.atoms = atoms;
        if (mode == GraphMode::Uniform) {
            e.weight = 1.0;
            e.iweight = kWeightScale;
            e.prob = 0.0;
        } else {
            if (q <= 0.0) continue;
            e.prob = q;
            e.weight = std::max(std::log((1.0 - q) / q), 0.0);
            e.iweight = std::llround(e.weight * static_cast<double>(kWeightScale));
        }
        auto pk = std::make_pair(u, v);
        auto it = best.find(pk);
        if (it == best.end() ||
            std::tie(e.iweight, e.crossing) < std::tie(it->second.iweight, it->second.crossing))
            best[pk] = std::move(e);
    }

    bg.edges.reserve(best.size());
    for (auto& [pk, e] : best) bg.edges.push_back(std::move(e));
    bg.adjacency.assign(bg.num_nodes() + 1, {});
    for (std::size_t i = 0; i < bg.edges.size(); ++i) {
        bg.adjacency[bg.edges[i].u].push_back(static_cast<int>(i));
        bg.adjacency[bg.edges[i].v].push_back(static_cast<int>(i));
    }

    compute_distances(bg);
    return bg;
}

}  // namespace

int BasisGraph::site_index(const AncSite& s) const {
    for (std::size_t i = 0; i < sites.size(); ++i)
        if (sites[i] == s) return static_cast<int>(i);
    return -1;
}

DecodingGraph build_graph(const CodeLayout& layout, int cycles, GraphMode mode,
                          double p_prime) {
    if (cycles < 1) throw std::invalid_argument("build_graph: cycles >= 1");
    if (mode == GraphMode::Weighted && (p_prime <= 0.0 || p_prime >= 1.0))
        throw std::invalid_argument("build_graph: weighted mode needs 0 < p' < 1");

    DecodingGraph g;
    g.layout = &layout;
    g.cycles = cycles;
    g.mode = mode;
    g.p_prime = p_prime;
    g.per_basis[static_cast<int>(Basis::X)] =
        build_basis_graph(layout, cycles, mode, Basis::X, p_prime);
    g.per_basis[static_cast<int>(Basis::Z)] =
        build_basis_graph(layout, cycles, mode, Basis::Z, p_prime);
    return g;
}

namespace {

std::vector<int> event_nodes(const BasisGraph& bg, const CodeLayout& layout,
                             const SyndromeVolume& syn) {
    std::vector<int> out;
    for (std::size_t i = 0; i < bg.sites.size(); ++i) {
        const auto& s = bg.sites[i];
        for (int l = 0; l <= bg.cycles; ++l)
            if (syn.layers[l][s.slot].get(s.cell_row, s.cell_col))
                out.push_back(bg.node_id(static_cast<int>(i), l));
    }
    return out;
}

Matching greedy_match(const BasisGraph& bg, std::vector<int> events) {
    Matching m;
    std::vector<char> used(events.size(), 0);
    for (;;) {
        long long best = kDistInf;
        int bi = -1, bj = -1;  // bj == -2 for boundary
        for (std::size_t i = 0; i < events.size(); ++i) {
            if (used[i]) continue;
            long long db = bg.distance(events[i], bg.boundary());
            if (db < best) {
                best = db;
                bi = static_cast<int>(i);
                bj = -2;
            }
            for (std::size_t j = i + 1; j < events.size(); ++j) {
                if (used[j]) continue;
                long long d = bg.distance(events[i], events[j]);
                if (d < best) {
                    best = d;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        }
        if (bi < 0) break;
        used[bi] = 1;
        if (bj == -2) {
            m.pairs.push_back({events[bi], -1});
        } else {
            used[bj] = 1;
            m.pairs.push_back({events[bi], events[bj]});
        }
        m.iweight += best;
    }
    m.weight = static_cast<double>(m.iweight) / kWeightScale;
    return m;
}

}  // namespace

Matching match_events(const DecodingGraph& graph, const SyndromeVolume& syn, Basis basis,
                      bool greedy) {
    const BasisGraph& bg = graph.graph(basis);
    std::vector<int> events = event_nodes(bg, *graph.layout, syn);
    if (events.empty()) return {};
    if (greedy) return greedy_match(bg, events);

    const int n = static_cast<int>(events.size());
    long long max_d = 1;
    for (int i = 0; i < n; ++i) {
        long long db = bg.distance(events[i], bg.boundary());
        if (db >= kDistInf) throw std::logic_error("match_events: disconnected event");
        max_d = std::max(max_d, db);
        for (int j = i + 1; j < n; ++j)
            max_d = std::max(max_d, bg.distance(events[i], events[j]));
    }
    const long long forbid = max_d * (n + 1) + 1;

    // events 0..n-1, boundary images n..2n-1: matching an event with its own
    // image routes it to the boundary; images pair freely at zero cost
    std::vector<std::vector<long long>> w(2 * n, std::vector<long long>(2 * n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            w[i][j] = bg.distance(events[i], events[j]);
            w[i][n + j] = w[n + j][i] = forbid;
        }
    for (int i = 0; i < n; ++i)
        w[i][n + i] = w[n + i][i] = bg.distance(events[i], bg.boundary());

    auto mate = min_weight_perfect_matching(w);

    Matching m;
    for (int i = 0; i < n; ++i) {
        int j = mate[i];
        if (j == n + i) {
            m.pairs.push_back({events[i], -1});
            m.iweight += w[i][j];
        } else if (j < n) {
            if (j < i) continue;
            m.pairs.push_back({events[i], events[j]});
            m.iweight += w[i][j];
        } else {
            throw std::logic_error("match_events: event paired with foreign boundary image");
        }
    }
    m.weight = static_cast<double>(m.iweight) / kWeightScale;
    return m;
}

namespace {

// Walk a shortest path from u to target, applying each traversed edge.
void expand_path(const BasisGraph& bg, int u, int target, ErrorVolume& correction,
                 int& flip) {
    while (u != target) {
        const long long need = bg.distance(u, target);
        bool stepped = false;
        for (int eid : bg.adjacency[u]) {
            const auto& e = bg.edges[eid];
            int v = e.u == u ? e.v : e.u;
            if (e.iweight + bg.distance(v, target) == need) {
                for (const auto& a : e.atoms) apply_atom(correction, a);
                flip ^= e.crossing;
                u = v;
                stepped = true;
                break;
            }
        }
        if (!stepped) throw std::logic_error("decode: no descent step along shortest path");
    }
}

}  // namespace

DecodeResult decode(const DecodingGraph& graph, const SyndromeVolume& syn, Basis basis,
                    bool greedy) {
    const BasisGraph& bg = graph.graph(basis);
    DecodeResult res;
    res.correction = ErrorVolume::zero(*graph.layout, graph.cycles, basis);
    res.matching = match_events(graph, syn, basis, greedy);
    for (const auto& [u, v] : res.matching.pairs)
        expand_path(bg, u, v < 0 ? bg.boundary() : v, res.correction, res.predicted_flip);
    return res;
}

}  // namespace sqec
