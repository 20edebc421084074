#include "sqec/simplifier.hpp"

#include <algorithm>
#include <stdexcept>

namespace sqec {

namespace {

VolumeAtom space_atom(VolumeAtom::Kind kind, int cycle, const DataSite& q) {
    return {kind, cycle, q.cell_row, q.cell_col, q.slot};
}

}  // namespace

std::vector<Simplifier> simplifier_generators(const CodeLayout& layout, int cycles) {
    if (cycles < 1) throw std::invalid_argument("simplifier_generators: cycles >= 1");
    std::vector<Simplifier> out;

    auto anc = layout.anc_sites();
    auto data = layout.data_sites();

    // cache anticommuting neighbours of each data qubit per component
    auto adjacent = [&](const DataSite& q, StabType t) {
        std::vector<AncSite> res;
        for (const auto& s : anc) {
            if (anc_type(s.slot) != t) continue;
            for (const auto& sq : layout.stabiliser_support(s))
                if (sq == q) res.push_back(s);
        }
        return res;
    };
    std::vector<std::vector<AncSite>> adj_z(data.size()), adj_x(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        adj_z[i] = adjacent(data[i], StabType::Z);  // flipped by X errors
        adj_x[i] = adjacent(data[i], StabType::X);  // flipped by Z errors
    }

    for (int t = 0; t < cycles; ++t) {
        for (const auto& s : anc) {
            Simplifier g;
            g.kind = Simplifier::Kind::Stabiliser;
            const auto kind = anc_type(s.slot) == StabType::X ? VolumeAtom::Kind::SpaceX
                                                              : VolumeAtom::Kind::SpaceZ;
            for (const auto& q : layout.stabiliser_support(s))
                g.atoms.push_back(space_atom(kind, t, q));
            std::sort(g.atoms.begin(), g.atoms.end());
            out.push_back(std::move(g));
        }
        if (t + 1 >= cycles) continue;
        for (std::size_t i = 0; i < data.size(); ++i) {
            for (auto kind : {VolumeAtom::Kind::SpaceX, VolumeAtom::Kind::SpaceZ}) {
                Simplifier g;
                g.kind = Simplifier::Kind::Pair;
                g.atoms.push_back(space_atom(kind, t, data[i]));
                g.atoms.push_back(space_atom(kind, t + 1, data[i]));
                const auto& neighbours =
                    kind == VolumeAtom::Kind::SpaceX ? adj_z[i] : adj_x[i];
                for (const auto& s : neighbours)
                    g.atoms.push_back(
                        {VolumeAtom::Kind::Time, t, s.cell_row, s.cell_col, s.slot});
                std::sort(g.atoms.begin(), g.atoms.end());
                out.push_back(std::move(g));
            }
        }
    }

    std::stable_sort(out.begin(), out.end(), [](const Simplifier& a, const Simplifier& b) {
        return a.atoms.front() < b.atoms.front();
    });
    return out;
}

ErrorVolume apply_simplifier(const ErrorVolume& vol, const Simplifier& s) {
    ErrorVolume out = vol;
    apply_simplifier_inplace(out, s);
    return out;
}

void apply_simplifier_inplace(ErrorVolume& vol, const Simplifier& s) {
    for (const auto& a : s.atoms) {
        if (a.cycle < 0 || a.cycle >= vol.cycles)
            throw std::invalid_argument("apply_simplifier: cycle out of range");
        apply_atom(vol, a);
    }
}

ErrorVolume greedy_reduce(const ErrorVolume& vol,
                          const std::vector<Simplifier>& generators) {
    ErrorVolume out = vol;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& g : generators) {
            int overlap = 0;
            for (const auto& a : g.atoms) overlap += get_atom(out, a) ? 1 : 0;
            const int size = static_cast<int>(g.atoms.size());
            bool apply = false;
            if (2 * overlap > size) {
                apply = true;
            } else if (2 * overlap == size && overlap > 0) {
                // tie rule: the generator's first coordinate must be active,
                // so applying clears it and moves the pattern strictly later
                apply = get_atom(out, g.atoms.front());
            }
            if (apply) {
                for (const auto& a : g.atoms) apply_atom(out, a);
                changed = true;
            }
        }
    }
    return out;
}

}  // namespace sqec
