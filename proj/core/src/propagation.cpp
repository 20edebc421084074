#include "sqec/propagation.hpp"

#include <stdexcept>

namespace sqec {

ErrorVolume ErrorVolume::zero(const CodeLayout& layout, int cycles, Basis basis) {
    ErrorVolume v;
    v.layout = &layout;
    v.cycles = cycles;
    v.basis = basis;
    v.c.resize(cycles);
    for (auto& cy : v.c)
        for (int s = 0; s < 4; ++s) {
            cy.space_x[s] = BitPlane(layout.rows(), layout.cols());
            cy.space_z[s] = BitPlane(layout.rows(), layout.cols());
            cy.time_like[s] = BitPlane(layout.rows(), layout.cols());
        }
    return v;
}

ErrorVolume& ErrorVolume::operator^=(const ErrorVolume& o) {
    if (cycles != o.cycles || layout != o.layout)
        throw std::invalid_argument("ErrorVolume xor: shape mismatch");
    for (int t = 0; t < cycles; ++t)
        for (int s = 0; s < 4; ++s) {
            c[t].space_x[s] ^= o.c[t].space_x[s];
            c[t].space_z[s] ^= o.c[t].space_z[s];
            c[t].time_like[s] ^= o.c[t].time_like[s];
        }
    return *this;
}

bool ErrorVolume::operator==(const ErrorVolume& o) const {
    if (cycles != o.cycles) return false;
    for (int t = 0; t < cycles; ++t)
        for (int s = 0; s < 4; ++s) {
            if (!(c[t].space_x[s] == o.c[t].space_x[s])) return false;
            if (!(c[t].space_z[s] == o.c[t].space_z[s])) return false;
            if (!(c[t].time_like[s] == o.c[t].time_like[s])) return false;
        }
    return true;
}

int ErrorVolume::active_bits() const {
    int n = 0;
    for (const auto& cy : c)
        for (int s = 0; s < 4; ++s)
            n += cy.space_x[s].count() + cy.space_z[s].count() + cy.time_like[s].count();
    return n;
}

bool ErrorVolume::any() const { return active_bits() > 0; }

SyndromeVolume SyndromeVolume::zero(const CodeLayout& layout, int cycles, Basis basis) {
    SyndromeVolume s;
    s.layout = &layout;
    s.cycles = cycles;
    s.basis = basis;
    s.layers.resize(cycles + 1);
    for (auto& layer : s.layers)
        for (int a = 0; a < 4; ++a) layer[a] = BitPlane(layout.rows(), layout.cols());
    return s;
}

SyndromeVolume& SyndromeVolume::operator^=(const SyndromeVolume& o) {
    if (cycles != o.cycles || layout != o.layout)
        throw std::invalid_argument("SyndromeVolume xor: shape mismatch");
    for (std::size_t l = 0; l < layers.size(); ++l)
        for (int a = 0; a < 4; ++a) layers[l][a] ^= o.layers[l][a];
    return *this;
}

bool SyndromeVolume::operator==(const SyndromeVolume& o) const {
    if (cycles != o.cycles) return false;
    for (std::size_t l = 0; l < layers.size(); ++l)
        for (int a = 0; a < 4; ++a)
            if (!(layers[l][a] == o.layers[l][a])) return false;
    return true;
}

int SyndromeVolume::event_count() const {
    int n = 0;
    for (const auto& layer : layers)
        for (int a = 0; a < 4; ++a) n += layer[a].count();
    return n;
}

int SyndromeVolume::event_count(StabType t) const {
    int n = 0;
    for (const auto& layer : layers)
        for (int a = 0; a < 4; ++a)
            if (anc_type(a) == t) n += layer[a].count();
    return n;
}

bool SyndromeVolume::any() const { return event_count() > 0; }

namespace {

// Backward conjugation of the accumulated error planes through CNOT layer j.
// X-type ancillas control their CNOTs, Z-type ancillas are targets:
//   X on control adds X on target, Z on target adds Z on control.
// The four gates of a layer touch disjoint qubits, so updates commute.
void conjugate_layer(const CodeLayout& layout, int j,
                     std::array<BitPlane, 4>& ax, std::array<BitPlane, 4>& az,
                     std::array<BitPlane, 4>& dx, std::array<BitPlane, 4>& dz) {
    for (int a = 0; a < 4; ++a) {
        const auto& p = CodeLayout::cnot_partner(a, j);
        const BitPlane& mask = layout.gate_mask(a, j);
        if (anc_type(a) == StabType::X) {
            dx[p.data_slot].xor_translated(ax[a] & mask, p.drow, p.dcol);
            az[a] ^= BitPlane::translated(dz[p.data_slot], -p.drow, -p.dcol) & mask;
        } else {
            ax[a] ^= BitPlane::translated(dx[p.data_slot], -p.drow, -p.dcol) & mask;
            dz[p.data_slot].xor_translated(az[a] & mask, p.drow, p.dcol);
        }
    }
}

}  // namespace

ErrorVolume propagate_backward(const RawErrorBits& raw, const CodeLayout& layout) {
    const int rows = layout.rows(), cols = layout.cols();
    ErrorVolume vol = ErrorVolume::zero(layout, static_cast<int>(raw.cycles.size()),
                                        raw.cfg.basis);

    for (int t = 0; t < vol.cycles; ++t) {
        const auto& cy = raw.cycles[t];
        std::array<BitPlane, 4> ax, az, dx, dz;
        for (int s = 0; s < 4; ++s) {
            ax[s] = BitPlane(rows, cols);
            az[s] = BitPlane(rows, cols);
            dx[s] = BitPlane(rows, cols);
            dz[s] = BitPlane(rows, cols);
        }

        // Class-2 errors before layer k conjugate backward through layers
        // k-1 .. 0. Data-side planes are anchored at the ancilla cell and
        // move to the partner's cell on injection.
        for (int k = 3; k >= 0; --k) {
            for (int a = 0; a < 4; ++a) {
                const int g = a * 4 + k;
                const auto& p = CodeLayout::cnot_partner(a, k);
                ax[a] ^= cy.gate[g].anc_x;
                az[a] ^= cy.gate[g].anc_z;
                dx[p.data_slot].xor_translated(cy.gate[g].data_x, p.drow, p.dcol);
                dz[p.data_slot].xor_translated(cy.gate[g].data_z, p.drow, p.dcol);
            }
            if (k > 0) conjugate_layer(layout, k - 1, ax, az, dx, dz);
        }

        for (int s = 0; s < 4; ++s) {
            vol.c[t].space_x[s] = (dx[s] ^ cy.idle_x[s]) & layout.data_presence(s);
            vol.c[t].space_z[s] = (dz[s] ^ cy.idle_z[s]) & layout.data_presence(s);
            // Measurement flips: X component on a Z ancilla, Z component on an
            // X ancilla. The other component is a global phase on the freshly
            // prepared ancilla and is dropped.
            const BitPlane& flip = anc_type(s) == StabType::Z ? ax[s] : az[s];
            vol.c[t].time_like[s] = (flip ^ cy.anc_flip[s]) & layout.anc_presence(s);
        }
    }

    // The data component that acts trivially on the prepared data state is a
    // global phase at the first reference timestep: X for a basis-Z run
    // (conjugate-basis preparation in |+>), Z for a basis-X run.
    if (!vol.c.empty()) {
        for (int s = 0; s < 4; ++s) {
            if (vol.basis == Basis::Z) vol.c[0].space_x[s].clear();
            else                       vol.c[0].space_z[s].clear();
        }
    }
    return vol;
}

SyndromeVolume detection_events(const ErrorVolume& vol) {
    const CodeLayout& layout = *vol.layout;
    const int rows = layout.rows(), cols = layout.cols();
    const StabType tracked = tracked_stab(vol.basis);
    SyndromeVolume syn = SyndromeVolume::zero(layout, vol.cycles, vol.basis);

    // Per-cycle anticommuting space parities at each ancilla site.
    std::vector<std::array<BitPlane, 4>> sp(vol.cycles);
    for (int t = 0; t < vol.cycles; ++t) {
        for (int a = 0; a < 4; ++a) {
            BitPlane acc(rows, cols);
            const auto& comp =
                anc_type(a) == StabType::X ? vol.c[t].space_z : vol.c[t].space_x;
            for (int k = 0; k < 4; ++k) {
                const auto& p = CodeLayout::cnot_partner(a, k);
                acc ^= BitPlane::translated(comp[p.data_slot], -p.drow, -p.dcol);
            }
            sp[t][a] = acc & layout.anc_presence(a);
        }
    }

    for (int a = 0; a < 4; ++a) {
        const bool is_tracked = anc_type(a) == tracked;
        if (is_tracked) {
            syn.layers[0][a] = sp[0][a] ^ vol.c[0].time_like[a];
            syn.layers[vol.cycles][a] = vol.c[vol.cycles - 1].time_like[a];
        }
        for (int t = 1; t <= vol.cycles - 1; ++t)
            syn.layers[t][a] = sp[t][a] ^ vol.c[t].time_like[a] ^ vol.c[t - 1].time_like[a];
    }
    return syn;
}

int logical_flip(const ErrorVolume& vol, Basis basis) {
    const CodeLayout& layout = *vol.layout;
    const auto& support = layout.logical_support(conjugate(basis));
    int parity = 0;
    for (int t = 0; t < vol.cycles; ++t) {
        const auto& comp = basis == Basis::X ? vol.c[t].space_x : vol.c[t].space_z;
        for (const auto& q : support)
            parity ^= comp[q.slot].get(q.cell_row, q.cell_col) ? 1 : 0;
    }
    return parity;
}

void apply_atom(ErrorVolume& vol, const VolumeAtom& a) {
    switch (a.kind) {
        case VolumeAtom::Kind::SpaceX: vol.c[a.cycle].space_x[a.slot].toggle(a.cell_row, a.cell_col); break;
        case VolumeAtom::Kind::SpaceZ: vol.c[a.cycle].space_z[a.slot].toggle(a.cell_row, a.cell_col); break;
        case VolumeAtom::Kind::Time:   vol.c[a.cycle].time_like[a.slot].toggle(a.cell_row, a.cell_col); break;
    }
}

bool get_atom(const ErrorVolume& vol, const VolumeAtom& a) {
    switch (a.kind) {
        case VolumeAtom::Kind::SpaceX: return vol.c[a.cycle].space_x[a.slot].get(a.cell_row, a.cell_col);
        case VolumeAtom::Kind::SpaceZ: return vol.c[a.cycle].space_z[a.slot].get(a.cell_row, a.cell_col);
        case VolumeAtom::Kind::Time:   return vol.c[a.cycle].time_like[a.slot].get(a.cell_row, a.cell_col);
    }
    return false;
}

std::vector<std::pair<AncSite, int>> atom_events(const CodeLayout& layout, int cycles,
                                                 Basis basis, const VolumeAtom& atom) {
    const StabType tracked = tracked_stab(basis);
    std::vector<std::pair<AncSite, int>> out;
    auto layer_exists = [&](StabType t, int layer) {
        if (layer < 0 || layer > cycles) return false;
        if (t == tracked) return true;
        return layer >= 1 && layer <= cycles - 1;
    };

    if (atom.kind == VolumeAtom::Kind::Time) {
        AncSite s{atom.cell_row, atom.cell_col, atom.slot};
        StabType t = anc_type(atom.slot);
        if (layer_exists(t, atom.cycle)) out.push_back({s, atom.cycle});
        if (layer_exists(t, atom.cycle + 1)) out.push_back({s, atom.cycle + 1});
        return out;
    }

    // space atom: flips the adjacent anticommuting stabilisers at its own layer
    const StabType flipped =
        atom.kind == VolumeAtom::Kind::SpaceX ? StabType::Z : StabType::X;
    for (int k = 0; k < 4; ++k) {
        const auto& dp = CodeLayout::data_partner(atom.slot, k);
        if (anc_type(dp.anc_slot) != flipped) continue;
        AncSite s{atom.cell_row + dp.drow, atom.cell_col + dp.dcol, dp.anc_slot};
        if (s.cell_row < 0 || s.cell_row >= layout.rows() || s.cell_col < 0 ||
            s.cell_col >= layout.cols())
            continue;
        if (!layout.anc_present(s)) continue;
        if (layer_exists(flipped, atom.cycle)) out.push_back({s, atom.cycle});
    }
    return out;
}

void for_each_event_atom(const CodeLayout& layout, int cycles, Basis basis,
                         const AncSite& site, int layer,
                         const std::function<void(const VolumeAtom&)>& fn) {
    const StabType type = anc_type(site.slot);
    const bool is_tracked = type == tracked_stab(basis);
    const auto kind = type == StabType::X ? VolumeAtom::Kind::SpaceZ
                                          : VolumeAtom::Kind::SpaceX;

    auto space_atoms = [&](int cycle) {
        for (int k = 0; k < 4; ++k) {
            const auto& p = CodeLayout::cnot_partner(site.slot, k);
            DataSite q{site.cell_row + p.drow, site.cell_col + p.dcol, p.data_slot};
            if (q.cell_row < 0 || q.cell_row >= layout.rows() ||
                q.cell_col < 0 || q.cell_col >= layout.cols())
                continue;
            if (!layout.data_present(q)) continue;
            fn(VolumeAtom{kind, cycle, q.cell_row, q.cell_col, q.slot});
        }
    };
    auto time_atom = [&](int cycle) {
        fn(VolumeAtom{VolumeAtom::Kind::Time, cycle, site.cell_row, site.cell_col,
                      site.slot});
    };

    if (is_tracked && layer == 0) {
        space_atoms(0);
        time_atom(0);
    } else if (is_tracked && layer == cycles) {
        time_atom(cycles - 1);
    } else if (layer >= 1 && layer <= cycles - 1) {
        space_atoms(layer);
        time_atom(layer);
        time_atom(layer - 1);
    }
}

}  // namespace sqec
