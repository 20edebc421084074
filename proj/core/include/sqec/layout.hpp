#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "sqec/bit_plane.hpp"

namespace sqec {

// Basis of a logical observable. A basis-Z run tracks logical-Z errors
// (Z-type data error chains), whose detectors are the X-type (vertex)
// stabilisers; a basis-X run tracks logical-X errors via the Z-type
// (plaquette) stabilisers. Physically, tracking basis B corresponds to the
// memory experiment that prepares and measures data qubits in the conjugate
// basis.
enum class Basis : int { X = 0, Z = 1 };

enum class StabType : int { X = 0, Z = 1 };

inline Basis conjugate(Basis b) { return b == Basis::X ? Basis::Z : Basis::X; }

// Stabiliser type whose detection events witness basis-b error chains.
inline StabType tracked_stab(Basis b) {
    return b == Basis::Z ? StabType::X : StabType::Z;
}

// Data slots within a cell, clockwise from top-left.
enum DataSlot : int { kTL = 0, kTR = 1, kBR = 2, kBL = 3 };

// Ancilla slots within a cell: two X-type then two Z-type.
enum AncSlot : int { kX0 = 0, kX1 = 1, kZ0 = 2, kZ1 = 3 };

inline StabType anc_type(int slot) { return slot < 2 ? StabType::X : StabType::Z; }

struct DataSite {
    int cell_row, cell_col, slot;
    friend bool operator==(const DataSite&, const DataSite&) = default;
    friend auto operator<=>(const DataSite&, const DataSite&) = default;
};

struct AncSite {
    int cell_row, cell_col, slot;
    friend bool operator==(const AncSite&, const AncSite&) = default;
    friend auto operator<=>(const AncSite&, const AncSite&) = default;
};

// Geometry of a distance-d rotated surface code as a grid of unit cells.
//
// Coordinate conventions (fixed once and shared by every module):
//
//   * Data qubits live on a d x d grid, (i, j) with 0 <= i, j < d.
//     Logical X support: top row (0, j). Logical Z support: left column (i, 0).
//   * Stabilisers live on the dual "plaquette" grid: plaquette (i, j) with
//     -1 <= i, j <= d-1 covers data qubits {i, i+1} x {j, j+1} clipped to the
//     data grid. Type: X when (i + j) is odd, Z when even. Weight-2 boundary
//     stabilisers exist on the left/right edges (X type) and top/bottom edges
//     (Z type); corner positions are absent.
//   * Cells: an n x n array with n = floor((d+3)/2). Cell (R, C) holds
//       data slot s in {TL, TR, BR, BL} -> data qubit (2R + dr(s) - 1,
//       2C + dc(s) - 1) with dr = {0,0,1,1}, dc = {0,1,1,0};
//       ancilla slot a -> plaquette (2R + ar(a) - 2, 2C + ac(a) - 2) with
//       (ar, ac) = X0:(0,1), X1:(1,0), Z0:(0,0), Z1:(1,1).
//     Offsetting data by one slot row/column and letting the bottom/right
//     boundary stabilisers spill into the last cell row/column is what makes
//     the full n x n grid necessary.
//
// CNOT schedule: four layers per cycle. X stabilisers touch their data in
// "N" order (TL, BL, TR, BR), Z stabilisers in "Z" order (TL, TR, BL, BR);
// the layer-by-layer offset parities coincide, so no qubit is used twice in
// a layer, and single mid-circuit ancilla faults propagate to data pairs
// perpendicular to the error chains they would otherwise extend.
class CodeLayout {
public:
    struct Partner {
        int data_slot;  // slot of the partner data qubit
        int drow, dcol; // partner's cell minus the ancilla's cell
    };

    static std::pair<int, int> grid_dims(int distance);
    static CodeLayout build(int distance);

    int distance() const { return distance_; }
    int rows() const { return n_; }
    int cols() const { return n_; }

    // Presence planes: indices 0..3 data slots, 4..7 ancilla slots (X0,X1,Z0,Z1).
    const BitPlane& data_presence(int slot) const { return presence_[slot]; }
    const BitPlane& anc_presence(int slot) const { return presence_[4 + slot]; }
    const BitPlane& presence(int idx8) const { return presence_[idx8]; }

    bool data_present(const DataSite& s) const {
        return presence_[s.slot].get(s.cell_row, s.cell_col);
    }
    bool anc_present(const AncSite& s) const {
        return presence_[4 + s.slot].get(s.cell_row, s.cell_col);
    }

    // (cell, slot) <-> physical coordinates.
    std::pair<int, int> data_coord(const DataSite& s) const;
    DataSite data_site(int i, int j) const;
    std::pair<int, int> plaquette_coord(const AncSite& s) const;

    static const Partner& cnot_partner(int anc_slot, int layer);

    // Inverse of cnot_partner: the ancilla slot interacting with a given data
    // slot in a given layer, with the ancilla's cell offset from the data's.
    struct DataPartner {
        int anc_slot;
        int drow, dcol;
    };
    static const DataPartner& data_partner(int data_slot, int layer);

    // Mask over ancilla cells: partner data qubit present for (slot, layer).
    const BitPlane& partner_data_mask(int anc_slot, int layer) const {
        return partner_mask_[anc_slot][layer];
    }
    // Mask over ancilla cells: gate applied (ancilla and partner both present).
    const BitPlane& gate_mask(int anc_slot, int layer) const {
        return gate_mask_[anc_slot][layer];
    }

    // Support of a present stabiliser in CNOT schedule order (2 or 4 qubits).
    std::vector<DataSite> stabiliser_support(const AncSite& site) const;

    const std::vector<DataSite>& logical_support(Basis b) const {
        return b == Basis::X ? logical_x_ : logical_z_;
    }

    std::vector<DataSite> data_sites() const;
    std::vector<AncSite> anc_sites() const;
    std::vector<AncSite> anc_sites(StabType t) const;

    int num_data() const { return distance_ * distance_; }
    int num_stabilisers(StabType) const { return (distance_ * distance_ - 1) / 2; }

private:
    explicit CodeLayout(int distance);

    int distance_ = 0;
    int n_ = 0;
    std::array<BitPlane, 8> presence_;
    std::array<std::array<BitPlane, 4>, 4> partner_mask_;
    std::array<std::array<BitPlane, 4>, 4> gate_mask_;
    std::vector<DataSite> logical_x_, logical_z_;
};

// True when plaquette (i, j) carries a stabiliser of layout distance d,
// and its type. Exposed for tests and graph construction.
bool plaquette_present(int distance, int i, int j);
StabType plaquette_type(int i, int j);

}  // namespace sqec
