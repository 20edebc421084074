#include "sqec/layout.hpp"

#include <stdexcept>

namespace sqec {

namespace {

// Data slot offsets within a cell, clockwise from top-left.
constexpr int kDr[4] = {0, 0, 1, 1};
constexpr int kDc[4] = {0, 1, 1, 0};

// Ancilla slot -> plaquette offset; plaquette = (2R + ar - 2, 2C + ac - 2).
constexpr int kAr[4] = {0, 1, 0, 1};
constexpr int kAc[4] = {1, 0, 0, 1};

// X stabilisers visit data in "N" order (TL, BL, TR, BR); Z stabilisers in
// "Z" order (TL, TR, BL, BR). Both sequences have offset-parity pattern
// (even, odd, odd, even), so the four layers are conflict-free.
constexpr int kXOrder[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
constexpr int kZOrder[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};

void check_distance(int d) {
    if (d < 3 || d % 2 == 0)
        throw std::invalid_argument("distance must be an odd integer >= 3");
}

}  // namespace

bool plaquette_present(int d, int i, int j) {
    if (i < -1 || i > d - 1 || j < -1 || j > d - 1) return false;
    const bool top = (i == -1), bottom = (i == d - 1);
    const bool left = (j == -1), right = (j == d - 1);
    if ((top || bottom) && (left || right)) return false;  // corners
    if (top) return j >= 0 && j <= d - 2 && (j % 2 == 1);
    if (bottom) return j >= 0 && j <= d - 2 && (j % 2 == 0);
    if (left) return i >= 0 && i <= d - 2 && (i % 2 == 0);
    if (right) return i >= 0 && i <= d - 2 && (i % 2 == 1);
    return true;  // interior
}

StabType plaquette_type(int i, int j) {
    // (i + j) odd -> X (vertex), even -> Z (plaquette).
    return ((i + j) & 1) ? StabType::X : StabType::Z;
}

std::pair<int, int> CodeLayout::grid_dims(int distance) {
    check_distance(distance);
    int n = (distance + 3) / 2;
    return {n, n};
}

const CodeLayout::Partner& CodeLayout::cnot_partner(int anc_slot, int layer) {
    // Derived once from the slot maps above: for ancilla slot a in cell
    // (R, C), the layer-k partner is the data qubit at plaquette + order[k],
    // re-expressed as (data slot, cell offset).
    static const std::array<std::array<Partner, 4>, 4> table = [] {
        std::array<std::array<Partner, 4>, 4> t{};
        for (int a = 0; a < 4; ++a) {
            const bool is_x = anc_type(a) == StabType::X;
            for (int k = 0; k < 4; ++k) {
                const auto& ord = is_x ? kXOrder[k] : kZOrder[k];
                // plaquette at (2R + ar - 2, 2C + ac - 2); data at plaquette + ord
                int di = kAr[a] - 2 + ord[0];  // data row minus 2R
                int dj = kAc[a] - 2 + ord[1];
                // data (i, j) lives in cell ((i+1)/2, (j+1)/2), slot parity ((i+1)%2, (j+1)%2)
                int sr = di + 1, sc = dj + 1;  // slot-space offset relative to (2R, 2C)
                int drow = (sr >= 0) ? sr / 2 : -((-sr + 1) / 2);
                int dcol = (sc >= 0) ? sc / 2 : -((-sc + 1) / 2);
                int pa = sr - 2 * drow, pb = sc - 2 * dcol;
                int slot = (pa == 0) ? (pb == 0 ? kTL : kTR) : (pb == 0 ? kBL : kBR);
                t[a][k] = Partner{slot, drow, dcol};
            }
        }
        return t;
    }();
    return table[anc_slot][layer];
}

const CodeLayout::DataPartner& CodeLayout::data_partner(int data_slot, int layer) {
    static const std::array<std::array<DataPartner, 4>, 4> table = [] {
        std::array<std::array<DataPartner, 4>, 4> t{};
        for (int a = 0; a < 4; ++a)
            for (int k = 0; k < 4; ++k) {
                const Partner& p = cnot_partner(a, k);
                t[p.data_slot][k] = DataPartner{a, -p.drow, -p.dcol};
            }
        return t;
    }();
    return table[data_slot][layer];
}

CodeLayout::CodeLayout(int distance) : distance_(distance) {
    n_ = (distance + 3) / 2;
    for (auto& p : presence_) p = BitPlane(n_, n_);

    const int d = distance_;
    for (int R = 0; R < n_; ++R) {
        for (int C = 0; C < n_; ++C) {
            for (int s = 0; s < 4; ++s) {
                int i = 2 * R + kDr[s] - 1, j = 2 * C + kDc[s] - 1;
                if (i >= 0 && i < d && j >= 0 && j < d) presence_[s].set(R, C, true);
            }
            for (int a = 0; a < 4; ++a) {
                int i = 2 * R + kAr[a] - 2, j = 2 * C + kAc[a] - 2;
                if (plaquette_present(d, i, j)) presence_[4 + a].set(R, C, true);
            }
        }
    }

    for (int a = 0; a < 4; ++a) {
        for (int k = 0; k < 4; ++k) {
            const Partner& p = cnot_partner(a, k);
            // mask value at the ancilla's cell, so translate the data plane back
            partner_mask_[a][k] = BitPlane::translated(presence_[p.data_slot], -p.drow, -p.dcol);
            gate_mask_[a][k] = partner_mask_[a][k] & presence_[4 + a];
        }
    }

    for (int j = 0; j < d; ++j) logical_x_.push_back(data_site(0, j));
    for (int i = 0; i < d; ++i) logical_z_.push_back(data_site(i, 0));
}

CodeLayout CodeLayout::build(int distance) {
    check_distance(distance);
    return CodeLayout(distance);
}

std::pair<int, int> CodeLayout::data_coord(const DataSite& s) const {
    return {2 * s.cell_row + kDr[s.slot] - 1, 2 * s.cell_col + kDc[s.slot] - 1};
}

DataSite CodeLayout::data_site(int i, int j) const {
    int R = (i + 1) / 2, C = (j + 1) / 2;
    int pa = (i + 1) % 2, pb = (j + 1) % 2;
    int slot = (pa == 0) ? (pb == 0 ? kTL : kTR) : (pb == 0 ? kBL : kBR);
    return DataSite{R, C, slot};
}

std::pair<int, int> CodeLayout::plaquette_coord(const AncSite& s) const {
    return {2 * s.cell_row + kAr[s.slot] - 2, 2 * s.cell_col + kAc[s.slot] - 2};
}

std::vector<DataSite> CodeLayout::stabiliser_support(const AncSite& site) const {
    if (!anc_present(site))
        throw std::invalid_argument("stabiliser_support: ancilla slot not present");
    std::vector<DataSite> out;
    for (int k = 0; k < 4; ++k) {
        const Partner& p = cnot_partner(site.slot, k);
        DataSite ds{site.cell_row + p.drow, site.cell_col + p.dcol, p.data_slot};
        if (ds.cell_row < 0 || ds.cell_row >= n_ || ds.cell_col < 0 || ds.cell_col >= n_)
            continue;
        if (data_present(ds)) out.push_back(ds);
    }
    return out;
}

std::vector<DataSite> CodeLayout::data_sites() const {
    std::vector<DataSite> out;
    for (int s = 0; s < 4; ++s)
        presence_[s].for_each_set([&](int r, int c) { out.push_back({r, c, s}); });
    return out;
}

std::vector<AncSite> CodeLayout::anc_sites() const {
    std::vector<AncSite> out;
    for (int a = 0; a < 4; ++a)
        presence_[4 + a].for_each_set([&](int r, int c) { out.push_back({r, c, a}); });
    return out;
}

std::vector<AncSite> CodeLayout::anc_sites(StabType t) const {
    std::vector<AncSite> out;
    for (int a = 0; a < 4; ++a) {
        if (anc_type(a) != t) continue;
        presence_[4 + a].for_each_set([&](int r, int c) { out.push_back({r, c, a}); });
    }
    return out;
}

}  // namespace sqec
