#pragma once

#include <array>
#include <functional>
#include <vector>

#include "sqec/bit_plane.hpp"
#include "sqec/layout.hpp"
#include "sqec/noise.hpp"

namespace sqec {

// Equivalent errors at each cycle's reference timestep (just before the
// first CNOT): per cycle, per cell, 8 space bits (X/Z component per data
// slot) and 4 time-like bits (measurement flip per ancilla slot).
struct ErrorVolume {
    struct Cycle {
        std::array<BitPlane, 4> space_x, space_z, time_like;
    };
    const CodeLayout* layout = nullptr;
    int cycles = 0;
    Basis basis = Basis::Z;
    std::vector<Cycle> c;

    static ErrorVolume zero(const CodeLayout& layout, int cycles, Basis basis);

    ErrorVolume& operator^=(const ErrorVolume& o);
    friend ErrorVolume operator^(ErrorVolume a, const ErrorVolume& b) { a ^= b; return a; }
    bool operator==(const ErrorVolume& o) const;

    int active_bits() const;
    bool any() const;
};

// Detection events per stabiliser site and comparison layer. Layer t
// compares cycle t's measurement with cycle t-1; layer 0 compares with
// preparation and exists only for the tracked stabiliser type, as does the
// final layer (layer `cycles`), which compares the stabiliser values
// inferred from data measurement against the last measured round. The
// conjugate type is detectable in layers 1 .. cycles-1 only.
struct SyndromeVolume {
    const CodeLayout* layout = nullptr;
    int cycles = 0;
    Basis basis = Basis::Z;
    std::vector<std::array<BitPlane, 4>> layers;  // cycles + 1 entries

    static SyndromeVolume zero(const CodeLayout& layout, int cycles, Basis basis);

    SyndromeVolume& operator^=(const SyndromeVolume& o);
    friend SyndromeVolume operator^(SyndromeVolume a, const SyndromeVolume& b) { a ^= b; return a; }
    bool operator==(const SyndromeVolume& o) const;

    int event_count() const;
    int event_count(StabType t) const;
    bool any() const;
};

// Conjugates every class-2 error backward through the earlier CNOT layers of
// its cycle, merges the equivalent errors into space and time-like bits, and
// drops pure global phases: the ancilla component that acts trivially on the
// freshly prepared ancilla state, and the cycle-0 data component that acts
// trivially on the prepared data state.
ErrorVolume propagate_backward(const RawErrorBits& raw, const CodeLayout& layout);

SyndromeVolume detection_events(const ErrorVolume& vol);

// Chain-crossing parity indicating a logical-`basis` error: the parity of
// basis-component space errors across the conjugate logical's support,
// accumulated over all cycles. Equivalently, whether the error flips the
// value of the conjugate-basis measured logical.
int logical_flip(const ErrorVolume& vol, Basis basis);

// Atom of an ErrorVolume: one primitive space or time-like bit.
struct VolumeAtom {
    enum class Kind : int { SpaceX = 0, SpaceZ = 1, Time = 2 };
    Kind kind;
    int cycle, cell_row, cell_col, slot;

    friend bool operator==(const VolumeAtom&, const VolumeAtom&) = default;
    friend auto operator<=>(const VolumeAtom&, const VolumeAtom&) = default;
};

void apply_atom(ErrorVolume& vol, const VolumeAtom& a);
bool get_atom(const ErrorVolume& vol, const VolumeAtom& a);

// Enumerates the volume atoms whose parity forms the detection event at
// (site, layer), honoring the per-type layer windows. Used by the event
// computation, the decoding-graph construction and the fuzzy residual.
void for_each_event_atom(const CodeLayout& layout, int cycles, Basis basis,
                         const AncSite& site, int layer,
                         const std::function<void(const VolumeAtom&)>& fn);

// The detection events a single volume atom toggles (the transpose of
// for_each_event_atom).
std::vector<std::pair<AncSite, int>> atom_events(const CodeLayout& layout, int cycles,
                                                 Basis basis, const VolumeAtom& atom);

}  // namespace sqec
