#pragma once

#include <vector>

#include "sqec/layout.hpp"
#include "sqec/propagation.hpp"

namespace sqec {

// A space-time bit pattern with trivial syndrome and trivial logical action.
// Stabiliser kind: one stabiliser's support applied as same-type space errors
// at a single cycle (a closed loop). Pair kind: the same data error repeated
// in two consecutive cycles together with the time-like errors of the
// adjacent anticommuting stabilisers in the earlier cycle.
struct Simplifier {
    enum class Kind : int { Stabiliser = 0, Pair = 1 };
    Kind kind;
    std::vector<VolumeAtom> atoms;  // sorted; each pattern is its own inverse
};

// All generators for a layout over `cycles` cycles: one stabiliser kind per
// present stabiliser per cycle (4 per full cell per cycle) and one pair kind
// per present data slot per error component per cycle boundary (8 per full
// cell per boundary). Sorted in raster order (cycle, row, col, kind).
std::vector<Simplifier> simplifier_generators(const CodeLayout& layout, int cycles);

ErrorVolume apply_simplifier(const ErrorVolume& vol, const Simplifier& s);
void apply_simplifier_inplace(ErrorVolume& vol, const Simplifier& s);

// Greedy fixed point: sweep the generators in raster order, applying any
// whose active overlap exceeds half its size; exact-half overlaps apply only
// when the generator's first coordinate (in canonical atom order) is active,
// so the application clears it. The first rule strictly decreases the active
// bit count, the second strictly increases the sorted coordinate list
// lexicographically at constant count, so the sweep terminates.
ErrorVolume greedy_reduce(const ErrorVolume& vol, const std::vector<Simplifier>& generators);

}  // namespace sqec
