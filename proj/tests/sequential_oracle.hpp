#pragma once

// Test-only reference simulator: walks the syndrome-measurement circuit gate
// by gate with explicit per-qubit Pauli frames, consuming the same
// RawErrorBits as the vectorised path. Errors are applied at their defined
// circuit locations (class-0 at the cycle reference, class-1 as measurement
// flips, class-2 just before the corresponding CNOT layer) and propagated
// forward through every CNOT, which is the independent route against which
// the backward bit-propagation is checked.

#include <map>
#include <utility>
#include <vector>

#include "sqec/layout.hpp"
#include "sqec/noise.hpp"
#include "sqec/propagation.hpp"

namespace sqec::testing {

struct OracleResult {
    SyndromeVolume events;
    int tracked_flip = 0;
};

OracleResult sequential_decode_reference(const RawErrorBits& raw, const CodeLayout& layout);

}  // namespace sqec::testing
