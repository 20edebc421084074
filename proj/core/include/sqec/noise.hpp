#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "sqec/bit_plane.hpp"
#include "sqec/layout.hpp"

namespace sqec {

// Circuit noise is parametrised by the depolarisation parameter p' (the
// probability that a depolarisation event occurs per gate / idle step, with
// the identity among the uniform outcomes), not by the error rate p = 3p'/4.
struct NoiseConfig {
    double depol_param = 0.0;  // p'
    int cycles = 1;            // n_c
    Basis basis = Basis::Z;
    std::uint64_t seed = 0;
};

// Pre-propagation error bits of one shot, organised per cycle:
//   class 0: one compound idle depolarisation event per data slot
//            (X/Z component bits),
//   class 1: ancilla SPAM measurement-flip bits,
//   class 2: per CNOT gate slot (ancilla slot x layer) an occurrence bit and
//            four uniform Pauli bits (X_anc, Z_anc, X_data, Z_data) masked by
//            the presence of each side; the data-side planes are anchored at
//            the ancilla's cell.
// One-sided gate slots (partner absent) keep the present side's bits, which
// is how boundary qubits pick up their idle noise during CNOT steps.
struct RawErrorBits {
    struct GateErr {
        BitPlane anc_x, anc_z, data_x, data_z;
    };
    struct Cycle {
        std::array<BitPlane, 4> idle_x, idle_z;   // per data slot
        std::array<BitPlane, 4> anc_flip;         // per ancilla slot
        std::array<BitPlane, 16> occurrence;      // [anc_slot * 4 + layer]
        std::array<GateErr, 16> gate;             // same indexing
    };
    const CodeLayout* layout = nullptr;
    NoiseConfig cfg;
    std::vector<Cycle> cycles;

    static RawErrorBits zero(const CodeLayout& layout, const NoiseConfig& cfg);
    bool all_zero() const;
};

// p'_n = 1 - (1 - p')^n: compound parameter of n composed depolarisations.
double compound_depol(double p_prime, int n);

// (Z-ancilla flip, X-ancilla flip) = (p'_2 / 2, p'_4 / 2): Z ancillas see
// reset + measurement noise, X ancillas two extra Hadamard steps.
std::pair<double, double> class1_flip_probs(double p_prime);

// Idle steps folded into cycle t's class-0 event: 4, plus data preparation
// on the first cycle and data measurement on the last.
int idle_steps(const NoiseConfig& cfg, int cycle);

RawErrorBits sample_shot(const CodeLayout& layout, const NoiseConfig& cfg);

}  // namespace sqec
