#include "sqec/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "sqec/rng.hpp"

namespace sqec {

double compound_depol(double p_prime, int n) {
    if (p_prime < 0.0 || p_prime >= 1.0)
        throw std::invalid_argument("compound_depol: need 0 <= p' < 1");
    if (n < 1) throw std::invalid_argument("compound_depol: need n >= 1");
    return 1.0 - std::pow(1.0 - p_prime, n);
}

std::pair<double, double> class1_flip_probs(double p_prime) {
    return {compound_depol(p_prime, 2) / 2.0, compound_depol(p_prime, 4) / 2.0};
}

int idle_steps(const NoiseConfig& cfg, int cycle) {
    int n = 4;
    if (cycle == 0) n += 1;
    if (cycle == cfg.cycles - 1) n += 1;
    return n;
}

RawErrorBits RawErrorBits::zero(const CodeLayout& layout, const NoiseConfig& cfg) {
    RawErrorBits raw;
    raw.layout = &layout;
    raw.cfg = cfg;
    raw.cycles.resize(cfg.cycles);
    for (auto& cy : raw.cycles) {
        for (int s = 0; s < 4; ++s) {
            cy.idle_x[s] = BitPlane(layout.rows(), layout.cols());
            cy.idle_z[s] = BitPlane(layout.rows(), layout.cols());
            cy.anc_flip[s] = BitPlane(layout.rows(), layout.cols());
        }
        for (int g = 0; g < 16; ++g) {
            cy.occurrence[g] = BitPlane(layout.rows(), layout.cols());
            cy.gate[g] = {BitPlane(layout.rows(), layout.cols()),
                          BitPlane(layout.rows(), layout.cols()),
                          BitPlane(layout.rows(), layout.cols()),
                          BitPlane(layout.rows(), layout.cols())};
        }
    }
    return raw;
}

bool RawErrorBits::all_zero() const {
    for (const auto& cy : cycles) {
        for (int s = 0; s < 4; ++s)
            if (cy.idle_x[s].any() || cy.idle_z[s].any() || cy.anc_flip[s].any()) return false;
        for (int g = 0; g < 16; ++g) {
            const auto& ge = cy.gate[g];
            if (ge.anc_x.any() || ge.anc_z.any() || ge.data_x.any() || ge.data_z.any())
                return false;
        }
    }
    return true;
}

RawErrorBits sample_shot(const CodeLayout& layout, const NoiseConfig& cfg) {
    if (cfg.cycles < 1) throw std::invalid_argument("sample_shot: cycles >= 1");
    if (cfg.depol_param < 0.0 || cfg.depol_param >= 1.0)
        throw std::invalid_argument("sample_shot: need 0 <= p' < 1");

    const int rows = layout.rows(), cols = layout.cols();
    const double p = cfg.depol_param;
    const auto [z_flip, x_flip] = class1_flip_probs(p);

    RawErrorBits raw;
    raw.layout = &layout;
    raw.cfg = cfg;
    raw.cycles.resize(cfg.cycles);

    for (int t = 0; t < cfg.cycles; ++t) {
        auto& cy = raw.cycles[t];
        const double p_idle = compound_depol(p, idle_steps(cfg, t));
        for (int s = 0; s < 4; ++s) {
            cy.idle_x[s] = BitPlane(rows, cols);
            cy.idle_z[s] = BitPlane(rows, cols);
            cy.anc_flip[s] = BitPlane(rows, cols);
        }
        for (int g = 0; g < 16; ++g) {
            cy.occurrence[g] = BitPlane(rows, cols);
            cy.gate[g] = {BitPlane(rows, cols), BitPlane(rows, cols),
                          BitPlane(rows, cols), BitPlane(rows, cols)};
        }

        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const std::uint64_t cell = static_cast<std::uint64_t>(r) * cols + c;

                // class 0: one compound event per data slot; the low two bits
                // of the same draw choose the Pauli (00=I, 01=X, 11=Y, 10=Z).
                for (int s = 0; s < 4; ++s) {
                    if (!layout.data_presence(s).get(r, c)) continue;
                    std::uint64_t v = rng::value(cfg.seed, rng::Stream::Class0, t, cell, s);
                    if (rng::to_unit(v) < p_idle) {
                        if (v & 1ULL) cy.idle_x[s].set(r, c, true);
                        if (v & 2ULL) cy.idle_z[s].set(r, c, true);
                    }
                }

                // class 1: direct syndrome-bit flips, type-dependent rate.
                for (int a = 0; a < 4; ++a) {
                    if (!layout.anc_presence(a).get(r, c)) continue;
                    double q = anc_type(a) == StabType::Z ? z_flip : x_flip;
                    if (rng::unit(cfg.seed, rng::Stream::Class1, t, cell, a) < q)
                        cy.anc_flip[a].set(r, c, true);
                }

                // class 2: 16 occurrence draws masked over one 64-bit draw of
                // uniform Pauli bits (4 bits per gate slot).
                std::uint64_t pauli_bits = rng::value(cfg.seed, rng::Stream::Class2Bit, t, cell);
                for (int a = 0; a < 4; ++a) {
                    const bool anc_here = layout.anc_presence(a).get(r, c);
                    for (int k = 0; k < 4; ++k) {
                        const int g = a * 4 + k;
                        const bool data_here = layout.partner_data_mask(a, k).get(r, c);
                        if (!anc_here && !data_here) continue;
                        if (rng::unit(cfg.seed, rng::Stream::Class2Occ, t, cell, g) >= p)
                            continue;
                        cy.occurrence[g].set(r, c, true);
                        std::uint64_t bits = pauli_bits >> (4 * g);
                        if (anc_here) {
                            if (bits & 1ULL) cy.gate[g].anc_x.set(r, c, true);
                            if (bits & 2ULL) cy.gate[g].anc_z.set(r, c, true);
                        }
                        if (data_here) {
                            if (bits & 4ULL) cy.gate[g].data_x.set(r, c, true);
                            if (bits & 8ULL) cy.gate[g].data_z.set(r, c, true);
                        }
                    }
                }
            }
        }
    }
    return raw;
}

}  // namespace sqec
