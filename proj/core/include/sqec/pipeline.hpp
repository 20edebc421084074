#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "sqec/matching.hpp"
#include "sqec/neural.hpp"

namespace sqec {

// Which decoder to run and how: a matching-only global decoder, or a local
// neural stage whose residual syndrome is mopped up by matching.
struct DecoderSpec {
    Variant variant = Variant::MatchingOnly;
    GraphMode graph_mode = GraphMode::Uniform;
    std::shared_ptr<const ModelParams> model;  // required for neural variants
    std::string model_path;                    // provenance only
    double threshold = 0.5;
    int passes = 11;
    bool greedy_matching = false;

    void validate() const;
};

struct DecodeStats {
    int input_events = 0;
    int residual_events = 0;
    std::int64_t local_ns = 0;
    std::int64_t matching_ns = 0;
};

struct FullDecodeResult {
    int predicted_flip = 0;
    ErrorVolume correction;  // local XOR matching corrections
    DecodeStats stats;
};

// Stateful decoder holding the decoding graph (and model) for repeated use.
// p_prime parametrises the weighted graph's error classes; the uniform graph
// ignores it.
class Decoder {
public:
    Decoder(const DecoderSpec& spec, const CodeLayout& layout, int cycles,
            double p_prime = 0.0);

    FullDecodeResult decode_one(const SyndromeVolume& syn, Basis basis,
                                std::uint64_t shot_seed = 0) const;

    // Batched variant: neural forward passes are amortised across shots;
    // per-shot outputs are independent of the batching.
    std::vector<FullDecodeResult> decode_batch(
        const std::vector<const SyndromeVolume*>& syns, Basis basis,
        std::uint64_t seed = 0) const;

    const DecoderSpec& spec() const { return spec_; }
    const DecodingGraph& graph() const { return graph_; }

private:
    DecoderSpec spec_;
    const CodeLayout* layout_;
    int cycles_;
    DecodingGraph graph_;
};

// One-shot convenience wrapper over Decoder.
FullDecodeResult full_decode(const DecoderSpec& spec, const SyndromeVolume& syn,
                             const CodeLayout& layout, Basis basis,
                             std::uint64_t shot_seed = 0, double p_prime = 0.0);

}  // namespace sqec
