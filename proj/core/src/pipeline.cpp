#include "sqec/pipeline.hpp"

#include <chrono>

#include "sqec/errors.hpp"

namespace sqec {

namespace {

std::int64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

void DecoderSpec::validate() const {
    if (variant != Variant::MatchingOnly && !model)
        throw ConfigError("decoder spec: neural variant requires a model");
    if (model && variant == Variant::Diffusion && model->variant != Variant::Diffusion)
        throw ConfigError("decoder spec: diffusion variant needs a diffusion checkpoint");
    if (model && variant != Variant::Diffusion && model->variant == Variant::Diffusion)
        throw ConfigError("decoder spec: classifier variant given a diffusion checkpoint");
    if (threshold <= 0.0 || threshold >= 1.0)
        throw ConfigError("decoder spec: threshold in (0,1)");
    if (passes < 1) throw ConfigError("decoder spec: passes >= 1");
}

Decoder::Decoder(const DecoderSpec& spec, const CodeLayout& layout, int cycles,
                 double p_prime)
    : spec_(spec), layout_(&layout), cycles_(cycles) {
    spec_.validate();
    graph_ = build_graph(layout, cycles, spec_.graph_mode, p_prime);
}

FullDecodeResult Decoder::decode_one(const SyndromeVolume& syn, Basis basis,
                                     std::uint64_t shot_seed) const {
    return decode_batch({&syn}, basis, shot_seed).front();
}

std::vector<FullDecodeResult> Decoder::decode_batch(
    const std::vector<const SyndromeVolume*>& syns, Basis basis,
    std::uint64_t seed) const {
    std::vector<FullDecodeResult> out(syns.size());
    if (syns.empty()) return out;

    const StabType tracked = tracked_stab(basis);

    std::vector<LocalDecodeResult> locals;
    std::int64_t local_ns = 0;
    if (spec_.variant != Variant::MatchingOnly) {
        const std::int64_t t0 = now_ns();
        locals = spec_.variant == Variant::Diffusion
                     ? diffusion_decode_batch(*spec_.model, syns, *layout_, spec_.passes,
                                              seed, spec_.threshold)
                     : local_decode_batch(*spec_.model, syns, *layout_, spec_.threshold);
        local_ns = (now_ns() - t0) / static_cast<std::int64_t>(syns.size());
    }

    for (std::size_t i = 0; i < syns.size(); ++i) {
        FullDecodeResult& r = out[i];
        r.stats.input_events = syns[i]->event_count(tracked);

        const SyndromeVolume* residual = syns[i];
        int local_flip = 0;
        if (spec_.variant != Variant::MatchingOnly) {
            residual = &locals[i].residual;
            local_flip = logical_flip(locals[i].correction, basis);
            r.stats.local_ns = local_ns;
        }
        r.stats.residual_events = residual->event_count(tracked);

        const std::int64_t t1 = now_ns();
        DecodeResult mop = decode(graph_, *residual, basis, spec_.greedy_matching);
        r.stats.matching_ns = now_ns() - t1;

        r.predicted_flip = local_flip ^ mop.predicted_flip;
        r.correction = spec_.variant != Variant::MatchingOnly
                           ? locals[i].correction ^ mop.correction
                           : std::move(mop.correction);
    }
    return out;
}

FullDecodeResult full_decode(const DecoderSpec& spec, const SyndromeVolume& syn,
                             const CodeLayout& layout, Basis basis,
                             std::uint64_t shot_seed, double p_prime) {
    Decoder dec(spec, layout, syn.cycles, p_prime);
    return dec.decode_one(syn, basis, shot_seed);
}

}  // namespace sqec
