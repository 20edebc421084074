#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sqec/layout.hpp"
#include "sqec/propagation.hpp"
#include "sqec/simplifier.hpp"
#include "sqec/tensor.hpp"

namespace sqec {

enum class Variant : int {
    MatchingOnly = 0,
    Classifier = 1,
    SimplifiedClassifier = 2,
    Diffusion = 3,
};

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// 3x3x3 convolution, zero padding, stride 1. Weights are laid out
// [out][in][kd][kh][kw] with a bias per output channel.
struct ConvLayer {
    int in_ch = 0, out_ch = 0;
    std::vector<double> weight;
    std::vector<double> bias;

    std::size_t weight_index(int o, int i, int kd, int kh, int kw) const {
        return ((((static_cast<std::size_t>(o) * in_ch + i) * 3 + kd) * 3 + kh) * 3) + kw;
    }
};

// Fully convolutional stack: ReLU on hidden layers, sigmoid on the last, so
// the 12 output channels per cell read as probabilities of correction bits.
struct ModelParams {
    Variant variant = Variant::Classifier;
    int in_channels = 0;
    std::vector<ConvLayer> layers;

    static int input_channels(Variant v);
    // fan-in scaled uniform init, seeded
    static ModelParams init(Variant v, int hidden_layers, int hidden_channels,
                            std::uint64_t seed);

    std::size_t parameter_count() const;
};

inline constexpr int kOutputChannels = 12;

// Forward pass; every output lies strictly in (0, 1).
Tensor forward(const ModelParams& params, const Tensor& input);

struct LossGrad {
    double loss = 0.0;
    ModelParams grads;  // same shapes as the parameters
};

// Mean masked binary cross-entropy and its gradient by backpropagation.
LossGrad loss_and_grad(const ModelParams& params, const Tensor& input,
                       const Tensor& target, const Tensor& mask);

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 32;
    int epochs = 1;
    int instances = 50000;  // per epoch
    std::uint64_t seed = 0;
    double p_min = 0.001, p_max = 0.007;
    bool simplify = false;
    bool diffusion = false;
    double p_mix_max = 1.0;  // diffusion target corruption scale
    int hidden_layers = 3;
    int hidden_channels = 128;
    int distance = 7;
    int cycles = 7;
    Basis basis = Basis::Z;
};

struct TrainInstance {
    SyndromeVolume syn;
    ErrorVolume target;
};

using ShotStream = std::function<TrainInstance(std::uint64_t)>;

// Memory-experiment stream with p' drawn uniformly from [p_min, p_max] per
// instance; targets optionally canonicalised by the greedy simplifier.
ShotStream make_shot_stream(const CodeLayout& layout, const TrainConfig& cfg);

struct TrainDivergence : std::runtime_error {
    int epoch;
    explicit TrainDivergence(int e)
        : std::runtime_error("training diverged (non-finite loss) in epoch " +
                             std::to_string(e)),
          epoch(e) {}
};

struct TrainReport {
    std::vector<double> epoch_loss;
};

ModelParams train(const ShotStream& stream, const CodeLayout& layout,
                  const TrainConfig& cfg, TrainReport* report = nullptr);

// --- featurisation -------------------------------------------------------
// Depth axis: syndrome comparison layers 0..cycles; volume tensors put cycle
// t at depth t and leave the final depth slice zero (and masked out).
Tensor syndrome_channels(const SyndromeVolume& syn);
Tensor presence_channels(const CodeLayout& layout, int depth);
Tensor classifier_input(const SyndromeVolume& syn, const CodeLayout& layout);
Tensor volume_channels(const ErrorVolume& vol);
Tensor volume_mask(const CodeLayout& layout, int cycles);
ErrorVolume binarize(const Tensor& out, const CodeLayout& layout, int cycles, Basis basis,
                     double threshold, int sample = 0);

// --- decoders ------------------------------------------------------------
struct LocalDecodeResult {
    ErrorVolume correction;
    SyndromeVolume residual;
};

// Binarise the classifier output at `threshold` and report the residual
// syndrome syn XOR detection_events(correction).
LocalDecodeResult local_decode(const ModelParams& params, const SyndromeVolume& syn,
                               const CodeLayout& layout, double threshold);

// Same, for a whole batch of syndromes (one forward pass).
std::vector<LocalDecodeResult> local_decode_batch(const ModelParams& params,
                                                  const std::vector<const SyndromeVolume*>& syns,
                                                  const CodeLayout& layout, double threshold);

double fuzzy_xor(double x, double y);

// Soft detection-event mismatch: fold fuzzy XOR over the soft values of all
// error channels adjacent to each detector site, then against the syndrome.
Tensor fuzzy_residual(const SyndromeVolume& syn, const Tensor& soft_correction);

LocalDecodeResult diffusion_decode(const ModelParams& params, const SyndromeVolume& syn,
                                   const CodeLayout& layout, int passes,
                                   std::uint64_t seed, double threshold = 0.5);

std::vector<LocalDecodeResult> diffusion_decode_batch(
    const ModelParams& params, const std::vector<const SyndromeVolume*>& syns,
    const CodeLayout& layout, int passes, std::uint64_t seed, double threshold = 0.5);

// --- checkpoints -----------------------------------------------------------
// Versioned header (magic, variant, layer shapes) followed by little-endian
// 32-bit floats in declared layer order.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace sqec
