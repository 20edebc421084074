#include "sqec/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>

#include "sqec/errors.hpp"
#include "sqec/parallel.hpp"
#include "sqec/rng.hpp"

#ifdef SQEC_HAVE_EIGEN
#include <Eigen/Core>
#endif

namespace sqec {

namespace {

#ifdef SQEC_HAVE_EIGEN
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

// Sample-level parallelism lives in parallel_for; a threaded GEMM underneath
// it would oversubscribe.
struct EigenSingleThread {
    EigenSingleThread() { Eigen::setNbThreads(1); }
} const eigen_single_thread_init;

// C (MxN) = A (MxK) * B (KxN)
void mat_mul(double* C, const double* A, const double* B, int M, int K, int N) {
    MapMat(C, M, N).noalias() = ConstMapMat(A, M, K) * ConstMapMat(B, K, N);
}
// C (MxN) += A (MxK) * B (NxK)^T
void mat_mul_bt_add(double* C, const double* A, const double* B, int M, int K, int N) {
    MapMat(C, M, N).noalias() += ConstMapMat(A, M, K) * ConstMapMat(B, N, K).transpose();
}
// C (KxN) = A (MxK)^T * B (MxN)
void mat_mul_at(double* C, const double* A, const double* B, int M, int K, int N) {
    MapMat(C, K, N).noalias() = ConstMapMat(A, M, K).transpose() * ConstMapMat(B, M, N);
}
#else
void mat_mul(double* C, const double* A, const double* B, int M, int K, int N) {
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) {
            double acc = 0;
            for (int k = 0; k < K; ++k) acc += A[m * K + k] * B[k * N + n];
            C[m * N + n] = acc;
        }
}
void mat_mul_bt_add(double* C, const double* A, const double* B, int M, int K, int N) {
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) {
            double acc = 0;
            for (int k = 0; k < K; ++k) acc += A[m * K + k] * B[n * K + k];
            C[m * N + n] += acc;
        }
}
void mat_mul_at(double* C, const double* A, const double* B, int M, int K, int N) {
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n) {
            double acc = 0;
            for (int m = 0; m < M; ++m) acc += A[m * K + k] * B[m * N + n];
            C[k * N + n] = acc;
        }
}
#endif

// Patch matrix of one sample: row (ci*27 + kd*9 + kh*3 + kw), column voxel.
void im2col(const double* x, int C, int D, int H, int W, double* cols) {
    const int M = D * H * W;
    int row = 0;
    for (int ci = 0; ci < C; ++ci) {
        for (int kd = 0; kd < 3; ++kd)
            for (int kh = 0; kh < 3; ++kh)
                for (int kw = 0; kw < 3; ++kw, ++row) {
                    double* out = cols + static_cast<std::size_t>(row) * M;
                    for (int di = 0; di < D; ++di) {
                        int sd = di + kd - 1;
                        for (int hi = 0; hi < H; ++hi) {
                            int sh = hi + kh - 1;
                            double* dst = out + (di * H + hi) * W;
                            if (sd < 0 || sd >= D || sh < 0 || sh >= H) {
                                std::fill(dst, dst + W, 0.0);
                                continue;
                            }
                            const double* src = x + ((static_cast<std::size_t>(ci) * D + sd) * H + sh) * W;
                            for (int wi = 0; wi < W; ++wi) {
                                int sw = wi + kw - 1;
                                dst[wi] = (sw < 0 || sw >= W) ? 0.0 : src[sw];
                            }
                        }
                    }
                }
    }
}

void col2im_add(const double* cols, int C, int D, int H, int W, double* x) {
    const int M = D * H * W;
    int row = 0;
    for (int ci = 0; ci < C; ++ci) {
        for (int kd = 0; kd < 3; ++kd)
            for (int kh = 0; kh < 3; ++kh)
                for (int kw = 0; kw < 3; ++kw, ++row) {
                    const double* src = cols + static_cast<std::size_t>(row) * M;
                    for (int di = 0; di < D; ++di) {
                        int sd = di + kd - 1;
                        if (sd < 0 || sd >= D) continue;
                        for (int hi = 0; hi < H; ++hi) {
                            int sh = hi + kh - 1;
                            if (sh < 0 || sh >= H) continue;
                            double* dst = x + ((static_cast<std::size_t>(ci) * D + sd) * H + sh) * W;
                            const double* s = src + (di * H + hi) * W;
                            for (int wi = 0; wi < W; ++wi) {
                                int sw = wi + kw - 1;
                                if (sw >= 0 && sw < W) dst[sw] += s[wi];
                            }
                        }
                    }
                }
    }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct ForwardCache {
    std::vector<Tensor> post;  // post[0] = input, post[i+1] = layer i output
};

Tensor forward_impl(const ModelParams& params, const Tensor& input, ForwardCache* cache) {
    if (input.c != params.in_channels)
        throw std::invalid_argument("forward: input channel count mismatch");
    if (params.layers.empty()) throw std::invalid_argument("forward: empty model");

    Tensor cur = input;
    if (cache) {
        cache->post.clear();
        cache->post.push_back(cur);
    }
    const int M = input.d * input.h * input.w;
    std::vector<double> cols;

    for (std::size_t li = 0; li < params.layers.size(); ++li) {
        const ConvLayer& layer = params.layers[li];
        if (layer.in_ch != cur.c) throw std::invalid_argument("forward: layer shape mismatch");
        const bool last = li + 1 == params.layers.size();
        const int K = layer.in_ch * 27;
        Tensor out(cur.n, layer.out_ch, cur.d, cur.h, cur.w);
        cols.resize(static_cast<std::size_t>(K) * M);
        for (int ni = 0; ni < cur.n; ++ni) {
            im2col(cur.sample(ni), cur.c, cur.d, cur.h, cur.w, cols.data());
            mat_mul(out.sample(ni), layer.weight.data(), cols.data(), layer.out_ch, K, M);
            double* o = out.sample(ni);
            for (int oc = 0; oc < layer.out_ch; ++oc) {
                const double b = layer.bias[oc];
                double* row = o + static_cast<std::size_t>(oc) * M;
                if (last)
                    for (int m = 0; m < M; ++m) row[m] = sigmoid(row[m] + b);
                else
                    for (int m = 0; m < M; ++m) row[m] = std::max(row[m] + b, 0.0);
            }
        }
        cur = std::move(out);
        if (cache) cache->post.push_back(cur);
    }
    return cur;
}

ModelParams zero_like(const ModelParams& params) {
    ModelParams g = params;
    for (auto& l : g.layers) {
        std::fill(l.weight.begin(), l.weight.end(), 0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    return g;
}

void accumulate(ModelParams& into, const ModelParams& from) {
    for (std::size_t li = 0; li < into.layers.size(); ++li) {
        auto& a = into.layers[li];
        const auto& b = from.layers[li];
        for (std::size_t i = 0; i < a.weight.size(); ++i) a.weight[i] += b.weight[i];
        for (std::size_t i = 0; i < a.bias.size(); ++i) a.bias[i] += b.bias[i];
    }
}

}  // namespace

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::MatchingOnly: return "matching";
        case Variant::Classifier: return "classifier";
        case Variant::SimplifiedClassifier: return "simplified";
        case Variant::Diffusion: return "diffusion";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "matching") return Variant::MatchingOnly;
    if (name == "classifier") return Variant::Classifier;
    if (name == "simplified") return Variant::SimplifiedClassifier;
    if (name == "diffusion") return Variant::Diffusion;
    throw ConfigError("unknown decoder variant: " + name);
}

int ModelParams::input_channels(Variant v) {
    switch (v) {
        case Variant::Classifier:
        case Variant::SimplifiedClassifier:
            return 4 + 8;  // syndrome + presence
        case Variant::Diffusion:
            return 4 + 8 + 12 + 4;  // + tentative corrections + fuzzy residual
        case Variant::MatchingOnly:
            break;
    }
    throw std::invalid_argument("input_channels: variant has no model");
}

ModelParams ModelParams::init(Variant v, int hidden_layers, int hidden_channels,
                              std::uint64_t seed) {
    if (hidden_layers < 0 || hidden_channels < 1)
        throw std::invalid_argument("ModelParams::init: bad architecture");
    ModelParams p;
    p.variant = v;
    p.in_channels = input_channels(v);

    std::vector<std::pair<int, int>> shapes;
    int in = p.in_channels;
    for (int i = 0; i < hidden_layers; ++i) {
        shapes.push_back({in, hidden_channels});
        in = hidden_channels;
    }
    shapes.push_back({in, kOutputChannels});

    std::uint64_t counter = 0;
    for (auto [ic, oc] : shapes) {
        ConvLayer layer;
        layer.in_ch = ic;
        layer.out_ch = oc;
        layer.weight.resize(static_cast<std::size_t>(oc) * ic * 27);
        layer.bias.assign(oc, 0.0);
        const double bound = std::sqrt(3.0 / (ic * 27.0));
        for (auto& w : layer.weight)
            w = (2.0 * rng::unit(seed, rng::Stream::ModelInit, counter++) - 1.0) * bound;
        p.layers.push_back(std::move(layer));
    }
    return p;
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

Tensor forward(const ModelParams& params, const Tensor& input) {
    return forward_impl(params, input, nullptr);
}

LossGrad loss_and_grad(const ModelParams& params, const Tensor& input,
                       const Tensor& target, const Tensor& mask) {
    if (!target.same_shape(mask)) throw std::invalid_argument("loss_and_grad: shape mismatch");

    ForwardCache cache;
    Tensor out = forward_impl(params, input, &cache);
    if (!out.same_shape(target)) throw std::invalid_argument("loss_and_grad: target shape");

    double count = 0.0;
    for (double m : mask.v) count += m;
    if (count <= 0.0) throw std::invalid_argument("loss_and_grad: empty mask");

    LossGrad lg;
    lg.grads = zero_like(params);

    constexpr double kEps = 1e-12;
    Tensor dpre = out;  // gradient wrt the last layer's pre-activation
    double loss = 0.0;
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        const double y = out.v[i], t = target.v[i], m = mask.v[i];
        if (m != 0.0)
            loss -= m * (t * std::log(std::max(y, kEps)) +
                         (1.0 - t) * std::log(std::max(1.0 - y, kEps)));
        dpre.v[i] = m * (y - t) / count;  // sigmoid and BCE cancel
    }
    lg.loss = loss / count;

    const int M = input.d * input.h * input.w;
    std::vector<double> cols, dcols;
    for (int li = static_cast<int>(params.layers.size()) - 1; li >= 0; --li) {
        const ConvLayer& layer = params.layers[li];
        ConvLayer& grad = lg.grads.layers[li];
        const Tensor& in_post = cache.post[li];
        const int K = layer.in_ch * 27;

        Tensor dprev(in_post.n, in_post.c, in_post.d, in_post.h, in_post.w);
        cols.resize(static_cast<std::size_t>(K) * M);
        dcols.resize(static_cast<std::size_t>(K) * M);
        for (int ni = 0; ni < input.n; ++ni) {
            const double* dp = dpre.sample(ni);
            for (int oc = 0; oc < layer.out_ch; ++oc) {
                double acc = 0.0;
                const double* row = dp + static_cast<std::size_t>(oc) * M;
                for (int m = 0; m < M; ++m) acc += row[m];
                grad.bias[oc] += acc;
            }
            im2col(in_post.sample(ni), in_post.c, in_post.d, in_post.h, in_post.w,
                   cols.data());
            mat_mul_bt_add(grad.weight.data(), dp, cols.data(), layer.out_ch, M, K);
            mat_mul_at(dcols.data(), layer.weight.data(), dp, layer.out_ch, K, M);
            col2im_add(dcols.data(), in_post.c, in_post.d, in_post.h, in_post.w,
                       dprev.sample(ni));
        }

        if (li > 0) {
            // pass through the hidden ReLU of the layer below
            const Tensor& below = cache.post[li];
            dpre = std::move(dprev);
            for (std::size_t i = 0; i < dpre.v.size(); ++i)
                if (below.v[i] <= 0.0) dpre.v[i] = 0.0;
        }
    }
    return lg;
}

ShotStream make_shot_stream(const CodeLayout& layout, const TrainConfig& cfg) {
    auto gens = std::make_shared<std::vector<Simplifier>>();
    if (cfg.simplify) *gens = simplifier_generators(layout, cfg.cycles);
    const CodeLayout* lp = &layout;
    TrainConfig c = cfg;
    return [lp, c, gens](std::uint64_t index) {
        double u = rng::unit(c.seed, rng::Stream::TrainMix, index, 1);
        NoiseConfig ncfg{c.p_min + (c.p_max - c.p_min) * u, c.cycles, c.basis,
                         rng::shot_seed(c.seed, index)};
        ErrorVolume vol = propagate_backward(sample_shot(*lp, ncfg), *lp);
        TrainInstance inst;
        inst.syn = detection_events(vol);
        inst.target = c.simplify ? greedy_reduce(vol, *gens) : std::move(vol);
        return inst;
    };
}

namespace {

struct AdamState {
    std::vector<double> m, v;
    long t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    void step(ModelParams& params, const ModelParams& grads, double lr) {
        ++t;
        const double b1c = 1.0 - std::pow(beta1, t);
        const double b2c = 1.0 - std::pow(beta2, t);
        std::size_t i = 0;
        for (std::size_t li = 0; li < params.layers.size(); ++li) {
            auto apply = [&](double& p, double g) {
                m[i] = beta1 * m[i] + (1 - beta1) * g;
                v[i] = beta2 * v[i] + (1 - beta2) * g * g;
                p -= lr * (m[i] / b1c) / (std::sqrt(v[i] / b2c) + eps);
                ++i;
            };
            auto& l = params.layers[li];
            const auto& gl = grads.layers[li];
            for (std::size_t k = 0; k < l.weight.size(); ++k) apply(l.weight[k], gl.weight[k]);
            for (std::size_t k = 0; k < l.bias.size(); ++k) apply(l.bias[k], gl.bias[k]);
        }
    }
};

// Diffusion inputs: corrupt the target with per-instance mixing strength and
// attach the fuzzy residual of the corrupted tentative corrections.
Tensor diffusion_input(const SyndromeVolume& syn, const CodeLayout& layout,
                       const Tensor& target, std::uint64_t seed, std::uint64_t index,
                       double p_mix_max) {
    const int depth = syn.cycles + 1;
    Tensor tentative = target;
    const double p_mix = rng::unit(seed, rng::Stream::TrainMix, index, 2) * p_mix_max;
    std::uint64_t k = 0;
    for (auto& x : tentative.v) {
        std::uint64_t r = rng::value(seed, rng::Stream::TrainMix, index, 3, k++);
        if (rng::to_unit(r) < p_mix)
            x = rng::unit(seed, rng::Stream::TrainMix, index, 4, k);
    }
    Tensor fuzzy = fuzzy_residual(syn, tentative);

    Tensor in(1, ModelParams::input_channels(Variant::Diffusion), depth, layout.rows(),
              layout.cols());
    Tensor base = classifier_input(syn, layout);
    std::copy(base.v.begin(), base.v.end(), in.v.begin());
    std::copy(tentative.v.begin(), tentative.v.end(), in.v.begin() + base.v.size());
    std::copy(fuzzy.v.begin(), fuzzy.v.end(),
              in.v.begin() + base.v.size() + tentative.v.size());
    return in;
}

}  // namespace

ModelParams train(const ShotStream& stream, const CodeLayout& layout,
                  const TrainConfig& cfg, TrainReport* report) {
    if (cfg.learning_rate <= 0 || cfg.batch_size < 1 || cfg.instances < 1)
        throw std::invalid_argument("train: positive rates and sizes required");
    const Variant variant = cfg.diffusion ? Variant::Diffusion
                            : cfg.simplify ? Variant::SimplifiedClassifier
                                           : Variant::Classifier;
    ModelParams params =
        ModelParams::init(variant, cfg.hidden_layers, cfg.hidden_channels, cfg.seed);
    if (cfg.epochs == 0) return params;

    AdamState adam(params.parameter_count());
    const Tensor mask = volume_mask(layout, cfg.cycles);

    // fixed shard count so gradient reduction order is thread-independent
    constexpr int kShards = 16;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        int steps = 0;
        for (int start = 0; start + cfg.batch_size <= cfg.instances;
             start += cfg.batch_size) {
            const int bs = cfg.batch_size;
            std::vector<ModelParams> shard_grads;
            std::vector<double> shard_loss(kShards, 0.0);
            for (int s = 0; s < kShards; ++s) shard_grads.push_back(zero_like(params));

            parallel_for(0, kShards, [&](int shard) {
                for (int j = shard; j < bs; j += kShards) {
                    std::uint64_t index =
                        static_cast<std::uint64_t>(epoch) * cfg.instances + start + j;
                    TrainInstance inst = stream(index);
                    Tensor target = volume_channels(inst.target);
                    Tensor input = cfg.diffusion
                                       ? diffusion_input(inst.syn, layout, target,
                                                         cfg.seed, index, cfg.p_mix_max)
                                       : classifier_input(inst.syn, layout);
                    LossGrad lg = loss_and_grad(params, input, target, mask);
                    shard_loss[shard] += lg.loss;
                    accumulate(shard_grads[shard], lg.grads);
                }
            });

            ModelParams grads = zero_like(params);
            double loss = 0.0;
            for (int s = 0; s < kShards; ++s) {
                accumulate(grads, shard_grads[s]);
                loss += shard_loss[s];
            }
            loss /= bs;
            for (auto& l : grads.layers) {
                for (auto& w : l.weight) w /= bs;
                for (auto& b : l.bias) b /= bs;
            }
            if (!std::isfinite(loss)) throw TrainDivergence(epoch);
            adam.step(params, grads, cfg.learning_rate);
            epoch_loss += loss;
            ++steps;
        }
        if (report) report->epoch_loss.push_back(steps ? epoch_loss / steps : 0.0);
    }
    return params;
}

Tensor syndrome_channels(const SyndromeVolume& syn) {
    const CodeLayout& layout = *syn.layout;
    const int depth = syn.cycles + 1;
    Tensor t(1, 4, depth, layout.rows(), layout.cols());
    for (int l = 0; l < depth; ++l)
        for (int a = 0; a < 4; ++a)
            syn.layers[l][a].for_each_set(
                [&](int r, int c) { t.at(0, a, l, r, c) = 1.0; });
    return t;
}

Tensor presence_channels(const CodeLayout& layout, int depth) {
    Tensor t(1, 8, depth, layout.rows(), layout.cols());
    for (int p = 0; p < 8; ++p)
        layout.presence(p).for_each_set([&](int r, int c) {
            for (int l = 0; l < depth; ++l) t.at(0, p, l, r, c) = 1.0;
        });
    return t;
}

Tensor classifier_input(const SyndromeVolume& syn, const CodeLayout& layout) {
    const int depth = syn.cycles + 1;
    Tensor t(1, 12, depth, layout.rows(), layout.cols());
    Tensor s = syndrome_channels(syn);
    Tensor p = presence_channels(layout, depth);
    std::copy(s.v.begin(), s.v.end(), t.v.begin());
    std::copy(p.v.begin(), p.v.end(), t.v.begin() + s.v.size());
    return t;
}

Tensor volume_channels(const ErrorVolume& vol) {
    const CodeLayout& layout = *vol.layout;
    const int depth = vol.cycles + 1;  // zero-padded final depth slice
    Tensor t(1, kOutputChannels, depth, layout.rows(), layout.cols());
    for (int cyc = 0; cyc < vol.cycles; ++cyc)
        for (int s = 0; s < 4; ++s) {
            vol.c[cyc].space_x[s].for_each_set(
                [&](int r, int c) { t.at(0, s, cyc, r, c) = 1.0; });
            vol.c[cyc].space_z[s].for_each_set(
                [&](int r, int c) { t.at(0, 4 + s, cyc, r, c) = 1.0; });
            vol.c[cyc].time_like[s].for_each_set(
                [&](int r, int c) { t.at(0, 8 + s, cyc, r, c) = 1.0; });
        }
    return t;
}

Tensor volume_mask(const CodeLayout& layout, int cycles) {
    Tensor t(1, kOutputChannels, cycles + 1, layout.rows(), layout.cols());
    for (int ch = 0; ch < kOutputChannels; ++ch) {
        const BitPlane& presence =
            ch < 8 ? layout.data_presence(ch % 4) : layout.anc_presence(ch % 4);
        presence.for_each_set([&](int r, int c) {
            for (int cyc = 0; cyc < cycles; ++cyc) t.at(0, ch, cyc, r, c) = 1.0;
        });
    }
    return t;
}

ErrorVolume binarize(const Tensor& out, const CodeLayout& layout, int cycles, Basis basis,
                     double threshold, int sample) {
    ErrorVolume vol = ErrorVolume::zero(layout, cycles, basis);
    for (int cyc = 0; cyc < cycles; ++cyc)
        for (int ch = 0; ch < kOutputChannels; ++ch) {
            const BitPlane& presence =
                ch < 8 ? layout.data_presence(ch % 4) : layout.anc_presence(ch % 4);
            for (int r = 0; r < layout.rows(); ++r)
                for (int c = 0; c < layout.cols(); ++c) {
                    if (!presence.get(r, c)) continue;
                    if (out.at(sample, ch, cyc, r, c) >= threshold) {
                        if (ch < 4) vol.c[cyc].space_x[ch].set(r, c, true);
                        else if (ch < 8) vol.c[cyc].space_z[ch - 4].set(r, c, true);
                        else vol.c[cyc].time_like[ch - 8].set(r, c, true);
                    }
                }
        }
    return vol;
}

LocalDecodeResult local_decode(const ModelParams& params, const SyndromeVolume& syn,
                               const CodeLayout& layout, double threshold) {
    return local_decode_batch(params, {&syn}, layout, threshold).front();
}

std::vector<LocalDecodeResult> local_decode_batch(
    const ModelParams& params, const std::vector<const SyndromeVolume*>& syns,
    const CodeLayout& layout, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0)
        throw std::invalid_argument("local_decode: threshold in (0,1)");
    if (syns.empty()) return {};
    const int cycles = syns[0]->cycles;
    const int depth = cycles + 1;
    Tensor in(static_cast<int>(syns.size()), 12, depth, layout.rows(), layout.cols());
    for (std::size_t i = 0; i < syns.size(); ++i) {
        Tensor one = classifier_input(*syns[i], layout);
        std::copy(one.v.begin(), one.v.end(), in.v.begin() + i * in.sample_size());
    }
    Tensor out = forward(params, in);
    std::vector<LocalDecodeResult> res(syns.size());
    for (std::size_t i = 0; i < syns.size(); ++i) {
        res[i].correction = binarize(out, layout, cycles, syns[i]->basis, threshold,
                                     static_cast<int>(i));
        res[i].residual = *syns[i] ^ detection_events(res[i].correction);
    }
    return res;
}

double fuzzy_xor(double x, double y) {
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
        throw std::invalid_argument("fuzzy_xor: inputs in [0,1]");
    return x * (1.0 - y) + (1.0 - x) * y;
}

Tensor fuzzy_residual(const SyndromeVolume& syn, const Tensor& soft_correction) {
    const CodeLayout& layout = *syn.layout;
    const int depth = syn.cycles + 1;
    Tensor out(1, 4, depth, layout.rows(), layout.cols());
    for (int l = 0; l < depth; ++l) {
        for (const auto& site : layout.anc_sites()) {
            double acc = 0.0;
            for_each_event_atom(layout, syn.cycles, syn.basis, site, l,
                                [&](const VolumeAtom& a) {
                                    int ch = a.kind == VolumeAtom::Kind::SpaceX ? a.slot
                                             : a.kind == VolumeAtom::Kind::SpaceZ
                                                 ? 4 + a.slot
                                                 : 8 + a.slot;
                                    acc = fuzzy_xor(
                                        acc, soft_correction.at(0, ch, a.cycle, a.cell_row,
                                                                a.cell_col));
                                });
            double s = syn.layers[l][site.slot].get(site.cell_row, site.cell_col) ? 1.0 : 0.0;
            out.at(0, 0 + site.slot, l, site.cell_row, site.cell_col) = fuzzy_xor(acc, s);
        }
    }
    return out;
}

LocalDecodeResult diffusion_decode(const ModelParams& params, const SyndromeVolume& syn,
                                   const CodeLayout& layout, int passes,
                                   std::uint64_t seed, double threshold) {
    return diffusion_decode_batch(params, {&syn}, layout, passes, seed, threshold).front();
}

std::vector<LocalDecodeResult> diffusion_decode_batch(
    const ModelParams& params, const std::vector<const SyndromeVolume*>& syns,
    const CodeLayout& layout, int passes, std::uint64_t seed, double threshold) {
    if (passes < 1) throw std::invalid_argument("diffusion_decode: passes >= 1");
    if (params.variant != Variant::Diffusion)
        throw std::invalid_argument("diffusion_decode: model is not a diffusion model");
    if (syns.empty()) return {};
    const int cycles = syns[0]->cycles;
    const int depth = cycles + 1;
    const int B = static_cast<int>(syns.size());

    std::vector<Tensor> bases(B);
    std::vector<Tensor> tentative(B);
    for (int i = 0; i < B; ++i) {
        bases[i] = classifier_input(*syns[i], layout);
        tentative[i] = Tensor(1, 12, depth, layout.rows(), layout.cols());
        std::uint64_t sub = rng::shot_seed(seed, i);
        for (std::size_t k = 0; k < tentative[i].v.size(); ++k)
            tentative[i].v[k] = rng::unit(sub, rng::Stream::Diffusion, k);
    }

    Tensor in(B, ModelParams::input_channels(Variant::Diffusion), depth, layout.rows(),
              layout.cols());
    for (int pass = 0; pass < passes; ++pass) {
        for (int i = 0; i < B; ++i) {
            Tensor fuzzy = fuzzy_residual(*syns[i], tentative[i]);
            double* dst = in.sample(i);
            std::copy(bases[i].v.begin(), bases[i].v.end(), dst);
            std::copy(tentative[i].v.begin(), tentative[i].v.end(),
                      dst + bases[i].v.size());
            std::copy(fuzzy.v.begin(), fuzzy.v.end(),
                      dst + bases[i].v.size() + tentative[i].v.size());
        }
        Tensor out = forward(params, in);
        for (int i = 0; i < B; ++i)
            std::copy(out.sample(i), out.sample(i) + out.sample_size(),
                      tentative[i].v.begin());
    }

    std::vector<LocalDecodeResult> res(B);
    for (int i = 0; i < B; ++i) {
        res[i].correction =
            binarize(tentative[i], layout, cycles, syns[i]->basis, threshold, 0);
        res[i].residual = *syns[i] ^ detection_events(res[i].correction);
    }
    return res;
}

namespace {

template <typename T>
void write_pod(std::ofstream& f, T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint for writing: " + path);
    f.write("SQNN", 4);
    write_pod<std::uint16_t>(f, 1);  // version
    write_pod<std::uint8_t>(f, static_cast<std::uint8_t>(params.variant));
    write_pod<std::uint16_t>(f, static_cast<std::uint16_t>(params.in_channels));
    write_pod<std::uint16_t>(f, static_cast<std::uint16_t>(params.layers.size()));
    for (const auto& l : params.layers) {
        write_pod<std::uint16_t>(f, static_cast<std::uint16_t>(l.in_ch));
        write_pod<std::uint16_t>(f, static_cast<std::uint16_t>(l.out_ch));
        write_pod<std::uint8_t>(f, 3);
    }
    for (const auto& l : params.layers) {
        for (double w : l.weight) write_pod<float>(f, static_cast<float>(w));
        for (double b : l.bias) write_pod<float>(f, static_cast<float>(b));
    }
    if (!f) throw IoError("failed writing checkpoint: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "SQNN", 4) != 0)
        throw IoError("bad checkpoint magic: " + path);
    if (read_pod<std::uint16_t>(f) != 1) throw IoError("unsupported checkpoint version");
    ModelParams p;
    p.variant = static_cast<Variant>(read_pod<std::uint8_t>(f));
    p.in_channels = read_pod<std::uint16_t>(f);
    const int n_layers = read_pod<std::uint16_t>(f);
    for (int i = 0; i < n_layers; ++i) {
        ConvLayer l;
        l.in_ch = read_pod<std::uint16_t>(f);
        l.out_ch = read_pod<std::uint16_t>(f);
        if (read_pod<std::uint8_t>(f) != 3) throw IoError("unsupported kernel size");
        l.weight.resize(static_cast<std::size_t>(l.out_ch) * l.in_ch * 27);
        l.bias.resize(l.out_ch);
        p.layers.push_back(std::move(l));
    }
    for (auto& l : p.layers) {
        for (auto& w : l.weight) w = read_pod<float>(f);
        for (auto& b : l.bias) b = read_pod<float>(f);
    }
    if (!f) throw IoError("truncated checkpoint: " + path);
    return p;
}

}  // namespace sqec
