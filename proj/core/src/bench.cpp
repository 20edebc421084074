#include "sqec/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>

#include "sqec/errors.hpp"
#include "sqec/parallel.hpp"
#include "sqec/rng.hpp"

namespace sqec {

const char* basis_name(Basis b) { return b == Basis::X ? "x" : "z"; }

Basis basis_from_name(const std::string& name) {
    if (name == "x" || name == "X") return Basis::X;
    if (name == "z" || name == "Z") return Basis::Z;
    throw ConfigError("unknown basis: " + name);
}

const char* graph_mode_name(GraphMode m) {
    return m == GraphMode::Uniform ? "uniform" : "weighted";
}

GraphMode graph_mode_from_name(const std::string& name) {
    if (name == "uniform") return GraphMode::Uniform;
    if (name == "weighted") return GraphMode::Weighted;
    throw ConfigError("unknown graph mode: " + name);
}

std::pair<double, double> wilson_interval(long failures, long shots, double z) {
    if (shots <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(shots);
    const double p = static_cast<double>(failures) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    double lo = failures == 0 ? 0.0 : std::max(centre - half, 0.0);
    double hi = failures == shots ? 1.0 : std::min(centre + half, 1.0);
    return {lo, hi};
}

LerPoint estimate_ler(const DecoderSpec& spec, int distance, double p_prime, long shots,
                      Basis basis, std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("estimate_ler: shots >= 1");
    CodeLayout layout = CodeLayout::build(distance);
    const int cycles = distance;  // LER per n_c = d cycles
    Decoder decoder(spec, layout, cycles, p_prime);

    const int block = 32;  // shots per decode batch
    const long n_blocks = (shots + block - 1) / block;
    std::atomic<long> failures{0};

    parallel_for(0, static_cast<int>(n_blocks), [&](int bi) {
        const long lo = static_cast<long>(bi) * block;
        const long hi = std::min(lo + block, shots);
        std::vector<ErrorVolume> vols;
        std::vector<SyndromeVolume> syns;
        vols.reserve(hi - lo);
        syns.reserve(hi - lo);
        for (long s = lo; s < hi; ++s) {
            NoiseConfig cfg{p_prime, cycles, basis, rng::shot_seed(seed, s)};
            vols.push_back(propagate_backward(sample_shot(layout, cfg), layout));
            syns.push_back(detection_events(vols.back()));
        }
        std::vector<const SyndromeVolume*> ptrs;
        for (const auto& s : syns) ptrs.push_back(&s);
        auto results = decoder.decode_batch(ptrs, basis, rng::shot_seed(seed ^ 0x9e37, lo));
        long f = 0;
        for (std::size_t i = 0; i < results.size(); ++i)
            if (logical_flip(vols[i] ^ results[i].correction, basis)) ++f;
        failures += f;
    });

    LerPoint pt;
    pt.p_prime = p_prime;
    pt.shots = shots;
    pt.failures = failures.load();
    pt.ler = static_cast<double>(pt.failures) / shots;
    std::tie(pt.ci_lo, pt.ci_hi) = wilson_interval(pt.failures, shots);
    pt.seed = seed;
    return pt;
}

namespace {

struct LogLine {
    double slope, intercept;
};

LogLine through(double x1, double y1, double x2, double y2) {
    double m = (y2 - y1) / (x2 - x1);
    return {m, y1 - m * x1};
}

std::optional<double> crossing_from_logs(double lp1, double lp2, double la1, double la2,
                                         double lb1, double lb2) {
    LogLine a = through(lp1, la1, lp2, la2);
    LogLine b = through(lp1, lb1, lp2, lb2);
    const double dm = a.slope - b.slope;
    if (std::abs(dm) < 1e-12) return std::nullopt;  // parallel
    return std::exp((b.intercept - a.intercept) / dm);
}

}  // namespace

Intersection intersect_curves(const LerCurve& a, const LerCurve& b) {
    // common grid points with nonzero failures on both curves
    std::vector<std::array<double, 3>> common;  // p, ler_a, ler_b
    for (const auto& pa : a.points) {
        for (const auto& pb : b.points) {
            if (std::abs(pa.p_prime - pb.p_prime) > 1e-12 * std::max(pa.p_prime, 1e-30))
                continue;
            if (pa.failures <= 0 || pb.failures <= 0) continue;
            common.push_back({pa.p_prime, pa.ler, pb.ler});
        }
    }
    std::sort(common.begin(), common.end(),
              [](const auto& x, const auto& y) { return x[0] < y[0]; });

    Intersection res;
    if (common.size() < 2) return res;

    bool all_equal = true;
    for (const auto& c : common)
        if (c[1] != c[2]) all_equal = false;
    if (all_equal) {
        res.degenerate = true;
        return res;
    }

    for (std::size_t i = 0; i + 1 < common.size(); ++i) {
        const double d1 = std::log(common[i][1]) - std::log(common[i][2]);
        const double d2 = std::log(common[i + 1][1]) - std::log(common[i + 1][2]);
        if (d1 == 0.0 && d2 == 0.0) continue;
        if (d1 == 0.0) {
            res.crossing = common[i][0];
            return res;
        }
        if (d1 * d2 > 0.0) continue;

        const double lp1 = std::log(common[i][0]), lp2 = std::log(common[i + 1][0]);
        const double la1 = std::log(common[i][1]), la2 = std::log(common[i + 1][1]);
        const double lb1 = std::log(common[i][2]), lb2 = std::log(common[i + 1][2]);
        res.crossing = crossing_from_logs(lp1, lp2, la1, la2, lb1, lb2);

        if (res.crossing) {
            // delta-method uncertainty from the Wilson widths of the four
            // bracketing estimates
            auto sigma_log = [](const LerPoint& p) {
                if (p.failures <= 0 || p.ci_lo <= 0.0) return 0.0;
                return (std::log(p.ci_hi) - std::log(p.ci_lo)) / (2 * 1.959963984540054);
            };
            const LerPoint* pts[4] = {nullptr, nullptr, nullptr, nullptr};
            for (const auto& pa : a.points) {
                if (std::abs(pa.p_prime - common[i][0]) < 1e-12) pts[0] = &pa;
                if (std::abs(pa.p_prime - common[i + 1][0]) < 1e-12) pts[1] = &pa;
            }
            for (const auto& pb : b.points) {
                if (std::abs(pb.p_prime - common[i][0]) < 1e-12) pts[2] = &pb;
                if (std::abs(pb.p_prime - common[i + 1][0]) < 1e-12) pts[3] = &pb;
            }
            double logs[4] = {la1, la2, lb1, lb2};
            double var = 0.0;
            const double eps = 1e-6;
            for (int k = 0; k < 4; ++k) {
                if (!pts[k]) continue;
                double bumped[4] = {logs[0], logs[1], logs[2], logs[3]};
                bumped[k] += eps;
                auto up = crossing_from_logs(lp1, lp2, bumped[0], bumped[1], bumped[2],
                                             bumped[3]);
                if (!up) continue;
                const double deriv = (std::log(*up) - std::log(*res.crossing)) / eps;
                const double s = sigma_log(*pts[k]);
                var += deriv * deriv * s * s;
            }
            res.sigma = *res.crossing * std::sqrt(var);  // back to linear scale
        }
        return res;
    }
    return res;
}

LatencyFit fit_latency(const std::vector<std::pair<int, double>>& samples) {
    std::vector<int> distinct;
    for (const auto& [b, s] : samples)
        if (std::find(distinct.begin(), distinct.end(), b) == distinct.end())
            distinct.push_back(b);
    if (distinct.size() < 2)
        throw std::invalid_argument("fit_latency: need at least two distinct batch sizes");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(samples.size());
    for (const auto& [b, s] : samples) {
        sx += b;
        sy += s;
        sxx += static_cast<double>(b) * b;
        sxy += b * s;
    }
    LatencyFit fit;
    fit.per_shot = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.overhead = (sy - fit.per_shot * sx) / n;
    double rss = 0;
    for (const auto& [b, s] : samples) {
        const double e = s - (fit.overhead + fit.per_shot * b);
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

TimingRecord bench_time(const DecoderSpec& spec, int distance, double p_prime,
                        Basis basis, const std::vector<int>& batches,
                        std::uint64_t seed) {
    CodeLayout layout = CodeLayout::build(distance);
    const int cycles = distance;
    Decoder decoder(spec, layout, cycles, p_prime);

    TimingRecord rec;
    rec.variant = variant_name(spec.variant);
    rec.graph_mode = graph_mode_name(spec.graph_mode);
    rec.basis = basis;
    rec.distance = distance;
    rec.p_prime = p_prime;

    std::uint64_t shot = 0;
    for (int b : batches) {
        std::vector<ErrorVolume> vols;
        std::vector<SyndromeVolume> syns;
        for (int i = 0; i < b; ++i, ++shot) {
            NoiseConfig cfg{p_prime, cycles, basis, rng::shot_seed(seed, shot)};
            vols.push_back(propagate_backward(sample_shot(layout, cfg), layout));
            syns.push_back(detection_events(vols.back()));
        }
        std::vector<const SyndromeVolume*> ptrs;
        for (const auto& s : syns) ptrs.push_back(&s);

        const auto t0 = std::chrono::steady_clock::now();
        auto results = decoder.decode_batch(ptrs, basis, rng::shot_seed(seed ^ 0x7f, shot));
        const auto t1 = std::chrono::steady_clock::now();
        (void)results;
        rec.samples.push_back({b, std::chrono::duration<double>(t1 - t0).count()});
    }
    rec.fit = fit_latency(rec.samples);
    return rec;
}

double relative_matching_time(const DecoderSpec& spec_with_ann,
                              const DecoderSpec& spec_plain, const Workload& workload) {
    if (spec_with_ann.graph_mode != spec_plain.graph_mode)
        throw std::invalid_argument("relative_matching_time: graph modes differ");

    CodeLayout layout = CodeLayout::build(workload.distance);
    const int cycles = workload.distance;
    Decoder with_ann(spec_with_ann, layout, cycles, workload.p_prime);
    Decoder plain(spec_plain, layout, cycles, workload.p_prime);

    std::vector<ErrorVolume> vols;
    std::vector<SyndromeVolume> syns;
    for (long s = 0; s < workload.shots; ++s) {
        NoiseConfig cfg{workload.p_prime, cycles, workload.basis,
                        rng::shot_seed(workload.seed, s)};
        vols.push_back(propagate_backward(sample_shot(layout, cfg), layout));
        syns.push_back(detection_events(vols.back()));
    }
    std::vector<const SyndromeVolume*> ptrs;
    for (const auto& s : syns) ptrs.push_back(&s);

    auto matching_ns = [&](const Decoder& dec) {
        std::int64_t total = 0;
        for (const auto& r : dec.decode_batch(ptrs, workload.basis, workload.seed))
            total += r.stats.matching_ns;
        return total;
    };
    const std::int64_t ann_ns = matching_ns(with_ann);
    const std::int64_t plain_ns = matching_ns(plain);
    return plain_ns > 0 ? static_cast<double>(ann_ns) / static_cast<double>(plain_ns)
                        : 1.0;
}

std::string ler_csv(const std::vector<LerRow>& rows, const std::string& provenance) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    if (!provenance.empty()) os << "# " << provenance << "\n";
    os << "variant,graph_mode,basis,d,p_prime,shots,failures,ler,ci_lo,ci_hi,seed\n";
    for (const auto& r : rows) {
        os << r.variant << ',' << r.graph_mode << ',' << basis_name(r.basis) << ','
           << r.distance << ',';
        os.precision(12);
        os << r.point.p_prime << ',' << r.point.shots << ',' << r.point.failures << ','
           << r.point.ler << ',' << r.point.ci_lo << ',' << r.point.ci_hi << ','
           << r.point.seed << '\n';
    }
    return os.str();
}

std::string intersection_matrix_csv(const std::vector<LerCurve>& curves) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(6);
    os << "d";
    for (const auto& c : curves) os << ',' << c.distance;
    os << '\n';
    for (const auto& a : curves) {
        os << a.distance;
        for (const auto& b : curves) {
            os << ',';
            if (a.distance == b.distance) continue;
            auto res = intersect_curves(a, b);
            if (res.crossing) os << *res.crossing;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace sqec
