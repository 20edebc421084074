#include <doctest.h>

#include <cmath>

#include "sqec/bench.hpp"
#include "sqec/errors.hpp"
#include "sqec/rng.hpp"

using namespace sqec;

namespace {

SyndromeVolume restrict_to(const SyndromeVolume& syn, StabType t) {
    SyndromeVolume out = SyndromeVolume::zero(*syn.layout, syn.cycles, syn.basis);
    for (int l = 0; l <= syn.cycles; ++l)
        for (int a = 0; a < 4; ++a)
            if (anc_type(a) == t) out.layers[l][a] = syn.layers[l][a];
    return out;
}

std::shared_ptr<const ModelParams> toy_model(Variant v, std::uint64_t seed) {
    return std::make_shared<const ModelParams>(ModelParams::init(v, 1, 6, seed));
}

}  // namespace

TEST_CASE("matching-only pipeline on empty syndrome") {
    CodeLayout layout = CodeLayout::build(3);
    DecoderSpec spec;
    SyndromeVolume syn = SyndromeVolume::zero(layout, 3, Basis::Z);
    auto res = full_decode(spec, syn, layout, Basis::Z);
    CHECK(res.predicted_flip == 0);
    CHECK_FALSE(res.correction.any());
    CHECK(res.stats.input_events == 0);
    CHECK(res.stats.residual_events == 0);
}

TEST_CASE("pipeline composition is sound for every variant") {
    CodeLayout layout = CodeLayout::build(5);
    const int cycles = 5;
    for (Basis basis : {Basis::X, Basis::Z}) {
        for (Variant v : {Variant::MatchingOnly, Variant::Classifier, Variant::Diffusion}) {
            DecoderSpec spec;
            spec.variant = v;
            spec.passes = 2;
            if (v == Variant::Diffusion) spec.model = toy_model(Variant::Diffusion, 5);
            else if (v != Variant::MatchingOnly) spec.model = toy_model(Variant::Classifier, 6);
            Decoder decoder(spec, layout, cycles, 0.006);

            for (int trial = 0; trial < 25; ++trial) {
                NoiseConfig cfg{0.006, cycles, basis, rng::shot_seed(42, trial)};
                ErrorVolume vol = propagate_backward(sample_shot(layout, cfg), layout);
                SyndromeVolume syn = detection_events(vol);
                auto res = decoder.decode_one(syn, basis, trial);

                // combined correction closes the tracked-family syndrome
                StabType t = tracked_stab(basis);
                CHECK(restrict_to(detection_events(res.correction), t) ==
                      restrict_to(syn, t));
                // predicted flip equals the flip of the combined correction
                CHECK(res.predicted_flip == logical_flip(res.correction, basis));
            }
        }
    }
}

TEST_CASE("decoder spec validation") {
    DecoderSpec spec;
    spec.variant = Variant::Classifier;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.model = toy_model(Variant::Classifier, 1);
    spec.threshold = 1.5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.threshold = 0.5;
    CHECK_NOTHROW(spec.validate());
    spec.variant = Variant::Diffusion;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("wilson interval sanity and coverage") {
    auto [lo, hi] = wilson_interval(0, 1000);
    CHECK(lo == 0.0);
    CHECK(hi < 0.01);

    // coverage on synthetic Bernoulli streams with q = 0.1
    const double q = 0.1;
    int covered = 0;
    const int reps = 1000, n = 500;
    for (int r = 0; r < reps; ++r) {
        long f = 0;
        for (int i = 0; i < n; ++i)
            if (rng::unit(2222, rng::Stream::Generic, r, i) < q) ++f;
        auto [l, h] = wilson_interval(f, n);
        if (l <= q && q <= h) ++covered;
    }
    CHECK(covered >= 930);
}

TEST_CASE("estimate_ler basics") {
    DecoderSpec spec;
    LerPoint pt = estimate_ler(spec, 3, 0.0, 500, Basis::Z, 7);
    CHECK(pt.failures == 0);
    CHECK(pt.ler == 0.0);

    // reproducibility
    LerPoint a = estimate_ler(spec, 3, 0.01, 2000, Basis::Z, 11);
    LerPoint b = estimate_ler(spec, 3, 0.01, 2000, Basis::Z, 11);
    CHECK(a.failures == b.failures);
    CHECK(a.failures > 0);
    CHECK(a.ci_lo <= a.ler);
    CHECK(a.ler <= a.ci_hi);
}

TEST_CASE("below threshold, larger distance fails less") {
    // The d3/d5 pair crosses very close to p' = 0.002 (small distances are
    // boundary dominated), so the robust comparisons are against d7.
    DecoderSpec spec;
    LerPoint d3 = estimate_ler(spec, 3, 0.002, 30000, Basis::Z, 5);
    LerPoint d5 = estimate_ler(spec, 5, 0.002, 30000, Basis::Z, 6);
    LerPoint d7 = estimate_ler(spec, 7, 0.002, 30000, Basis::Z, 7);
    CHECK(d7.failures < d5.failures);
    CHECK(d7.failures < d3.failures);
    CHECK(d5.ler <= d3.ci_hi);
}

TEST_CASE("weighted matching does not degrade the logical error rate") {
    DecoderSpec uni;
    DecoderSpec wgt;
    wgt.graph_mode = GraphMode::Weighted;
    LerPoint u = estimate_ler(uni, 5, 0.004, 20000, Basis::Z, 21);
    LerPoint w = estimate_ler(wgt, 5, 0.004, 20000, Basis::Z, 21);
    // allow statistical slack of two sigma on the comparison
    CHECK(w.ler <= u.ci_hi + (u.ci_hi - u.ci_lo) / 2.0);
    CHECK(w.ler < u.ler);
}

TEST_CASE("intersect_curves recovers analytic power-law crossings") {
    auto make_curve = [](int d, double amp, double expo, double pivot) {
        LerCurve c;
        c.distance = d;
        c.cycles = d;
        for (double p : {0.002, 0.003, 0.004, 0.005, 0.006, 0.007, 0.008}) {
            LerPoint pt;
            pt.p_prime = p;
            pt.ler = amp * std::pow(p / pivot, expo);
            pt.shots = 1000000;
            pt.failures = std::max<long>(1, std::lround(pt.ler * pt.shots));
            auto [lo, hi] = wilson_interval(pt.failures, pt.shots);
            pt.ci_lo = lo;
            pt.ci_hi = hi;
            c.points.push_back(pt);
        }
        return c;
    };
    // L_a = 0.01 (p / 0.005)^2 and L_b = 0.01 (p / 0.005)^3 cross at 0.005
    LerCurve a = make_curve(5, 0.01, 2.0, 0.005);
    LerCurve b = make_curve(9, 0.01, 3.0, 0.005);
    // exact lers (failures only used for the sigma estimate)
    auto res = intersect_curves(a, b);
    REQUIRE(res.crossing.has_value());
    CHECK(std::abs(*res.crossing - 0.005) / 0.005 < 1e-9);
    CHECK_FALSE(res.degenerate);

    // identical curves are degenerate
    auto same = intersect_curves(a, a);
    CHECK_FALSE(same.crossing.has_value());
    CHECK(same.degenerate);

    // parallel non-crossing power laws
    LerCurve c = make_curve(7, 0.02, 2.0, 0.005);
    auto par = intersect_curves(a, c);
    CHECK_FALSE(par.crossing.has_value());
    CHECK_FALSE(par.degenerate);
}

TEST_CASE("fit_latency recovers exact synthetic slopes") {
    std::vector<std::pair<int, double>> samples;
    for (int b : {32, 64, 128, 192, 256}) samples.push_back({b, 0.2 + 0.001 * b});
    LatencyFit fit = fit_latency(samples);
    CHECK(fit.per_shot == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(fit.overhead == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(fit.residual < 1e-12);

    CHECK_THROWS_AS(fit_latency({{32, 1.0}, {32, 1.1}}), std::invalid_argument);

    // noisy samples: slope within a loose band
    std::vector<std::pair<int, double>> noisy;
    for (int b : {32, 64, 128, 192, 256}) {
        double eps = (rng::unit(5, rng::Stream::Generic, b) - 0.5) * 0.002;
        noisy.push_back({b, 0.15 + 0.0007 * b + eps});
    }
    LatencyFit nf = fit_latency(noisy);
    CHECK(std::abs(nf.per_shot - 0.0007) < 0.0002);
}

TEST_CASE("bench_time produces a positive latency fit") {
    DecoderSpec spec;
    TimingRecord rec = bench_time(spec, 3, 0.004, Basis::Z, {8, 16, 32, 48}, 3);
    CHECK(rec.samples.size() == 4);
    CHECK(rec.fit.per_shot > 0.0);
}

TEST_CASE("relative matching time of identical specs is one") {
    DecoderSpec spec;
    Workload w;
    w.distance = 3;
    w.shots = 200;
    w.p_prime = 0.006;
    double ratio = relative_matching_time(spec, spec, w);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);

    DecoderSpec other;
    other.graph_mode = GraphMode::Weighted;
    CHECK_THROWS_AS(relative_matching_time(spec, other, w), std::invalid_argument);
}

TEST_CASE("csv emission carries the fixed columns") {
    LerRow row;
    row.variant = "matching";
    row.graph_mode = "uniform";
    row.basis = Basis::Z;
    row.distance = 5;
    row.point.p_prime = 0.004;
    row.point.shots = 1000;
    row.point.failures = 10;
    row.point.ler = 0.01;
    std::string csv = ler_csv({row}, "seed=7");
    CHECK(csv.find("# seed=7\n") == 0);
    CHECK(csv.find("variant,graph_mode,basis,d,p_prime,shots,failures,ler,ci_lo,ci_hi,seed") !=
          std::string::npos);
    CHECK(csv.find("matching,uniform,z,5,0.004,1000,10,0.01") != std::string::npos);
}
