#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqec/pipeline.hpp"

namespace sqec {

struct LerPoint {
    double p_prime = 0.0;
    long shots = 0;
    long failures = 0;
    double ler = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;  // Wilson 95%
    std::uint64_t seed = 0;
};

// Logical error rate per n_c = d syndrome measurement cycles.
struct LerCurve {
    int distance = 0;
    Basis basis = Basis::Z;
    int cycles = 0;  // always == distance
    std::vector<LerPoint> points;
};

std::pair<double, double> wilson_interval(long failures, long shots, double z = 1.959963984540054);

// Samples `shots` memory experiments over n_c = d cycles, decodes each, and
// counts a failure whenever the combined correction XOR the true error flips
// the tracked logical. Deterministic in `seed`, independent of threading.
LerPoint estimate_ler(const DecoderSpec& spec, int distance, double p_prime, long shots,
                      Basis basis, std::uint64_t seed);

struct Intersection {
    std::optional<double> crossing;
    bool degenerate = false;     // identical curves
    double sigma = 0.0;          // 1-sigma crossing uncertainty, 0 if unknown
};

// Log-log linear extrapolation around the sign change of the difference of
// the two curves; none when the locally fitted lines are parallel or no sign
// change exists in the common range.
Intersection intersect_curves(const LerCurve& a, const LerCurve& b);

struct LatencyFit {
    double per_shot = 0.0;   // seconds, the slope of seconds vs batch size
    double overhead = 0.0;   // intercept: fixed cost excluded from per-shot time
    double residual = 0.0;   // RMS of the least-squares fit
};

// Least-squares line through (batch size, seconds) samples.
LatencyFit fit_latency(const std::vector<std::pair<int, double>>& samples);

struct TimingRecord {
    std::string variant;
    std::string graph_mode;
    Basis basis = Basis::Z;
    int distance = 0;
    double p_prime = 0.0;
    std::vector<std::pair<int, double>> samples;  // (batch size, seconds)
    LatencyFit fit;
};

// Wall-clock decode time against batch size, single-worker to avoid
// contention skew; syndromes are prepared before the clock starts.
TimingRecord bench_time(const DecoderSpec& spec, int distance, double p_prime,
                        Basis basis, const std::vector<int>& batches,
                        std::uint64_t seed);

struct Workload {
    int distance = 5;
    double p_prime = 0.004;
    Basis basis = Basis::Z;
    long shots = 1000;
    std::uint64_t seed = 0;
};

// Ratio of time spent in the matching stage with the neural stage in front
// to the time of plain matching, over identical seeded shot streams.
double relative_matching_time(const DecoderSpec& spec_with_ann,
                              const DecoderSpec& spec_plain, const Workload& workload);

// CSV emission (US decimal point, '\n' newlines), columns:
// variant,graph_mode,basis,d,p_prime,shots,failures,ler,ci_lo,ci_hi,seed
struct LerRow {
    std::string variant;
    std::string graph_mode;
    Basis basis = Basis::Z;
    int distance = 0;
    LerPoint point;
};

std::string ler_csv(const std::vector<LerRow>& rows, const std::string& provenance = "");

// Pairwise intersection matrix in the layout of the per-distance grids:
// first row/column hold the distances, cells the crossing depolarisation
// parameters (empty when none).
std::string intersection_matrix_csv(const std::vector<LerCurve>& curves);

const char* basis_name(Basis b);
Basis basis_from_name(const std::string& name);
const char* graph_mode_name(GraphMode m);
GraphMode graph_mode_from_name(const std::string& name);

}  // namespace sqec
