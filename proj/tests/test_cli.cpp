#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sqec/cli.hpp"
#include "sqec/dataset.hpp"
#include "sqec/errors.hpp"
#include "sqec/neural.hpp"
#include "sqec/rng.hpp"

using namespace sqec;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("container round-trip is byte-identical") {
    CodeLayout layout = CodeLayout::build(5);
    const int cycles = 3;
    std::vector<ErrorVolume> vols;
    std::vector<SyndromeVolume> syns;
    for (int s = 0; s < 7; ++s) {
        NoiseConfig cfg{0.01, cycles, Basis::Z, rng::shot_seed(3, s)};
        vols.push_back(propagate_backward(sample_shot(layout, cfg), layout));
        syns.push_back(detection_events(vols.back()));
    }
    DatasetHeader header;
    header.distance = 5;
    header.cycles = cycles;
    header.p_prime = 0.01;
    header.shots = 7;
    header.basis = Basis::Z;
    header.seed = 3;

    const std::string p1 = "/tmp/sqec_ds1.bin", p2 = "/tmp/sqec_ds2.bin";
    write_dataset_file(p1, header, vols, syns);
    LoadedDataset back = read_dataset_file(p1);
    REQUIRE(back.data.volumes.size() == 7);
    for (int s = 0; s < 7; ++s) {
        CHECK(back.data.volumes[s] == vols[s]);
        CHECK(back.data.syndromes[s] == syns[s]);
    }
    write_dataset_file(p2, back.data.header, back.data.volumes, back.data.syndromes);
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("simulate twice with the same seed gives byte-identical files") {
    const std::string a = "/tmp/sqec_sim_a.bin", b = "/tmp/sqec_sim_b.bin";
    REQUIRE(run_command({"simulate", "--distance", "3", "--p-prime", "0.008", "--cycles",
                         "3", "--shots", "20", "--seed", "42", "--out", a}) == 0);
    REQUIRE(run_command({"simulate", "--distance", "3", "--p-prime", "0.008", "--cycles",
                         "3", "--shots", "20", "--seed", "42", "--out", b}) == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("zero-noise container holds only zero words") {
    const std::string path = "/tmp/sqec_sim_zero.bin";
    REQUIRE(run_command({"simulate", "--distance", "3", "--p-prime", "0", "--shots", "10",
                         "--seed", "1", "--out", path}) == 0);
    LoadedDataset ds = read_dataset_file(path);
    for (const auto& vol : ds.data.volumes) CHECK_FALSE(vol.any());
    for (const auto& syn : ds.data.syndromes) CHECK_FALSE(syn.any());
}

TEST_CASE("exit codes: config and io failures") {
    CHECK(run_command({"simulate", "--distance", "4", "--p-prime", "0.01", "--shots", "1",
                       "--seed", "1", "--out", "/tmp/x.bin"}) == 2);
    CHECK(run_command({"simulate", "--distance", "3", "--p-prime", "0.01", "--shots", "1",
                       "--seed", "1", "--out", "/definitely/not/a/dir/x.bin"}) == 3);
    CHECK(run_command({"decode", "--in", "/tmp/missing_container.bin", "--seed", "1"}) == 3);
    CHECK(run_command({"frobnicate"}) == 2);
    // missing required seed
    CHECK(run_command({"simulate", "--distance", "3", "--p-prime", "0.01", "--shots", "1",
                       "--out", "/tmp/x.bin"}) == 2);
}

TEST_CASE("config file values are overridden by flags and unknown keys rejected") {
    const std::string cfg = "/tmp/sqec_cfg.ini";
    {
        std::ofstream f(cfg);
        f << "distance=3\np-prime=0.004\nshots=5\nseed=9\nout=/tmp/sqec_cfg_out.bin\n";
    }
    REQUIRE(run_command({"simulate", "--config", cfg}) == 0);
    LoadedDataset a = read_dataset_file("/tmp/sqec_cfg_out.bin");
    CHECK(a.data.header.p_prime == 0.004);
    CHECK(a.data.header.shots == 5);

    // command line overrides the file
    REQUIRE(run_command({"simulate", "--config", cfg, "--p-prime", "0.006", "--out",
                         "/tmp/sqec_cfg_out2.bin"}) == 0);
    LoadedDataset b = read_dataset_file("/tmp/sqec_cfg_out2.bin");
    CHECK(b.data.header.p_prime == 0.006);

    {
        std::ofstream f(cfg);
        f << "distance=3\nnot_a_real_key=1\n";
    }
    CHECK(run_command({"simulate", "--config", cfg, "--p-prime", "0.004", "--shots", "1",
                       "--seed", "1", "--out", "/tmp/x.bin"}) == 2);
}

TEST_CASE("bench-ler emits the fixed csv and is bit-reproducible") {
    const std::string a = "/tmp/sqec_ler_a.csv", b = "/tmp/sqec_ler_b.csv";
    auto args = [&](const std::string& out) {
        return std::vector<std::string>{
            "bench-ler", "--distance", "3",     "--p-min", "0.004", "--p-max", "0.006",
            "--p-step",  "0.001",      "--shots", "400",   "--seed", "11",     "--out", out};
    };
    REQUIRE(run_command(args(a)) == 0);
    REQUIRE(run_command(args(b)) == 0);
    CHECK(slurp(a) == slurp(b));
    std::string csv = slurp(a);
    CHECK(csv.find("variant,graph_mode,basis,d,p_prime,shots,failures,ler,ci_lo,ci_hi,seed") !=
          std::string::npos);
    CHECK(csv.find("matching,uniform,z,3,0.004,400,") != std::string::npos);
}

TEST_CASE("intersect consumes bench-ler output") {
    const std::string csv = "/tmp/sqec_ler_two.csv";
    REQUIRE(run_command({"bench-ler", "--distance", "3", "--distance", "5", "--p-min",
                         "0.004", "--p-max", "0.006", "--p-step", "0.001", "--shots",
                         "400", "--seed", "11", "--out", csv}) == 0);
    const std::string mat = "/tmp/sqec_mat.csv";
    REQUIRE(run_command({"intersect", "--in", csv, "--out", mat}) == 0);
    std::string m = slurp(mat);
    CHECK(m.rfind("d,3,5", 0) == 0);
}

TEST_CASE("train writes a loadable checkpoint and decode consumes it") {
    const std::string model = "/tmp/sqec_tiny_model.bin";
    REQUIRE(run_command({"train", "--variant", "classifier", "--distance", "3",
                         "--cycles", "2", "--instances", "64", "--batch", "16",
                         "--epochs", "1", "--hidden-layers", "1", "--hidden-channels",
                         "4", "--seed", "5", "--out", model}) == 0);
    ModelParams m = load_checkpoint(model);
    CHECK(m.variant == Variant::Classifier);

    const std::string data = "/tmp/sqec_decode_in.bin";
    REQUIRE(run_command({"simulate", "--distance", "3", "--p-prime", "0.005", "--cycles",
                         "2", "--shots", "4", "--seed", "2", "--out", data}) == 0);
    CHECK(run_command({"decode", "--in", data, "--seed", "1", "--variant", "classifier",
                       "--model", model}) == 0);
    // neural variant without a model is a config error
    CHECK(run_command({"decode", "--in", data, "--seed", "1", "--variant",
                       "classifier"}) == 2);
}

TEST_CASE("bench-time emits a latency fit") {
    const std::string out = "/tmp/sqec_time.json";
    REQUIRE(run_command({"bench-time", "--distance", "3", "--p-prime", "0.004", "--seed",
                         "3", "--batches", "8", "--batches", "16", "--batches", "32",
                         "--out", out}) == 0);
    std::string j = slurp(out);
    CHECK(j.find("per_shot_seconds") != std::string::npos);
}
