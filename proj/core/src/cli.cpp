#include "sqec/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqec/bench.hpp"
#include "sqec/dataset.hpp"
#include "sqec/errors.hpp"
#include "sqec/parallel.hpp"
#include "sqec/rng.hpp"

namespace sqec {

namespace {

using nlohmann::json;

struct CommonOpts {
    std::uint64_t seed = 0;
    int threads = 0;
    std::string basis = "z";
    std::string variant = "matching";
    std::string graph_mode = "uniform";
    std::string model_path;
    double threshold = 0.5;
    int passes = 11;
};

// Flat key=value configuration file expanded into flags ahead of the real
// command line, so explicit flags override file values. Unknown keys surface
// as unrecognised options.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            out.push_back(args[i]);
        }
    }
    if (config_path.empty()) return out;
    if (out.empty()) throw ConfigError("--config requires a subcommand");

    std::ifstream f(config_path);
    if (!f) throw IoError("cannot open config file: " + config_path);
    std::vector<std::string> expanded;
    expanded.push_back(out.front());  // subcommand first
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(config_path + ":" + std::to_string(lineno) +
                              ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(config_path + ": empty key");
        expanded.push_back("--" + key);
        if (!value.empty()) expanded.push_back(value);
    }
    expanded.insert(expanded.end(), out.begin() + 1, out.end());
    return expanded;
}

void add_decoder_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--variant", o.variant,
                    "decoder variant: matching|classifier|simplified|diffusion");
    cmd->add_option("--graph-mode", o.graph_mode, "matching graph: uniform|weighted");
    cmd->add_option("--model", o.model_path, "model checkpoint path (neural variants)");
    cmd->add_option("--threshold", o.threshold, "binarisation threshold");
    cmd->add_option("--passes", o.passes, "diffusion passes");
}

DecoderSpec make_spec(const CommonOpts& o) {
    DecoderSpec spec;
    spec.variant = variant_from_name(o.variant);
    spec.graph_mode = graph_mode_from_name(o.graph_mode);
    spec.threshold = o.threshold;
    spec.passes = o.passes;
    if (spec.variant != Variant::MatchingOnly) {
        if (o.model_path.empty())
            throw ConfigError("variant " + o.variant + " requires --model");
        spec.model = std::make_shared<const ModelParams>(load_checkpoint(o.model_path));
        spec.model_path = o.model_path;
    }
    spec.validate();
    return spec;
}

std::string provenance_string(const std::map<std::string, std::string>& kv) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : kv) {
        if (!first) os << ' ';
        os << k << '=' << v;
        first = false;
    }
    return os.str();
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << body;
    if (!f) throw IoError("failed writing: " + path);
}

int cmd_simulate(int distance, double p_prime, int cycles, long shots,
                 const std::string& basis, std::uint64_t seed, const std::string& out) {
    CodeLayout layout = CodeLayout::build(distance);
    Basis b = basis_from_name(basis);

    std::vector<ErrorVolume> vols(shots, ErrorVolume::zero(layout, cycles, b));
    std::vector<SyndromeVolume> syns(shots, SyndromeVolume::zero(layout, cycles, b));
    parallel_for(0, static_cast<int>(shots), [&](int s) {
        NoiseConfig cfg{p_prime, cycles, b, rng::shot_seed(seed, s)};
        vols[s] = propagate_backward(sample_shot(layout, cfg), layout);
        syns[s] = detection_events(vols[s]);
    });

    DatasetHeader header;
    header.distance = static_cast<std::uint16_t>(distance);
    header.cycles = static_cast<std::uint16_t>(cycles);
    header.p_prime = p_prime;
    header.shots = static_cast<std::uint64_t>(shots);
    header.basis = b;
    header.seed = seed;
    write_dataset_file(out, header, vols, syns);
    std::cout << "wrote " << shots << " shots to " << out << "\n";
    return 0;
}

int cmd_train(const TrainConfig& cfg, const std::string& variant, const std::string& out) {
    TrainConfig c = cfg;
    Variant v = variant_from_name(variant);
    if (v == Variant::MatchingOnly)
        throw ConfigError("train: variant must be classifier|simplified|diffusion");
    c.simplify = v == Variant::SimplifiedClassifier;
    c.diffusion = v == Variant::Diffusion;

    CodeLayout layout = CodeLayout::build(c.distance);
    TrainReport report;
    ModelParams model = train(make_shot_stream(layout, c), layout, c, &report);
    save_checkpoint(model, out);
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
        std::cout << "epoch " << e << " loss " << report.epoch_loss[e] << "\n";
    std::cout << "wrote checkpoint " << out << "\n";
    return 0;
}

int cmd_decode(const std::string& in, const CommonOpts& o) {
    LoadedDataset ds = read_dataset_file(in);
    DecoderSpec spec = make_spec(o);
    const CodeLayout& layout = *ds.layout;
    Decoder decoder(spec, layout, ds.data.header.cycles, ds.data.header.p_prime);
    Basis basis = ds.data.header.basis;

    std::vector<const SyndromeVolume*> ptrs;
    for (const auto& s : ds.data.syndromes) ptrs.push_back(&s);
    auto results = decoder.decode_batch(ptrs, basis, o.seed);

    std::cout << "shot,predicted_flip,actual_flip\n";
    for (std::size_t s = 0; s < results.size(); ++s) {
        int actual = logical_flip(ds.data.volumes[s], basis);
        std::cout << s << ',' << results[s].predicted_flip << ',' << actual << "\n";
    }
    return 0;
}

int cmd_bench_ler(const std::vector<int>& distances, double p_min, double p_max,
                  double p_step, long shots, const CommonOpts& o, const std::string& out,
                  const std::string& json_out) {
    DecoderSpec spec = make_spec(o);
    Basis basis = basis_from_name(o.basis);

    std::vector<LerRow> rows;
    json jrecords = json::array();
    for (int d : distances) {
        for (double p = p_min; p <= p_max + 1e-12; p += p_step) {
            LerPoint pt = estimate_ler(spec, d, p, shots, basis, o.seed);
            LerRow row{o.variant, o.graph_mode, basis, d, pt};
            rows.push_back(row);
            jrecords.push_back({{"variant", o.variant},
                                {"graph_mode", o.graph_mode},
                                {"basis", basis_name(basis)},
                                {"d", d},
                                {"p_prime", pt.p_prime},
                                {"shots", pt.shots},
                                {"failures", pt.failures},
                                {"ler", pt.ler},
                                {"ci_lo", pt.ci_lo},
                                {"ci_hi", pt.ci_hi},
                                {"seed", pt.seed}});
            if (p_step <= 0) break;
        }
    }

    std::map<std::string, std::string> prov{
        {"variant", o.variant},       {"graph_mode", o.graph_mode},
        {"basis", o.basis},           {"shots", std::to_string(shots)},
        {"seed", std::to_string(o.seed)}};
    std::string csv = ler_csv(rows, provenance_string(prov));
    if (out.empty()) std::cout << csv;
    else write_text_file(out, csv);

    if (!json_out.empty()) {
        json j{{"config", prov}, {"records", jrecords}};
        write_text_file(json_out, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_bench_time(int distance, double p_prime, const std::vector<int>& batches,
                   const CommonOpts& o, const std::string& out) {
    DecoderSpec spec = make_spec(o);
    Basis basis = basis_from_name(o.basis);
    set_num_threads(1);  // timing runs pin to a single worker
    TimingRecord rec = bench_time(spec, distance, p_prime, basis, batches, o.seed);

    json samples = json::array();
    for (const auto& [b, s] : rec.samples) samples.push_back({{"batch", b}, {"seconds", s}});
    json j{{"config",
            {{"variant", rec.variant},
             {"graph_mode", rec.graph_mode},
             {"basis", basis_name(rec.basis)},
             {"d", rec.distance},
             {"p_prime", rec.p_prime},
             {"seed", o.seed}}},
           {"samples", samples},
           {"fit",
            {{"per_shot_seconds", rec.fit.per_shot},
             {"overhead_seconds", rec.fit.overhead},
             {"rms_residual", rec.fit.residual}}}};
    if (out.empty()) std::cout << j.dump(2) << "\n";
    else write_text_file(out, j.dump(2) + "\n");
    return 0;
}

int cmd_intersect(const std::string& in, const std::string& out) {
    std::ifstream f(in);
    if (!f) throw IoError("cannot open: " + in);

    std::map<int, LerCurve> curves;
    std::string line;
    bool header_seen = false;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("variant,", 0) != 0)
                throw ConfigError("intersect: not a bench-ler csv: " + in);
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11) throw ConfigError("intersect: malformed row: " + line);
        int d = std::stoi(cells[3]);
        LerPoint pt;
        pt.p_prime = std::stod(cells[4]);
        pt.shots = std::stol(cells[5]);
        pt.failures = std::stol(cells[6]);
        pt.ler = std::stod(cells[7]);
        pt.ci_lo = std::stod(cells[8]);
        pt.ci_hi = std::stod(cells[9]);
        auto& c = curves[d];
        c.distance = d;
        c.cycles = d;
        c.basis = basis_from_name(cells[2]);
        c.points.push_back(pt);
    }
    if (curves.size() < 2) throw ConfigError("intersect: need at least two distances");

    std::vector<LerCurve> list;
    for (auto& [d, c] : curves) list.push_back(std::move(c));
    std::string csv = intersection_matrix_csv(list);
    if (out.empty()) std::cout << csv;
    else write_text_file(out, csv);
    return 0;
}

int cmd_export(const std::string& in, const std::string& out) {
    LoadedDataset ds = read_dataset_file(in);
    const CodeLayout& layout = *ds.layout;

    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "# distance=" << ds.data.header.distance << " cycles=" << ds.data.header.cycles
       << " p_prime=" << ds.data.header.p_prime << " basis="
       << basis_name(ds.data.header.basis) << " seed=" << ds.data.header.seed << "\n";
    os << "shot,kind,layer,row,col,slot\n";
    for (std::size_t s = 0; s < ds.data.volumes.size(); ++s) {
        const ErrorVolume& vol = ds.data.volumes[s];
        for (int t = 0; t < vol.cycles; ++t)
            for (int i = 0; i < 4; ++i) {
                vol.c[t].space_x[i].for_each_set([&](int r, int c) {
                    os << s << ",space_x," << t << ',' << r << ',' << c << ',' << i << "\n";
                });
                vol.c[t].space_z[i].for_each_set([&](int r, int c) {
                    os << s << ",space_z," << t << ',' << r << ',' << c << ',' << i << "\n";
                });
                vol.c[t].time_like[i].for_each_set([&](int r, int c) {
                    os << s << ",time," << t << ',' << r << ',' << c << ',' << i << "\n";
                });
            }
        const SyndromeVolume& syn = ds.data.syndromes[s];
        for (int l = 0; l <= syn.cycles; ++l)
            for (int i = 0; i < 4; ++i)
                syn.layers[l][i].for_each_set([&](int r, int c) {
                    os << s << ",event," << l << ',' << r << ',' << c << ',' << i << "\n";
                });
    }
    (void)layout;
    if (out.empty()) std::cout << os.str();
    else write_text_file(out, os.str());
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"surface-code decoding workbench"};
    app.require_subcommand(1);

    CommonOpts o;
    int distance = 5;
    std::vector<int> distances;
    double p_prime = 0.001;
    double p_min = 0.002, p_max = 0.008, p_step = 0.001;
    int cycles = 0;
    long shots = 1000;
    std::string in_path, out_path, json_path;
    std::vector<int> batches{32, 64, 128, 192, 256};
    TrainConfig tcfg;

    std::string config_path;  // consumed by expand_config, kept for --help
    auto add_common = [&](CLI::App* cmd, bool needs_seed) {
        cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        cmd->add_option("--config", config_path, "plain key=value configuration file");
        auto* seed_opt = cmd->add_option("--seed", o.seed, "rng seed (required)");
        if (needs_seed) seed_opt->required();
        cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "sample shots into a container");
    add_common(simulate, true);
    simulate->add_option("--distance", distance, "code distance")->required();
    simulate->add_option("--p-prime", p_prime, "depolarisation parameter")->required();
    simulate->add_option("--cycles", cycles, "syndrome cycles (default: distance)");
    simulate->add_option("--shots", shots, "number of shots")->required();
    simulate->add_option("--basis", o.basis, "memory basis x|z");
    simulate->add_option("--out", out_path, "output container path")->required();

    CLI::App* train_cmd = app.add_subcommand("train", "train a local decoder model");
    add_common(train_cmd, true);
    train_cmd->add_option("--distance", tcfg.distance, "code distance");
    train_cmd->add_option("--cycles", tcfg.cycles, "cycles (default: distance)");
    train_cmd->add_option("--basis", o.basis, "memory basis x|z");
    train_cmd->add_option("--variant", o.variant, "classifier|simplified|diffusion")
        ->required();
    train_cmd->add_option("--p-min", tcfg.p_min, "lower p' of the training mixture");
    train_cmd->add_option("--p-max", tcfg.p_max, "upper p' of the training mixture");
    train_cmd->add_option("--instances", tcfg.instances, "instances per epoch");
    train_cmd->add_option("--epochs", tcfg.epochs, "epochs");
    train_cmd->add_option("--batch", tcfg.batch_size, "batch size");
    train_cmd->add_option("--lr", tcfg.learning_rate, "learning rate");
    train_cmd->add_option("--hidden-layers", tcfg.hidden_layers, "hidden conv layers");
    train_cmd->add_option("--hidden-channels", tcfg.hidden_channels, "hidden channels");
    train_cmd->add_option("--out", out_path, "checkpoint output path")->required();

    CLI::App* decode_cmd = app.add_subcommand("decode", "decode a container, print flips");
    add_common(decode_cmd, true);
    decode_cmd->add_option("--in", in_path, "input container")->required();
    add_decoder_opts(decode_cmd, o);

    CLI::App* bench_ler = app.add_subcommand("bench-ler", "Monte-Carlo logical error rates");
    add_common(bench_ler, true);
    bench_ler->add_option("--distance", distances, "code distances")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    bench_ler->add_option("--p-min", p_min, "grid start");
    bench_ler->add_option("--p-max", p_max, "grid end");
    bench_ler->add_option("--p-step", p_step, "grid step");
    bench_ler->add_option("--shots", shots, "shots per point")->required();
    bench_ler->add_option("--basis", o.basis, "tracked basis x|z");
    add_decoder_opts(bench_ler, o);
    bench_ler->add_option("--out", out_path, "CSV output path");
    bench_ler->add_option("--json", json_path, "JSON output path");

    CLI::App* bench_time = app.add_subcommand("bench-time", "batch-size latency fit");
    add_common(bench_time, true);
    bench_time->add_option("--distance", distance, "code distance")->required();
    bench_time->add_option("--p-prime", p_prime, "depolarisation parameter")->required();
    bench_time->add_option("--basis", o.basis, "tracked basis x|z");
    bench_time->add_option("--batches", batches, "batch sizes")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    add_decoder_opts(bench_time, o);
    bench_time->add_option("--out", out_path, "JSON output path");

    CLI::App* intersect = app.add_subcommand("intersect", "pairwise LER-curve crossings");
    add_common(intersect, false);
    intersect->add_option("--in", in_path, "bench-ler CSV input")->required();
    intersect->add_option("--out", out_path, "matrix CSV output");

    CLI::App* export_cmd = app.add_subcommand("export", "container to plot-ready CSV");
    add_common(export_cmd, false);
    export_cmd->add_option("--in", in_path, "input container")->required();
    export_cmd->add_option("--out", out_path, "CSV output");

    try {
        std::vector<std::string> expanded = expand_config(args);
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e);
            return 0;
        }
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        set_num_threads(o.threads);
        if (simulate->parsed()) {
            if (cycles == 0) cycles = distance;
            return cmd_simulate(distance, p_prime, cycles, shots, o.basis, o.seed,
                                out_path);
        }
        if (train_cmd->parsed()) {
            tcfg.seed = o.seed;
            tcfg.basis = basis_from_name(o.basis);
            if (tcfg.cycles == 0) tcfg.cycles = tcfg.distance;
            return cmd_train(tcfg, o.variant, out_path);
        }
        if (decode_cmd->parsed()) return cmd_decode(in_path, o);
        if (bench_ler->parsed())
            return cmd_bench_ler(distances, p_min, p_max, p_step, shots, o, out_path,
                                 json_path);
        if (bench_time->parsed())
            return cmd_bench_time(distance, p_prime, batches, o, out_path);
        if (intersect->parsed()) return cmd_intersect(in_path, out_path);
        if (export_cmd->parsed()) return cmd_export(in_path, out_path);
        return 2;
    } catch (const TrainDivergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sqec
