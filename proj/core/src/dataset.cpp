#include "sqec/dataset.hpp"

#include <cstring>
#include <fstream>
#include <memory>

#include "sqec/errors.hpp"

namespace sqec {

namespace {

template <typename T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

void write_plane(std::ostream& os, const BitPlane& p) {
    for (int r = 0; r < p.rows(); ++r) write_pod<std::uint64_t>(os, p.word(r));
}

void read_plane(std::istream& is, BitPlane& p) {
    for (int r = 0; r < p.rows(); ++r) {
        std::uint64_t w = read_pod<std::uint64_t>(is);
        for (int c = 0; c < p.cols(); ++c) p.set(r, c, (w >> c) & 1ULL);
    }
}

}  // namespace

void write_dataset(std::ostream& os, const DatasetHeader& header,
                   const std::vector<ErrorVolume>& volumes,
                   const std::vector<SyndromeVolume>& syndromes) {
    if (volumes.size() != header.shots || syndromes.size() != header.shots)
        throw std::invalid_argument("write_dataset: shot count mismatch");
    os.write("SQEC", 4);
    write_pod<std::uint16_t>(os, header.version);
    write_pod<std::uint16_t>(os, header.distance);
    write_pod<std::uint16_t>(os, header.cycles);
    write_pod<double>(os, header.p_prime);
    write_pod<std::uint64_t>(os, header.shots);
    write_pod<std::uint8_t>(os, header.basis == Basis::X ? 0 : 1);
    write_pod<std::uint64_t>(os, header.seed);

    for (std::size_t s = 0; s < volumes.size(); ++s) {
        const ErrorVolume& vol = volumes[s];
        for (int t = 0; t < vol.cycles; ++t)
            for (int i = 0; i < 4; ++i) {
                write_plane(os, vol.c[t].space_x[i]);
                write_plane(os, vol.c[t].space_z[i]);
                write_plane(os, vol.c[t].time_like[i]);
            }
        const SyndromeVolume& syn = syndromes[s];
        for (int l = 0; l <= syn.cycles; ++l)
            for (int i = 0; i < 4; ++i) write_plane(os, syn.layers[l][i]);
    }
    if (!os) throw IoError("write_dataset: stream failure");
}

Dataset read_dataset(std::istream& is, const CodeLayout*& layout_out) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SQEC", 4) != 0)
        throw IoError("read_dataset: bad magic");
    Dataset ds;
    ds.header.version = read_pod<std::uint16_t>(is);
    if (ds.header.version != 1) throw IoError("read_dataset: unsupported version");
    ds.header.distance = read_pod<std::uint16_t>(is);
    ds.header.cycles = read_pod<std::uint16_t>(is);
    ds.header.p_prime = read_pod<double>(is);
    ds.header.shots = read_pod<std::uint64_t>(is);
    ds.header.basis = read_pod<std::uint8_t>(is) == 0 ? Basis::X : Basis::Z;
    ds.header.seed = read_pod<std::uint64_t>(is);

    // caller provides layout storage via read_dataset_file
    const CodeLayout& layout = *layout_out;
    for (std::uint64_t s = 0; s < ds.header.shots; ++s) {
        ErrorVolume vol = ErrorVolume::zero(layout, ds.header.cycles, ds.header.basis);
        for (int t = 0; t < vol.cycles; ++t)
            for (int i = 0; i < 4; ++i) {
                read_plane(is, vol.c[t].space_x[i]);
                read_plane(is, vol.c[t].space_z[i]);
                read_plane(is, vol.c[t].time_like[i]);
            }
        SyndromeVolume syn = SyndromeVolume::zero(layout, ds.header.cycles, ds.header.basis);
        for (int l = 0; l <= syn.cycles; ++l)
            for (int i = 0; i < 4; ++i) read_plane(is, syn.layers[l][i]);
        ds.volumes.push_back(std::move(vol));
        ds.syndromes.push_back(std::move(syn));
    }
    if (!is) throw IoError("read_dataset: truncated container");
    return ds;
}

void write_dataset_file(const std::string& path, const DatasetHeader& header,
                        const std::vector<ErrorVolume>& volumes,
                        const std::vector<SyndromeVolume>& syndromes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_dataset(f, header, volumes, syndromes);
    if (!f) throw IoError("failed writing: " + path);
}

LoadedDataset read_dataset_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);

    // peek distance to build the layout the volumes will reference
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "SQEC", 4) != 0) throw IoError("bad magic: " + path);
    std::uint16_t version = read_pod<std::uint16_t>(f);
    std::uint16_t distance = read_pod<std::uint16_t>(f);
    (void)version;
    f.seekg(0);

    LoadedDataset out;
    out.layout = std::make_shared<const CodeLayout>(CodeLayout::build(distance));
    const CodeLayout* lp = out.layout.get();
    out.data = read_dataset(f, lp);
    return out;
}

}  // namespace sqec
