#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "sqec/propagation.hpp"

namespace sqec {

// Binary shot container. Header: magic "SQEC", version u16, distance u16,
// cycles u16, p' f64, shot count u64, basis u8, seed u64; then per shot the
// packed ErrorVolume planes followed by the SyndromeVolume planes, one
// little-endian 64-bit word per plane row. All lengths derive from the
// header.
struct DatasetHeader {
    std::uint16_t version = 1;
    std::uint16_t distance = 0;
    std::uint16_t cycles = 0;
    double p_prime = 0.0;
    std::uint64_t shots = 0;
    Basis basis = Basis::Z;
    std::uint64_t seed = 0;
};

struct Dataset {
    DatasetHeader header;
    std::vector<ErrorVolume> volumes;
    std::vector<SyndromeVolume> syndromes;
};

void write_dataset(std::ostream& os, const DatasetHeader& header,
                   const std::vector<ErrorVolume>& volumes,
                   const std::vector<SyndromeVolume>& syndromes);

// Reads the whole container; `layout` must outlive the result.
Dataset read_dataset(std::istream& is, const CodeLayout*& layout_out);

void write_dataset_file(const std::string& path, const DatasetHeader& header,
                        const std::vector<ErrorVolume>& volumes,
                        const std::vector<SyndromeVolume>& syndromes);

struct LoadedDataset {
    Dataset data;
    // Owned layout the volumes reference.
    std::shared_ptr<const CodeLayout> layout;
};

LoadedDataset read_dataset_file(const std::string& path);

}  // namespace sqec
