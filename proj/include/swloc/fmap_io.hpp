#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swloc/features.hpp"

namespace swloc::io {

struct FmapHeader {
    double fs_hz = 0.0;
    features::FeatureShapes shapes;
    features::FeatureWindows windows;
    int frame_length = 0;
    int hop = 0;
    std::int64_t record_count = 0;
    std::string source_recording;  // .lwr filename this was derived from
    std::string role;
    int transit_index = 0;
    std::string config_hash;
};

// .fmap feature dataset: one JSON header line (shapes, fs, windows, config
// hash, provenance) followed by fixed-size records of {timestamp f64, range
// f32, bearing f32, cepstral map f32..., gcc map f32...}, little-endian.
void write_fmap(const FmapHeader& h, const std::vector<features::FeatureMaps>& maps,
                const std::string& path);

FmapHeader read_fmap_header(const std::string& path);

struct FmapFile {
    FmapHeader header;
    std::vector<features::FeatureMaps> maps;
};

FmapFile read_fmap(const std::string& path);

}  // namespace swloc::io
