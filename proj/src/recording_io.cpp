#include "swloc/recording_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "swloc/error.hpp"

namespace swloc::io {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "sample I/O assumes a little-endian host");

void write_lwr(const sim::LabeledRecording& rec, const std::string& path) {
    json h;
    h["format"] = "swloc-lwr";
    h["version"] = 1;
    h["fs_hz"] = rec.fs_hz;
    h["channels"] = rec.channels();
    h["sample_count"] = rec.sample_count();
    h["role"] = rec.role;
    h["transit_index"] = rec.transit_index;
    h["seed"] = rec.seed;
    h["config_hash"] = rec.config_hash;
    if (!rec.config_json.empty()) h["config"] = json::parse(rec.config_json);
    json labels = json::array();
    for (const auto& l : rec.labels) labels.push_back({l.t_s, l.range_m, l.bearing_rad});
    h["labels"] = labels;

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << h.dump() << '\n';

    const int ch = rec.channels();
    const std::int64_t n = rec.sample_count();
    std::vector<float> inter(static_cast<std::size_t>(ch) * static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        for (int c = 0; c < ch; ++c)
            inter[static_cast<std::size_t>(i * ch + c)] =
                rec.samples[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
    f.write(reinterpret_cast<const char*>(inter.data()),
            static_cast<std::streamsize>(inter.size() * sizeof(float)));
    if (!f) throw IoError("write failed: " + path);
}

sim::LabeledRecording read_lwr(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("missing header: " + path);
    json h = json::parse(line, nullptr, false);
    if (h.is_discarded() || h.value("format", "") != "swloc-lwr")
        throw IoError("not a swloc-lwr file: " + path);
    if (h.value("version", 0) != 1) throw IoError("unsupported lwr version in " + path);

    sim::LabeledRecording rec;
    rec.fs_hz = h.at("fs_hz").get<double>();
    rec.role = h.value("role", "");
    rec.transit_index = h.value("transit_index", 0);
    rec.seed = h.value("seed", std::uint64_t{0});
    rec.config_hash = h.value("config_hash", "");
    if (h.contains("config")) rec.config_json = h["config"].dump();
    const int ch = h.at("channels").get<int>();
    const std::int64_t n = h.at("sample_count").get<std::int64_t>();
    for (const auto& l : h.at("labels"))
        rec.labels.push_back({l.at(0).get<double>(), l.at(1).get<double>(), l.at(2).get<double>()});

    std::vector<float> inter(static_cast<std::size_t>(ch) * static_cast<std::size_t>(n));
    f.read(reinterpret_cast<char*>(inter.data()),
           static_cast<std::streamsize>(inter.size() * sizeof(float)));
    if (f.gcount() != static_cast<std::streamsize>(inter.size() * sizeof(float)))
        throw IoError("truncated sample data: " + path);
    rec.samples.assign(static_cast<std::size_t>(ch), std::vector<float>(static_cast<std::size_t>(n)));
    for (std::int64_t i = 0; i < n; ++i)
        for (int c = 0; c < ch; ++c)
            rec.samples[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] =
                inter[static_cast<std::size_t>(i * ch + c)];
    return rec;
}

}  // namespace swloc::io
