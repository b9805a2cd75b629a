#include "swloc/fmap_io.hpp"

#include <fstream>

#include <json.hpp>

#include "swloc/error.hpp"

namespace swloc::io {

using nlohmann::json;

namespace {

json header_to_json(const FmapHeader& h) {
    json j;
    j["format"] = "swloc-fmap";
    j["version"] = 1;
    j["fs_hz"] = h.fs_hz;
    j["frame_length"] = h.frame_length;
    j["hop"] = h.hop;
    j["record_count"] = h.record_count;
    j["source_recording"] = h.source_recording;
    j["role"] = h.role;
    j["transit_index"] = h.transit_index;
    j["config_hash"] = h.config_hash;
    j["shapes"] = {{"cepstral_bins", h.shapes.cepstral_bins},
                   {"cepstral_start_bin", h.shapes.cepstral_start_bin},
                   {"channels", h.shapes.channels},
                   {"gcc_bins", h.shapes.gcc_bins},
                   {"gcc_halfwidth", h.shapes.gcc_halfwidth},
                   {"pairs", h.shapes.pairs}};
    j["windows"] = {{"lifter_qmin_s", h.windows.lifter_qmin_s},
                    {"lifter_qmax_s", h.windows.lifter_qmax_s},
                    {"gcc_max_lag_s", h.windows.gcc_max_lag_s},
                    {"gcc_subsample_factor", h.windows.gcc_subsample_factor},
                    {"weighting", features::to_string(h.windows.weighting)}};
    return j;
}

FmapHeader header_from_json(const json& j, const std::string& path) {
    if (j.value("format", "") != "swloc-fmap") throw IoError("not a swloc-fmap file: " + path);
    if (j.value("version", 0) != 1) throw IoError("unsupported fmap version in " + path);
    FmapHeader h;
    h.fs_hz = j.at("fs_hz").get<double>();
    h.frame_length = j.at("frame_length").get<int>();
    h.hop = j.at("hop").get<int>();
    h.record_count = j.at("record_count").get<std::int64_t>();
    h.source_recording = j.value("source_recording", "");
    h.role = j.value("role", "");
    h.transit_index = j.value("transit_index", 0);
    h.config_hash = j.value("config_hash", "");
    const auto& s = j.at("shapes");
    h.shapes.cepstral_bins = s.at("cepstral_bins").get<int>();
    h.shapes.cepstral_start_bin = s.at("cepstral_start_bin").get<int>();
    h.shapes.channels = s.at("channels").get<int>();
    h.shapes.gcc_bins = s.at("gcc_bins").get<int>();
    h.shapes.gcc_halfwidth = s.at("gcc_halfwidth").get<int>();
    h.shapes.pairs = s.at("pairs").get<int>();
    const auto& w = j.at("windows");
    h.windows.lifter_qmin_s = w.at("lifter_qmin_s").get<double>();
    h.windows.lifter_qmax_s = w.at("lifter_qmax_s").get<double>();
    h.windows.gcc_max_lag_s = w.at("gcc_max_lag_s").get<double>();
    h.windows.gcc_subsample_factor = w.at("gcc_subsample_factor").get<int>();
    h.windows.weighting = features::gcc_weighting_from_string(w.at("weighting").get<std::string>());
    return h;
}

}  // namespace

void write_fmap(const FmapHeader& h, const std::vector<features::FeatureMaps>& maps,
                const std::string& path) {
    FmapHeader hh = h;
    hh.record_count = static_cast<std::int64_t>(maps.size());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << header_to_json(hh).dump() << '\n';
    const std::size_t cep_n = static_cast<std::size_t>(h.shapes.cepstral_bins * h.shapes.channels);
    const std::size_t gcc_n = static_cast<std::size_t>(h.shapes.gcc_bins * h.shapes.pairs);
    for (const auto& m : maps) {
        if (m.cepstral.size() != cep_n || m.gcc.size() != gcc_n)
            throw ShapeError("feature map does not match declared shapes");
        f.write(reinterpret_cast<const char*>(&m.timestamp_s), sizeof(double));
        f.write(reinterpret_cast<const char*>(&m.range_m), sizeof(float));
        f.write(reinterpret_cast<const char*>(&m.bearing_rad), sizeof(float));
        f.write(reinterpret_cast<const char*>(m.cepstral.data()),
                static_cast<std::streamsize>(cep_n * sizeof(float)));
        f.write(reinterpret_cast<const char*>(m.gcc.data()),
                static_cast<std::streamsize>(gcc_n * sizeof(float)));
    }
    if (!f) throw IoError("write failed: " + path);
}

FmapHeader read_fmap_header(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("missing header: " + path);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw IoError("bad fmap header: " + path);
    return header_from_json(j, path);
}

FmapFile read_fmap(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("missing header: " + path);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw IoError("bad fmap header: " + path);
    FmapFile out;
    out.header = header_from_json(j, path);
    const std::size_t cep_n =
        static_cast<std::size_t>(out.header.shapes.cepstral_bins * out.header.shapes.channels);
    const std::size_t gcc_n =
        static_cast<std::size_t>(out.header.shapes.gcc_bins * out.header.shapes.pairs);
    out.maps.resize(static_cast<std::size_t>(out.header.record_count));
    for (auto& m : out.maps) {
        m.cepstral.resize(cep_n);
        m.gcc.resize(gcc_n);
        f.read(reinterpret_cast<char*>(&m.timestamp_s), sizeof(double));
        f.read(reinterpret_cast<char*>(&m.range_m), sizeof(float));
        f.read(reinterpret_cast<char*>(&m.bearing_rad), sizeof(float));
        f.read(reinterpret_cast<char*>(m.cepstral.data()),
               static_cast<std::streamsize>(cep_n * sizeof(float)));
        f.read(reinterpret_cast<char*>(m.gcc.data()),
               static_cast<std::streamsize>(gcc_n * sizeof(float)));
        if (!f) throw IoError("truncated fmap records: " + path);
    }
    return out;
}

}  // namespace swloc::io
