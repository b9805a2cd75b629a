#include "swloc/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace swloc::io {

using nlohmann::json;

void write_ckpt_raw(const CkptMeta& meta, const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& tensors, const std::string& path) {
    if (names.size() != tensors.size()) throw ShapeError("checkpoint name/tensor count mismatch");
    json h;
    h["format"] = "swloc-ckpt";
    h["version"] = 1;
    h["variant"] = model::to_string(meta.variant);
    h["shapes"] = {{"cep_len", meta.shapes.cep_len},
                   {"cep_height", meta.shapes.cep_height},
                   {"gcc_len", meta.shapes.gcc_len},
                   {"gcc_height", meta.shapes.gcc_height}};
    h["hyper"] = {{"conv_filters", meta.hyper.conv_filters},
                  {"kernel_length", meta.hyper.kernel_length},
                  {"dense_units", meta.hyper.dense_units},
                  {"batchnorm_conv", meta.hyper.batchnorm_conv},
                  {"batchnorm_dense", meta.hyper.batchnorm_dense},
                  {"dropout_rate", meta.hyper.dropout_rate}};
    h["loss"] = {{"alpha", meta.loss.alpha}, {"range_scale_m", meta.loss.range_scale_m}};
    h["net_seed"] = meta.net_seed;
    h["config_hash"] = meta.config_hash;
    if (!meta.train_config_json.empty()) h["train_config"] = json::parse(meta.train_config_json);
    json tl = json::array();
    for (std::size_t i = 0; i < names.size(); ++i)
        tl.push_back({{"name", names[i]}, {"count", tensors[i].size()}});
    h["tensors"] = tl;

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << h.dump() << '\n';
    for (const auto& t : tensors)
        f.write(reinterpret_cast<const char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!f) throw IoError("write failed: " + path);
}

CkptRaw read_ckpt_raw(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("missing header: " + path);
    json h = json::parse(line, nullptr, false);
    if (h.is_discarded() || h.value("format", "") != "swloc-ckpt")
        throw IoError("not a swloc-ckpt file: " + path);
    if (h.value("version", 0) != 1) throw IoError("unsupported ckpt version in " + path);

    CkptRaw out;
    out.meta.variant = model::variant_from_string(h.at("variant").get<std::string>());
    const auto& s = h.at("shapes");
    out.meta.shapes.cep_len = s.at("cep_len").get<int>();
    out.meta.shapes.cep_height = s.at("cep_height").get<int>();
    out.meta.shapes.gcc_len = s.at("gcc_len").get<int>();
    out.meta.shapes.gcc_height = s.at("gcc_height").get<int>();
    const auto& hy = h.at("hyper");
    out.meta.hyper.conv_filters = hy.at("conv_filters").get<int>();
    out.meta.hyper.kernel_length = hy.at("kernel_length").get<int>();
    out.meta.hyper.dense_units = hy.at("dense_units").get<int>();
    out.meta.hyper.batchnorm_conv = hy.at("batchnorm_conv").get<bool>();
    out.meta.hyper.batchnorm_dense = hy.at("batchnorm_dense").get<bool>();
    out.meta.hyper.dropout_rate = hy.at("dropout_rate").get<double>();
    out.meta.loss.alpha = h.at("loss").at("alpha").get<double>();
    out.meta.loss.range_scale_m = h.at("loss").at("range_scale_m").get<double>();
    out.meta.net_seed = h.value("net_seed", std::uint64_t{0});
    out.meta.config_hash = h.value("config_hash", "");
    if (h.contains("train_config")) out.meta.train_config_json = h["train_config"].dump();

    for (const auto& t : h.at("tensors")) {
        out.names.push_back(t.at("name").get<std::string>());
        out.tensors.emplace_back(t.at("count").get<std::size_t>());
    }
    for (auto& t : out.tensors) {
        f.read(reinterpret_cast<char*>(t.data()),
               static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!f) throw IoError("truncated checkpoint: " + path);
    }
    return out;
}

}  // namespace swloc::io
