#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "swloc/error.hpp"
#include "swloc/model.hpp"

namespace swloc::io {

struct CkptMeta {
    model::Variant variant = model::Variant::combined;
    model::NetShapes shapes;
    model::NetHyper hyper;
    model::LossParams loss;
    std::uint64_t net_seed = 0;
    std::string config_hash;
    std::string train_config_json;  // serialized TrainConfig, informational
};

// Low-level .ckpt I/O: JSON header line (architecture, shapes, normalization
// constants, seed, training config) followed by named float64 arrays.
void write_ckpt_raw(const CkptMeta& meta, const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& tensors, const std::string& path);

struct CkptRaw {
    CkptMeta meta;
    std::vector<std::string> names;
    std::vector<std::vector<double>> tensors;
};

CkptRaw read_ckpt_raw(const std::string& path);

template <class T>
void save_checkpoint(model::LocalizationNet<T>& net, const CkptMeta& meta_in,
                     const std::string& path) {
    CkptMeta meta = meta_in;
    meta.variant = net.variant();
    meta.shapes = net.shapes();
    meta.hyper = net.hyper();
    meta.net_seed = net.seed();
    std::vector<std::string> names;
    std::vector<std::vector<double>> tensors;
    for (auto& st : net.state()) {
        names.push_back(st.name);
        std::vector<double> d(st.tensor->v.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<double>(st.tensor->v[i]);
        tensors.push_back(std::move(d));
    }
    write_ckpt_raw(meta, names, tensors, path);
}

template <class T>
std::unique_ptr<model::LocalizationNet<T>> load_checkpoint(const std::string& path,
                                                           CkptMeta* meta_out = nullptr) {
    CkptRaw raw = read_ckpt_raw(path);
    auto net = std::make_unique<model::LocalizationNet<T>>(raw.meta.variant, raw.meta.shapes,
                                                           raw.meta.hyper, raw.meta.net_seed);
    auto st = net->state();
    if (st.size() != raw.names.size())
        throw IoError("checkpoint tensor count does not match architecture: " + path);
    for (std::size_t i = 0; i < st.size(); ++i) {
        if (st[i].name != raw.names[i])
            throw IoError("checkpoint tensor '" + raw.names[i] + "' does not match '" +
                          st[i].name + "'");
        if (st[i].tensor->v.size() != raw.tensors[i].size())
            throw IoError("checkpoint tensor size mismatch at " + raw.names[i]);
        for (std::size_t k = 0; k < raw.tensors[i].size(); ++k)
            st[i].tensor->v[k] = static_cast<T>(raw.tensors[i][k]);
    }
    if (meta_out) *meta_out = raw.meta;
    return net;
}

}  // namespace swloc::io
