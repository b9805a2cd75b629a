#include "swloc.h"

#include <cstring>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "swloc/baseline.hpp"
#include "swloc/checkpoint.hpp"
#include "swloc/config.hpp"
#include "swloc/error.hpp"
#include "swloc/model.hpp"
#include "swloc/pipeline.hpp"
#include "swloc/recording_io.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

swloc_status run_guarded(const std::function<void()>& fn) {
    try {
        fn();
        return SWLOC_OK;
    } catch (const swloc::ConfigError& e) {
        set_error(e.what());
        return SWLOC_ERR_CONFIG;
    } catch (const swloc::DomainError& e) {
        set_error(e.what());
        return SWLOC_ERR_DOMAIN;
    } catch (const swloc::DegenerateInputError& e) {
        set_error(e.what());
        return SWLOC_ERR_DEGENERATE_INPUT;
    } catch (const swloc::ShapeError& e) {
        set_error(e.what());
        return SWLOC_ERR_SHAPE;
    } catch (const swloc::StateError& e) {
        set_error(e.what());
        return SWLOC_ERR_STATE;
    } catch (const swloc::TrainingError& e) {
        set_error(e.what());
        return SWLOC_ERR_TRAINING;
    } catch (const swloc::IoError& e) {
        set_error(e.what());
        return SWLOC_ERR_IO;
    } catch (const std::exception& e) {
        set_error(e.what());
        return SWLOC_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return SWLOC_ERR_INTERNAL;
    }
}

swloc::ExperimentConfig load_cfg(const char* config_path, const uint64_t* seed_override) {
    if (!config_path) throw swloc::ConfigError("config path is null");
    swloc::ExperimentConfig cfg = swloc::load_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    return cfg;
}

std::vector<std::string> split_methods(const char* methods) {
    std::vector<std::string> out;
    if (!methods || !*methods) return out;
    std::string cur;
    for (const char* p = methods;; ++p) {
        if (*p == ',' || *p == '\0') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
            if (*p == '\0') break;
        } else {
            cur += *p;
        }
    }
    return out;
}

}  // namespace

struct swloc_recording {
    swloc::sim::LabeledRecording rec;
};

struct swloc_model {
    std::unique_ptr<swloc::model::LocalizationNet<float>> net;
    swloc::io::CkptMeta meta;
    std::string variant_name;
};

extern "C" {

const char* swloc_version(void) { return "0.1.0"; }

const char* swloc_last_error(void) { return g_last_error.c_str(); }

swloc_status swloc_run_simulate(const char* config_path, const char* out_dir,
                                const uint64_t* seed_override) {
    return run_guarded([&] {
        if (!out_dir) throw swloc::ConfigError("out_dir is null");
        swloc::pipeline::run_simulate(load_cfg(config_path, seed_override), out_dir);
    });
}

swloc_status swloc_run_features(const char* config_path, const char* dataset_dir,
                                const char* out_dir, const uint64_t* seed_override) {
    return run_guarded([&] {
        if (!dataset_dir || !out_dir) throw swloc::ConfigError("dataset_dir/out_dir is null");
        swloc::pipeline::run_features(load_cfg(config_path, seed_override), dataset_dir, out_dir);
    });
}

swloc_status swloc_run_train(const char* config_path, const char* features_dir,
                             const char* out_dir, const char* variant,
                             const uint64_t* seed_override) {
    return run_guarded([&] {
        if (!features_dir || !out_dir) throw swloc::ConfigError("features_dir/out_dir is null");
        swloc::pipeline::run_train(load_cfg(config_path, seed_override), features_dir, out_dir,
                                   variant ? variant : "");
    });
}

swloc_status swloc_run_eval(const char* config_path, const char* features_dir,
                            const char* dataset_dir, const char* checkpoint_dir,
                            const char* out_dir, int force, const char* methods,
                            const uint64_t* seed_override) {
    return run_guarded([&] {
        if (!features_dir || !dataset_dir || !checkpoint_dir || !out_dir)
            throw swloc::ConfigError("eval directory argument is null");
        swloc::pipeline::run_eval(load_cfg(config_path, seed_override), features_dir, dataset_dir,
                                  checkpoint_dir, out_dir, force != 0, split_methods(methods));
    });
}

swloc_status swloc_run_track_plot(const char* fixes_csv, const char* out_dir) {
    return run_guarded([&] {
        if (!fixes_csv || !out_dir) throw swloc::ConfigError("fixes_csv/out_dir is null");
        swloc::pipeline::run_track_plot(fixes_csv, out_dir);
    });
}

swloc_status swloc_recording_open(const char* path, swloc_recording** out) {
    return run_guarded([&] {
        if (!path || !out) throw swloc::ConfigError("null argument");
        auto handle = std::make_unique<swloc_recording>();
        handle->rec = swloc::io::read_lwr(path);
        *out = handle.release();
    });
}

void swloc_recording_close(swloc_recording* rec) { delete rec; }

int swloc_recording_channels(const swloc_recording* rec) {
    return rec ? rec->rec.channels() : 0;
}

int64_t swloc_recording_samples(const swloc_recording* rec) {
    return rec ? rec->rec.sample_count() : 0;
}

double swloc_recording_fs(const swloc_recording* rec) { return rec ? rec->rec.fs_hz : 0.0; }

int64_t swloc_recording_label_count(const swloc_recording* rec) {
    return rec ? static_cast<int64_t>(rec->rec.labels.size()) : 0;
}

swloc_status swloc_recording_label(const swloc_recording* rec, int64_t index, double* t_s,
                                   double* range_m, double* bearing_rad) {
    return run_guarded([&] {
        if (!rec) throw swloc::ConfigError("recording handle is null");
        if (index < 0 || index >= static_cast<int64_t>(rec->rec.labels.size()))
            throw swloc::DomainError("label index out of range");
        const auto& l = rec->rec.labels[static_cast<std::size_t>(index)];
        if (t_s) *t_s = l.t_s;
        if (range_m) *range_m = l.range_m;
        if (bearing_rad) *bearing_rad = l.bearing_rad;
    });
}

swloc_status swloc_recording_read(const swloc_recording* rec, int channel, int64_t start,
                                  int64_t count, float* out) {
    return run_guarded([&] {
        if (!rec || !out) throw swloc::ConfigError("null argument");
        if (channel < 0 || channel >= rec->rec.channels())
            throw swloc::DomainError("channel out of range");
        if (start < 0 || count < 0 || start + count > rec->rec.sample_count())
            throw swloc::DomainError("sample window out of range");
        const auto& ch = rec->rec.samples[static_cast<std::size_t>(channel)];
        std::memcpy(out, ch.data() + start, static_cast<std::size_t>(count) * sizeof(float));
    });
}

swloc_status swloc_model_load(const char* path, swloc_model** out) {
    return run_guarded([&] {
        if (!path || !out) throw swloc::ConfigError("null argument");
        auto handle = std::make_unique<swloc_model>();
        handle->net = swloc::io::load_checkpoint<float>(path, &handle->meta);
        handle->variant_name = swloc::model::to_string(handle->net->variant());
        *out = handle.release();
    });
}

void swloc_model_close(swloc_model* m) { delete m; }

const char* swloc_model_variant(const swloc_model* m) {
    return m ? m->variant_name.c_str() : "";
}

swloc_status swloc_model_input_shape(const swloc_model* m, int* cep_len, int* cep_height,
                                     int* gcc_len, int* gcc_height) {
    return run_guarded([&] {
        if (!m) throw swloc::ConfigError("model handle is null");
        const auto& s = m->net->shapes();
        if (cep_len) *cep_len = s.cep_len;
        if (cep_height) *cep_height = s.cep_height;
        if (gcc_len) *gcc_len = s.gcc_len;
        if (gcc_height) *gcc_height = s.gcc_height;
    });
}

swloc_status swloc_model_predict(swloc_model* m, const float* cepstral, int64_t cepstral_len,
                                 const float* gcc, int64_t gcc_len, double* range_m,
                                 double* bearing_rad) {
    return run_guarded([&] {
        if (!m) throw swloc::ConfigError("model handle is null");
        const auto& s = m->net->shapes();
        const int64_t want_cep = static_cast<int64_t>(s.cep_len) * s.cep_height;
        const int64_t want_gcc = static_cast<int64_t>(s.gcc_len) * s.gcc_height;
        const bool need_cep = m->net->uses_cepstral();
        const bool need_gcc = m->net->uses_gcc();
        if (need_cep && (!cepstral || cepstral_len != want_cep))
            throw swloc::ShapeError("cepstral input must hold " + std::to_string(want_cep) +
                                    " floats");
        if (need_gcc && (!gcc || gcc_len != want_gcc))
            throw swloc::ShapeError("gcc input must hold " + std::to_string(want_gcc) + " floats");

        swloc::nn::Tensor<float> cep({1, s.cep_len, s.cep_height, 1});
        swloc::nn::Tensor<float> g({1, s.gcc_len, s.gcc_height, 1});
        if (cepstral && cepstral_len == want_cep)
            std::memcpy(cep.data(), cepstral, static_cast<std::size_t>(want_cep) * sizeof(float));
        if (gcc && gcc_len == want_gcc)
            std::memcpy(g.data(), gcc, static_cast<std::size_t>(want_gcc) * sizeof(float));
        swloc::nn::Tensor<float> out = m->net->forward(cep, g, swloc::nn::Mode::infer);
        if (range_m)
            *range_m = static_cast<double>(out.v[0]) * m->meta.loss.range_scale_m;
        if (bearing_rad)
            *bearing_rad = swloc::model::fold_bearing(static_cast<double>(out.v[1]));
    });
}

swloc_status swloc_wavefront_fix(double tau12_s, double tau23_s, double spacing_m,
                                 double sound_speed_mps, double max_range_m, double* range_m,
                                 double* bearing_rad, int* valid) {
    return run_guarded([&] {
        swloc::baseline::Fix fix = swloc::baseline::wavefront_curvature_fix(
            tau12_s, tau23_s, spacing_m, sound_speed_mps,
            max_range_m > 0.0 ? max_range_m : swloc::baseline::kBaselineMaxRangeM);
        if (range_m) *range_m = fix.range_m;
        if (bearing_rad) *bearing_rad = fix.bearing_rad;
        if (valid) *valid = fix.valid ? 1 : 0;
    });
}

}  // extern "C"
