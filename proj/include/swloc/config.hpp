#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swloc/features.hpp"
#include "swloc/model.hpp"
#include "swloc/sim.hpp"

namespace swloc {

struct TransitSpec {
    double heading_deg = 90.0;
    double cpa_offset_m = 80.0;
    double speed_mps = 5.5;
};

struct TransitsConfig {
    double label_interval_s = 0.1;
    double leg_m = 500.0;
    double snr_db_min = 10.0;
    double snr_db_max = 20.0;
    std::vector<TransitSpec> train;
    std::vector<TransitSpec> test;
    std::vector<TransitSpec> generalization;
};

struct WindowsConfig {
    double lifter_qmin_s = 1.24e-4;
    double lifter_qmax_s = 1.4e-3;
    double gcc_margin = 0.03;
    int gcc_subsample_factor = 10;
    features::GccWeighting weighting = features::GccWeighting::phat;
};

struct TrainSection {
    std::string variant = "combined";
    model::TrainConfig core;  // core.loss.range_scale_m mirrors eval.range_max_m
    model::NetHyper hyper;
    int train_frames = 20000;
    int val_transits = 1;
    double val_max_fraction = 0.05;
    int stratify_bins = 10;
};

struct EvalSection {
    double range_max_m = 500.0;
    int range_bins = 10;
    int bearing_bins = 9;
    double baseline_max_range_m = 1000.0;
};

// The full experiment description. Serializes to/from JSON; the canonical
// dump (sorted keys, no paths) is hashed and stamped into every artifact.
struct ExperimentConfig {
    double fs_hz = 25000.0;
    std::uint64_t seed = 1;
    sim::EnvironmentModel environment;
    sim::SensorArray array;
    double source_depth_m = 3.0;
    sim::SourceSpec source;
    sim::SourceSpec generalization_source;
    TransitsConfig transits;
    features::FramingConfig framing;  // fs filled from fs_hz
    WindowsConfig windows;
    TrainSection train;
    EvalSection eval;

    void validate() const;
    features::FeatureWindows feature_windows() const;
    features::FramingConfig framing_config() const;
    std::string canonical_json() const;
    std::string hash() const;  // fnv1a64 hex of canonical_json()
};

ExperimentConfig default_config();
ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace swloc
