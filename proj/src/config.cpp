#include "swloc/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swloc/error.hpp"
#include "swloc/hash.hpp"

namespace swloc {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (!(fs_hz > 0.0)) throw ConfigError("fs_hz must be > 0");
    environment.validate();
    array.validate();
    if (!(source_depth_m > 0.0 && source_depth_m < environment.water_depth_m))
        throw ConfigError("source_depth_m must be inside the water column");
    source.validate(fs_hz);
    generalization_source.validate(fs_hz);
    if (transits.train.empty()) throw ConfigError("no train transits configured");
    if (transits.test.empty()) throw ConfigError("no test transits configured");
    if (!(transits.snr_db_min <= transits.snr_db_max)) throw ConfigError("snr range inverted");
    framing_config().validate();
    if (!(eval.range_max_m > 0.0)) throw ConfigError("eval.range_max_m must be > 0");
    if (eval.range_bins < 1 || eval.bearing_bins < 1) throw ConfigError("eval bins must be >= 1");
    if (train.val_transits < 1 || train.val_transits >= static_cast<int>(transits.train.size()))
        throw ConfigError("val_transits must leave at least one training transit");
}

features::FramingConfig ExperimentConfig::framing_config() const {
    features::FramingConfig f = framing;
    f.fs_hz = fs_hz;
    return f;
}

features::FeatureWindows ExperimentConfig::feature_windows() const {
    features::FeatureWindows w;
    w.lifter_qmin_s = windows.lifter_qmin_s;
    w.lifter_qmax_s = windows.lifter_qmax_s;
    w.gcc_subsample_factor = windows.gcc_subsample_factor;
    w.weighting = windows.weighting;
    w.gcc_max_lag_s = features::derive_gcc_max_lag(array.spacing_m, environment.sound_speed_mps,
                                                   windows.gcc_margin, fs_hz,
                                                   windows.gcc_subsample_factor);
    return w;
}

namespace {

json transit_list_to_json(const std::vector<TransitSpec>& v) {
    json arr = json::array();
    for (const auto& t : v)
        arr.push_back({{"heading_deg", t.heading_deg},
                       {"cpa_offset_m", t.cpa_offset_m},
                       {"speed_mps", t.speed_mps}});
    return arr;
}

std::vector<TransitSpec> transit_list_from_json(const json& arr) {
    std::vector<TransitSpec> v;
    for (const auto& t : arr)
        v.push_back({t.at("heading_deg").get<double>(), t.at("cpa_offset_m").get<double>(),
                     t.at("speed_mps").get<double>()});
    return v;
}

json source_to_json(const sim::SourceSpec& s) {
    json tonals = json::array();
    for (const auto& t : s.tonals)
        tonals.push_back({{"freq_hz", t.freq_hz}, {"level_db", t.level_db}});
    return {{"band_lo_hz", s.band_lo_hz},
            {"band_hi_hz", s.band_hi_hz},
            {"slope_db_per_octave", s.slope_db_per_octave},
            {"source_level_db", s.source_level_db},
            {"tonals", tonals}};
}

sim::SourceSpec source_from_json(const json& j) {
    sim::SourceSpec s;
    s.band_lo_hz = j.at("band_lo_hz").get<double>();
    s.band_hi_hz = j.at("band_hi_hz").get<double>();
    s.slope_db_per_octave = j.value("slope_db_per_octave", 0.0);
    s.source_level_db = j.value("source_level_db", 0.0);
    if (j.contains("tonals"))
        for (const auto& t : j["tonals"])
            s.tonals.push_back({t.at("freq_hz").get<double>(), t.at("level_db").get<double>()});
    return s;
}

json config_to_json_obj(const ExperimentConfig& c) {
    json j;
    j["fs_hz"] = c.fs_hz;
    j["seed"] = c.seed;
    j["environment"] = {{"water_depth_m", c.environment.water_depth_m},
                        {"sound_speed_mps", c.environment.sound_speed_mps},
                        {"surface_reflection", c.environment.surface_reflection},
                        {"bottom_reflection", c.environment.bottom_reflection},
                        {"max_image_order", c.environment.max_image_order}};
    j["array"] = {{"sensor_count", c.array.sensor_count},
                  {"spacing_m", c.array.spacing_m},
                  {"height_above_floor_m", c.array.height_above_floor_m}};
    j["source_depth_m"] = c.source_depth_m;
    j["source"] = source_to_json(c.source);
    j["generalization_source"] = source_to_json(c.generalization_source);
    j["transits"] = {{"label_interval_s", c.transits.label_interval_s},
                     {"leg_m", c.transits.leg_m},
                     {"snr_db_min", c.transits.snr_db_min},
                     {"snr_db_max", c.transits.snr_db_max},
                     {"train", transit_list_to_json(c.transits.train)},
                     {"test", transit_list_to_json(c.transits.test)},
                     {"generalization", transit_list_to_json(c.transits.generalization)}};
    j["framing"] = {{"frame_length", c.framing.frame_length}, {"hop", c.framing.hop}};
    j["windows"] = {{"lifter_qmin_s", c.windows.lifter_qmin_s},
                    {"lifter_qmax_s", c.windows.lifter_qmax_s},
                    {"gcc_margin", c.windows.gcc_margin},
                    {"gcc_subsample_factor", c.windows.gcc_subsample_factor},
                    {"weighting", features::to_string(c.windows.weighting)}};
    j["train"] = {{"variant", c.train.variant},
                  {"batch_size", c.train.core.batch_size},
                  {"learning_rate", c.train.core.learning_rate},
                  {"momentum", c.train.core.momentum},
                  {"weight_decay", c.train.core.weight_decay},
                  {"max_epochs", c.train.core.max_epochs},
                  {"patience", c.train.core.patience},
                  {"min_delta", c.train.core.min_delta},
                  {"alpha", c.train.core.loss.alpha},
                  {"conv_filters", c.train.hyper.conv_filters},
                  {"kernel_length", c.train.hyper.kernel_length},
                  {"dense_units", c.train.hyper.dense_units},
                  {"batchnorm_conv", c.train.hyper.batchnorm_conv},
                  {"batchnorm_dense", c.train.hyper.batchnorm_dense},
                  {"dropout_rate", c.train.hyper.dropout_rate},
                  {"train_frames", c.train.train_frames},
                  {"val_transits", c.train.val_transits},
                  {"val_max_fraction", c.train.val_max_fraction},
                  {"stratify_bins", c.train.stratify_bins}};
    j["eval"] = {{"range_max_m", c.eval.range_max_m},
                 {"range_bins", c.eval.range_bins},
                 {"bearing_bins", c.eval.bearing_bins},
                 {"baseline_max_range_m", c.eval.baseline_max_range_m}};
    return j;
}

ExperimentConfig config_from_json_obj(const json& j) {
    ExperimentConfig c = default_config();
    c.fs_hz = j.value("fs_hz", c.fs_hz);
    c.seed = j.value("seed", c.seed);
    if (j.contains("environment")) {
        const auto& e = j["environment"];
        c.environment.water_depth_m = e.value("water_depth_m", c.environment.water_depth_m);
        c.environment.sound_speed_mps = e.value("sound_speed_mps", c.environment.sound_speed_mps);
        c.environment.surface_reflection =
            e.value("surface_reflection", c.environment.surface_reflection);
        c.environment.bottom_reflection =
            e.value("bottom_reflection", c.environment.bottom_reflection);
        c.environment.max_image_order = e.value("max_image_order", c.environment.max_image_order);
    }
    if (j.contains("array")) {
        const auto& a = j["array"];
        c.array.sensor_count = a.value("sensor_count", c.array.sensor_count);
        c.array.spacing_m = a.value("spacing_m", c.array.spacing_m);
        c.array.height_above_floor_m =
            a.value("height_above_floor_m", c.array.height_above_floor_m);
    }
    c.source_depth_m = j.value("source_depth_m", c.source_depth_m);
    if (j.contains("source")) c.source = source_from_json(j["source"]);
    if (j.contains("generalization_source"))
        c.generalization_source = source_from_json(j["generalization_source"]);
    if (j.contains("transits")) {
        const auto& t = j["transits"];
        c.transits.label_interval_s = t.value("label_interval_s", c.transits.label_interval_s);
        c.transits.leg_m = t.value("leg_m", c.transits.leg_m);
        c.transits.snr_db_min = t.value("snr_db_min", c.transits.snr_db_min);
        c.transits.snr_db_max = t.value("snr_db_max", c.transits.snr_db_max);
        if (t.contains("train")) c.transits.train = transit_list_from_json(t["train"]);
        if (t.contains("test")) c.transits.test = transit_list_from_json(t["test"]);
        if (t.contains("generalization"))
            c.transits.generalization = transit_list_from_json(t["generalization"]);
    }
    if (j.contains("framing")) {
        c.framing.frame_length = j["framing"].value("frame_length", c.framing.frame_length);
        c.framing.hop = j["framing"].value("hop", c.framing.hop);
    }
    if (j.contains("windows")) {
        const auto& w = j["windows"];
        c.windows.lifter_qmin_s = w.value("lifter_qmin_s", c.windows.lifter_qmin_s);
        c.windows.lifter_qmax_s = w.value("lifter_qmax_s", c.windows.lifter_qmax_s);
        c.windows.gcc_margin = w.value("gcc_margin", c.windows.gcc_margin);
        c.windows.gcc_subsample_factor =
            w.value("gcc_subsample_factor", c.windows.gcc_subsample_factor);
        if (w.contains("weighting"))
            c.windows.weighting =
                features::gcc_weighting_from_string(w["weighting"].get<std::string>());
    }
    if (j.contains("train")) {
        const auto& t = j["train"];
        c.train.variant = t.value("variant", c.train.variant);
        c.train.core.batch_size = t.value("batch_size", c.train.core.batch_size);
        c.train.core.learning_rate = t.value("learning_rate", c.train.core.learning_rate);
        c.train.core.momentum = t.value("momentum", c.train.core.momentum);
        c.train.core.weight_decay = t.value("weight_decay", c.train.core.weight_decay);
        c.train.core.max_epochs = t.value("max_epochs", c.train.core.max_epochs);
        c.train.core.patience = t.value("patience", c.train.core.patience);
        c.train.core.min_delta = t.value("min_delta", c.train.core.min_delta);
        c.train.core.loss.alpha = t.value("alpha", c.train.core.loss.alpha);
        c.train.hyper.conv_filters = t.value("conv_filters", c.train.hyper.conv_filters);
        c.train.hyper.kernel_length = t.value("kernel_length", c.train.hyper.kernel_length);
        c.train.hyper.dense_units = t.value("dense_units", c.train.hyper.dense_units);
        c.train.hyper.batchnorm_conv = t.value("batchnorm_conv", c.train.hyper.batchnorm_conv);
        c.train.hyper.batchnorm_dense = t.value("batchnorm_dense", c.train.hyper.batchnorm_dense);
        c.train.hyper.dropout_rate = t.value("dropout_rate", c.train.hyper.dropout_rate);
        c.train.train_frames = t.value("train_frames", c.train.train_frames);
        c.train.val_transits = t.value("val_transits", c.train.val_transits);
        c.train.val_max_fraction = t.value("val_max_fraction", c.train.val_max_fraction);
        c.train.stratify_bins = t.value("stratify_bins", c.train.stratify_bins);
    }
    if (j.contains("eval")) {
        const auto& e = j["eval"];
        c.eval.range_max_m = e.value("range_max_m", c.eval.range_max_m);
        c.eval.range_bins = e.value("range_bins", c.eval.range_bins);
        c.eval.bearing_bins = e.value("bearing_bins", c.eval.bearing_bins);
        c.eval.baseline_max_range_m = e.value("baseline_max_range_m", c.eval.baseline_max_range_m);
    }
    c.train.core.loss.range_scale_m = c.eval.range_max_m;
    return c;
}

}  // namespace

std::string ExperimentConfig::canonical_json() const {
    return config_to_json_obj(*this).dump();
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(canonical_json())); }

std::string config_to_json(const ExperimentConfig& cfg) {
    return config_to_json_obj(cfg).dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON");
    ExperimentConfig c = config_from_json_obj(j);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return config_from_json(ss.str());
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.fs_hz = 25000.0;
    c.seed = 20260810;
    c.source = {50.0, 12000.0, -3.0, 0.0, {}};
    c.generalization_source = {100.0, 9500.0, -6.0, -2.0,
                               {{315.0, -6.0}, {472.0, -8.0}, {630.0, -9.0}}};
    c.transits.train = {{12.0, 60.0, 5.2}, {33.0, 95.0, 5.8}, {55.0, 45.0, 5.5},
                        {78.0, 110.0, 5.0}, {101.0, 70.0, 6.0}, {124.0, 55.0, 5.4},
                        {146.0, 85.0, 5.6}, {168.0, 40.0, 5.3}};
    c.transits.test = {{15.0, 65.0, 5.5}, {80.0, 90.0, 5.4}};
    c.transits.generalization = {{25.0, 75.0, 5.7}, {98.0, 50.0, 5.2}};
    c.framing.frame_length = 2048;
    c.framing.hop = 1024;
    c.train.core.loss.range_scale_m = c.eval.range_max_m;
    return c;
}

}  // namespace swloc
