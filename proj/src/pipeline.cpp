#include "swloc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "swloc/baseline.hpp"
#include "swloc/checkpoint.hpp"
#include "swloc/csv.hpp"
#include "swloc/error.hpp"
#include "swloc/fmap_io.hpp"
#include "swloc/recording_io.hpp"
#include "swloc/rng.hpp"
#include "swloc/stats.hpp"
#include "swloc/util.hpp"

namespace swloc::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

struct TransitJob {
    std::string role;
    int index = 0;
    TransitSpec spec;
    const sim::SourceSpec* source = nullptr;
};

std::vector<TransitJob> transit_jobs(const ExperimentConfig& cfg) {
    std::vector<TransitJob> jobs;
    for (std::size_t i = 0; i < cfg.transits.train.size(); ++i)
        jobs.push_back({"train", static_cast<int>(i), cfg.transits.train[i], &cfg.source});
    for (std::size_t i = 0; i < cfg.transits.test.size(); ++i)
        jobs.push_back({"test", static_cast<int>(i), cfg.transits.test[i], &cfg.source});
    for (std::size_t i = 0; i < cfg.transits.generalization.size(); ++i)
        jobs.push_back({"generalization", static_cast<int>(i), cfg.transits.generalization[i],
                        &cfg.generalization_source});
    return jobs;
}

std::string transit_filename(const std::string& role, int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03d", index);
    return role + "_" + buf + ".lwr";
}

}  // namespace

std::vector<std::string> run_simulate(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    util::ensure_dir(out_dir);
    const std::string hash = cfg.hash();
    const std::string canonical = cfg.canonical_json();
    const auto jobs = transit_jobs(cfg);

    std::vector<std::string> files(jobs.size());
    util::parallel_for(jobs.size(), util::worker_count(), [&](std::size_t i) {
        const TransitJob& job = jobs[i];
        const std::uint64_t tseed = derive_seed(cfg.seed, "transit-" + job.role,
                                                static_cast<std::uint64_t>(job.index));
        Rng snr_rng(derive_seed(tseed, "snr"));
        const double snr = snr_rng.uniform(cfg.transits.snr_db_min, cfg.transits.snr_db_max);
        sim::TransitPlan plan =
            sim::straight_transit(job.spec.heading_deg, job.spec.cpa_offset_m, job.spec.speed_mps,
                                  cfg.transits.leg_m, cfg.source_depth_m,
                                  cfg.transits.label_interval_s);
        sim::LabeledRecording rec =
            sim::simulate_transit(plan, *job.source, cfg.environment, cfg.array, cfg.fs_hz, snr,
                                  tseed, cfg.transits.label_interval_s);
        rec.role = job.role;
        rec.transit_index = job.index;
        rec.config_hash = hash;
        rec.config_json = canonical;
        const std::string name = transit_filename(job.role, job.index);
        io::write_lwr(rec, join(out_dir, name));
        files[i] = name;
    });
    return files;
}

namespace {

struct FrameRef {
    std::string file;
    std::int64_t index;
    double range_m;
};

void write_manifest(const std::string& path, const std::string& hash,
                    const std::vector<FrameRef>& train, const std::vector<FrameRef>& val,
                    const std::vector<std::string>& val_files) {
    json j;
    j["format"] = "swloc-manifest";
    j["version"] = 1;
    j["config_hash"] = hash;
    j["val_transits"] = val_files;
    auto dump_refs = [](const std::vector<FrameRef>& refs) {
        json arr = json::array();
        for (const auto& r : refs) arr.push_back({r.file, r.index});
        return arr;
    };
    j["train"] = dump_refs(train);
    j["val"] = dump_refs(val);
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << j.dump() << '\n';
}

struct Manifest {
    std::string config_hash;
    std::vector<std::pair<std::string, std::int64_t>> train;
    std::vector<std::pair<std::string, std::int64_t>> val;
};

Manifest read_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open manifest: " + path);
    json j;
    f >> j;
    if (j.value("format", "") != "swloc-manifest" || j.value("version", 0) != 1)
        throw IoError("not a swloc manifest: " + path);
    Manifest m;
    m.config_hash = j.value("config_hash", "");
    for (const auto& r : j.at("train"))
        m.train.emplace_back(r.at(0).get<std::string>(), r.at(1).get<std::int64_t>());
    for (const auto& r : j.at("val"))
        m.val.emplace_back(r.at(0).get<std::string>(), r.at(1).get<std::int64_t>());
    return m;
}

}  // namespace

std::vector<std::string> run_features(const ExperimentConfig& cfg, const std::string& dataset_dir,
                                      const std::string& out_dir) {
    cfg.validate();
    util::ensure_dir(out_dir);
    const std::string hash = cfg.hash();
    const auto lwr_files = util::list_files(dataset_dir, ".lwr");
    if (lwr_files.empty()) throw IoError("no .lwr recordings in " + dataset_dir);

    const features::FramingConfig framing = cfg.framing_config();
    const features::FeatureWindows windows = cfg.feature_windows();
    const features::FeatureShapes shapes = features::derive_shapes(framing, windows);

    std::vector<std::string> out_files(lwr_files.size());
    util::parallel_for(lwr_files.size(), util::worker_count(), [&](std::size_t i) {
        sim::LabeledRecording rec = io::read_lwr(join(dataset_dir, lwr_files[i]));
        if (!rec.config_hash.empty() && rec.config_hash != hash)
            throw ConfigError("recording " + lwr_files[i] + " was generated with config " +
                              rec.config_hash + ", current config is " + hash);
        auto maps = features::feature_maps(rec, framing, windows, cfg.eval.range_max_m);
        io::FmapHeader h;
        h.fs_hz = cfg.fs_hz;
        h.shapes = shapes;
        h.windows = windows;
        h.frame_length = framing.frame_length;
        h.hop = framing.hop;
        h.source_recording = lwr_files[i];
        h.role = rec.role;
        h.transit_index = rec.transit_index;
        h.config_hash = hash;
        const std::string name = fs::path(lwr_files[i]).stem().string() + ".fmap";
        io::write_fmap(h, maps, join(out_dir, name));
        out_files[i] = name;
    });

    // Training manifest: hold out whole transits for validation, then sample
    // the remaining train frames so ranges are uniformly distributed.
    std::vector<std::string> train_fmaps;
    for (const auto& name : out_files) {
        if (name.rfind("train_", 0) == 0) train_fmaps.push_back(name);
    }
    std::sort(train_fmaps.begin(), train_fmaps.end());
    if (static_cast<int>(train_fmaps.size()) <= cfg.train.val_transits)
        throw ConfigError("not enough train transits to hold one out for validation");
    std::vector<std::string> val_files(train_fmaps.end() - cfg.train.val_transits,
                                       train_fmaps.end());
    train_fmaps.resize(train_fmaps.size() - static_cast<std::size_t>(cfg.train.val_transits));

    const int bins = cfg.train.stratify_bins;
    std::vector<std::vector<FrameRef>> by_bin(static_cast<std::size_t>(bins));
    std::size_t pool = 0;
    for (const auto& name : train_fmaps) {
        io::FmapFile ff = io::read_fmap(join(out_dir, name));
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(ff.maps.size()); ++k) {
            const double r = ff.maps[static_cast<std::size_t>(k)].range_m;
            int b = static_cast<int>(r / cfg.eval.range_max_m * bins);
            b = std::clamp(b, 0, bins - 1);
            by_bin[static_cast<std::size_t>(b)].push_back({name, k, r});
            ++pool;
        }
    }

    Rng pick_rng(derive_seed(cfg.seed, "stratify"));
    const std::size_t per_bin = static_cast<std::size_t>(cfg.train.train_frames) /
                                static_cast<std::size_t>(bins);
    std::vector<FrameRef> train_refs;
    for (auto& bucket : by_bin) {
        pick_rng.shuffle(bucket.begin(), bucket.end());
        const std::size_t take = std::min(per_bin, bucket.size());
        train_refs.insert(train_refs.end(), bucket.begin(), bucket.begin() + take);
    }

    std::vector<FrameRef> val_refs;
    for (const auto& name : val_files) {
        io::FmapFile ff = io::read_fmap(join(out_dir, name));
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(ff.maps.size()); ++k)
            val_refs.push_back({name, k, ff.maps[static_cast<std::size_t>(k)].range_m});
        pool += ff.maps.size();
    }
    const std::size_t val_cap = static_cast<std::size_t>(
        std::max(1.0, cfg.train.val_max_fraction * static_cast<double>(pool)));
    if (val_refs.size() > val_cap) {
        Rng val_rng(derive_seed(cfg.seed, "val-subsample"));
        val_rng.shuffle(val_refs.begin(), val_refs.end());
        val_refs.resize(val_cap);
    }

    write_manifest(join(out_dir, "manifest.json"), hash, train_refs, val_refs, val_files);
    out_files.push_back("manifest.json");
    return out_files;
}

namespace {

model::DataSet load_refs(const std::string& features_dir,
                         const std::vector<std::pair<std::string, std::int64_t>>& refs,
                         features::FeatureShapes* shapes_out) {
    model::DataSet ds;
    std::map<std::string, io::FmapFile> cache;
    for (const auto& [file, index] : refs) {
        auto it = cache.find(file);
        if (it == cache.end())
            it = cache.emplace(file, io::read_fmap(join(features_dir, file))).first;
        const io::FmapFile& ff = it->second;
        if (shapes_out) *shapes_out = ff.header.shapes;
        if (ds.cep_size == 0) {
            ds.cep_size = ff.header.shapes.cepstral_bins * ff.header.shapes.channels;
            ds.gcc_size = ff.header.shapes.gcc_bins * ff.header.shapes.pairs;
        }
        const auto& m = ff.maps.at(static_cast<std::size_t>(index));
        ds.cep.insert(ds.cep.end(), m.cepstral.begin(), m.cepstral.end());
        ds.gcc.insert(ds.gcc.end(), m.gcc.begin(), m.gcc.end());
        ds.range_m.push_back(m.range_m);
        ds.bearing_rad.push_back(m.bearing_rad);
    }
    return ds;
}

std::string method_tag(model::Variant v) {
    switch (v) {
        case model::Variant::combined: return "cnn_combined";
        case model::Variant::gcc_only: return "cnn_gcc";
        case model::Variant::cepstral_only: return "cnn_cepstral";
    }
    throw ConfigError("bad variant");
}

}  // namespace

TrainOutput run_train(const ExperimentConfig& cfg, const std::string& features_dir,
                      const std::string& out_dir, const std::string& variant_name) {
    cfg.validate();
    util::ensure_dir(out_dir);
    const std::string hash = cfg.hash();
    Manifest manifest = read_manifest(join(features_dir, "manifest.json"));
    if (!manifest.config_hash.empty() && manifest.config_hash != hash)
        throw ConfigError("features were built with config " + manifest.config_hash +
                          ", current config is " + hash);

    features::FeatureShapes shapes;
    model::DataSet train_set = load_refs(features_dir, manifest.train, &shapes);
    model::DataSet val_set = load_refs(features_dir, manifest.val, nullptr);

    const std::string vname = variant_name.empty() ? cfg.train.variant : variant_name;
    const model::Variant variant = model::variant_from_string(vname);

    model::NetShapes ns;
    ns.cep_len = shapes.cepstral_bins;
    ns.cep_height = shapes.channels;
    ns.gcc_len = shapes.gcc_bins;
    ns.gcc_height = shapes.pairs;

    model::TrainConfig tc = cfg.train.core;
    tc.loss.range_scale_m = cfg.eval.range_max_m;
    tc.seed = derive_seed(cfg.seed, "train-" + vname);

    model::LocalizationNet<float> net(variant, ns, cfg.train.hyper,
                                      derive_seed(cfg.seed, "net-" + vname));

    TrainOutput out;
    out.checkpoint_path = join(out_dir, vname + ".ckpt");
    out.history_path = join(out_dir, vname + "_history.csv");

    auto dump_history = [&](const std::vector<model::HistoryRow>& hist) {
        std::vector<io::HistoryCsvRow> rows;
        for (const auto& h : hist) rows.push_back({h.epoch, h.train_e, h.val_e, h.lr, h.best});
        io::write_history_csv(out.history_path, hash, rows);
    };

    model::TrainResult res;
    try {
        res = model::train(net, train_set, val_set, tc);
    } catch (const TrainingError&) {
        dump_history(res.history);  // partial history for post-mortem
        throw;
    }
    dump_history(res.history);

    io::CkptMeta meta;
    meta.loss = tc.loss;
    meta.config_hash = hash;
    json tj = {{"batch_size", tc.batch_size},   {"learning_rate", tc.learning_rate},
               {"momentum", tc.momentum},       {"weight_decay", tc.weight_decay},
               {"max_epochs", tc.max_epochs},   {"patience", tc.patience},
               {"min_delta", tc.min_delta},     {"alpha", tc.loss.alpha},
               {"seed", tc.seed},               {"best_epoch", res.best_epoch},
               {"best_val_e", res.best_val_e},  {"train_frames", train_set.size()},
               {"val_frames", val_set.size()}};
    meta.train_config_json = tj.dump();
    io::save_checkpoint(net, meta, out.checkpoint_path);
    out.best_epoch = res.best_epoch;
    out.best_val_e = res.best_val_e;
    return out;
}

namespace {

struct MethodEval {
    std::string tag;
    std::unique_ptr<model::LocalizationNet<float>> net;  // null for baseline
    double range_scale = 0.0;
};

struct ErrSample {
    double range_err = 0.0;
    double bearing_err = 0.0;
    double true_range = 0.0;
    double true_bearing = 0.0;
    bool valid = false;
};

void append_bin_rows(std::vector<io::BinRow>& out, const std::string& method,
                     const std::string& dataset, const std::vector<ErrSample>& samples,
                     bool bearing, int bins, double domain_hi) {
    for (int b = 0; b < bins; ++b) {
        const double lo = domain_hi * b / bins;
        const double hi = domain_hi * (b + 1) / bins;
        std::vector<double> errs;
        long n_total = 0;
        for (const auto& s : samples) {
            const double key = bearing ? s.true_bearing : s.true_range;
            const bool in_bin = (key >= lo && key < hi) || (b == bins - 1 && key == hi);
            if (!in_bin) continue;
            ++n_total;
            if (s.valid) errs.push_back(bearing ? s.bearing_err : s.range_err);
        }
        io::BinRow row;
        row.method = method;
        row.dataset = dataset;
        row.bin_lo = lo;
        row.bin_hi = hi;
        row.n_total = n_total;
        row.n_valid = static_cast<long>(errs.size());
        if (!errs.empty()) {
            row.median_err = stats::median(errs);
            row.p25 = stats::percentile(errs, 25.0);
            row.p75 = stats::percentile(errs, 75.0);
            row.p90 = stats::percentile(errs, 90.0);
        } else {
            row.median_err = row.p25 = row.p75 = row.p90 =
                std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(std::move(row));
    }
}

}  // namespace

void run_eval(const ExperimentConfig& cfg, const std::string& features_dir,
              const std::string& dataset_dir, const std::string& checkpoint_dir,
              const std::string& out_dir, bool force,
              const std::vector<std::string>& methods_in) {
    cfg.validate();
    util::ensure_dir(out_dir);
    const std::string hash = cfg.hash();

    // Resolve methods: explicit list, or baseline + every checkpoint present.
    std::vector<std::string> methods = methods_in;
    if (methods.empty()) {
        methods.push_back("baseline");
        for (const auto& name : util::list_files(checkpoint_dir, ".ckpt"))
            methods.push_back(method_tag(model::variant_from_string(
                fs::path(name).stem().string())));
    }

    std::vector<MethodEval> evals;
    for (const auto& m : methods) {
        MethodEval me;
        me.tag = m;
        if (m != "baseline") {
            std::string variant;
            if (m == "cnn_combined") variant = "combined";
            else if (m == "cnn_gcc") variant = "gcc_only";
            else if (m == "cnn_cepstral") variant = "cepstral_only";
            else throw ConfigError("unknown eval method: " + m);
            const std::string path = join(checkpoint_dir, variant + ".ckpt");
            if (!fs::exists(path))
                throw IoError("missing checkpoint for requested method " + m + ": " + path);
            io::CkptMeta meta;
            me.net = io::load_checkpoint<float>(path, &meta);
            me.range_scale = meta.loss.range_scale_m;
            if (!force && !meta.config_hash.empty() && meta.config_hash != hash)
                throw ConfigError("checkpoint " + path + " was trained with config " +
                                  meta.config_hash + ", current config is " + hash +
                                  " (use force to override)");
        }
        evals.push_back(std::move(me));
    }
    if (evals.empty()) throw ConfigError("no evaluation methods requested");

    const features::FramingConfig framing = cfg.framing_config();
    std::map<std::string, std::vector<io::FixRow>> fixes_by_dataset;
    std::map<std::pair<std::string, std::string>, std::vector<ErrSample>> samples;

    for (const auto& fmap_name : util::list_files(features_dir, ".fmap")) {
        io::FmapFile ff = io::read_fmap(join(features_dir, fmap_name));
        const std::string& role = ff.header.role;
        if (role != "test" && role != "generalization") continue;
        if (!force && !ff.header.config_hash.empty() && ff.header.config_hash != hash)
            throw ConfigError("feature file " + fmap_name + " was built with config " +
                              ff.header.config_hash + ", current config is " + hash +
                              " (use force to override)");

        // Baseline works on the raw recording; key its fixes by microsecond
        // timestamp to join with feature frames (same framing, same formula).
        std::unordered_map<long long, baseline::BaselineFix> base_fixes;
        for (const auto& me : evals) {
            if (me.tag != "baseline") continue;
            sim::LabeledRecording rec = io::read_lwr(join(dataset_dir, ff.header.source_recording));
            auto bf = baseline::baseline_localize(rec, framing, ff.header.windows.weighting,
                                                  cfg.array.spacing_m,
                                                  cfg.environment.sound_speed_mps,
                                                  cfg.eval.baseline_max_range_m);
            for (const auto& b : bf) base_fixes.emplace(std::llround(b.timestamp_s * 1e6), b);
        }

        for (auto& me : evals) {
            std::vector<io::FixRow>& rows = fixes_by_dataset[role];
            std::vector<ErrSample>& samp = samples[{me.tag, role}];
            if (me.tag == "baseline") {
                for (const auto& m : ff.maps) {
                    auto it = base_fixes.find(std::llround(m.timestamp_s * 1e6));
                    if (it == base_fixes.end()) continue;
                    const baseline::BaselineFix& b = it->second;
                    io::FixRow r;
                    r.timestamp_s = m.timestamp_s;
                    r.method = "baseline";
                    r.range_m = b.fix.range_m;
                    r.bearing_rad = b.fix.bearing_rad;
                    r.valid = b.fix.valid;
                    r.true_range_m = m.range_m;
                    r.true_bearing_rad = m.bearing_rad;
                    rows.push_back(r);
                    samp.push_back({std::abs(b.fix.range_m - m.range_m),
                                    std::abs(b.fix.bearing_rad - m.bearing_rad), m.range_m,
                                    m.bearing_rad, b.fix.valid});
                }
            } else {
                const int batch = 256;
                const auto& shapes = ff.header.shapes;
                model::NetShapes ns{shapes.cepstral_bins, shapes.channels, shapes.gcc_bins,
                                    shapes.pairs};
                const std::size_t n = ff.maps.size();
                for (std::size_t first = 0; first < n; first += batch) {
                    const std::size_t count = std::min<std::size_t>(batch, n - first);
                    nn::Tensor<float> cep(
                        {static_cast<int>(count), ns.cep_len, ns.cep_height, 1});
                    nn::Tensor<float> gcc(
                        {static_cast<int>(count), ns.gcc_len, ns.gcc_height, 1});
                    for (std::size_t i = 0; i < count; ++i) {
                        const auto& m = ff.maps[first + i];
                        std::copy(m.cepstral.begin(), m.cepstral.end(),
                                  cep.data() + static_cast<std::int64_t>(i) * ns.cep_len *
                                                   ns.cep_height);
                        std::copy(m.gcc.begin(), m.gcc.end(),
                                  gcc.data() + static_cast<std::int64_t>(i) * ns.gcc_len *
                                                   ns.gcc_height);
                    }
                    nn::Tensor<float> out = me.net->forward(cep, gcc, nn::Mode::infer);
                    for (std::size_t i = 0; i < count; ++i) {
                        const auto& m = ff.maps[first + i];
                        const double est_range =
                            static_cast<double>(out.v[2 * i]) * me.range_scale;
                        const double est_bearing =
                            model::fold_bearing(static_cast<double>(out.v[2 * i + 1]));
                        io::FixRow r;
                        r.timestamp_s = m.timestamp_s;
                        r.method = me.tag;
                        r.range_m = est_range;
                        r.bearing_rad = est_bearing;
                        r.valid = true;
                        r.true_range_m = m.range_m;
                        r.true_bearing_rad = m.bearing_rad;
                        rows.push_back(r);
                        samp.push_back({std::abs(est_range - m.range_m),
                                        std::abs(est_bearing - m.bearing_rad), m.range_m,
                                        m.bearing_rad, true});
                    }
                }
            }
        }
    }

    if (fixes_by_dataset.empty()) throw IoError("no test/generalization feature files found");

    for (auto& [role, rows] : fixes_by_dataset) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const io::FixRow& a, const io::FixRow& b) {
                             if (a.method != b.method) return a.method < b.method;
                             return a.timestamp_s < b.timestamp_s;
                         });
        io::write_fixes_csv(join(out_dir, "fixes_" + role + ".csv"), hash, rows);
    }

    constexpr double kPi = 3.14159265358979323846;
    std::vector<io::BinRow> range_rows, bearing_rows;
    std::vector<io::SummaryRow> summary_rows;
    for (const auto& me : evals) {
        for (const auto& role : {std::string("test"), std::string("generalization")}) {
            auto it = samples.find({me.tag, role});
            if (it == samples.end()) continue;
            const auto& samp = it->second;
            append_bin_rows(range_rows, me.tag, role, samp, false, cfg.eval.range_bins,
                            cfg.eval.range_max_m);
            append_bin_rows(bearing_rows, me.tag, role, samp, true, cfg.eval.bearing_bins, kPi);
            io::SummaryRow s;
            s.method = me.tag;
            s.dataset = role;
            s.n_total = static_cast<long>(samp.size());
            std::vector<double> re, be;
            for (const auto& e : samp) {
                if (!e.valid) continue;
                re.push_back(e.range_err);
                be.push_back(e.bearing_err);
            }
            s.n_valid = static_cast<long>(re.size());
            s.invalid_fraction =
                samp.empty() ? 0.0
                             : 1.0 - static_cast<double>(s.n_valid) / static_cast<double>(s.n_total);
            s.median_abs_range_err_m =
                re.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::median(re);
            s.median_abs_bearing_err_rad =
                be.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::median(be);
            summary_rows.push_back(std::move(s));
        }
    }
    io::write_bin_csv(join(out_dir, "range_bins.csv"), "swloc.range_bins.v1", hash, "m",
                      range_rows);
    io::write_bin_csv(join(out_dir, "bearing_bins.csv"), "swloc.bearing_bins.v1", hash, "rad",
                      bearing_rows);
    io::write_summary_csv(join(out_dir, "summary.csv"), hash, summary_rows);
}

void run_track_plot(const std::string& fixes_csv, const std::string& out_dir) {
    util::ensure_dir(out_dir);
    io::FixesFile fixes = io::read_fixes_csv(fixes_csv);
    std::vector<io::TrackRow> range_rows, bearing_rows;
    range_rows.reserve(fixes.rows.size());
    bearing_rows.reserve(fixes.rows.size());
    for (const auto& r : fixes.rows) {
        range_rows.push_back({r.timestamp_s, r.method, r.range_m, r.true_range_m, r.valid});
        bearing_rows.push_back({r.timestamp_s, r.method, r.bearing_rad, r.true_bearing_rad,
                                r.valid});
    }
    io::write_track_csv(join(out_dir, "track_range.csv"), "swloc.track_range.v1",
                        fixes.config_hash, "range_m", range_rows);
    io::write_track_csv(join(out_dir, "track_bearing.csv"), "swloc.track_bearing.v1",
                        fixes.config_hash, "bearing_rad", bearing_rows);
}

}  // namespace swloc::pipeline
