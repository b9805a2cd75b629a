#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swloc/config.hpp"

namespace swloc::pipeline {

// Dataset generation: one .lwr per configured transit, named
// <role>_<index>.lwr, written to out_dir. Returns the filenames.
std::vector<std::string> run_simulate(const ExperimentConfig& cfg, const std::string& out_dir);

// Feature extraction: one .fmap per recording plus manifest.json holding the
// range-stratified training subset and the whole-transit validation split.
std::vector<std::string> run_features(const ExperimentConfig& cfg, const std::string& dataset_dir,
                                      const std::string& out_dir);

struct TrainOutput {
    std::string checkpoint_path;
    std::string history_path;
    int best_epoch = -1;
    double best_val_e = 0.0;
};

// Trains one variant from the manifest; writes <variant>.ckpt and
// <variant>_history.csv. On divergence the partial history is saved before
// the error propagates.
TrainOutput run_train(const ExperimentConfig& cfg, const std::string& features_dir,
                      const std::string& out_dir, const std::string& variant);

// Evaluates the requested methods (default: baseline + every .ckpt variant
// present) over the test and generalization feature sets. Emits
// fixes_test.csv, fixes_generalization.csv, range_bins.csv, bearing_bins.csv
// and summary.csv. Refuses inputs whose config hash differs unless force.
void run_eval(const ExperimentConfig& cfg, const std::string& features_dir,
              const std::string& dataset_dir, const std::string& checkpoint_dir,
              const std::string& out_dir, bool force = false,
              const std::vector<std::string>& methods = {});

// Pivots a per-frame fixes CSV into plot-ready range-vs-time and
// bearing-vs-time tables (truth columns included).
void run_track_plot(const std::string& fixes_csv, const std::string& out_dir);

}  // namespace swloc::pipeline
