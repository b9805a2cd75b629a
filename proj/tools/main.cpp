// swloc command-line front end. Drives everything through the C API in
// swloc.h; no C++ core headers are used here.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "swloc.h"

namespace {

const char* status_name(swloc_status s) {
    switch (s) {
        case SWLOC_OK: return "ok";
        case SWLOC_ERR_INVALID_ARG: return "invalid_arg";
        case SWLOC_ERR_CONFIG: return "config";
        case SWLOC_ERR_DOMAIN: return "domain";
        case SWLOC_ERR_DEGENERATE_INPUT: return "degenerate_input";
        case SWLOC_ERR_SHAPE: return "shape";
        case SWLOC_ERR_STATE: return "state";
        case SWLOC_ERR_TRAINING: return "training";
        case SWLOC_ERR_IO: return "io";
        case SWLOC_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    return out;
}

// Machine-readable error on stderr, nonzero exit.
int finish(swloc_status s) {
    if (s == SWLOC_OK) return 0;
    std::fprintf(stderr, "{\"error\":{\"code\":%d,\"name\":\"%s\",\"message\":\"%s\"}}\n",
                 static_cast<int>(s), status_name(s), json_escape(swloc_last_error()).c_str());
    return static_cast<int>(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swloc — shallow-water passive acoustic source localization toolkit"};
    app.set_version_flag("--version", swloc_version());
    app.require_subcommand(1);

    std::string config, out, dataset, featdir, ckptdir, variant, methods, fixes;
    std::uint64_t seed = 0;
    bool have_seed = false, force = false;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Master seed override")
            ->each([&](const std::string&) { have_seed = true; });
    };

    auto* sim = app.add_subcommand("simulate", "Generate labeled transit recordings (.lwr)");
    sim->add_option("--config", config, "Experiment config JSON")->required();
    sim->add_option("--out", out, "Output dataset directory")->required();
    add_seed(sim);

    auto* feat = app.add_subcommand("features", "Extract cepstral/GCC feature maps (.fmap)");
    feat->add_option("--config", config, "Experiment config JSON")->required();
    feat->add_option("--dataset", dataset, "Dataset directory with .lwr files")->required();
    feat->add_option("--out", out, "Output features directory")->required();
    add_seed(feat);

    auto* train = app.add_subcommand("train", "Train a localization network");
    train->add_option("--config", config, "Experiment config JSON")->required();
    train->add_option("--features", featdir, "Features directory")->required();
    train->add_option("--out", out, "Output run directory")->required();
    train->add_option("--variant", variant,
                      "combined | gcc_only | cepstral_only (default from config)");
    add_seed(train);

    auto* eval = app.add_subcommand("eval", "Evaluate methods over test/generalization sets");
    eval->add_option("--config", config, "Experiment config JSON")->required();
    eval->add_option("--features", featdir, "Features directory")->required();
    eval->add_option("--dataset", dataset, "Dataset directory (baseline reads .lwr)")->required();
    eval->add_option("--checkpoints", ckptdir, "Directory with trained .ckpt files")->required();
    eval->add_option("--out", out, "Output report directory")->required();
    eval->add_option("--methods", methods,
                     "Comma-separated methods (default: baseline + all checkpoints)");
    eval->add_flag("--force", force, "Accept inputs with mismatching config hashes");
    add_seed(eval);

    auto* track = app.add_subcommand("track-plot", "Emit plot data from a fixes CSV");
    track->add_option("--fixes", fixes, "Per-frame fixes CSV from eval")->required();
    track->add_option("--out", out, "Output directory for track CSVs")->required();

    CLI11_PARSE(app, argc, argv);

    const std::uint64_t* seed_ptr = have_seed ? &seed : nullptr;
    if (sim->parsed())
        return finish(swloc_run_simulate(config.c_str(), out.c_str(), seed_ptr));
    if (feat->parsed())
        return finish(
            swloc_run_features(config.c_str(), dataset.c_str(), out.c_str(), seed_ptr));
    if (train->parsed())
        return finish(swloc_run_train(config.c_str(), featdir.c_str(), out.c_str(),
                                      variant.empty() ? nullptr : variant.c_str(), seed_ptr));
    if (eval->parsed())
        return finish(swloc_run_eval(config.c_str(), featdir.c_str(), dataset.c_str(),
                                     ckptdir.c_str(), out.c_str(), force ? 1 : 0,
                                     methods.empty() ? nullptr : methods.c_str(), seed_ptr));
    if (track->parsed())
        return finish(swloc_run_track_plot(fixes.c_str(), out.c_str()));
    return 1;
}
