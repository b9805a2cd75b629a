#pragma once

#include <string>
#include <vector>

namespace swloc::io {

// All CSVs start with "# schema: <name>.v<version> config=<hash>" followed by
// a header row. Readers reject unknown schema names/versions.

struct FixRow {
    double timestamp_s = 0.0;
    std::string method;
    double range_m = 0.0;
    double bearing_rad = 0.0;
    bool valid = false;
    double true_range_m = 0.0;
    double true_bearing_rad = 0.0;
};

void write_fixes_csv(const std::string& path, const std::string& config_hash,
                     const std::vector<FixRow>& rows);

struct FixesFile {
    std::string config_hash;
    std::vector<FixRow> rows;
};

FixesFile read_fixes_csv(const std::string& path);

struct HistoryCsvRow {
    int epoch;
    double train_e;
    double val_e;
    double lr;
    bool best;
};

void write_history_csv(const std::string& path, const std::string& config_hash,
                       const std::vector<HistoryCsvRow>& rows);

struct BinRow {
    std::string method;
    std::string dataset;   // test | generalization
    double bin_lo = 0.0;
    double bin_hi = 0.0;
    long n_total = 0;
    long n_valid = 0;
    double median_err = 0.0;  // nan when the bin holds no valid fixes
    double p25 = 0.0;
    double p75 = 0.0;
    double p90 = 0.0;
};

void write_bin_csv(const std::string& path, const std::string& schema,
                   const std::string& config_hash, const std::string& bin_unit,
                   const std::vector<BinRow>& rows);

struct SummaryRow {
    std::string method;
    std::string dataset;
    long n_total = 0;
    long n_valid = 0;
    double invalid_fraction = 0.0;
    double median_abs_range_err_m = 0.0;
    double median_abs_bearing_err_rad = 0.0;
};

void write_summary_csv(const std::string& path, const std::string& config_hash,
                       const std::vector<SummaryRow>& rows);

struct SummaryFile {
    std::string config_hash;
    std::vector<SummaryRow> rows;
};

SummaryFile read_summary_csv(const std::string& path);

struct TrackRow {
    double timestamp_s = 0.0;
    std::string method;
    double est = 0.0;
    double truth = 0.0;
    bool valid = false;
};

void write_track_csv(const std::string& path, const std::string& schema,
                     const std::string& config_hash, const std::string& quantity,
                     const std::vector<TrackRow>& rows);

}  // namespace swloc::io
