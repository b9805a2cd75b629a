#include "swloc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "swloc/error.hpp"

namespace swloc::io {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_schema_line(std::ofstream& f, const std::string& schema,
                       const std::string& config_hash) {
    f << "# schema: " << schema << " config=" << config_hash << '\n';
}

// Returns the config hash after validating the schema tag.
std::string check_schema_line(const std::string& line, const std::string& want,
                              const std::string& path) {
    std::istringstream ss(line);
    std::string hash_tag, schema, tag;
    ss >> tag;  // '#'
    std::string schema_word;
    ss >> schema_word >> schema >> hash_tag;
    if (tag != "#" || schema_word != "schema:" || schema != want)
        throw IoError("unsupported csv schema in " + path + " (want " + want + ")");
    const std::string prefix = "config=";
    if (hash_tag.rfind(prefix, 0) == 0) return hash_tag.substr(prefix.size());
    return "";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_fixes_csv(const std::string& path, const std::string& config_hash,
                     const std::vector<FixRow>& rows) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_schema_line(f, "swloc.fixes.v1", config_hash);
    f << "timestamp_s,method,range_m,bearing_rad,valid,true_range_m,true_bearing_rad\n";
    for (const auto& r : rows) {
        f << fmt(r.timestamp_s) << ',' << r.method << ',' << fmt(r.range_m) << ','
          << fmt(r.bearing_rad) << ',' << (r.valid ? 1 : 0) << ',' << fmt(r.true_range_m) << ','
          << fmt(r.true_bearing_rad) << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
}

FixesFile read_fixes_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty csv: " + path);
    FixesFile out;
    out.config_hash = check_schema_line(line, "swloc.fixes.v1", path);
    if (!std::getline(f, line)) throw IoError("missing header row: " + path);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto cols = split_csv(line);
        if (cols.size() != 7) throw IoError("malformed fixes row in " + path);
        FixRow r;
        r.timestamp_s = std::stod(cols[0]);
        r.method = cols[1];
        r.range_m = std::stod(cols[2]);
        r.bearing_rad = std::stod(cols[3]);
        r.valid = cols[4] == "1";
        r.true_range_m = std::stod(cols[5]);
        r.true_bearing_rad = std::stod(cols[6]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

void write_history_csv(const std::string& path, const std::string& config_hash,
                       const std::vector<HistoryCsvRow>& rows) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_schema_line(f, "swloc.history.v1", config_hash);
    f << "epoch,train_e,val_e,lr,best\n";
    for (const auto& r : rows)
        f << r.epoch << ',' << fmt(r.train_e) << ',' << fmt(r.val_e) << ',' << fmt(r.lr) << ','
          << (r.best ? 1 : 0) << '\n';
    if (!f) throw IoError("write failed: " + path);
}

void write_bin_csv(const std::string& path, const std::string& schema,
                   const std::string& config_hash, const std::string& bin_unit,
                   const std::vector<BinRow>& rows) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_schema_line(f, schema, config_hash);
    f << "method,dataset,bin_lo_" << bin_unit << ",bin_hi_" << bin_unit
      << ",n_total,n_valid,median_abs_err,p25_abs_err,p75_abs_err,p90_abs_err\n";
    for (const auto& r : rows)
        f << r.method << ',' << r.dataset << ',' << fmt(r.bin_lo) << ',' << fmt(r.bin_hi) << ','
          << r.n_total << ',' << r.n_valid << ',' << fmt(r.median_err) << ',' << fmt(r.p25) << ','
          << fmt(r.p75) << ',' << fmt(r.p90) << '\n';
    if (!f) throw IoError("write failed: " + path);
}

void write_summary_csv(const std::string& path, const std::string& config_hash,
                       const std::vector<SummaryRow>& rows) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_schema_line(f, "swloc.summary.v1", config_hash);
    f << "method,dataset,n_total,n_valid,invalid_fraction,median_abs_range_err_m,"
         "median_abs_bearing_err_rad\n";
    for (const auto& r : rows)
        f << r.method << ',' << r.dataset << ',' << r.n_total << ',' << r.n_valid << ','
          << fmt(r.invalid_fraction) << ',' << fmt(r.median_abs_range_err_m) << ','
          << fmt(r.median_abs_bearing_err_rad) << '\n';
    if (!f) throw IoError("write failed: " + path);
}

SummaryFile read_summary_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty csv: " + path);
    SummaryFile out;
    out.config_hash = check_schema_line(line, "swloc.summary.v1", path);
    if (!std::getline(f, line)) throw IoError("missing header row: " + path);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto cols = split_csv(line);
        if (cols.size() != 7) throw IoError("malformed summary row in " + path);
        SummaryRow r;
        r.method = cols[0];
        r.dataset = cols[1];
        r.n_total = std::stol(cols[2]);
        r.n_valid = std::stol(cols[3]);
        r.invalid_fraction = std::stod(cols[4]);
        r.median_abs_range_err_m = std::stod(cols[5]);
        r.median_abs_bearing_err_rad = std::stod(cols[6]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

void write_track_csv(const std::string& path, const std::string& schema,
                     const std::string& config_hash, const std::string& quantity,
                     const std::vector<TrackRow>& rows) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_schema_line(f, schema, config_hash);
    f << "timestamp_s,method," << quantity << ",true_" << quantity << ",valid\n";
    for (const auto& r : rows)
        f << fmt(r.timestamp_s) << ',' << r.method << ',' << fmt(r.est) << ',' << fmt(r.truth)
          << ',' << (r.valid ? 1 : 0) << '\n';
    if (!f) throw IoError("write failed: " + path);
}

}  // namespace swloc::io
