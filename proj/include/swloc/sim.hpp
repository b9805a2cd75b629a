#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace swloc::sim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;  // z is depth, positive down; surface at z = 0
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
double norm(const Vec3& v);

// Shallow-water waveguide: pressure-release-ish surface at z = 0, reflecting
// bottom at z = water_depth.
struct EnvironmentModel {
    double water_depth_m = 30.0;
    double sound_speed_mps = 1500.0;
    double surface_reflection = -1.0;
    double bottom_reflection = 0.7;
    int max_image_order = 2;  // max boundary bounces modeled

    void validate() const;
};

// Collinear array along the x axis, centered on the origin.
struct SensorArray {
    int sensor_count = 3;
    double spacing_m = 14.0;
    double height_above_floor_m = 1.0;

    void validate() const;
    std::vector<Vec3> positions(const EnvironmentModel& env) const;
    Vec3 center(const EnvironmentModel& env) const;
};

struct TonalLine {
    double freq_hz = 0.0;
    double level_db = 0.0;  // rms relative to the broadband component, dB
};

// Broadband vessel noise description: band-limited Gaussian noise with a
// spectral slope, plus optional tonal lines.
struct SourceSpec {
    double band_lo_hz = 50.0;
    double band_hi_hz = 10000.0;
    double slope_db_per_octave = -3.0;  // relative to the low band edge
    double source_level_db = 0.0;       // 20*log10(broadband rms)
    std::vector<TonalLine> tonals;

    void validate(double fs_hz) const;
};

// Time-indexed source track at a fixed shallow depth.
struct TransitPlan {
    std::vector<double> times_s;     // strictly increasing
    std::vector<Vec3> waypoints_m;   // same length as times_s
    double speed_mps = 0.0;
    double duration_s = 0.0;

    void validate() const;
    Vec3 position(double t) const;  // piecewise-linear interpolation, clamped ends
};

struct Arrival {
    double delay_s = 0.0;
    double amplitude = 0.0;  // signed gain, 1/r spreading times boundary coefficients
    int bounces = 0;
};

struct MultipathImpulse {
    std::vector<Arrival> arrivals;  // sorted by delay; arrival 0 is the direct path
};

struct Label {
    double t_s = 0.0;
    double range_m = 0.0;      // 3-D distance from the array center
    double bearing_rad = 0.0;  // angle off the +x array axis, in [0, pi]
};

struct LabeledRecording {
    double fs_hz = 0.0;
    std::vector<std::vector<float>> samples;  // [channel][sample]
    std::vector<Label> labels;
    std::string role;  // train | test | generalization
    int transit_index = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string config_json;  // canonical experiment config, embedded in files

    int channels() const { return static_cast<int>(samples.size()); }
    std::int64_t sample_count() const {
        return samples.empty() ? 0 : static_cast<std::int64_t>(samples[0].size());
    }
};

// Image-source construction for the two-boundary waveguide: direct path plus
// all image paths with at most env.max_image_order boundary bounces.
// Amplitude of each path is (product of boundary coefficients)/path_length,
// delay is path_length/sound_speed. Arrivals sorted by delay, direct first.
MultipathImpulse image_paths(const EnvironmentModel& env, const Vec3& source,
                             const Vec3& sensor);

// Range and bearing of a source position as seen from the array: range is the
// 3-D distance to the array center, bearing the angle between the +x array
// axis and the source direction, which is what a collinear array can observe
// (left-right and up-down ambiguous), hence bearing in [0, pi].
Label geometry_label(double t, const Vec3& source, const EnvironmentModel& env,
                     const SensorArray& array);

// Deterministic band-shaped Gaussian noise plus tonals; zero mean, broadband
// rms = 10^(source_level_db/20).
std::vector<double> synthesize_source(const SourceSpec& spec, double duration_s,
                                      double fs_hz, std::uint64_t seed);

// y(t) = sum_k amplitude_k * x(t - delay_k), sub-sample delays applied with a
// 64-tap Hann-windowed sinc kernel (exact for integer-sample delays).
std::vector<double> propagate(std::span<const double> source, const MultipathImpulse& impulse,
                              double fs_hz);

inline constexpr int kFractionalDelayTaps = 64;
inline constexpr double kLabelIntervalS = 0.1;

// Piecewise-stationary multipath synthesis: the impulse response is
// recomputed at the label cadence and adjacent segments are linearly
// cross-faded. Independent white Gaussian noise per channel is scaled so that
// snr_db is the ratio of direct-path signal power at the closest point of
// approach to noise power; pass +infinity to disable noise.
LabeledRecording simulate_transit(const TransitPlan& plan, const SourceSpec& spec,
                                  const EnvironmentModel& env, const SensorArray& array,
                                  double fs_hz, double snr_db, std::uint64_t seed,
                                  double label_interval_s = kLabelIntervalS);

// Straight constant-speed track: passes the closest point of approach
// (perpendicular offset cpa_offset_m from the array center) at mid-transit,
// heading_deg measured from the +x array axis, legs of leg_m before and after.
TransitPlan straight_transit(double heading_deg, double cpa_offset_m, double speed_mps,
                             double leg_m, double source_depth_m,
                             double label_interval_s = kLabelIntervalS);

}  // namespace swloc::sim
