#pragma once

#include <string>
#include <vector>

#include "swloc/features.hpp"
#include "swloc/sim.hpp"

namespace swloc::baseline {

struct TdoaEstimate {
    double tau_s = 0.0;      // gcc lag of the refined peak; positive = first channel leads
    double peak_value = 0.0;
    int pair = 0;            // 0 = sensors (1,2), 1 = sensors (2,3)
    bool low_confidence = false;  // tie among equal maxima, broken toward smallest |lag|
};

enum class FixStatus {
    ok,
    nonphysical_tdoa,   // |c*tau| exceeds the sensor separation
    farfield,           // |a - b| below curvature resolution; bearing only
    negative_range,
    out_of_range,       // beyond the validity cutoff (default 1000 m)
    inconsistent,       // |x| > r, no real bearing
    no_signal,          // degenerate frame, no TDOA measurable
};

struct Fix {
    double range_m = 0.0;
    double bearing_rad = 0.0;  // in [0, pi]
    bool valid = false;
    FixStatus status = FixStatus::ok;
    std::string method = "baseline";
};

inline constexpr double kFarfieldEpsM = 1e-6;       // |a-b| threshold, meters
inline constexpr double kBaselineMaxRangeM = 1000.0;

// Global-maximum pick with three-point parabolic refinement. Flat/tied maxima
// resolve toward the smallest |lag| and are flagged low-confidence.
TdoaEstimate pick_tdoa(const features::LagVector& g, double fs_hz, int pair = 0);

// Closed-form wavefront-curvature inversion for three collinear sensors at
// axis coordinates -d, 0, +d. Inputs follow a = c*tau12 = r1 - r2 and
// b = c*tau23 = r2 - r3. Bearing is measured from the positive array axis
// (broadside = pi/2). Far-field degenerate inputs report arccos((a+b)/2d)
// with an invalid range.
Fix wavefront_curvature_fix(double tau12_s, double tau23_s, double spacing_m,
                            double sound_speed_mps,
                            double max_range_m = kBaselineMaxRangeM);

struct BaselineFix {
    double timestamp_s = 0.0;
    Fix fix;
    double true_range_m = 0.0;
    double true_bearing_rad = 0.0;
};

// Frame-synchronous classical localization: per frame, GCC on both adjacent
// pairs windowed to physical lags, peak-picked TDOAs, curvature inversion.
// Invalid fixes are retained with valid = false. Frame timing matches
// feature_maps so per-frame comparisons line up.
std::vector<BaselineFix> baseline_localize(const sim::LabeledRecording& rec,
                                           const features::FramingConfig& framing,
                                           features::GccWeighting weighting,
                                           double spacing_m, double sound_speed_mps,
                                           double max_range_m = kBaselineMaxRangeM);

}  // namespace swloc::baseline
