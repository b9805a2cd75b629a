#include "swloc/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swloc/error.hpp"

namespace swloc::baseline {

TdoaEstimate pick_tdoa(const features::LagVector& g, double fs_hz, int pair) {
    if (g.v.empty()) throw ShapeError("empty gcc vector");
    // Global max; exact ties break toward the smallest |lag|.
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    int ties = 0;
    for (std::size_t i = 0; i < g.v.size(); ++i) {
        const double v = g.v[i];
        if (v > best) {
            best = v;
            best_i = i;
            ties = 1;
        } else if (v == best) {
            ++ties;
            if (std::abs(g.lag_of(static_cast<int>(i))) <
                std::abs(g.lag_of(static_cast<int>(best_i))))
                best_i = i;
        }
    }

    double refined = static_cast<double>(g.lag_of(static_cast<int>(best_i)));
    if (best_i > 0 && best_i + 1 < g.v.size()) {
        const double ym = g.v[best_i - 1], y0 = g.v[best_i], yp = g.v[best_i + 1];
        const double denom = ym - 2.0 * y0 + yp;
        if (denom < 0.0) {
            double delta = 0.5 * (ym - yp) / denom;
            delta = std::clamp(delta, -0.5, 0.5);
            refined += delta;
        }
    }

    TdoaEstimate est;
    est.tau_s = refined / fs_hz;
    est.peak_value = best;
    est.pair = pair;
    est.low_confidence = ties > 1;
    return est;
}

Fix wavefront_curvature_fix(double tau12_s, double tau23_s, double spacing_m,
                            double sound_speed_mps, double max_range_m) {
    if (!(spacing_m > 0.0) || !(sound_speed_mps > 0.0))
        throw ConfigError("spacing and sound speed must be > 0");
    const double d = spacing_m;
    const double a = sound_speed_mps * tau12_s;  // r1 - r2
    const double b = sound_speed_mps * tau23_s;  // r2 - r3

    Fix fix;
    const double tol = d * 1e-12;
    if (std::abs(a) > d + tol || std::abs(b) > d + tol) {
        fix.status = FixStatus::nonphysical_tdoa;
        fix.range_m = std::numeric_limits<double>::quiet_NaN();
        fix.bearing_rad = std::acos(std::clamp((a + b) / (2.0 * d), -1.0, 1.0));
        return fix;
    }
    if (std::abs(a - b) <= kFarfieldEpsM) {
        // Plane-wave limit: a = b = d*cos(bearing); no curvature, no range.
        fix.status = FixStatus::farfield;
        fix.range_m = std::numeric_limits<double>::quiet_NaN();
        fix.bearing_rad = std::acos(std::clamp((a + b) / (2.0 * d), -1.0, 1.0));
        return fix;
    }

    const double r2 = (2.0 * d * d - a * a - b * b) / (2.0 * (a - b));
    const double x = (a * (2.0 * r2 + a) - d * d) / (2.0 * d);
    fix.range_m = r2;
    if (r2 <= 0.0) {
        fix.status = FixStatus::negative_range;
        fix.bearing_rad = std::acos(std::clamp((a + b) / (2.0 * d), -1.0, 1.0));
        return fix;
    }
    if (std::abs(x) > r2) {
        fix.status = FixStatus::inconsistent;
        fix.bearing_rad = (x >= 0.0) ? 0.0 : 3.14159265358979323846;
        return fix;
    }
    fix.bearing_rad = std::atan2(std::sqrt(r2 * r2 - x * x), x);
    if (r2 > max_range_m) {
        fix.status = FixStatus::out_of_range;
        return fix;
    }
    fix.status = FixStatus::ok;
    fix.valid = true;
    return fix;
}

std::vector<BaselineFix> baseline_localize(const sim::LabeledRecording& rec,
                                           const features::FramingConfig& framing,
                                           features::GccWeighting weighting,
                                           double spacing_m, double sound_speed_mps,
                                           double max_range_m) {
    framing.validate();
    if (rec.channels() != 3) throw ConfigError("baseline localization expects 3 channels");
    const int nfft = framing.frame_length;
    dsp::Fft fft(static_cast<std::size_t>(nfft));
    const std::vector<double> win = dsp::hann_window(static_cast<std::size_t>(nfft));
    // Physical lag window with one interpolation guard bin.
    const int m_phys =
        static_cast<int>(std::ceil(spacing_m / sound_speed_mps * framing.fs_hz)) + 1;

    std::vector<BaselineFix> out;
    const std::int64_t total = rec.sample_count();
    std::vector<double> frame(static_cast<std::size_t>(nfft));
    std::vector<std::vector<dsp::cplx>> spectra(3);

    for (std::int64_t start = 0; start + nfft <= total; start += framing.hop) {
        const double t = (static_cast<double>(start) + nfft / 2.0) / framing.fs_hz;
        for (int ch = 0; ch < 3; ++ch) {
            const float* src = rec.samples[static_cast<std::size_t>(ch)].data() + start;
            for (int i = 0; i < nfft; ++i)
                frame[static_cast<std::size_t>(i)] =
                    static_cast<double>(src[i]) * (framing.hann ? win[static_cast<std::size_t>(i)] : 1.0);
            spectra[static_cast<std::size_t>(ch)] = fft.forward_real(frame);
        }

        Fix fix;
        try {
            TdoaEstimate est[2];
            for (int p = 0; p < 2; ++p) {
                features::LagVector g =
                    features::gcc_spectra(spectra[static_cast<std::size_t>(p)],
                                          spectra[static_cast<std::size_t>(p + 1)], weighting, fft);
                // Window to physical lags before picking.
                features::LagVector wg;
                wg.center = m_phys;
                wg.v.assign(g.v.begin() + (g.center - m_phys),
                            g.v.begin() + (g.center + m_phys + 1));
                est[p] = pick_tdoa(wg, framing.fs_hz, p);
            }
            // gcc lag is (r_b - r_a)/c of its pair, while the curvature form
            // wants tau12 = (r1 - r2)/c, hence the sign flip.
            fix = wavefront_curvature_fix(-est[0].tau_s, -est[1].tau_s, spacing_m,
                                          sound_speed_mps, max_range_m);
        } catch (const DegenerateInputError&) {
            fix.valid = false;
            fix.status = FixStatus::no_signal;
            fix.range_m = std::numeric_limits<double>::quiet_NaN();
            fix.bearing_rad = std::numeric_limits<double>::quiet_NaN();
        }

        // Nearest-time label, mirroring feature_maps.
        const auto cmp = [](const sim::Label& l, double tt) { return l.t_s < tt; };
        auto it = std::lower_bound(rec.labels.begin(), rec.labels.end(), t, cmp);
        if (it == rec.labels.end()) it = rec.labels.end() - 1;
        if (it != rec.labels.begin() && std::abs((it - 1)->t_s - t) < std::abs(it->t_s - t)) --it;

        out.push_back({t, fix, it->range_m, it->bearing_rad});
    }
    return out;
}

}  // namespace swloc::baseline
