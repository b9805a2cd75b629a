#include "swloc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swloc/error.hpp"
#include "swloc/fft.hpp"
#include "swloc/rng.hpp"

namespace swloc::sim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

void EnvironmentModel::validate() const {
    if (!(water_depth_m > 0.0)) throw ConfigError("water_depth_m must be > 0");
    if (!(sound_speed_mps > 0.0)) throw ConfigError("sound_speed_mps must be > 0");
    if (std::abs(surface_reflection) > 1.0) throw ConfigError("|surface_reflection| must be <= 1");
    if (std::abs(bottom_reflection) > 1.0) throw ConfigError("|bottom_reflection| must be <= 1");
    if (max_image_order < 0) throw ConfigError("max_image_order must be >= 0");
}

void SensorArray::validate() const {
    if (sensor_count != 3) throw ConfigError("sensor_count must be 3");
    if (!(spacing_m > 0.0)) throw ConfigError("spacing_m must be > 0");
    if (!(height_above_floor_m > 0.0)) throw ConfigError("height_above_floor_m must be > 0");
}

std::vector<Vec3> SensorArray::positions(const EnvironmentModel& env) const {
    validate();
    const double z = env.water_depth_m - height_above_floor_m;
    if (!(z > 0.0 && z < env.water_depth_m))
        throw ConfigError("sensors must sit inside the water column");
    std::vector<Vec3> p(static_cast<std::size_t>(sensor_count));
    const double half = spacing_m * (sensor_count - 1) / 2.0;
    for (int i = 0; i < sensor_count; ++i)
        p[static_cast<std::size_t>(i)] = {i * spacing_m - half, 0.0, z};
    return p;
}

Vec3 SensorArray::center(const EnvironmentModel& env) const {
    return {0.0, 0.0, env.water_depth_m - height_above_floor_m};
}

void SourceSpec::validate(double fs_hz) const {
    if (!(band_lo_hz > 0.0) || !(band_hi_hz > band_lo_hz))
        throw ConfigError("source band edges must satisfy 0 < lo < hi");
    if (band_hi_hz >= fs_hz / 2.0)
        throw ConfigError("source band_hi_hz must be below fs/2");
    if (!std::isfinite(source_level_db)) throw ConfigError("source_level_db must be finite");
    for (const auto& t : tonals) {
        if (!(t.freq_hz > 0.0) || t.freq_hz >= fs_hz / 2.0)
            throw ConfigError("tonal frequency must be in (0, fs/2)");
    }
}

void TransitPlan::validate() const {
    if (times_s.empty() || waypoints_m.size() != times_s.size())
        throw ConfigError("transit plan has no waypoints");
    for (std::size_t i = 1; i < times_s.size(); ++i)
        if (!(times_s[i] > times_s[i - 1]))
            throw ConfigError("transit plan times must be strictly increasing");
}

Vec3 TransitPlan::position(double t) const {
    if (t <= times_s.front()) return waypoints_m.front();
    if (t >= times_s.back()) return waypoints_m.back();
    auto it = std::upper_bound(times_s.begin(), times_s.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_s.begin());
    double t0 = times_s[i - 1], t1 = times_s[i];
    double w = (t - t0) / (t1 - t0);
    const Vec3& a = waypoints_m[i - 1];
    const Vec3& b = waypoints_m[i];
    return a + w * (b - a);
}

MultipathImpulse image_paths(const EnvironmentModel& env, const Vec3& source,
                             const Vec3& sensor) {
    env.validate();
    const double h = env.water_depth_m;
    if (!(source.z > 0.0 && source.z < h))
        throw DomainError("source must be strictly inside the water column");
    if (!(sensor.z > 0.0 && sensor.z < h))
        throw DomainError("sensor must be strictly inside the water column");

    const double dx = source.x - sensor.x;
    const double dy = source.y - sensor.y;
    const double horiz2 = dx * dx + dy * dy;
    const double rs = env.surface_reflection;
    const double rb = env.bottom_reflection;
    const int order = env.max_image_order;

    MultipathImpulse out;
    auto add = [&](double image_depth, double gain, int bounces) {
        const double dz = image_depth - sensor.z;
        const double len = std::sqrt(horiz2 + dz * dz);
        out.arrivals.push_back({len / env.sound_speed_mps, gain / len, bounces});
    };

    // Image depths come in two families: 2mh + zs with |m| surface and |m|
    // bottom bounces, and 2mh - zs with (m-1, m) bounces for m >= 1 and
    // (|m|+1, |m|) for m <= 0. The m = 0 member of the first family is the
    // direct path.
    add(source.z, 1.0, 0);
    for (int m = -order; m <= order; ++m) {
        if (m != 0 && 2 * std::abs(m) <= order) {
            double gain = std::pow(rs, std::abs(m)) * std::pow(rb, std::abs(m));
            add(2.0 * m * h + source.z, gain, 2 * std::abs(m));
        }
        int bounces = (m >= 1) ? (2 * m - 1) : (2 * std::abs(m) + 1);
        if (bounces <= order) {
            double gain = (m >= 1) ? std::pow(rs, m - 1) * std::pow(rb, m)
                                   : std::pow(rs, std::abs(m) + 1) * std::pow(rb, std::abs(m));
            add(2.0 * m * h - source.z, gain, bounces);
        }
    }

    std::stable_sort(out.arrivals.begin(), out.arrivals.end(),
                     [](const Arrival& a, const Arrival& b) { return a.delay_s < b.delay_s; });
    return out;
}

Label geometry_label(double t, const Vec3& source, const EnvironmentModel& env,
                     const SensorArray& array) {
    const Vec3 d = source - array.center(env);
    const double r = norm(d);
    double bearing = (r > 0.0) ? std::acos(std::clamp(d.x / r, -1.0, 1.0)) : 0.0;
    return {t, r, bearing};
}

std::vector<double> synthesize_source(const SourceSpec& spec, double duration_s,
                                      double fs_hz, std::uint64_t seed) {
    if (!(duration_s > 0.0)) throw ConfigError("duration must be > 0");
    spec.validate(fs_hz);

    const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * fs_hz));
    if (n < 2) throw ConfigError("duration too short for fs");
    const std::size_t m = dsp::next_pow2(n);
    dsp::Fft fft(m);
    Rng rng(derive_seed(seed, "source-spectrum"));

    // Hermitian spectrum with the requested band shape; DC stays zero.
    std::vector<dsp::cplx> spec_bins(m, dsp::cplx(0.0, 0.0));
    const double df = fs_hz / static_cast<double>(m);
    for (std::size_t k = 1; k <= m / 2; ++k) {
        const double f = df * static_cast<double>(k);
        if (f < spec.band_lo_hz || f > spec.band_hi_hz) continue;
        const double gain =
            std::pow(10.0, spec.slope_db_per_octave * std::log2(f / spec.band_lo_hz) / 20.0);
        const double re = rng.gaussian();
        const double im = (k == m / 2) ? 0.0 : rng.gaussian();
        spec_bins[k] = dsp::cplx(gain * re, gain * im);
        if (k != m / 2) spec_bins[m - k] = std::conj(spec_bins[k]);
    }
    std::vector<double> x = fft.inverse_real(spec_bins);
    x.resize(n);

    double ss = 0.0;
    for (double v : x) ss += v * v;
    double rms = std::sqrt(ss / static_cast<double>(n));
    if (rms <= 0.0) throw DegenerateInputError("source spectrum produced a zero signal");
    const double target_rms = std::pow(10.0, spec.source_level_db / 20.0);
    const double scale = target_rms / rms;
    for (double& v : x) v *= scale;

    // Tonal level is rms relative to the broadband component.
    Rng phase_rng(derive_seed(seed, "tonal-phase"));
    for (const auto& tone : spec.tonals) {
        const double amp = std::sqrt(2.0) * target_rms * std::pow(10.0, tone.level_db / 20.0);
        const double w = 2.0 * kPi * tone.freq_hz / fs_hz;
        const double phase = 2.0 * kPi * phase_rng.uniform();
        for (std::size_t i = 0; i < n; ++i)
            x[i] += amp * std::cos(w * static_cast<double>(i) + phase);
    }
    // Remove any residual mean from tonal truncation.
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : x) v -= mean;
    return x;
}

namespace {

struct DelayKernel {
    std::int64_t first_tap;          // output shift of taps[0]
    std::array<double, kFractionalDelayTaps> taps;
};

// Hann-windowed sinc centered on the (possibly fractional) delay in samples.
// For integer delays the kernel collapses to a single unit tap.
DelayKernel make_delay_kernel(double delay_samples) {
    DelayKernel k{};
    const int half = kFractionalDelayTaps / 2;
    const std::int64_t start = static_cast<std::int64_t>(std::ceil(delay_samples)) - half;
    k.first_tap = start;
    for (int i = 0; i < kFractionalDelayTaps; ++i) {
        const double u = static_cast<double>(start + i) - delay_samples;
        double w = 0.0;
        if (std::abs(u) <= half) w = 0.5 * (1.0 + std::cos(kPi * u / half));
        double s;
        if (u == std::nearbyint(u)) {
            s = (u == 0.0) ? 1.0 : 0.0;  // sinc is exactly zero at nonzero integers
        } else {
            s = std::sin(kPi * u) / (kPi * u);
        }
        k.taps[static_cast<std::size_t>(i)] = w * s;
    }
    return k;
}

// out[n] += gain * x[n - shift] for n in [n0, n1).
void shifted_add(std::span<const double> x, double gain, std::int64_t shift,
                 std::int64_t n0, std::int64_t n1, double* out) {
    const std::int64_t len = static_cast<std::int64_t>(x.size());
    std::int64_t lo = std::max(n0, shift);
    std::int64_t hi = std::min(n1, shift + len);
    for (std::int64_t n = lo; n < hi; ++n) out[n - n0] += gain * x[static_cast<std::size_t>(n - shift)];
}

// Renders sum_k a_k * x(t - tau_k) over the sample window [n0, n1).
void render_impulse(std::span<const double> x, const MultipathImpulse& imp, double fs,
                    std::int64_t n0, std::int64_t n1, double* out) {
    for (const auto& arr : imp.arrivals) {
        const DelayKernel k = make_delay_kernel(arr.delay_s * fs);
        for (int i = 0; i < kFractionalDelayTaps; ++i) {
            const double c = arr.amplitude * k.taps[static_cast<std::size_t>(i)];
            if (c == 0.0) continue;
            shifted_add(x, c, k.first_tap + i, n0, n1, out);
        }
    }
}

}  // namespace

std::vector<double> propagate(std::span<const double> source, const MultipathImpulse& impulse,
                              double fs_hz) {
    const std::int64_t n = static_cast<std::int64_t>(source.size());
    for (const auto& a : impulse.arrivals) {
        if (std::llround(a.delay_s * fs_hz) >= n)
            throw DomainError("arrival delay exceeds output length");
        if (a.delay_s < 0.0) throw DomainError("negative arrival delay");
    }
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    render_impulse(source, impulse, fs_hz, 0, n, out.data());
    return out;
}

TransitPlan straight_transit(double heading_deg, double cpa_offset_m, double speed_mps,
                             double leg_m, double source_depth_m, double label_interval_s) {
    if (!(speed_mps > 0.0) || !(leg_m > 0.0))
        throw ConfigError("transit speed and leg must be > 0");
    TransitPlan plan;
    plan.speed_mps = speed_mps;
    plan.duration_s = 2.0 * leg_m / speed_mps;
    const double hdg = heading_deg * kPi / 180.0;
    const Vec3 dir{std::cos(hdg), std::sin(hdg), 0.0};
    const Vec3 normal{-std::sin(hdg), std::cos(hdg), 0.0};
    const Vec3 cpa = cpa_offset_m * normal;
    const double t_cpa = plan.duration_s / 2.0;
    const std::int64_t steps =
        static_cast<std::int64_t>(std::floor(plan.duration_s / label_interval_s));
    for (std::int64_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * label_interval_s;
        Vec3 p = cpa + ((t - t_cpa) * speed_mps) * dir;
        p.z = source_depth_m;
        plan.times_s.push_back(t);
        plan.waypoints_m.push_back(p);
    }
    return plan;
}

LabeledRecording simulate_transit(const TransitPlan& plan, const SourceSpec& spec,
                                  const EnvironmentModel& env, const SensorArray& array,
                                  double fs_hz, double snr_db, std::uint64_t seed,
                                  double label_interval_s) {
    plan.validate();
    env.validate();
    const auto sensors = array.positions(env);
    for (const auto& w : plan.waypoints_m)
        if (!(w.z > 0.0 && w.z < env.water_depth_m))
            throw ConfigError("transit plan leaves the water column");

    const double duration = plan.times_s.back();
    if (!(duration > 0.0)) throw ConfigError("transit plan too short");
    const std::vector<double> x =
        synthesize_source(spec, duration, fs_hz, derive_seed(seed, "signal"));
    const std::int64_t n = static_cast<std::int64_t>(x.size());

    // Label grid; also the piecewise-stationary segment grid.
    std::vector<double> label_times;
    for (double t = 0.0; t <= duration + 1e-9; t += label_interval_s) {
        if (std::llround(t * fs_hz) >= n) break;
        label_times.push_back(t);
    }

    LabeledRecording rec;
    rec.fs_hz = fs_hz;
    rec.seed = seed;
    rec.samples.assign(sensors.size(), {});
    rec.labels.reserve(label_times.size());
    for (double t : label_times)
        rec.labels.push_back(geometry_label(t, plan.position(t), env, array));

    const std::size_t n_seg = label_times.size();
    std::vector<double> chan(static_cast<std::size_t>(n));
    std::vector<double> buf_cur, buf_next;

    for (std::size_t ch = 0; ch < sensors.size(); ++ch) {
        std::fill(chan.begin(), chan.end(), 0.0);
        std::vector<MultipathImpulse> imps(n_seg);
        for (std::size_t j = 0; j < n_seg; ++j)
            imps[j] = image_paths(env, plan.position(label_times[j]), sensors[ch]);

        for (std::size_t j = 0; j < n_seg; ++j) {
            const std::int64_t s0 = std::llround(label_times[j] * fs_hz);
            const std::int64_t s1 =
                (j + 1 < n_seg) ? std::llround(label_times[j + 1] * fs_hz) : n;
            if (s1 <= s0) continue;
            const std::size_t seg_len = static_cast<std::size_t>(s1 - s0);
            buf_cur.assign(seg_len, 0.0);
            render_impulse(x, imps[j], fs_hz, s0, s1, buf_cur.data());
            if (j + 1 < n_seg) {
                buf_next.assign(seg_len, 0.0);
                render_impulse(x, imps[j + 1], fs_hz, s0, s1, buf_next.data());
                const double inv = 1.0 / static_cast<double>(seg_len);
                for (std::size_t i = 0; i < seg_len; ++i) {
                    const double w = static_cast<double>(i) * inv;
                    chan[static_cast<std::size_t>(s0) + i] =
                        (1.0 - w) * buf_cur[i] + w * buf_next[i];
                }
            } else {
                for (std::size_t i = 0; i < seg_len; ++i)
                    chan[static_cast<std::size_t>(s0) + i] = buf_cur[i];
            }
        }

        if (std::isfinite(snr_db)) {
            // Noise power referenced to direct-path signal power at the CPA.
            double sig_var = 0.0;
            for (double v : x) sig_var += v * v;
            sig_var /= static_cast<double>(n);
            double r_min = std::numeric_limits<double>::infinity();
            for (double t : label_times)
                r_min = std::min(r_min, norm(plan.position(t) - sensors[ch]));
            const double p_cpa = sig_var / (r_min * r_min);
            const double sigma = std::sqrt(p_cpa * std::pow(10.0, -snr_db / 10.0));
            Rng noise(derive_seed(seed, "noise", ch));
            for (double& v : chan) v += sigma * noise.gaussian();
        }

        rec.samples[ch].resize(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i)
            rec.samples[ch][static_cast<std::size_t>(i)] =
                static_cast<float>(chan[static_cast<std::size_t>(i)]);
    }
    return rec;
}

}  // namespace swloc::sim
