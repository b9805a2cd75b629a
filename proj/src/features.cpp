#include "swloc/features.hpp"

#include <algorithm>
#include <cmath>

#include "swloc/error.hpp"

namespace swloc::features {

GccWeighting gcc_weighting_from_string(const std::string& s) {
    if (s == "none") return GccWeighting::none;
    if (s == "phat") return GccWeighting::phat;
    throw ConfigError("unknown gcc weighting: " + s);
}

std::string to_string(GccWeighting w) {
    return w == GccWeighting::phat ? "phat" : "none";
}

void FramingConfig::validate() const {
    if (!dsp::is_pow2(static_cast<std::size_t>(frame_length)))
        throw ConfigError("frame_length must be a power of two");
    if (!(hop > 0 && hop <= frame_length)) throw ConfigError("hop must satisfy 0 < hop <= frame_length");
    if (!(fs_hz > 0.0)) throw ConfigError("fs_hz must be > 0");
}

double derive_gcc_max_lag(double spacing_m, double sound_speed_mps, double margin,
                          double fs_hz, int factor) {
    if (factor < 1) throw ConfigError("gcc subsample factor must be >= 1");
    const double phys = spacing_m / sound_speed_mps;
    const long k = std::lround(phys * (1.0 + margin) * fs_hz / static_cast<double>(factor));
    if (k < 1) throw ConfigError("gcc window collapses at this fs/factor");
    return static_cast<double>(k * factor) / fs_hz;
}

namespace {
constexpr double kSpectralFloor = 1e-12;

std::vector<double> log_power_spectrum(const std::vector<dsp::cplx>& spec) {
    const std::size_t n = spec.size();
    std::vector<double> p(n);
    double pmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = std::norm(spec[i]);
        pmax = std::max(pmax, p[i]);
    }
    if (pmax <= 0.0) throw DegenerateInputError("all-zero frame has no spectrum");
    const double floor = kSpectralFloor * pmax;
    for (std::size_t i = 0; i < n; ++i) p[i] = std::log(std::max(p[i], floor));
    return p;
}

std::vector<double> cepstrum_from_spectrum(const std::vector<dsp::cplx>& spec,
                                           const dsp::Fft& fft) {
    std::vector<double> logp = log_power_spectrum(spec);
    std::vector<dsp::cplx> buf(logp.size());
    for (std::size_t i = 0; i < logp.size(); ++i) buf[i] = dsp::cplx(logp[i], 0.0);
    return fft.inverse_real(buf);
}

}  // namespace

LagVector gcc_spectra(const std::vector<dsp::cplx>& a, const std::vector<dsp::cplx>& b,
                      GccWeighting weighting, const dsp::Fft& fft) {
    const std::size_t n = a.size();
    std::vector<dsp::cplx> cross(n);
    for (std::size_t i = 0; i < n; ++i) cross[i] = std::conj(a[i]) * b[i];
    if (weighting == GccWeighting::phat) {
        double mmax = 0.0;
        for (const auto& c : cross) mmax = std::max(mmax, std::abs(c));
        if (mmax <= 0.0) throw DegenerateInputError("zero-energy frame in phat weighting");
        const double floor = kSpectralFloor * mmax;
        for (auto& c : cross) c /= std::max(std::abs(c), floor);
    }
    std::vector<double> r = fft.inverse_real(cross);
    // Rotate so lag 0 sits at index n/2; index i holds lag i - n/2.
    LagVector out;
    out.center = static_cast<int>(n / 2);
    out.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int lag = static_cast<int>(i) - out.center;
        out.v[i] = r[static_cast<std::size_t>((lag + static_cast<int>(n)) % static_cast<int>(n))];
    }
    return out;
}

std::vector<double> power_cepstrum(std::span<const double> frame, const dsp::Fft& fft) {
    if (frame.size() < 2) throw ShapeError("frame too short for cepstrum");
    return cepstrum_from_spectrum(fft.forward_real(frame), fft);
}

LifteredSlice lifter(std::span<const double> cepstrum, double q_min_s, double q_max_s,
                     double fs_hz) {
    if (!(q_min_s > 0.0) || !(q_max_s > q_min_s))
        throw ConfigError("lifter bounds must satisfy 0 < q_min < q_max");
    const double frame_duration = static_cast<double>(cepstrum.size()) / fs_hz;
    if (!(q_max_s < frame_duration / 2.0))
        throw ConfigError("lifter q_max must be below half the frame duration");
    const long b0 = std::lround(q_min_s * fs_hz);
    const long b1 = std::lround(q_max_s * fs_hz);
    if (b0 < 0 || b1 < b0) throw ConfigError("lifter bounds out of order");
    LifteredSlice out;
    out.start_bin = static_cast<int>(b0);
    out.v.assign(cepstrum.begin() + b0, cepstrum.begin() + b1 + 1);
    return out;
}

LagVector gcc(std::span<const double> frame_a, std::span<const double> frame_b,
              GccWeighting weighting, const dsp::Fft& fft) {
    if (frame_a.size() != frame_b.size()) throw ShapeError("gcc frames must have equal length");
    return gcc_spectra(fft.forward_real(frame_a), fft.forward_real(frame_b), weighting, fft);
}

std::vector<double> window_and_subsample_gcc(const LagVector& g, double max_lag_s,
                                             double fs_hz, int factor) {
    if (factor < 1) throw ConfigError("subsample factor must be >= 1");
    const long m = std::lround(max_lag_s * fs_hz);
    if (m < 1 || m > g.center || static_cast<int>(m) > g.max_lag() + 1)
        throw ConfigError("gcc max_lag exceeds half the frame duration");
    const std::size_t first = static_cast<std::size_t>(g.center - m);
    const std::size_t count = static_cast<std::size_t>(2 * m);
    std::vector<double> out;
    out.reserve((count + static_cast<std::size_t>(factor) - 1) / static_cast<std::size_t>(factor));
    for (std::size_t b = 0; b < count; b += static_cast<std::size_t>(factor)) {
        double best = g.v[first + b];
        const std::size_t end = std::min(count, b + static_cast<std::size_t>(factor));
        for (std::size_t i = b + 1; i < end; ++i) {
            const double v = g.v[first + i];
            if (std::abs(v) > std::abs(best)) best = v;
        }
        out.push_back(best);
    }
    return out;
}

FeatureShapes derive_shapes(const FramingConfig& framing, const FeatureWindows& windows) {
    framing.validate();
    FeatureShapes s;
    const long b0 = std::lround(windows.lifter_qmin_s * framing.fs_hz);
    const long b1 = std::lround(windows.lifter_qmax_s * framing.fs_hz);
    s.cepstral_start_bin = static_cast<int>(b0);
    s.cepstral_bins = static_cast<int>(b1 - b0 + 1);
    const long m = std::lround(windows.gcc_max_lag_s * framing.fs_hz);
    s.gcc_halfwidth = static_cast<int>(m);
    const int factor = windows.gcc_subsample_factor;
    s.gcc_bins = static_cast<int>((2 * m + factor - 1) / factor);
    if (s.cepstral_bins < 1 || s.gcc_bins < 1) throw ConfigError("feature windows are empty");
    return s;
}

std::vector<FeatureMaps> feature_maps(const sim::LabeledRecording& rec,
                                      const FramingConfig& framing,
                                      const FeatureWindows& windows, double max_range_m) {
    framing.validate();
    if (rec.channels() != 3) throw ConfigError("feature extraction expects 3 channels");
    if (rec.labels.empty()) throw ConfigError("recording has no labels");
    const int nfft = framing.frame_length;
    dsp::Fft fft(static_cast<std::size_t>(nfft));
    const std::vector<double> win = dsp::hann_window(static_cast<std::size_t>(nfft));

    std::vector<FeatureMaps> out;
    const std::int64_t total = rec.sample_count();
    std::vector<double> frame(static_cast<std::size_t>(nfft));
    std::vector<std::vector<dsp::cplx>> spectra(3);

    for (std::int64_t start = 0; start + nfft <= total; start += framing.hop) {
        const double t = (static_cast<double>(start) + nfft / 2.0) / framing.fs_hz;
        // Nearest-time label.
        const auto cmp = [](const sim::Label& l, double tt) { return l.t_s < tt; };
        auto it = std::lower_bound(rec.labels.begin(), rec.labels.end(), t, cmp);
        if (it == rec.labels.end()) it = rec.labels.end() - 1;
        if (it != rec.labels.begin() && std::abs((it - 1)->t_s - t) < std::abs(it->t_s - t)) --it;
        if (it->range_m > max_range_m) continue;

        for (int ch = 0; ch < 3; ++ch) {
            const float* src = rec.samples[static_cast<std::size_t>(ch)].data() + start;
            for (int i = 0; i < nfft; ++i)
                frame[static_cast<std::size_t>(i)] =
                    static_cast<double>(src[i]) * (framing.hann ? win[static_cast<std::size_t>(i)] : 1.0);
            spectra[static_cast<std::size_t>(ch)] = fft.forward_real(frame);
        }

        FeatureMaps fm;
        fm.timestamp_s = t;
        fm.range_m = static_cast<float>(it->range_m);
        fm.bearing_rad = static_cast<float>(it->bearing_rad);

        // Dead frames (all-zero before the first arrival in noise-free
        // synthesis) carry no features; skip them.
        bool degenerate = false;
        std::vector<std::vector<double>> slices(3);
        for (int ch = 0; ch < 3 && !degenerate; ++ch) {
            try {
                std::vector<double> cep =
                    cepstrum_from_spectrum(spectra[static_cast<std::size_t>(ch)], fft);
                slices[static_cast<std::size_t>(ch)] =
                    lifter(cep, windows.lifter_qmin_s, windows.lifter_qmax_s, framing.fs_hz).v;
            } catch (const DegenerateInputError&) {
                degenerate = true;
            }
        }
        if (degenerate) continue;
        const std::size_t q = slices[0].size();
        fm.cepstral.resize(q * 3);
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t ch = 0; ch < 3; ++ch)
                fm.cepstral[i * 3 + ch] = static_cast<float>(slices[ch][i]);

        std::vector<std::vector<double>> gcols(2);
        for (int p = 0; p < 2; ++p) {
            LagVector g = gcc_spectra(spectra[static_cast<std::size_t>(p)],
                                      spectra[static_cast<std::size_t>(p + 1)],
                                      windows.weighting, fft);
            gcols[static_cast<std::size_t>(p)] = window_and_subsample_gcc(
                g, windows.gcc_max_lag_s, framing.fs_hz, windows.gcc_subsample_factor);
        }
        const std::size_t lg = gcols[0].size();
        fm.gcc.resize(lg * 2);
        for (std::size_t i = 0; i < lg; ++i)
            for (std::size_t p = 0; p < 2; ++p)
                fm.gcc[i * 2 + p] = static_cast<float>(gcols[p][i]);

        out.push_back(std::move(fm));
    }
    return out;
}

}  // namespace swloc::features
