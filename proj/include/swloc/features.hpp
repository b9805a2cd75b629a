#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swloc/fft.hpp"
#include "swloc/sim.hpp"

namespace swloc::features {

enum class GccWeighting { none, phat };

GccWeighting gcc_weighting_from_string(const std::string& s);
std::string to_string(GccWeighting w);

struct FramingConfig {
    int frame_length = 2048;  // power of two
    int hop = 1024;
    double fs_hz = 25000.0;
    bool hann = true;  // taper applied when cutting frames

    void validate() const;
};

// Quefrency/lag windows used to cut the two maps. gcc_max_lag_s is a derived
// quantity; see derive_gcc_max_lag.
struct FeatureWindows {
    double lifter_qmin_s = 1.24e-4;
    double lifter_qmax_s = 1.4e-3;
    double gcc_max_lag_s = 9.6e-3;
    int gcc_subsample_factor = 10;
    GccWeighting weighting = GccWeighting::phat;
};

// Half-window in sub-sample blocks K = round(spacing/c * (1+margin) * fs /
// factor); the kept lag window is [-K*factor, K*factor) samples, so the
// sub-sampled map has exactly 2K bins. At 250 kHz with 14 m spacing, c =
// 1500 m/s, 3% margin and factor 10 this yields +/-9.6 ms and 480 bins.
double derive_gcc_max_lag(double spacing_m, double sound_speed_mps, double margin,
                          double fs_hz, int factor);

struct LagVector {
    std::vector<double> v;
    int center = 0;  // index of lag 0

    int lag_of(int index) const { return index - center; }
    double at_lag(int lag) const { return v[static_cast<std::size_t>(lag + center)]; }
    int min_lag() const { return -center; }
    int max_lag() const { return static_cast<int>(v.size()) - 1 - center; }
};

struct LifteredSlice {
    std::vector<double> v;
    int start_bin = 0;  // quefrency bin of v[0]
};

// Real power cepstrum of the frame as given (tapering happens upstream when
// frames are cut): inverse transform of log |S(f)|^2 with a relative spectral
// floor of 1e-12 * max|S|^2 applied before the log.
std::vector<double> power_cepstrum(std::span<const double> frame, const dsp::Fft& fft);

// Contiguous quefrency slice, bins [round(q_min*fs), round(q_max*fs)]
// inclusive. At fs = 250 kHz with the default bounds this is bins 31..350,
// 320 values.
LifteredSlice lifter(std::span<const double> cepstrum, double q_min_s, double q_max_s,
                     double fs_hz);

// Generalized cross-correlation via the weighted cross-spectrum conj(A)*B,
// zero lag centered. Positive lag means channel A leads channel B (b is a
// delayed copy of a). `none` is plain circular cross-correlation.
LagVector gcc(std::span<const double> frame_a, std::span<const double> frame_b,
              GccWeighting weighting, const dsp::Fft& fft);

// Same computation starting from spectra already in hand, so a frame's FFT
// can be shared between the cepstral and GCC paths.
LagVector gcc_spectra(const std::vector<dsp::cplx>& a, const std::vector<dsp::cplx>& b,
                      GccWeighting weighting, const dsp::Fft& fft);

// Keeps lags in [-M, M) with M = round(max_lag*fs), then reduces each block
// of `factor` bins to its maximum-magnitude value, sign preserved.
std::vector<double> window_and_subsample_gcc(const LagVector& g, double max_lag_s,
                                             double fs_hz, int factor);

struct FeatureShapes {
    int cepstral_bins = 0;
    int cepstral_start_bin = 0;
    int channels = 3;
    int gcc_bins = 0;       // after sub-sampling
    int gcc_halfwidth = 0;  // kept half-window in raw lag samples
    int pairs = 2;
};

FeatureShapes derive_shapes(const FramingConfig& framing, const FeatureWindows& windows);

struct FeatureMaps {
    std::vector<float> cepstral;  // [quefrency x channel], row-major
    std::vector<float> gcc;      // [lag x pair], row-major
    double timestamp_s = 0.0;
    float range_m = 0.0f;
    float bearing_rad = 0.0f;
};

// Cuts Hann-tapered frames of all 3 channels, computes the liftered cepstral
// map (one column per channel) and the windowed sub-sampled GCC map (adjacent
// pairs (0,1) and (1,2)), and attaches the nearest-time label. Frames whose
// label range exceeds max_range_m are excluded.
std::vector<FeatureMaps> feature_maps(const sim::LabeledRecording& rec,
                                      const FramingConfig& framing,
                                      const FeatureWindows& windows, double max_range_m);

}  // namespace swloc::features
