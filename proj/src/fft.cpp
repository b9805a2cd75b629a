#include "swloc/fft.hpp"

#include <cmath>

#include "swloc/error.hpp"

namespace swloc::dsp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

Fft::Fft(std::size_t n) : n_(n) {
    if (!is_pow2(n)) throw ShapeError("fft size must be a power of two, got " + std::to_string(n));
    rev_.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        rev_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        double a = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        twiddle_[k] = {std::cos(a), std::sin(a)};
    }
}

void Fft::transform(cplx* a, bool inverse) const {
    const std::size_t n = n_;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = rev_[i];
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = twiddle_[k * step];
                if (inverse) w = std::conj(w);
                cplx u = a[i + k];
                cplx v = a[i + k + half] * w;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) a[i] *= inv;
    }
}

std::vector<cplx> Fft::forward_real(std::span<const double> x) const {
    if (x.size() != n_) throw ShapeError("fft input length mismatch");
    std::vector<cplx> a(n_);
    for (std::size_t i = 0; i < n_; ++i) a[i] = cplx(x[i], 0.0);
    transform(a.data(), false);
    return a;
}

std::vector<cplx> Fft::forward_real(std::span<const float> x) const {
    if (x.size() != n_) throw ShapeError("fft input length mismatch");
    std::vector<cplx> a(n_);
    for (std::size_t i = 0; i < n_; ++i) a[i] = cplx(static_cast<double>(x[i]), 0.0);
    transform(a.data(), false);
    return a;
}

std::vector<double> Fft::inverse_real(std::span<const cplx> spectrum) const {
    if (spectrum.size() != n_) throw ShapeError("fft input length mismatch");
    std::vector<cplx> a(spectrum.begin(), spectrum.end());
    transform(a.data(), true);
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = a[i].real();
    return out;
}

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
    return w;
}

}  // namespace swloc::dsp
