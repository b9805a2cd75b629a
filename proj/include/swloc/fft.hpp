#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace swloc::dsp {

using cplx = std::complex<double>;

bool is_pow2(std::size_t n);
std::size_t next_pow2(std::size_t n);

// Iterative radix-2 FFT for power-of-two sizes. One instance caches the
// bit-reversal table and twiddles for a fixed size; instantiate per worker
// when running concurrently.
class Fft {
public:
    explicit Fft(std::size_t n);

    std::size_t size() const { return n_; }

    // In-place transform. inverse=true applies the 1/n scale.
    void transform(cplx* data, bool inverse) const;

    // Spectrum of a real signal, full length n (Hermitian).
    std::vector<cplx> forward_real(std::span<const double> x) const;
    std::vector<cplx> forward_real(std::span<const float> x) const;

    // Inverse transform returning the real part.
    std::vector<double> inverse_real(std::span<const cplx> spectrum) const;

private:
    std::size_t n_;
    std::vector<std::size_t> rev_;
    std::vector<cplx> twiddle_;  // forward twiddles; inverse conjugates
};

// Periodic Hann window, w[i] = 0.5 * (1 - cos(2*pi*i/n)).
std::vector<double> hann_window(std::size_t n);

}  // namespace swloc::dsp
