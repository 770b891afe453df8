#pragma once

// In-place complex FFT of a fixed length, backed by FFTW.  Plans are created
// with FFTW_ESTIMATE so results are bit-reproducible for a given length.

#include <complex>
#include <memory>
#include <span>

namespace qclock {

class Fft {
public:
    explicit Fft(int n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&&) noexcept;
    Fft& operator=(Fft&&) noexcept;

    int size() const { return n_; }

    /// Unnormalized forward transform, sum_j x_j e^{-2 pi i jm/n}.
    void forward(std::span<std::complex<double>> data) const;
    /// Inverse transform including the 1/n factor.
    void inverse(std::span<std::complex<double>> data) const;

private:
    struct Plans;
    int n_;
    std::unique_ptr<Plans> plans_;
};

}  // namespace qclock
