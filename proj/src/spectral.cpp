#include "qclock/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace qclock {

namespace {
// FFTW's planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Fft::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

Fft::Fft(int n) : n_(n), plans_(std::make_unique<Plans>()) {
    if (n < 1) throw std::invalid_argument("Fft: length must be positive");
    std::vector<std::complex<double>> scratch(static_cast<size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard lock(planner_mutex());
    plans_->fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->fwd || !plans_->bwd) throw std::runtime_error("Fft: planning failed");
}

Fft::~Fft() {
    if (!plans_) return;
    std::lock_guard lock(planner_mutex());
    if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
    if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
}

Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::span<std::complex<double>> data) const {
    if (static_cast<int>(data.size()) != n_) throw std::invalid_argument("Fft: length mismatch");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_->fwd, buf, buf);
}

void Fft::inverse(std::span<std::complex<double>> data) const {
    if (static_cast<int>(data.size()) != n_) throw std::invalid_argument("Fft: length mismatch");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_->bwd, buf, buf);
    const double scale = 1.0 / n_;
    for (auto& z : data) z *= scale;
}

}  // namespace qclock
