#include "qclock/model.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "qclock/spectral.hpp"

namespace qclock {

namespace {

bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

double bump(double u) {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

// C-infinity step: 0 for v <= 0, 1 for v >= 1.
double smooth_step(double v) {
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / v);
    const double b = std::exp(-1.0 / (1.0 - v));
    return a / (a + b);
}

}  // namespace

Grid::Grid(double x_min, double x_max, int n) : x_min_(x_min), x_max_(x_max), n_(n), h_(0.0) {
    if (!is_power_of_two(n)) {
        throw ValidationError("grid: n = " + std::to_string(n) + " is not a power of two >= 2");
    }
    if (!(x_min < 0.0 && 0.0 < x_max)) {
        throw ValidationError("grid: box must satisfy x_min < 0 < x_max");
    }
    h_ = (x_max - x_min) / n;
}

double Grid::wavenumber(int j) const {
    const int m = j < n_ / 2 ? j : j - n_;
    return 2.0 * std::numbers::pi * m / length();
}

RVector Grid::positions() const {
    RVector x(n_);
    for (int j = 0; j < n_; ++j) x(j) = position(j);
    return x;
}

RVector Grid::wavenumbers() const {
    RVector k(n_);
    for (int j = 0; j < n_; ++j) k(j) = wavenumber(j);
    return k;
}

Grid build_grid(double x_min, double x_max, int n) { return Grid(x_min, x_max, n); }

cplx grid_inner(const Grid& grid, const CVector& a, const CVector& b) {
    return grid.spacing() * a.dot(b);  // Eigen's dot conjugates the first argument
}

ClockWaveFunction::ClockWaveFunction(Grid grid, CVector amplitudes)
    : grid_(grid), amps_(std::move(amplitudes)) {
    if (amps_.size() != grid_.size()) {
        throw ValidationError("clock wave function: amplitude count does not match grid");
    }
    if (std::abs(norm() - 1.0) > 1e-10) {
        throw ValidationError("clock wave function: not normalized (norm " + std::to_string(norm()) +
                              ")");
    }
}

double ClockWaveFunction::norm() const {
    return std::sqrt(grid_.spacing() * amps_.squaredNorm());
}

cplx ClockWaveFunction::inner(const ClockWaveFunction& other) const {
    return grid_inner(grid_, amps_, other.amps_);
}

std::string_view to_string(CouplingShape shape) {
    switch (shape) {
        case CouplingShape::Bump: return "bump";
        case CouplingShape::FlatTop: return "flat-top";
    }
    return "?";
}

CouplingShape coupling_shape_from_string(std::string_view name) {
    if (name == "bump") return CouplingShape::Bump;
    if (name == "flat-top") return CouplingShape::FlatTop;
    throw ValidationError("unknown coupling shape '" + std::string(name) + "'");
}

double shape_value(CouplingShape shape, double u) {
    switch (shape) {
        case CouplingShape::Bump: return bump(u);
        case CouplingShape::FlatTop: return smooth_step(2.0 * (u + 1.0)) * smooth_step(2.0 * (1.0 - u));
    }
    return 0.0;
}

CouplingProfile coupling_profile(const Grid& grid, double width, double target, CouplingShape shape) {
    if (!(width > 0.0) || !(width < grid.x_max())) {
        throw ValidationError("coupling profile: support width must satisfy 0 < Delta < x_max");
    }
    if (!std::isfinite(target)) throw ValidationError("coupling profile: target integral not finite");
    if (width < 2.0 * grid.spacing()) {
        throw ValidationError("coupling profile: support (0, Delta) contains no grid point");
    }
    RVector g = RVector::Zero(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        const double x = grid.position(j);
        if (x > 0.0 && x < width) g(j) = shape_value(shape, (2.0 * x - width) / width);
    }
    const double raw = grid.spacing() * g.sum();
    if (!(raw > 0.0)) throw ValidationError("coupling profile: empty support on grid");
    g *= target / raw;
    return CouplingProfile{grid, g, width, grid.spacing() * g.sum(), shape, target == 0.0};
}

ClockWaveFunction bump_packet(const Grid& grid, double width, double carrier) {
    if (!(width > 0.0)) throw ValidationError("bump packet: width must be positive");
    if (!(width < -grid.x_min())) {
        throw ValidationError("bump packet: width " + std::to_string(width) +
                              " does not fit left of the origin (|x_min| = " +
                              std::to_string(-grid.x_min()) + ")");
    }
    CVector a = CVector::Zero(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        const double x = grid.position(j);
        if (x > -width && x < 0.0) {
            a(j) = bump((2.0 * x + width) / width) * std::polar(1.0, carrier * x);
        }
    }
    const double norm = std::sqrt(grid.spacing() * a.squaredNorm());
    if (!(norm > 0.0)) throw ValidationError("bump packet: support contains no grid point");
    return ClockWaveFunction(grid, a / norm);
}

ClockEnergyStats clock_energy_stats(const ClockWaveFunction& phi, double hbar) {
    const Grid& grid = phi.grid();
    std::vector<cplx> spec(phi.amplitudes().data(), phi.amplitudes().data() + grid.size());
    Fft(grid.size()).forward(spec);
    double total = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        const double w = std::norm(spec[j]);
        const double k = grid.wavenumber(j);
        total += w;
        m1 += w * k;
        m2 += w * k * k;
    }
    m1 /= total;
    m2 /= total;
    return {hbar * m1, hbar * std::sqrt(std::max(0.0, m2 - m1 * m1))};
}

double condition1_residual(const ClockWaveFunction& phi, const PureState& omega, const Interaction& v) {
    if (omega.dim() != v.coupling_operator.dim()) {
        throw ValidationError("condition 1 residual: system dimension mismatch");
    }
    if (!(phi.grid() == v.profile.grid)) throw ValidationError("condition 1 residual: grid mismatch");
    const RVector& g = v.profile.values;
    double acc = 0.0;
    for (int j = 0; j < phi.grid().size(); ++j) {
        if (g(j) != 0.0) acc += g(j) * g(j) * std::norm(phi[j]);
    }
    const double b_omega = (v.coupling_operator.matrix() * omega.amplitudes()).norm();
    return b_omega * std::sqrt(phi.grid().spacing() * acc);
}

void ModelConfig::validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ValidationError("model: hbar must be positive");
    if (!(packet_width > 0.0)) throw ValidationError("model: packet width delta must be positive");
    if (!(packet_width < -grid.x_min())) {
        throw ValidationError("model: packet width delta must be smaller than |x_min|");
    }
    if (!(coupling_width > 0.0) || !(coupling_width < grid.x_max())) {
        throw ValidationError("model: coupling width Delta must satisfy 0 < Delta < x_max");
    }
    if (!std::isfinite(coupling_integral)) throw ValidationError("model: coupling integral not finite");
    if (!std::isfinite(carrier)) throw ValidationError("model: carrier wavenumber not finite");
    if (system_hamiltonian.dim() != coupling_operator.dim()) {
        throw ValidationError("model: H_s and B dimensions differ");
    }
}

ClockWaveFunction initial_packet(const ModelConfig& config) {
    return bump_packet(config.grid, config.packet_width, config.carrier);
}

Interaction build_interaction(const ModelConfig& config) {
    return Interaction{coupling_profile(config.grid, config.coupling_width, config.coupling_integral,
                                        config.coupling_shape),
                       config.coupling_operator};
}

void validate_no_wrap(const ModelConfig& config, double t_max, double t_min, std::optional<double> margin) {
    const double m = margin.value_or(2.0 * config.grid.spacing());
    const double need_right = t_max + config.coupling_width + m;
    if (need_right > config.grid.x_max()) {
        throw WrapError("wrap risk: t_max = " + std::to_string(t_max) + " needs x_max >= " +
                            std::to_string(need_right) + " (have " +
                            std::to_string(config.grid.x_max()) + ")",
                        need_right);
    }
    if (t_min < 0.0 && -config.packet_width + t_min < config.grid.x_min() + m) {
        throw WrapError("wrap risk: t_min = " + std::to_string(t_min) +
                            " pushes the packet through x_min = " + std::to_string(config.grid.x_min()),
                        need_right);
    }
}

}  // namespace qclock
