#pragma once

// Discretized clock world: a periodic 1-D grid carrying the clock wave
// function (H_c = p), compactly supported packets and coupling profiles,
// and the structural checks on the clock-system interaction.

#include <optional>
#include <string>
#include <string_view>

#include "qclock/statelib.hpp"

namespace qclock {

/// Uniform periodic grid.  Positions x_j = x_min + j h, wavenumbers in the
/// standard DFT layout (mode n/2 carries -pi/h).
class Grid {
public:
    Grid(double x_min, double x_max, int n);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    int size() const { return n_; }
    double spacing() const { return h_; }
    double length() const { return x_max_ - x_min_; }

    double position(int j) const { return x_min_ + j * h_; }
    double wavenumber(int j) const;

    RVector positions() const;
    RVector wavenumbers() const;

    bool operator==(const Grid&) const = default;

private:
    double x_min_;
    double x_max_;
    int n_;
    double h_;
};

Grid build_grid(double x_min, double x_max, int n);

/// Clock amplitudes on the grid, normalized so that h sum |psi_j|^2 = 1.
class ClockWaveFunction {
public:
    ClockWaveFunction(Grid grid, CVector amplitudes);

    const Grid& grid() const { return grid_; }
    const CVector& amplitudes() const { return amps_; }
    cplx operator[](int j) const { return amps_(j); }

    double norm() const;
    /// Grid inner product (this, other) = h sum conj(this_j) other_j.
    cplx inner(const ClockWaveFunction& other) const;

private:
    Grid grid_;
    CVector amps_;
};

/// Grid inner product h sum conj(a_j) b_j.
cplx grid_inner(const Grid& grid, const CVector& a, const CVector& b);

enum class CouplingShape { Bump, FlatTop };

std::string_view to_string(CouplingShape shape);
CouplingShape coupling_shape_from_string(std::string_view name);

/// Smooth window on (-1, 1) with every derivative vanishing at the ends.
double shape_value(CouplingShape shape, double u);

struct CouplingProfile {
    Grid grid;
    RVector values;  // g(x_j), zero outside (0, width)
    double width;    // Delta
    double integral; // h sum g_j
    CouplingShape shape;
    bool degenerate; // g identically zero
};

/// Real profile on (0, width) scaled so that h sum g_j = target.
CouplingProfile coupling_profile(const Grid& grid, double width, double target,
                                 CouplingShape shape = CouplingShape::Bump);

/// exp(-1/(1-u^2)) e^{i k0 x} on (-width, 0) with u = (2x + width)/width, normalized.
ClockWaveFunction bump_packet(const Grid& grid, double width, double carrier);

struct ClockEnergyStats {
    double mean;
    double spread; // Delta H_c
};

/// Mean and standard deviation of H_c = p in `phi`, evaluated spectrally.
ClockEnergyStats clock_energy_stats(const ClockWaveFunction& phi, double hbar);

/// V = g(x) (x) B.
struct Interaction {
    CouplingProfile profile;
    HermitianOperator coupling_operator;
};

/// ||V (phi (x) omega)|| = ||B omega|| sqrt(h sum g_j^2 |phi_j|^2).
double condition1_residual(const ClockWaveFunction& phi, const PureState& omega,
                           const Interaction& v);

struct ModelConfig {
    Grid grid{-4.0, 12.0, 4096};
    double packet_width = 1.0;   // delta
    double carrier = 0.0;        // k0
    double coupling_width = 1.0; // Delta
    double coupling_integral = 0.0;
    CouplingShape coupling_shape = CouplingShape::Bump;
    HermitianOperator system_hamiltonian = HermitianOperator::zero(2);
    HermitianOperator coupling_operator = HermitianOperator::pauli_z();
    double hbar = 1.0;

    int system_dim() const { return system_hamiltonian.dim(); }
    /// Throws ValidationError on violated physical constraints.
    void validate() const;
};

ClockWaveFunction initial_packet(const ModelConfig& config);
Interaction build_interaction(const ModelConfig& config);

class WrapError : public ValidationError {
public:
    WrapError(const std::string& what, double min_x_max)
        : ValidationError(what), min_x_max_(min_x_max) {}
    double min_x_max() const { return min_x_max_; }

private:
    double min_x_max_;
};

/// Ensures the packet stays inside the periodic box for t in [t_min, t_max]:
/// t_max + Delta + margin <= x_max (inclusive) and, for t_min < 0,
/// -delta + t_min >= x_min + margin.  margin defaults to 2h.
void validate_no_wrap(const ModelConfig& config, double t_max, double t_min = 0.0,
                      std::optional<double> margin = std::nullopt);

/// True iff ||V e^{-iHt/hbar}(phi_c(0) (x) Omega)|| > 1e-8 for some basis state Omega.
bool condition2_witness(const ModelConfig& config, double t_probe, double dt = 1e-3);

}  // namespace qclock
