#include "qclock/model.hpp"
#include "qclock/propagator.hpp"

namespace qclock {

bool condition2_witness(const ModelConfig& config, double t_probe, double dt) {
    if (!(t_probe > 0.0)) throw ValidationError("condition 2: t_probe must be positive");
    config.validate();
    validate_no_wrap(config, t_probe);
    const Interaction v = build_interaction(config);
    const ClockWaveFunction phi0 = initial_packet(config);
    const StrangPropagator prop(config);
    for (int a = 0; a < config.system_dim(); ++a) {
        CompositeState theta = CompositeState::product(phi0, PureState::basis(config.system_dim(), a));
        prop.advance(theta, t_probe, std::min(dt, t_probe));
        if (interaction_norm(theta, v) > 1e-8) return true;
    }
    return false;
}

}  // namespace qclock
