#include "fttsim/reference.hpp"

#include <cmath>

#include "fttsim/errors.hpp"

namespace fttsim {

void ReferenceSpec::validate() const {
    if (!(wave_period > 0.0) || !std::isfinite(wave_period)) throw ConfigError("reference.wave_period must be > 0");
    if (!std::isfinite(amplitude_high)) throw ConfigError("reference.amplitude_high must be finite");
    if (!std::isfinite(amplitude_low)) throw ConfigError("reference.amplitude_low must be finite");
    if (!std::isfinite(phase)) throw ConfigError("reference.phase must be finite");
}

double reference(double t, const ReferenceSpec& spec) {
    double pos = std::fmod(t - spec.phase, spec.wave_period);
    if (pos < 0.0) pos += spec.wave_period;
    return pos < spec.wave_period / 2.0 ? spec.amplitude_high : spec.amplitude_low;
}

}  // namespace fttsim
