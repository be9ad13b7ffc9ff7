#pragma once

namespace fttsim {

/// Square-wave set point.
struct ReferenceSpec {
    double wave_period = 4.0;
    double amplitude_high = 1.0;
    double amplitude_low = 0.0;
    double phase = 0.0;

    void validate() const;
    bool operator==(const ReferenceSpec&) const = default;
};

/// High during the first half of each wave period (measured from `phase`),
/// low during the second half.
double reference(double t, const ReferenceSpec& spec);

}  // namespace fttsim
