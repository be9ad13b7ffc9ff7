#include "fttsim/pid.hpp"

#include <cmath>
#include <stdexcept>

namespace fttsim {

double pid_step(double r, double y, double h, ControllerState& state, const PidGains& gains) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("pid_step: sampling period must be > 0");
    const double err = r - y;
    const double p = gains.kp * err;
    const double i = state.i_term + gains.ki * h * (err + state.prev_err) / 2.0;
    const double d = gains.kd * (err - state.prev_err) / h;
    state.i_term = i;
    state.prev_err = err;
    return p + i + d;
}

}  // namespace fttsim
