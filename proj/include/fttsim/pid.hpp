#pragma once

namespace fttsim {

/// Loop controller gains; defaults are those of the DC motor benchmark.
struct PidGains {
    double kp = 100.0;
    double ki = 200.0;
    double kd = 2.0;

    bool operator==(const PidGains&) const = default;
};

struct ControllerState {
    double i_term = 0.0;
    double prev_err = 0.0;

    void reset() { *this = ControllerState{}; }
};

/// One step of the period-aware PID law. The sampling period h travels with
/// the sample, so the integral (trapezoidal) and derivative (backward
/// difference) terms follow period changes:
///   err = r - y
///   I   = I_prev + ki * h * (err + err_prev) / 2
///   u   = kp * err + I + kd * (err - err_prev) / h
/// Throws std::invalid_argument if h <= 0.
double pid_step(double r, double y, double h, ControllerState& state, const PidGains& gains = {});

}  // namespace fttsim
