#pragma once

#include <cstdint>

namespace fttsim {

/// Tuning of the sampling-period adaptation loop. Gains are in seconds of
/// period per unit of deadline-miss-ratio error.
struct SamplerParams {
    double kp = 0.007;
    double ki = 0.006;
    double kd = 0.003;
    double rho_ref = 0.10;   // target deadline miss ratio
    double lambda = 0.7;     // forgetting factor of the DMR low-pass filter, (0, 1]
    double t_spa = 0.5;      // invocation interval, s
    double h_max = 0.030;    // s
    double h_min = 0.002;    // s

    /// Throws ConfigError naming the offending field.
    void validate() const;

    bool operator==(const SamplerParams&) const = default;
};

/// Adaptation memory kept by one sensor between invocations.
struct SamplerState {
    double e_prev = 0.0;    // e(j-1)
    double e_prev2 = 0.0;   // e(j-2)
    double rho_prev = 0.0;  // rho(j-1)
    double h = 0.010;       // h(j-1), s
    std::uint64_t j = 0;    // completed invocations

    static SamplerState initial(double h0) {
        SamplerState s;
        s.h = h0;
        return s;
    }
};

/// Deadline miss ratio over one invocation interval:
/// clamp(1 - successes/periods, 0, 1). Reports that spill over from the
/// previous interval can make successes exceed periods, hence the clamp.
/// With no released periods the previous ratio is held.
double measure_dmr(std::uint64_t periods, std::uint64_t successes, double rho_prev);

/// lambda * rho + (1 - lambda) * rho_prev.
double filtered_dmr(double rho, const SamplerState& st, const SamplerParams& p);

/// e(j) = rho_ref - filtered_dmr(rho). Does not mutate state.
double filter_error(double rho, const SamplerState& st, const SamplerParams& p);

/// Incremental (velocity-form) PID step on the DMR error:
///   dh = kp (e - e1) + ki e + kd (e - 2 e1 + e2).
/// A positive error (misses below target) yields dh > 0, which shortens the
/// period; a negative error lengthens it.
double period_delta(double e, const SamplerState& st, const SamplerParams& p);

/// h(j) = clamp(h(j-1) - dh, h_min, h_max). Shifts the error history,
/// stores and returns the new period. Does not touch rho_prev.
double adapt(double e, SamplerState& st, const SamplerParams& p);

struct AdaptationOutcome {
    double rho = 0.0;           // measured DMR of the closing interval
    double rho_filtered = 0.0;  // low-pass estimate used for the error
    double error = 0.0;
    double h = 0.0;             // period in force from now on
};

/// One complete invocation: measure, filter, adapt, then rho_prev <- rho.
/// `adapt_period` false only measures (fixed-period sampling keeps h).
AdaptationOutcome run_invocation(std::uint64_t periods, std::uint64_t successes, SamplerState& st,
                                 const SamplerParams& p, bool adapt_period = true);

}  // namespace fttsim
