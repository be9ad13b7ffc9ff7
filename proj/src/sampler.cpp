#include "fttsim/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "fttsim/errors.hpp"

namespace fttsim {

void SamplerParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(kp) || kp < 0.0) throw ConfigError("sampler.kp must be finite and >= 0");
    if (!finite(ki) || ki < 0.0) throw ConfigError("sampler.ki must be finite and >= 0");
    if (!finite(kd) || kd < 0.0) throw ConfigError("sampler.kd must be finite and >= 0");
    if (!(rho_ref >= 0.0 && rho_ref <= 1.0)) throw ConfigError("sampler.rho_ref must lie in [0, 1]");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("sampler.lambda must lie in (0, 1]");
    if (!(t_spa > 0.0) || !finite(t_spa)) throw ConfigError("sampler.t_spa must be > 0");
    if (!(h_min > 0.0) || !finite(h_min)) throw ConfigError("sampler.h_min must be > 0");
    if (!(h_max > h_min) || !finite(h_max)) throw ConfigError("sampler.h_max must exceed sampler.h_min");
}

double measure_dmr(std::uint64_t periods, std::uint64_t successes, double rho_prev) {
    if (periods == 0) return rho_prev;
    const double ratio = 1.0 - static_cast<double>(successes) / static_cast<double>(periods);
    return std::clamp(ratio, 0.0, 1.0);
}

double filtered_dmr(double rho, const SamplerState& st, const SamplerParams& p) {
    return p.lambda * rho + (1.0 - p.lambda) * st.rho_prev;
}

double filter_error(double rho, const SamplerState& st, const SamplerParams& p) {
    return p.rho_ref - filtered_dmr(rho, st, p);
}

double period_delta(double e, const SamplerState& st, const SamplerParams& p) {
    return p.kp * (e - st.e_prev) + p.ki * e + p.kd * (e - 2.0 * st.e_prev + st.e_prev2);
}

double adapt(double e, SamplerState& st, const SamplerParams& p) {
    const double dh = period_delta(e, st, p);
    st.h = std::clamp(st.h - dh, p.h_min, p.h_max);
    st.e_prev2 = st.e_prev;
    st.e_prev = e;
    ++st.j;
    return st.h;
}

AdaptationOutcome run_invocation(std::uint64_t periods, std::uint64_t successes, SamplerState& st,
                                 const SamplerParams& p, bool adapt_period) {
    AdaptationOutcome out;
    out.rho = measure_dmr(periods, successes, st.rho_prev);
    out.rho_filtered = filtered_dmr(out.rho, st, p);
    out.error = filter_error(out.rho, st, p);
    if (adapt_period) {
        adapt(out.error, st, p);
    } else {
        ++st.j;
    }
    st.rho_prev = out.rho;
    out.h = st.h;
    return out;
}

}  // namespace fttsim
