#include "fttsim/plant.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "fttsim/errors.hpp"

namespace fttsim {

void TransferFunction::validate() const {
    if (den.size() < 2) throw ConfigError("plant.den must have degree >= 1");
    if (den.front() == 0.0) throw ConfigError("plant.den leading coefficient must be non-zero");
    if (num.empty()) throw ConfigError("plant.num must not be empty");
    for (double v : den) {
        if (!std::isfinite(v)) throw ConfigError("plant.den coefficients must be finite");
    }
    for (double v : num) {
        if (!std::isfinite(v)) throw ConfigError("plant.num coefficients must be finite");
    }
    // Leading zeros in num are allowed; the effective degree must be below den's.
    std::size_t lead = 0;
    while (lead + 1 < num.size() && num[lead] == 0.0) ++lead;
    if (num.size() - lead >= den.size()) throw ConfigError("plant.num: transfer function must be strictly proper");
}

LtiPlant::LtiPlant(const TransferFunction& tf, double dt) : dt_(dt) {
    tf.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("plant.dt must be > 0");
    const std::size_t n = tf.den.size() - 1;
    const double lead = tf.den.front();
    a_.resize(n);
    for (std::size_t i = 0; i < n; ++i) a_[i] = tf.den[n - i] / lead;
    c_.assign(n, 0.0);
    for (std::size_t i = 0; i < tf.num.size(); ++i) {
        const std::size_t power = tf.num.size() - 1 - i;
        if (power < n) c_[power] = tf.num[i] / lead;
    }
    state_.assign(n, 0.0);
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);
}

void LtiPlant::set_state(std::vector<double> x) {
    if (x.size() != state_.size()) throw std::invalid_argument("LtiPlant::set_state: wrong state dimension");
    state_ = std::move(x);
}

double LtiPlant::output() const {
    double y = 0.0;
    for (std::size_t i = 0; i < state_.size(); ++i) y += c_[i] * state_[i];
    return y;
}

double LtiPlant::dc_gain() const {
    if (a_.front() == 0.0) return std::numeric_limits<double>::infinity();
    return c_.front() / a_.front();
}

double LtiPlant::fastest_time_constant(const TransferFunction& tf) {
    tf.validate();
    const auto n = static_cast<Eigen::Index>(tf.den.size() - 1);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) companion(i, i + 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) companion(n - 1, i) = -tf.den[static_cast<std::size_t>(n - i)] / tf.den.front();
    const Eigen::VectorXcd poles = companion.eigenvalues();
    double tau = std::numeric_limits<double>::infinity();
    for (const auto& p : poles) {
        const double mag = std::abs(p);
        if (mag > 0.0) tau = std::min(tau, 1.0 / mag);
    }
    return tau;
}

void LtiPlant::derivative(const std::vector<double>& x, std::vector<double>& dx) const {
    const std::size_t n = x.size();
    double last = u_held_;
    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n) dx[i] = x[i + 1];
        last -= a_[i] * x[i];
    }
    dx[n - 1] = last;
}

void LtiPlant::rk4(double h) {
    const std::size_t n = state_.size();
    derivative(state_, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = state_[i] + 0.5 * h * k1_[i];
    derivative(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = state_[i] + 0.5 * h * k2_[i];
    derivative(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = state_[i] + h * k3_[i];
    derivative(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) {
        state_[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        if (!std::isfinite(state_[i])) throw DivergenceError("plant state became non-finite");
    }
}

void LtiPlant::step(double duration, const SubstepObserver& observer) {
    if (duration < 0.0 || !std::isfinite(duration)) {
        throw std::invalid_argument("LtiPlant::step: duration must be finite and >= 0");
    }
    // Substep count tolerates a remainder below 1e-9 dt so that durations that
    // are whole multiples of dt in exact arithmetic do not end in a vanishing step.
    const auto full = static_cast<long long>(std::floor(duration / dt_ + 1e-9));
    const double rest = duration - static_cast<double>(full) * dt_;
    const bool partial = rest > 1e-9 * dt_;
    for (long long k = 0; k < full; ++k) {
        const bool last = !partial && k + 1 == full;
        rk4(last ? duration - static_cast<double>(k) * dt_ : dt_);
        if (observer) observer(last ? duration : static_cast<double>(k + 1) * dt_, output());
    }
    if (partial) {
        rk4(rest);
        if (observer) observer(duration, output());
    }
}

}  // namespace fttsim
