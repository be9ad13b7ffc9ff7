#pragma once

#include <functional>
#include <vector>

namespace fttsim {

/// Strictly proper SISO transfer function, coefficients in descending powers
/// of s. The default is the DC motor 1 / (0.5 s^2 + 6 s + 10).
struct TransferFunction {
    std::vector<double> num{1.0};
    std::vector<double> den{0.5, 6.0, 10.0};

    /// Throws ConfigError naming the offending field.
    void validate() const;

    bool operator==(const TransferFunction&) const = default;
};

/// Continuous LTI plant in controllable canonical form, advanced by
/// fixed-step classical RK4 under a zero-order-held input.
///
/// For den(s) = a_n s^n + ... + a_0 normalised to a monic polynomial and
/// num(s) = b_{n-1} s^{n-1} + ... + b_0 scaled by the same factor:
///   x_i' = x_{i+1} (i < n),  x_n' = -sum a_{i-1} x_i + u,  y = sum b_{i-1} x_i.
class LtiPlant {
public:
    explicit LtiPlant(const TransferFunction& tf = {}, double dt = 1e-4);

    /// Invoked after every integration substep with (elapsed since call start, y).
    using SubstepObserver = std::function<void(double, double)>;

    /// Advances by `duration` seconds in dt substeps; the final substep is
    /// shortened to land exactly on duration. Throws DivergenceError when the
    /// state becomes non-finite.
    void step(double duration, const SubstepObserver& observer = {});

    double output() const;
    void set_input(double u) { u_held_ = u; }
    double input() const { return u_held_; }

    double dt() const { return dt_; }
    std::size_t order() const { return state_.size(); }
    const std::vector<double>& state() const { return state_; }
    void set_state(std::vector<double> x);

    /// C (-A)^-1 B, i.e. b_0 / a_0 of the normalised polynomials.
    double dc_gain() const;

    /// min over non-zero poles of 1/|p|; +inf for a pure integrator chain.
    static double fastest_time_constant(const TransferFunction& tf);

private:
    void derivative(const std::vector<double>& x, std::vector<double>& dx) const;
    void rk4(double h);

    std::vector<double> a_;  // monic denominator tail: a_0 .. a_{n-1}
    std::vector<double> c_;  // output row: b_0 .. b_{n-1}
    std::vector<double> state_;
    double u_held_ = 0.0;
    double dt_;

    // RK4 scratch
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace fttsim
