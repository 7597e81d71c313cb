#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spdelab/grid.hpp"

namespace spdelab {

/// Scalar reaction f, applied pointwise to the field (Nemytskii operator).
class Reaction {
public:
    using Fn = std::function<double(double)>;

    Reaction(std::string name, Fn value, Fn derivative = {});

    /// f(y) = -y (2 + sin y)
    static Reaction f1();
    /// f(y) = -(y^3 - 9 y), double well with stable points +-3
    static Reaction f2();
    static Reaction linear();
    static Reaction zero();
    /// One of "f1", "f2", "linear", "zero".
    static Reaction by_name(const std::string& name);

    const std::string& name() const { return name_; }
    double operator()(double y) const { return value_(y); }
    bool has_derivative() const { return static_cast<bool>(derivative_); }
    double derivative(double y) const;
    bool is_linear() const { return name_ == "linear"; }

    /// c * f, named "<c>*<name>".
    Reaction scaled(double c) const;

private:
    std::string name_;
    Fn value_;
    Fn derivative_;
};

/// A function of position with a printable description (noise level, initial state).
struct Profile {
    std::string description;
    std::function<double(double)> fn;

    double operator()(double y) const { return fn(y); }
    std::vector<double> sample(const GridSpec& grid) const;

    static Profile constant(double value);
    /// amplitude * sin(mode * pi * y / length)
    static Profile sine(double amplitude, int mode, double length);
};

/// Reaction intensity theta, either a constant or a space-time field theta(y, t).
class ReactionIntensity {
public:
    using Field = std::function<double(double, double)>;

    ReactionIntensity(double constant = 0.0);  // NOLINT(google-explicit-constructor)
    ReactionIntensity(std::string description, Field field);

    /// base + slope_y * y + slope_t * t
    static ReactionIntensity affine(double base, double slope_y, double slope_t);

    bool is_constant() const { return !field_; }
    double constant_value() const;
    double operator()(double y, double t) const { return field_ ? field_(y, t) : constant_; }
    const std::string& description() const { return description_; }

private:
    double constant_;
    std::string description_;
    Field field_;
};

/// dX = -nu (-Δ)^{alpha/2} X dt + theta f(X) dt + sigma(y) dW on (0, l) with
/// Dirichlet boundary, X_0 = x0, t in [0, horizon].
struct ModelSpec {
    DomainSpec dom;
    double nu = 0.01;
    ReactionIntensity theta = 0.0;
    Reaction reaction = Reaction::zero();
    Profile sigma = Profile::constant(1.0);
    double horizon = 1.0;
    Profile x0 = Profile::constant(0.0);

    void validate() const;
    /// Checks the model against a grid: same length, horizon, K <= M - 1, sigma > 0
    /// and x0 zero at both ends.
    void validate_for(const GridSpec& grid) const;
    std::string summary() const;
};

}  // namespace spdelab
