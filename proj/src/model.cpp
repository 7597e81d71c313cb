#include "spdelab/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "spdelab/error.hpp"

namespace spdelab {

Reaction::Reaction(std::string name, Fn value, Fn derivative)
    : name_(std::move(name)), value_(std::move(value)), derivative_(std::move(derivative))
{
    require(static_cast<bool>(value_), "reaction needs a value function");
}

Reaction Reaction::f1()
{
    return Reaction(
        "f1", [](double y) { return -y * (2.0 + std::sin(y)); },
        [](double y) { return -(2.0 + std::sin(y)) - y * std::cos(y); });
}

Reaction Reaction::f2()
{
    return Reaction(
        "f2", [](double y) { return -(y * y * y - 9.0 * y); }, [](double y) { return -(3.0 * y * y - 9.0); });
}

Reaction Reaction::linear()
{
    return Reaction("linear", [](double y) { return y; }, [](double) { return 1.0; });
}

Reaction Reaction::zero()
{
    return Reaction("zero", [](double) { return 0.0; }, [](double) { return 0.0; });
}

Reaction Reaction::by_name(const std::string& name)
{
    if (name == "f1") return f1();
    if (name == "f2") return f2();
    if (name == "linear") return linear();
    if (name == "zero") return zero();
    fail(ErrorCode::InvalidArgument, "unknown reaction '" + name + "' (expected f1, f2, linear or zero)");
}

double Reaction::derivative(double y) const
{
    require(has_derivative(), "reaction has no derivative");
    return derivative_(y);
}

Reaction Reaction::scaled(double c) const
{
    std::ostringstream name;
    name << c << '*' << name_;
    Fn d;
    if (derivative_) d = [c, inner = derivative_](double y) { return c * inner(y); };
    return Reaction(name.str(), [c, inner = value_](double y) { return c * inner(y); }, d);
}

std::vector<double> Profile::sample(const GridSpec& grid) const
{
    std::vector<double> out(grid.M + 1);
    for (std::size_t j = 0; j <= grid.M; ++j) out[j] = fn(grid.node(j));
    return out;
}

Profile Profile::constant(double value)
{
    std::ostringstream d;
    d.precision(17);
    d << value;
    return {d.str(), [value](double) { return value; }};
}

Profile Profile::sine(double amplitude, int mode, double length)
{
    std::ostringstream d;
    d.precision(17);
    d << amplitude << "*sin(" << mode << "*pi*y/" << length << ")";
    const double w = mode * std::numbers::pi / length;
    return {d.str(), [amplitude, w](double y) { return amplitude * std::sin(w * y); }};
}

ReactionIntensity::ReactionIntensity(double constant) : constant_(constant)
{
    std::ostringstream d;
    d.precision(17);
    d << constant;
    description_ = d.str();
}

ReactionIntensity::ReactionIntensity(std::string description, Field field)
    : constant_(0.0), description_(std::move(description)), field_(std::move(field))
{
    require(static_cast<bool>(field_), "reaction intensity field must be callable");
}

ReactionIntensity ReactionIntensity::affine(double base, double slope_y, double slope_t)
{
    if (slope_y == 0.0 && slope_t == 0.0) return ReactionIntensity(base);
    std::ostringstream d;
    d.precision(17);
    d << base << "+" << slope_y << "*y+" << slope_t << "*t";
    return ReactionIntensity(d.str(), [=](double y, double t) { return base + slope_y * y + slope_t * t; });
}

double ReactionIntensity::constant_value() const
{
    require(is_constant(), "reaction intensity is a space-time field, not a constant");
    return constant_;
}

void ModelSpec::validate() const
{
    dom.validate();
    require(std::isfinite(nu) && nu >= 0.0, "diffusivity nu must be >= 0");
    require(std::isfinite(horizon) && horizon > 0.0, "horizon T must be > 0");
    require(static_cast<bool>(sigma.fn), "noise level sigma must be set");
    require(static_cast<bool>(x0.fn), "initial condition x0 must be set");
}

void ModelSpec::validate_for(const GridSpec& grid) const
{
    validate();
    grid.validate();
    if (grid.length != dom.length || grid.horizon != horizon) {
        fail(ErrorCode::GridMismatch, "grid length/horizon differ from the model's");
    }
    require(dom.modes <= grid.M - 1, "spectral truncation K must not exceed M - 1");
    for (std::size_t j = 0; j <= grid.M; ++j) {
        const double s = sigma(grid.node(j));
        require(std::isfinite(s) && s > 0.0, "noise level sigma must be > 0 at every node");
    }
    require(std::abs(x0(0.0)) <= 1e-12 && std::abs(x0(dom.length)) <= 1e-12,
            "initial condition must vanish at the boundary");
}

std::string ModelSpec::summary() const
{
    std::ostringstream s;
    s.precision(17);
    s << "l=" << dom.length << ";alpha=" << dom.alpha << ";K=" << dom.modes << ";nu=" << nu
      << ";theta=" << theta.description() << ";f=" << reaction.name() << ";sigma=" << sigma.description
      << ";T=" << horizon << ";x0=" << x0.description;
    return s.str();
}

}  // namespace spdelab
