#include <doctest.h>

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <vector>

#include "spdelab/error.hpp"
#include "spdelab/estimators.hpp"
#include "spdelab/mesh.hpp"
#include "spdelab/nonparametric.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/simulator.hpp"
#include "spdelab/spectral.hpp"

using namespace spdelab;
using boost::math::constants::pi;

namespace {

ModelSpec f1_model(std::size_t M, double nu, double theta)
{
    ModelSpec m;
    m.dom = DomainSpec::for_grid(1.0, 2.0, M);
    m.nu = nu;
    m.theta = theta;
    m.reaction = Reaction::f1();
    return m;
}

const Trajectory& small_f1()
{
    static const Trajectory traj = simulate(f1_model(64, 0.02, 3.0), GridSpec{64, 2048, 1.0, 1.0}, 2024);
    return traj;
}

}  // namespace

TEST_CASE("confidence interval")
{
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    auto ci = confidence_interval(3.0, 400.0, 0.05);
    CHECK(ci.lo == doctest::Approx(3.0 - 1.959964 / 20).epsilon(1e-7));
    CHECK(ci.hi == doctest::Approx(3.0 + 1.959964 / 20).epsilon(1e-7));
    CHECK(ci.lo == doctest::Approx(2.90200).epsilon(1e-5));
    CHECK(ci.hi == doctest::Approx(3.09800).epsilon(1e-5));
    CHECK(3.0 - ci.lo == doctest::Approx(ci.hi - 3.0).epsilon(1e-15));

    auto narrow = confidence_interval(3.0, 400.0, 1.0 - 1e-9);
    CHECK(narrow.hi - narrow.lo < 1e-9);

    CHECK_THROWS_AS(confidence_interval(3.0, 0.0, 0.05), Error);
    CHECK_THROWS_AS(confidence_interval(3.0, -1.0, 0.05), Error);
    CHECK_THROWS_AS(confidence_interval(3.0, 1.0, 0.0), Error);

    double prev = 1e300;
    for (double I : {0.5, 1.0, 10.0, 100.0, 1e4}) {
        auto c = confidence_interval(0.0, I, 0.05);
        CHECK(c.hi - c.lo < prev);
        prev = c.hi - c.lo;
    }
}

TEST_CASE("noiseless consistency")
{
    const std::size_t M = 256;
    GridSpec grid{M, 10000, 1.0, 1.0};
    ModelSpec m = f1_model(M, 0.01, 3.0);
    m.x0 = Profile::sine(2.0, 1, 1.0);
    SimulationOptions off;
    off.noise_scale = 0.0;
    auto traj = simulate(m, grid, 1, off);
    auto est = estimate_global(traj, KnownPhysics::from_model(m, ForwardPolicy::ImplicitEuler), 0.05);
    CHECK(std::abs(est.theta_hat - 3.0) < 1e-3);
    CHECK(est.n_increments == grid.N - 1);
}

TEST_CASE("single mode reduces to the OU estimator")
{
    const std::size_t M = 16;
    GridSpec grid{M, 1000, 1.0, 1.0};
    ModelSpec m;
    m.dom = {1.0, 2.0, 1};
    m.nu = 0.05;
    m.theta = 1.5;
    m.reaction = Reaction::linear();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto traj = simulate(m, grid, seed);
        auto est = estimate_global(traj, KnownPhysics::from_model(m, ForwardPolicy::ExplicitEuler), 0.05);

        std::vector<double> times, path;
        SineTransform dst(M, 1.0);
        std::vector<double> c(1);
        for (std::size_t k = 1; k <= grid.N; ++k) {
            dst.forward(traj.row(k), c);
            times.push_back(grid.time(k));
            path.push_back(c[0]);
        }
        const double ou = ou_mle(times, path, m.nu, pi<double>() * pi<double>());
        CHECK(std::abs(est.theta_hat - ou) < 1e-10);
    }
}

TEST_CASE("ou_mle")
{
    std::vector<double> t{0.0, 0.1, 0.2};
    CHECK_THROWS_AS(ou_mle(t, std::vector<double>{0.0, 0.0, 0.0}, 1.0, 1.0), Error);
    CHECK_THROWS_AS(ou_mle(t, std::vector<double>{1.0, 2.0}, 1.0, 1.0), Error);
    // hand computed: x = (1, 2), dt = 0.5, nu mu = 0.4 -> (2 - 1 + 0.2) / 0.5
    std::vector<double> tt{0.0, 0.5};
    CHECK(ou_mle(tt, std::vector<double>{1.0, 2.0}, 0.4, 1.0) == doctest::Approx(2.4).epsilon(1e-15));
    CHECK(ou_mle(tt, std::vector<double>{1.0, 2.0}, 0.4, 1.0, ForwardPolicy::ImplicitEuler) ==
          doctest::Approx((2.0 - 1.0 / 1.2) / 0.5).epsilon(1e-15));
}

TEST_CASE("zero reaction has no information")
{
    ModelSpec m = f1_model(32, 0.05, 0.0);
    m.reaction = Reaction::zero();
    auto traj = simulate(m, GridSpec{32, 64, 1.0, 1.0}, 3);
    try {
        estimate_global(traj, KnownPhysics::from_model(m, ForwardPolicy::Exact), 0.05);
        FAIL("expected ZeroInformation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroInformation);
    }
}

TEST_CASE("localization")
{
    const auto& traj = small_f1();
    ModelSpec m = f1_model(64, 0.02, 3.0);
    auto phys = KnownPhysics::from_model(m, ForwardPolicy::ImplicitEuler);
    auto global = estimate_global(traj, phys, 0.05);

    auto full = estimate_localized(traj, phys, Window::full(1.0, 1.0), 0.05);
    CHECK(full.theta_hat == global.theta_hat);
    CHECK(full.fisher == global.fisher);
    CHECK(full.n_increments == global.n_increments);
    REQUIRE(full.window.has_value());

    for (double dy : {0.1, 0.5, 0.9}) {
        for (double dt : {0.05, 0.25, 0.5}) {
            auto loc = estimate_localized(traj, phys, Window{0.5, 0.5, dy, dt}, 0.05);
            CHECK(loc.fisher <= global.fisher);
            CHECK(loc.n_increments <= global.n_increments);
        }
    }

    // off-centre window stays inside the domain
    auto edge = resolve_window(traj.grid, Window{0.1, 0.5, 0.5, 0.25});
    CHECK(edge.node_lo == 4);  // 0.05 * 64 = 3.2
    CHECK(edge.node_hi == 35);  // 0.55 * 64 = 35.2
    CHECK(edge.step_lo == 513);
    CHECK(edge.step_hi == 1535);

    auto code_of = [&](Window w) {
        try {
            resolve_window(traj.grid, w);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    CHECK(code_of(Window{0.5, 0.5, 1e-4, 0.25}) == ErrorCode::EmptyWindow);
    CHECK(code_of(Window{0.5, 0.50024, 0.5, 1e-5}) == ErrorCode::EmptyWindow);
    CHECK(code_of(Window{0.5, 0.5, 1.5, 0.25}) == ErrorCode::InvalidArgument);
    CHECK(code_of(Window{0.5, 0.2, 0.5, 0.25}) == ErrorCode::InvalidArgument);
}

TEST_CASE("information additivity over a time partition")
{
    const auto& traj = small_f1();
    ModelSpec m = f1_model(64, 0.02, 3.0);
    auto phys = KnownPhysics::from_model(m, ForwardPolicy::Exact);
    const auto& g = traj.grid;
    std::vector<QuadratureRegion> parts{{0, g.M, 1, 700}, {0, g.M, 701, 1500}, {0, g.M, 1501, g.N - 1}};
    std::vector<QuadratureRegion> all = parts;
    all.push_back(global_region(g));
    IncrementAccumulator acc(phys, g, all);
    for (std::size_t k = 0; k < traj.rows(); ++k) acc.observe(k, traj.row(k));
    const double sum = acc.information(0) + acc.information(1) + acc.information(2);
    CHECK(sum == doctest::Approx(acc.information(3)).epsilon(1e-14));
    const double num = acc.numerator(0) + acc.numerator(1) + acc.numerator(2);
    CHECK(num == doctest::Approx(acc.numerator(3)).epsilon(1e-12));
    CHECK(acc.increments(0) + acc.increments(1) + acc.increments(2) == acc.increments(3));

    CHECK_THROWS_AS(acc.observe(0, traj.row(0)), Error);
}

TEST_CASE("scale equivariance")
{
    const auto& traj = small_f1();
    ModelSpec m = f1_model(64, 0.02, 3.0);
    auto phys = KnownPhysics::from_model(m, ForwardPolicy::ImplicitEuler);
    auto base = estimate_global(traj, phys, 0.05);
    for (double c : {0.5, 2.0, 7.0}) {
        auto scaled = phys;
        scaled.reaction = phys.reaction.scaled(c);
        auto est = estimate_global(traj, scaled, 0.05);
        CHECK(est.theta_hat == doctest::Approx(base.theta_hat / c).epsilon(1e-13));
        CHECK(est.fisher == doctest::Approx(c * c * base.fisher).epsilon(1e-13));
    }
}

TEST_CASE("grid mismatch")
{
    const auto& traj = small_f1();
    ModelSpec m = f1_model(64, 0.02, 3.0);
    auto phys = KnownPhysics::from_model(m, ForwardPolicy::ImplicitEuler);
    auto bad = phys;
    bad.dom.length = 2.0;
    CHECK_THROWS_AS(estimate_global(traj, bad, 0.05), Error);
    bad = phys;
    bad.dom.alpha = 1.5;
    CHECK_THROWS_AS(estimate_global(traj, bad, 0.05), Error);
    Trajectory broken = traj;
    broken.values.pop_back();
    try {
        estimate_global(broken, phys, 0.05);
        FAIL("expected GridMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GridMismatch);
    }
}

TEST_CASE("bandwidths")
{
    auto bw = optimal_bandwidths(1.0, 1.0, 16.0);
    CHECK(bw.eta_eff == doctest::Approx(0.5));
    CHECK(bw.delta_y == doctest::Approx(std::pow(16.0, -0.25)).epsilon(1e-15));
    CHECK(bw.delta_t == doctest::Approx(std::pow(16.0, -0.25)).epsilon(1e-15));

    auto an = optimal_bandwidths(1.0, 0.5, 100.0);
    CHECK(an.eta_eff == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(an.delta_t == doctest::Approx(std::pow(100.0, -0.4)).epsilon(1e-14));
    CHECK(an.delta_y == doctest::Approx(std::pow(100.0, -0.2)).epsilon(1e-14));

    CHECK(nonparametric_rate_exponent(1.0, 1.0) == doctest::Approx(0.25));
    CHECK_THROWS_AS(optimal_bandwidths(0.0, 1.0, 10.0), Error);
    CHECK_THROWS_AS(optimal_bandwidths(1.0, -1.0, 10.0), Error);
    CHECK_THROWS_AS(optimal_bandwidths(1.0, 1.0, 1.0), Error);
}

TEST_CASE("nonparametric estimates")
{
    const auto& traj = small_f1();
    ModelSpec m = f1_model(64, 0.02, 3.0);
    auto phys = KnownPhysics::from_model(m, ForwardPolicy::ImplicitEuler);

    bool clipped = false;
    auto w = clipped_window({0.5, 0.1}, Bandwidths{1.5, 0.3, 0.5}, 1.0, clipped);
    CHECK(clipped);
    CHECK(w.delta_y == 1.0);
    CHECK(w.delta_t == doctest::Approx(0.1));
    clipped_window({0.5, 0.5}, Bandwidths{0.2, 0.3, 0.5}, 1.0, clipped);
    CHECK_FALSE(clipped);

    NonparamSpec spec;
    spec.points = {{0.5, 0.5}, {0.25, 0.8}, {0.5, 0.9999}, {0.0, 0.5}};
    auto out = estimate_nonparametric(traj, phys, spec);
    REQUIRE(out.size() == 4);
    auto bw = requested_bandwidths(spec, phys, 1.0);
    CHECK(bw.delta_y == doctest::Approx(std::pow(phi(0.02, 1.0, m.dom), -0.25)).epsilon(1e-14));

    REQUIRE(out[0].result.has_value());
    auto direct = estimate_localized(traj, phys, out[0].window, 0.05);
    CHECK(out[0].result->theta_hat == direct.theta_hat);
    CHECK(out[0].result->fisher == direct.fisher);
    CHECK(out[1].result.has_value());
    CHECK(out[1].clipped);
    // t0 next to T leaves no increment; y0 on the boundary is rejected
    CHECK(out[2].error == ErrorCode::EmptyWindow);
    CHECK(out[2].clipped);
    CHECK(out[3].error == ErrorCode::InvalidArgument);
    CHECK_FALSE(out[3].message.empty());

    spec.bandwidths = Bandwidths{0.3, 0.2, 0};
    auto fixed = estimate_nonparametric(traj, phys, spec);
    CHECK(fixed[0].window.delta_y == 0.3);
    CHECK(fixed[0].window.delta_t == 0.2);
}

TEST_CASE("spectral estimator")
{
    const std::size_t M = 32;
    GridSpec grid{M, 4096, 1.0, 1.0};
    ModelSpec m;
    m.dom = DomainSpec::for_grid(1.0, 2.0, M);
    m.nu = 0.01;
    m.theta = 1.0;
    m.reaction = Reaction::linear();
    auto traj = simulate(m, grid, 77);
    auto phys = KnownPhysics::from_model(m, ForwardPolicy::ExplicitEuler);

    CHECK(default_mode_count(0.01, m.dom) == 3);  // 0.01 * (3 pi)^2 = 0.89
    CHECK(default_mode_count(10.0, m.dom) == 1);
    CHECK(default_mode_count(1e-9, m.dom) == M - 1);

    auto est = estimate_spectral(traj, phys, 10);
    CHECK(std::abs(est.theta_hat - 1.0) < 5.0 * est.standard_error);

    // one mode equals ou_mle over the full path
    std::vector<double> times, path;
    SineTransform dst(M, 1.0);
    std::vector<double> c(1);
    for (std::size_t k = 0; k <= grid.N; ++k) {
        dst.forward(traj.row(k), c);
        times.push_back(grid.time(k));
        path.push_back(c[0]);
    }
    auto one = estimate_spectral(traj, phys, 1);
    CHECK(one.theta_hat == doctest::Approx(ou_mle(times, path, 0.01, pi<double>() * pi<double>())).epsilon(1e-12));

    auto f1 = phys;
    f1.reaction = Reaction::f1();
    CHECK_THROWS_AS(estimate_spectral(traj, f1, 3), Error);
    CHECK_THROWS_AS(estimate_spectral(traj, phys, M), Error);
}

TEST_CASE("mesh checker")
{
    MeshPolicy p;
    const double nu = 0.01;
    auto pass = check_mesh_time(nu, std::pow(nu, 1.1), p);
    CHECK(pass.exponent_t == doctest::Approx(1.0 / 0.96).epsilon(1e-15));
    CHECK(pass.ratio_t == doctest::Approx(std::pow(nu, 1.1 - 1.0 / 0.96)).epsilon(1e-13));
    CHECK(pass.ratio_t == doctest::Approx(0.7644).epsilon(1e-4));
    CHECK(pass.status == MeshStatus::Pass);

    auto warn = check_mesh_time(nu, std::pow(nu, 0.5), p);
    CHECK(warn.ratio_t == doctest::Approx(12.115).epsilon(1e-3));
    CHECK(warn.status == MeshStatus::Warn);

    // with a spatial mesh: r_y needs delta_y below nu^{1.1538} delta_t^{2.564}
    auto fine = check_mesh(nu, std::pow(nu, 1.1), 1e-9, p);
    CHECK(fine.status == MeshStatus::Pass);
    auto coarse = check_mesh(nu, std::pow(nu, 1.1), 1.0 / 256, p);
    CHECK(coarse.status == MeshStatus::Warn);
    CHECK(coarse.ratio_t == pass.ratio_t);

    auto one = check_mesh(1.0, 0.5, 0.5, p);
    CHECK(std::isfinite(one.ratio_t));
    CHECK(std::isfinite(one.ratio_y));

    CHECK_THROWS_AS(check_mesh(nu, 0.1, 0.1, MeshPolicy{2.0, 0.25, 0.2, 100.0, 0.4}), Error);
    CHECK_THROWS_AS(check_mesh(nu, 0.1, 0.1, MeshPolicy{2.0, 0.24, 0.245, 100.0, 0.4}), Error);
    CHECK_THROWS_AS(check_mesh(nu, 0.1, 0.1, MeshPolicy{2.0, 0.24, 0.2, 2.0, 0.4}), Error);
    CHECK_THROWS_AS(check_mesh(0.0, 0.1, 0.1, p), Error);
    CHECK(std::string(mesh_status_name(MeshStatus::Pass)) == "PASS");
}
