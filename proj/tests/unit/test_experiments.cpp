#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "spdelab/error.hpp"
#include "spdelab/experiments.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/statistics.hpp"

using namespace spdelab;

namespace {

MCConfig tiny_config()
{
    MCConfig c;
    c.model.dom = DomainSpec::for_grid(1.0, 2.0, 16);
    c.model.theta = 3.0;
    c.model.reaction = Reaction::f1();
    c.grid = GridSpec{16, 256, 1.0, 1.0};
    c.nus = {0.1, 0.02, 0.01};
    c.runs = 6;
    c.base_seed = 5;
    c.estimator.kind = EstimatorKind::Global;
    c.threads = 1;
    return c;
}

void check_same(const MCResult& a, const MCResult& b)
{
    REQUIRE(a.per_nu.size() == b.per_nu.size());
    for (std::size_t i = 0; i < a.per_nu.size(); ++i) {
        const auto& x = a.per_nu[i];
        const auto& y = b.per_nu[i];
        CHECK(x.mse == y.mse);
        CHECK(x.bias == y.bias);
        CHECK(x.variance == y.variance);
        REQUIRE(x.runs.size() == y.runs.size());
        for (std::size_t r = 0; r < x.runs.size(); ++r) {
            CHECK(x.runs[r].seed == y.runs[r].seed);
            CHECK(x.runs[r].theta_hat == y.runs[r].theta_hat);
            CHECK(x.runs[r].fisher == y.runs[r].fisher);
        }
    }
}

}  // namespace

TEST_CASE("pairwise sum and moments")
{
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    CHECK(pairwise_sum(std::vector<double>{2.5}) == 2.5);
    std::vector<double> seq(1000);
    for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = 0.1 * static_cast<double>(i);
    CHECK(pairwise_sum(seq) == doctest::Approx(49950.0).epsilon(1e-14));
    auto m = moments(std::vector<double>{1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == 2.5);
    CHECK(m.variance == doctest::Approx(1.25));
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("rate fit")
{
    std::vector<std::pair<double, double>> pts;
    for (double nu : {0.1, 0.05, 0.02, 0.01, 0.005}) pts.emplace_back(nu, 7.0 * std::pow(nu, 0.5));
    auto f = fit_rate(pts);
    CHECK(std::abs(f.slope - 0.5) < 1e-12);
    CHECK(std::abs(f.r_squared - 1.0) < 1e-12);
    CHECK(f.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-12));
    CHECK(f.n_points == 5);

    pts.clear();
    for (double nu : {0.3, 0.1, 0.01, 1e-3}) pts.emplace_back(nu, 0.2 * std::pow(nu, 1.0 / 1.5));
    CHECK(std::abs(fit_rate(pts).slope - 2.0 / 3.0) < 1e-12);

    std::mt19937_64 g(1);
    std::normal_distribution<double> n(0, 0.3);
    pts.clear();
    for (int i = 1; i <= 20; ++i) pts.emplace_back(i * 0.01, std::exp(n(g)));
    auto noisy = fit_rate(pts);
    CHECK(noisy.r_squared >= 0.0);
    CHECK(noisy.r_squared <= 1.0);

    CHECK_THROWS_AS(fit_rate(std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.2, 2.0}}), Error);
    CHECK_THROWS_AS(fit_rate(std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.2, 0.0}, {0.3, 1.0}}), Error);
}

TEST_CASE("normality diagnostics")
{
    std::vector<double> zeros(50, 0.0);
    auto d = normality(zeros);
    CHECK(d.z_mean == 0.0);
    CHECK(d.z_variance == 0.0);
    CHECK(d.ks_distance == doctest::Approx(0.5).epsilon(1e-15));

    NormalStream rng(3);
    int below = 0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> z(200);
        for (double& x : z) x = rng();
        below += ks_distance_normal(z) < 0.12;
    }
    CHECK(below >= 97);

    std::vector<double> one{0.3};
    CHECK(ks_distance_normal(one) == doctest::Approx(std::max(normal_cdf(0.3), 1.0 - normal_cdf(0.3))));
}

TEST_CASE("mc config validation")
{
    auto c = tiny_config();
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.runs = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = c;
    bad.nus = {0.1, 0.1};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = c;
    bad.nus = {0.1, -0.1};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = c;
    bad.nus.clear();
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = c;
    bad.estimator.kind = EstimatorKind::Spectral;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK(std::string(estimator_kind_name(EstimatorKind::Localized)) == "local");
    CHECK(estimator_kind_from_name("nonparametric") == EstimatorKind::Nonparametric);
    CHECK_THROWS_AS(estimator_kind_from_name("bayes"), Error);
}

TEST_CASE("run_mc aggregates")
{
    auto c = tiny_config();
    c.runs = 2;
    auto mc = run_mc(c);
    REQUIRE(mc.per_nu.size() == 3);
    for (const auto& s : mc.per_nu) {
        REQUIRE(s.runs.size() == 2);
        CHECK(s.used + s.blowups == 2);
        const double e0 = s.runs[0].theta_hat - 3.0, e1 = s.runs[1].theta_hat - 3.0;
        CHECK(s.mse == (e0 * e0 + e1 * e1) / 2.0);
        CHECK(std::abs(s.bias * s.bias + s.variance - s.mse) <= 1e-12 * s.mse);
        CHECK(s.truth == 3.0);
        CHECK(s.runs[0].seed == run_seed(c, &s - mc.per_nu.data(), 0));
    }
    CHECK(mc.base_seed == 5);
}

TEST_CASE("run_mc is deterministic and schedule independent")
{
    auto c = tiny_config();
    auto a = run_mc(c);
    auto b = run_mc(c);
    check_same(a, b);
    c.threads = 4;
    auto d = run_mc(c);
    check_same(a, d);
}

TEST_CASE("seeds")
{
    auto c = tiny_config();
    CHECK(run_seed(c, 0, 3) != run_seed(c, 1, 3));
    c.paired_seeds = true;
    CHECK(run_seed(c, 0, 3) == run_seed(c, 1, 3));
    CHECK(run_seed(c, 0, 3) != run_seed(c, 0, 4));

    CHECK(resolve_thread_count(3) == 3);
    setenv("SPDE_LAB_THREADS", "2", 1);
    CHECK(resolve_thread_count(3) == 2);
    CHECK(resolve_thread_count(1) == 1);
    setenv("SPDE_LAB_THREADS", "0", 1);
    CHECK(resolve_thread_count(3) == 3);
    unsetenv("SPDE_LAB_THREADS");
    CHECK(resolve_thread_count(0) >= 1);
}

TEST_CASE("blow-ups are counted and capped")
{
    auto c = tiny_config();
    c.model.reaction = Reaction::f2();
    c.model.theta = 1.0;
    c.nus = {0.05};
    c.runs = 10;
    c.simulation.blowup_guard = 4.0;  // noise alone crosses this in some runs
    c.max_blowup_fraction = 1.0;
    auto mc = run_mc(c);
    const auto& s = mc.per_nu[0];
    CHECK(s.blowups > 0);
    CHECK(s.used + s.blowups == c.runs);
    std::size_t flagged = 0;
    for (const auto& r : s.runs) flagged += r.blowup;
    CHECK(flagged == s.blowups);

    c.max_blowup_fraction = 0.0;
    try {
        run_mc(c);
        FAIL("expected TooManyBlowUps");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooManyBlowUps);
    }
}

TEST_CASE("other estimators in the harness")
{
    auto c = tiny_config();
    c.nus = {0.02};
    c.runs = 3;
    c.model.theta = ReactionIntensity::affine(3.0, 1.0, 0.0);
    c.estimator.kind = EstimatorKind::Nonparametric;
    c.estimator.point = {0.5, 0.5};
    auto np = run_mc(c);
    CHECK(np.per_nu[0].truth == 3.5);
    REQUIRE(np.per_nu[0].window.has_value());

    c.estimator.kind = EstimatorKind::Localized;
    c.estimator.window = Window{0.5, 0.5, 0.5, 0.25};
    auto loc = run_mc(c);
    CHECK(loc.per_nu[0].truth == 3.5);

    c.model.theta = 1.0;
    c.model.reaction = Reaction::linear();
    c.estimator.kind = EstimatorKind::Spectral;
    auto sp = run_mc(c);
    CHECK(sp.per_nu[0].spectral_modes == default_mode_count(0.02, c.model.dom));
    CHECK(sp.per_nu[0].used == 3);

    c.mesh_policy = MeshPolicy{};
    auto withmesh = run_mc(c);
    REQUIRE(withmesh.per_nu[0].mesh.has_value());
}

TEST_CASE("coverage needs enough runs")
{
    auto c = tiny_config();
    c.nus = {0.05};
    c.runs = 10;
    auto mc = run_mc(c);
    CHECK_THROWS_AS(coverage_and_normality(mc, 0), Error);
    CHECK_THROWS_AS(coverage_and_normality(mc, 3), Error);
    c.runs = 30;
    auto big = run_mc(c);
    auto d = coverage_and_normality(big, 0);
    CHECK(d.n == 30);
    CHECK(d.coverage >= 0.0);
    CHECK(d.coverage <= 1.0);
}
