#include <doctest.h>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "spdelab/error.hpp"
#include "spdelab/sine_transform.hpp"
#include "spdelab/spectral.hpp"

using namespace spdelab;
using boost::math::constants::pi;

namespace {

double basis(long long k, double x, double l) { return std::sqrt(2.0 / l) * std::sin(k * pi<double>() * x / l); }

// c_k = (l/M) sum_j g_j e_k(y_j), evaluated term by term.
std::vector<double> naive_forward(const std::vector<double>& g, std::size_t K, double l)
{
    const std::size_t M = g.size() - 1;
    std::vector<double> c(K);
    for (std::size_t k = 1; k <= K; ++k) {
        long double s = 0;
        for (std::size_t j = 1; j < M; ++j) s += g[j] * basis(k, j * l / M, l);
        c[k - 1] = static_cast<double>(s * l / M);
    }
    return c;
}

std::vector<double> random_dirichlet(std::size_t M, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n;
    std::vector<double> g(M + 1);
    for (std::size_t j = 1; j < M; ++j) g[j] = n(gen);
    return g;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("eigenvalues")
{
    DomainSpec dom{1.0, 2.0, 8};
    auto e2 = eigen(2, dom);
    CHECK(e2.lambda == doctest::Approx(4 * pi<double>() * pi<double>()).epsilon(1e-14));
    CHECK(e2.lambda == doctest::Approx(39.4784176).epsilon(1e-8));
    CHECK(e2.mu == e2.lambda);
    CHECK(eigen(1, dom).mu == doctest::Approx(pi<double>() * pi<double>()).epsilon(1e-15));

    DomainSpec frac{1.0, 1.5, 8};
    CHECK(eigen(1, frac).mu == doctest::Approx(5.5683279968).epsilon(1e-9));

    auto mu = fractional_eigenvalues(frac);
    REQUIRE(mu.size() == 8);
    for (std::size_t k = 1; k < mu.size(); ++k) CHECK(mu[k] > mu[k - 1]);
}

TEST_CASE("domain validation")
{
    CHECK_THROWS_AS(DomainSpec({1.0, 1.0, 4}).validate(), Error);
    CHECK_THROWS_AS(DomainSpec({1.0, 2.5, 4}).validate(), Error);
    CHECK_THROWS_AS(DomainSpec({0.0, 2.0, 4}).validate(), Error);
    CHECK_THROWS_AS(DomainSpec({1.0, 2.0, 0}).validate(), Error);
    CHECK_NOTHROW(DomainSpec({2.0, 1.2, 4}).validate());
}

TEST_CASE("sine transform against the naive sum")
{
    for (std::size_t M : {2u, 3u, 7u, 16u, 100u, 256u}) {
        for (double l : {1.0, 2.5}) {
            auto g = random_dirichlet(M, static_cast<unsigned>(M));
            SineTransform dst(M, l);
            std::vector<double> c(M - 1);
            dst.forward(g, c);
            auto ref = naive_forward(g, M - 1, l);
            CHECK(sup_diff(c, ref) < 1e-12);

            // inverse against direct synthesis
            std::vector<double> back(M + 1, 7.0);
            dst.inverse(c, back);
            CHECK(back.front() == 0.0);
            CHECK(back.back() == 0.0);
            for (std::size_t j = 1; j < M; ++j) {
                long double s = 0;
                for (std::size_t k = 1; k < M; ++k) s += c[k - 1] * basis(k, j * l / M, l);
                CHECK(std::abs(back[j] - static_cast<double>(s)) < 1e-11);
            }
            CHECK(sup_diff(back, g) < 1e-12);
        }
    }
}

TEST_CASE("sine transform with fewer coefficients")
{
    const std::size_t M = 32;
    SineTransform dst(M, 1.0);
    auto g = random_dirichlet(M, 3);
    std::vector<double> full(M - 1), part(5);
    dst.forward(g, full);
    dst.forward(g, part);
    for (std::size_t k = 0; k < part.size(); ++k) CHECK(part[k] == full[k]);

    std::vector<double> a(M + 1), b(M + 1);
    std::vector<double> padded(M - 1, 0.0);
    std::copy(part.begin(), part.end(), padded.begin());
    dst.inverse(part, a);
    dst.inverse(padded, b);
    CHECK(sup_diff(a, b) < 1e-15);

    std::vector<double> too_many(M);
    CHECK_THROWS_AS(dst.forward(g, too_many), Error);
    std::vector<double> short_nodes(M);
    CHECK_THROWS_AS(dst.inverse(part, short_nodes), Error);
}

TEST_CASE("to_spectral and from_spectral")
{
    const std::size_t M = 64;
    GridSpec grid{M, 1, 1.0, 1.0};
    DomainSpec dom = DomainSpec::for_grid(1.0, 2.0, M);

    SUBCASE("e_1 samples map to the first unit vector")
    {
        GridField g{std::vector<double>(M + 1)};
        for (std::size_t j = 0; j <= M; ++j) g.values[j] = basis(1, grid.node(j), 1.0);
        g.values[M] = 0.0;
        auto s = to_spectral(g, dom);
        CHECK(s.coeffs[0] == doctest::Approx(1.0).epsilon(1e-13));
        for (std::size_t k = 1; k < s.coeffs.size(); ++k) CHECK(std::abs(s.coeffs[k]) < 1e-13);
    }
    SUBCASE("zero coefficients give the zero field")
    {
        auto g = from_spectral(SpectralField{std::vector<double>(M - 1, 0.0)}, grid);
        for (double v : g.values) CHECK(v == 0.0);
    }
    SUBCASE("random round trips")
    {
        for (unsigned seed = 0; seed < 20; ++seed) {
            GridField g{random_dirichlet(M, seed)};
            auto back = from_spectral(to_spectral(g, dom), grid);
            CHECK(sup_diff(back.values, g.values) < 1e-12);
        }
    }
    SUBCASE("preconditions")
    {
        GridField g{random_dirichlet(M, 1)};
        g.values[0] = 1e-6;
        CHECK_THROWS_AS(to_spectral(g, dom), Error);
        DomainSpec big = dom;
        big.modes = M;
        CHECK_THROWS_AS(to_spectral(GridField{random_dirichlet(M, 1)}, big), Error);
    }
}

TEST_CASE("semigroup")
{
    DomainSpec dom{1.0, 2.0, 50};
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n;
    SpectralField s{std::vector<double>(50)};
    for (double& c : s.coeffs) c = n(gen);

    auto id = apply_semigroup(s, 0.0, 0.3, dom);
    CHECK(id.coeffs == s.coeffs);

    SpectralField one{std::vector<double>(1, 1.0)};
    DomainSpec single{1.0, 2.0, 1};
    CHECK(apply_semigroup(one, 1.0, 0.01, single).coeffs[0] ==
          doctest::Approx(std::exp(-0.01 * pi<double>() * pi<double>())).epsilon(1e-15));
    CHECK(apply_semigroup(one, 1.0, 0.01, single).coeffs[0] == doctest::Approx(0.906).epsilon(1e-3));

    for (double alpha : {1.5, 2.0}) {
        dom.alpha = alpha;
        auto ab = apply_semigroup(apply_semigroup(s, 0.013, 0.7, dom), 0.029, 0.7, dom);
        auto c = apply_semigroup(s, 0.042, 0.7, dom);
        for (std::size_t k = 0; k < 50; ++k) CHECK(std::abs(ab.coeffs[k] - c.coeffs[k]) < 1e-13);
    }
}

TEST_CASE("phi closed form")
{
    DomainSpec one{1.0, 2.0, 1};
    const double p2 = pi<double>() * pi<double>();
    CHECK(phi(1.0, 1.0, one) == doctest::Approx((1 - std::exp(-2 * p2)) / (2 * p2)).epsilon(1e-14));
    CHECK(phi(1.0, 1.0, one) == doctest::Approx(0.05066).epsilon(1e-4));
    CHECK(phi(0.3, 0.0, one) == 0.0);

    // adaptive quadrature of sum_k exp(-2 mu_k nu s) over [0, t]
    for (double alpha : {1.5, 2.0}) {
        for (double nu : {1.0, 0.01, 1e-4}) {
            DomainSpec dom{1.3, alpha, 40};
            const auto mu = fractional_eigenvalues(dom);
            auto integrand = [&](double s) {
                double v = 0;
                for (double m : mu) v += std::exp(-2 * m * nu * s);
                return v;
            };
            const double t = 0.8;
            double err = 0;
            double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, t, 18, 1e-12,
                                                                                      &err);
            CHECK(std::abs(phi(nu, t, dom) - q) / q < 1e-8);
        }
    }
    // tiny arguments stay accurate (expm1)
    DomainSpec dom{1.0, 2.0, 3};
    CHECK(phi(1e-12, 1.0, dom) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("phi scaling at small nu")
{
    DomainSpec dom{1.0, 2.0, 4096};
    double a = phi(1e-3, 1.0, dom) * std::pow(1e-3, 0.5);
    double b = phi(1e-4, 1.0, dom) * std::pow(1e-4, 0.5);
    CHECK(std::abs(a - b) / b < 0.1);
}

TEST_CASE("green kernel")
{
    DomainSpec dom{1.0, 2.0, 255};
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        double x = u(gen), y = u(gen);
        auto a = green_kernel(0.5, x, y, 0.01, dom);
        auto b = green_kernel(0.5, y, x, 0.01, dom);
        CHECK(std::abs(a.value - b.value) <= 1e-12 * std::abs(a.value) + 1e-300);
        CHECK(green_kernel(0.5, 0.0, y, 0.01, dom).value == 0.0);
        CHECK(a.tail_bound >= 0.0);
    }
    // small nu t: a large tail bound flags an unresolved kernel
    DomainSpec coarse{1.0, 2.0, 5};
    CHECK(green_kernel(1e-3, 0.5, 0.5, 1.0, coarse).tail_bound > 1e-3);
    CHECK(green_kernel(1.0, 0.5, 0.5, 1.0, coarse).tail_bound < 1e-100);
}

TEST_CASE("green kernel integrates to the semigroup")
{
    const std::size_t M = 128;
    GridSpec grid{M, 1, 1.0, 1.0};
    for (double alpha : {1.5, 2.0}) {
        DomainSpec dom = DomainSpec::for_grid(1.0, alpha, M);
        // trigonometric polynomial: the discrete projection is exact
        const double a[] = {0.7, -0.4, 0.25, 0.1, -0.05};
        auto z = [&](double y) {
            double v = 0;
            for (int k = 0; k < 5; ++k) v += a[k] * basis(k + 1, y, 1.0);
            return v;
        };
        GridField zg{std::vector<double>(M + 1)};
        for (std::size_t j = 1; j < M; ++j) zg.values[j] = z(grid.node(j));
        const double nu = 0.01, t = 1.0;
        auto sg = from_spectral(apply_semigroup(to_spectral(zg, dom), t, nu, dom), grid);
        for (std::size_t j : {5u, 31u, 64u, 100u}) {
            const double x = grid.node(j);
            auto integrand = [&](double y) { return green_kernel(t, x, y, nu, dom).value * z(y); };
            double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15, 1e-14);
            CHECK(std::abs(q - sg.values[j]) < 1e-8);
        }
    }
}
