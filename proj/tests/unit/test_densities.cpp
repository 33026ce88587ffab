#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <vector>

#include "renyi/density.hpp"
#include "renyi/density_spec.hpp"
#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"
#include "renyi/profiles.hpp"

using namespace renyi;
constexpr double pi = std::numbers::pi;

namespace {

std::vector<DensityPtr> one_dim_families() {
    return {make_cos_power(2.0),       make_cos_power(3.0, 2.0, 0.4), make_cosh_power(0.5),
            make_cosh_power(0.7, 1.5), make_two_sided_exp(0.7, 0.2),  make_uniform_interval(2.0, 1.0),
            make_gaussian(1, 2.0),     make_max_renyi(0.8, Eigen::MatrixXd::Constant(1, 1, 1.5)),
            make_max_renyi(2.0, Eigen::MatrixXd::Constant(1, 1, 0.5)),
            make_barenblatt(1, 2.0),   make_barenblatt(1, 0.8),       make_tsallis_g(1, 2.0),
            make_g_lambda(1.5, Eigen::MatrixXd::Identity(1, 1))};
}

Eigen::MatrixXd diag2(double a, double b) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2, 2);
    K(0, 0) = a;
    K(1, 1) = b;
    return K;
}

} // namespace

TEST_SUITE("densities") {
    TEST_CASE("every family has unit mass") {
        for (const auto& d : one_dim_families()) {
            INFO(d->describe());
            CHECK(std::abs(power_integral(*d, 1.0) - 1.0) <= 1e-8);
        }
        for (const DensityPtr& d :
             {make_gaussian(2, 1.5), make_max_renyi(1.5, diag2(1.0, 2.0)), make_barenblatt(2, 1.5),
              make_barenblatt(3, 0.9), make_sobolev_extremal(3, 0.7), make_tsallis_g(3, 1.5),
              make_g_lambda(1.25, diag2(1.0, 2.0)), profile_density(cached_profile(2, 2.0), 1.3)}) {
            INFO(d->describe());
            CHECK(std::abs(power_integral(*d, 1.0) - 1.0) <= 1e-8);
        }
    }

    TEST_CASE("tabulated normalizers") {
        const auto c = make_cosh_power(0.5, 1.0, 0.0, 1.0);
        CHECK(c->param("a") == doctest::Approx(1.0 / pi).epsilon(1e-14));
        CHECK(c->value1(0.7) == doctest::Approx(1.0 / (pi * std::cosh(0.7))).epsilon(1e-13));
        const auto b = make_barenblatt(1, 2.0);
        CHECK(b->param("C") == doctest::Approx(std::pow(0.75, 2.0 / 3.0)).epsilon(1e-9));
    }

    TEST_CASE("moments") {
        const auto g = make_gaussian(1, 1.0);
        CHECK(second_moment(*g) == doctest::Approx(1.0).epsilon(1e-12));
        const auto u = make_uniform_interval();
        CHECK(second_moment(*u) == doctest::Approx(pi * pi / 12).epsilon(1e-10));
        const auto g2 = make_gaussian(2, 1.0);
        CHECK((covariance(*g2) - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
        CHECK(second_moment(*g2) == doctest::Approx(2.0).epsilon(1e-12));
        // the unit-mass Barenblatt profile (C - x^2)_+ has sigma2 = 4 C^{5/2} / 15, not 1
        const double C = std::pow(0.75, 2.0 / 3.0);
        CHECK(second_moment(*make_barenblatt(1, 2.0)) == doctest::Approx(4 * std::pow(C, 2.5) / 15).epsilon(1e-9));
    }

    TEST_CASE("second moment scales quadratically") {
        for (const DensityPtr& d : {make_gaussian(1, 1.0), make_cos_power(2.0), make_two_sided_exp()})
            for (double a : {0.5, 2.0})
                CHECK(second_moment(*rescale(d, a)) == doctest::Approx(a * a * second_moment(*d)).epsilon(1e-9));
    }

    TEST_CASE("max-Renyi density has covariance K") {
        struct Case {
            double alpha;
            Eigen::MatrixXd K;
        };
        for (const auto& c : {Case{0.8, Eigen::MatrixXd::Constant(1, 1, 1.3)},
                              Case{2.0, Eigen::MatrixXd::Constant(1, 1, 0.7)}, Case{1.5, diag2(1.0, 2.0)}}) {
            const auto d = make_max_renyi(c.alpha, c.K);
            CHECK((covariance(*d) - c.K).norm() <= 1e-6 * c.K.norm());
        }
    }

    TEST_CASE("g_lambda and max_renyi coincide") {
        Eigen::MatrixXd K(2, 2);
        K << 1.0, 0.3, 0.3, 2.0;
        for (double lam : {0.8, 1.5, 2.0}) {
            const auto g = make_g_lambda(lam, K);
            const auto f = make_max_renyi(lam, K);
            double worst = 0.0;
            for (double x = -1.5; x <= 1.5; x += 0.25)
                for (double y = -1.5; y <= 1.5; y += 0.25) {
                    Eigen::VectorXd p(2);
                    p << x, y;
                    worst = std::max(worst, std::abs(g->value(p) - f->value(p)));
                }
            CHECK(worst <= 1e-13);
        }
    }

    TEST_CASE("analytic gradients match finite differences") {
        for (const auto& d : one_dim_families()) {
            INFO(d->describe());
            const LineLayout* L = d->line_layout();
            REQUIRE(L != nullptr);
            const double lo = std::isfinite(L->lo) ? L->lo : -4.0, hi = std::isfinite(L->hi) ? L->hi : 4.0;
            double worst = 0.0;
            for (int i = 1; i <= 100; ++i) {
                const double x = lo + (hi - lo) * (i - 0.5) / 100.0;
                bool near_kink = std::abs(x - lo) < 1e-3 || std::abs(hi - x) < 1e-3;
                for (double b : L->breakpoints) near_kink = near_kink || std::abs(x - b) < 1e-3;
                if (near_kink) continue;
                const double step = 1e-5 * std::max(1.0, std::abs(x));
                const double fd = (d->value1(x + step) - d->value1(x - step)) / (2 * step);
                const double an = d->slope1(x);
                worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-3));
            }
            CHECK(worst <= 1e-6);
        }
    }

    TEST_CASE("region errors") {
        CHECK_THROWS_AS(make_cos_power(0.5), DomainError);
        CHECK_THROWS_AS(make_cosh_power(1.5), DomainError);
        CHECK_THROWS_AS(make_max_renyi(0.3, Eigen::MatrixXd::Identity(1, 1)), DomainError);
        CHECK_THROWS_AS(make_barenblatt(2, 0.4), DomainError);
        CHECK_THROWS_AS(make_g_lambda(0.5, Eigen::MatrixXd::Identity(2, 2)), DomainError);
        CHECK_THROWS_AS(make_sobolev_extremal(2), DomainError);
    }

    TEST_CASE("compact families vanish outside their support") {
        const auto d = make_cos_power(2.0);
        CHECK(d->value1(pi / 2) == 0.0);
        CHECK(d->value1(2.0) == 0.0);
        CHECK(make_barenblatt(1, 2.0)->value1(1.5) == 0.0);
    }

    TEST_CASE("density specs") {
        const auto d = parse_density_spec("family:cos_power(alpha=2,b=1,c=0)");
        CHECK(d->family() == Family::cos_power);
        CHECK(d->param("alpha") == 2.0);
        const auto g = parse_density_spec("family:gaussian(n=2, var1=1, var2=3, mean2=0.5)");
        CHECK(g->dim() == 2);
        CHECK(covariance(*g)(1, 1) == doctest::Approx(3.0));
        CHECK(mean(*g)(1) == doctest::Approx(0.5));
        const auto s = parse_density_spec("family:tsallis_g(alpha=2,scale=2.5)");
        CHECK(second_moment(*s) == doctest::Approx(6.25 * second_moment(*make_tsallis_g(1, 2.0))).epsilon(1e-9));
        CHECK(parse_density_spec("family:barenblatt(alpha=1.5)", 2)->dim() == 2);
        CHECK_THROWS_AS(parse_density_spec("cos_power(alpha=2)"), InputError);
        CHECK_THROWS_AS(parse_density_spec("family:nope(alpha=2)"), InputError);
        CHECK_THROWS_AS(parse_density_spec("family:cos_power(alpha=2,beta=1)"), InputError);
        CHECK_THROWS_AS(parse_density_spec("family:cos_power(b=1)"), InputError);
        CHECK_THROWS_AS(parse_density_spec("family:cos_power(alpha=x)"), InputError);
        CHECK_THROWS_AS(parse_density_spec("family:cos_power(alpha=0.5)"), DomainError);
    }

    TEST_CASE("grid csv input") {
        const std::string path = "renyi_unit_grid.csv";
        {
            std::ofstream out(path);
            out << "x,p\n";
            for (int i = -400; i <= 400; ++i) {
                const double x = i * 0.02;
                out << x << "," << std::exp(-x * x / 2) / std::sqrt(2 * pi) << "\n";
            }
        }
        const auto d = parse_density_spec("grid:" + path);
        CHECK(d->family() == Family::grid_1d);
        CHECK(power_integral(*d, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(fisher_information(*d) == doctest::Approx(1.0).epsilon(1e-6));
        std::remove(path.c_str());
        CHECK_THROWS_AS(parse_density_spec("grid:does_not_exist.csv"), InputError);
    }

    TEST_CASE("sweeps") {
        const auto a = parse_sweep("0.5:2:4");
        REQUIRE(a.size() == 4);
        CHECK(a[0] == 0.5);
        CHECK(a[3] == 2.0);
        CHECK(a[1] == doctest::Approx(1.0));
        CHECK(parse_sweep("2") == std::vector<double>{2.0});
        CHECK(parse_sweep("3,2,1").size() == 3);
        CHECK_THROWS_AS(parse_sweep("1,1"), InputError);
        CHECK_THROWS_AS(parse_sweep("1:2"), InputError);
        CHECK_THROWS_AS(parse_sweep("1:2:0"), InputError);
        CHECK_THROWS_AS(parse_sweep(""), InputError);
    }
}
