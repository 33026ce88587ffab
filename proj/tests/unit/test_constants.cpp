#include <doctest.h>

#include <cmath>
#include <numbers>

#include "renyi/constants.hpp"
#include "renyi/errors.hpp"
#include "renyi/profiles.hpp"

using namespace renyi;
constexpr double pi = std::numbers::pi;
constexpr double e = std::numbers::e;

namespace {
bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }
}

TEST_SUITE("constants") {
    TEST_CASE("one-dimensional sharp constants") {
        CHECK(rel_close(r_closed_form_1d(0.5).value, 24.0, 1e-12));
        CHECK(rel_close(r_closed_form_1d(2.0).value, 32 * pi * pi / 27, 1e-12));
        CHECK(rel_close(r_closed_form_1d(3.0).value, 9.0, 1e-12));
        CHECK(r_closed_form_1d(2.0).route == ConstantRoute::closed_form_1d);
        CHECK(rel_close(r_closed_form_1d(1.0).value, 2 * pi * e, 1e-14));
    }

    TEST_CASE("limits at alpha = 0 and alpha = infinity") {
        const auto z = r_closed_form_1d(0.0);
        REQUIRE(z.limit_scaled);
        CHECK(*z.limit_scaled == doctest::Approx(4.0));
        CHECK(z.route == ConstantRoute::limit_alpha0);
        const auto inf = r_closed_form_1d(kAlphaInfinity);
        REQUIRE(inf.limit_scaled);
        CHECK(*inf.limit_scaled == doctest::Approx(4 * pi * pi));
        CHECK(inf.value == 0.0);
        // the approach to 4 is of order alpha log(1/alpha); offsets from 40-digit evaluation of the closed form
        CHECK(std::abs(1e-4 * r_closed_form_1d(1e-4).value / 4.0 - 1.0 - 1.7824694133200656e-3) < 1e-9);
        CHECK(std::abs(1e-6 * r_closed_form_1d(1e-6).value / 4.0 - 1.0 - 2.7017708176227125e-5) < 1e-9);
        CHECK(std::abs(1e4 * r_closed_form_1d(1e4).value / (4 * pi * pi) - 1.0) < 1e-3);
    }

    TEST_CASE("continuity across alpha = 1") {
        for (double d : {1e-3, 1e-5, 1e-7}) {
            CHECK(rel_close(r_closed_form_1d(1.0 - d).value, 2 * pi * e, 20 * d));
            CHECK(rel_close(r_closed_form_1d(1.0 + d).value, 2 * pi * e, 20 * d));
        }
    }

    TEST_CASE("Gaussian product strictly exceeds the sharp constant") {
        for (int i = 0; i < 400; ++i) {
            const double a = 0.01 * std::pow(2e3, i / 399.0);
            if (std::abs(a - 1.0) < 1e-6) continue;
            CHECK(gaussian_isoperimetric_value(a) > r_closed_form_1d(a).value);
        }
        CHECK(rel_close(gaussian_isoperimetric_value(2.0), 4 * pi, 1e-14));
        CHECK(rel_close(gaussian_isoperimetric_value(1.0), 2 * pi * e, 1e-14));
        CHECK(rel_close(gaussian_isoperimetric_value(0.5), 8 * pi, 1e-14));
    }

    TEST_CASE("Sobolev endpoint") {
        CHECK(rel_close(r_sobolev(3).value, 65.7348490743759824835061476098, 1e-12));
        CHECK(rel_close(r_sobolev(4).value, 82.0831891303593021148183270189, 1e-12));
        CHECK(rel_close(r_sobolev(5).value, 98.7460781333728869903742257986, 1e-12));
        CHECK(r_sobolev(3).route == ConstantRoute::sobolev);
        CHECK_THROWS_AS(r_sobolev(2), DomainError);
    }

    TEST_CASE("degenerate region") {
        for (auto [n, a] : {std::pair{3, 0.2}, std::pair{5, 0.5}, std::pair{10, 0.7}}) {
            const auto r = r_zero_region(n, a);
            CHECK(r.value == 0.0);
            CHECK(r.route == ConstantRoute::zero_region);
            CHECK(optimal_constant(n, a).value == 0.0);
        }
        CHECK_THROWS_AS(r_zero_region(3, 0.5), DomainError);
    }

    TEST_CASE("weighted isoperimetric constant") {
        CHECK(rel_close(weighted_isoperimetric_constant(1, 2.0), 13.8888888888888888888888888889, 1e-12));
        CHECK(rel_close(weighted_isoperimetric_constant(2, 2.0), 28.2743338823081391461637904495, 1e-12));
        const double lo = weighted_isoperimetric_constant(1, 1.0 - 1e-6);
        const double hi = weighted_isoperimetric_constant(1, 1.0 + 1e-6);
        CHECK(rel_close(lo, hi, 1e-4));
        CHECK_THROWS_AS(weighted_isoperimetric_constant(1, 0.3), DomainError);
    }

    TEST_CASE("variance bounds on the line") {
        CHECK(rel_close(omega_bounds_1d(2.0), 0.842206242226291935473876565323, 1e-12));
        CHECK(std::abs(omega_bounds_1d(1.0 - 1e-6) - 1.0) < 1e-4);
        CHECK(std::abs(omega_bounds_1d(1.0 + 1e-6) - 1.0) < 1e-4);
        CHECK_THROWS_AS(omega_bounds_1d(0.3), DomainError);
    }

    TEST_CASE("derivative bound coefficients") {
        for (double a : {0.5, 0.8, 2.0, 2.5})
            CHECK(rel_close(cm_bound_coefficients(a, 1.0, 1, 0.0, 3.0), omega_bounds_1d(a) / 6.0, 1e-14));
        for (int j : {1, 2, 3})
            CHECK(rel_close(cm_bound_coefficients(1.0, 1.0, j, 0.5, 1.5), std::tgamma(j) / (2 * std::pow(2.0, j)),
                            1e-12));
        const double w = omega_bounds_1d(2.0);
        CHECK(rel_close(cm_bound_coefficients(2.0, 0.5, 2, 0.0, 1.0), w * w / 4.0, 1e-14));
    }

    TEST_CASE("log-Tsallis bound on the line") {
        CHECK(rel_close(log_tsallis_cm_bound(1.0, 0.0, 1), 0.154432380648389078519418172924, 1e-12));
        const double b1 = log_tsallis_cm_bound(1e4, 0.0, 1), b2 = log_tsallis_cm_bound(4e4, 0.0, 1);
        CHECK(b1 > 0.0);
        CHECK(rel_close(b1 / b2, 8.0, 2e-2));
        CHECK_THROWS_AS(log_tsallis_cm_bound(1e-3, 0.0, 1), ConditionError);
        CHECK(tsallis2_of_max_entropy_1d(1.0) > 0.0);
    }

    TEST_CASE("dispatcher regions") {
        CHECK(optimal_constant(1, 2.0).route == ConstantRoute::closed_form_1d);
        CHECK(optimal_constant(2, 2.0).route == ConstantRoute::ode_profile);
        CHECK(optimal_constant(3, 1.0 / 3.0).route == ConstantRoute::sobolev);
        CHECK_THROWS_AS(optimal_constant(3, 3.0), UnsupportedRegion);
        CHECK_THROWS_AS(optimal_constant(10, 1.2), UnsupportedRegion);
        CHECK_NOTHROW(optimal_constant(6, 1.2));
    }
}
