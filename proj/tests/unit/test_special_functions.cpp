#include <doctest.h>

#include <cmath>
#include <numbers>

#include "renyi/errors.hpp"
#include "renyi/special_functions.hpp"

using namespace renyi;

namespace {
bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }
}

TEST_SUITE("special_functions") {
    TEST_CASE("log_gamma against high-precision values") {
        // references computed with 30-digit arithmetic
        CHECK(rel_close(log_gamma(0.5), 0.572364942924700087071713675677, 1e-13));
        CHECK(rel_close(log_gamma(5.0), 3.1780538303479456196469416013, 1e-13));
        CHECK(rel_close(log_gamma(2.5), 0.284682870472919159632494669683, 1e-13));
        CHECK(rel_close(log_gamma(1e-3), 6.90717888538385366168368145865, 1e-13));
        CHECK(rel_close(log_gamma(37.25), 96.6198845882781011789881316304, 1e-13));
        CHECK(rel_close(log_gamma(1234.5), 7550.55090107789489572983556774, 1e-13));
        CHECK(std::abs(log_gamma(1.0)) < 1e-14);
        CHECK(std::abs(log_gamma(2.0)) < 1e-14);
    }

    TEST_CASE("log_gamma rejects nonpositive arguments") {
        CHECK_THROWS_AS(log_gamma(0.0), DomainError);
        CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
    }

    TEST_CASE("recurrence Gamma(x+1) = x Gamma(x) on a log grid") {
        double worst = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double x = 1e-3 * std::pow(5e4, i / 200.0);
            const double lhs = std::exp(log_gamma(x + 1.0) - log_gamma(x));
            worst = std::max(worst, std::abs(lhs / x - 1.0));
        }
        CHECK(worst <= 1e-12);
    }

    TEST_CASE("log_beta matches the gamma form") {
        CHECK(rel_close(log_beta(0.5, 0.5), std::log(std::numbers::pi), 1e-13));
        CHECK(rel_close(std::exp(log_beta(2.0, 3.0)), 1.0 / 12.0, 1e-13));
    }

    TEST_CASE("nagy_w values and convention") {
        CHECK(nagy_w(3.0, 0.0) == 1.0);
        CHECK(nagy_w(0.0, 2.5) == 1.0);
        CHECK(nagy_w(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
        for (double u : {0.3, 1.0, 4.0, 17.0})
            CHECK(rel_close(nagy_w(u, 1.0), std::pow(1.0 + 1.0 / u, -u), 1e-12));
    }

    TEST_CASE("nagy_w two-sided bound for 0 < v < 1") {
        for (double u : {0.1, 0.5, 1.0, 3.0, 10.0, 100.0})
            for (double v : {0.01, 0.2, 0.5, 0.9, 0.999}) {
                const double w = nagy_w(u, v);
                const double lo = std::pow(1.0 + 1.0 / u, -u);
                CHECK(w < 1.0);
                CHECK(w > lo);
                CHECK(lo > 1.0 / std::numbers::e);
            }
    }

    TEST_CASE("nagy_w is continuous as v -> 0") {
        double prev = 1.0;
        for (double v = 0.1; v > 1e-9; v /= 10.0) {
            const double gap = std::abs(nagy_w(2.0, v) - 1.0);
            CHECK(gap < prev);
            prev = gap;
        }
        CHECK(prev < 1e-6);
    }

    TEST_CASE("gamma ratio gap is positive") {
        CHECK(gamma_ratio_gap_check(1.0, 0.5) ==
              doctest::Approx(0.010345178345617725691572068756).epsilon(1e-12));
        CHECK(gamma_ratio_gap_check(10.0, 0.5) > 0.0);
        CHECK(gamma_ratio_gap_check(0.1, 0.9) > 0.0);
        for (double x : {0.01, 0.3, 2.0, 50.0})
            for (double s : {0.05, 0.5, 0.95}) CHECK(gamma_ratio_gap_check(x, s) > 0.0);
        CHECK_THROWS_AS(gamma_ratio_gap_check(1.0, 1.0), DomainError);
        CHECK_THROWS_AS(gamma_ratio_gap_check(-1.0, 0.5), DomainError);
    }
}
