#include <doctest.h>

#include <cmath>
#include <numbers>

#include "renyi/errors.hpp"
#include "renyi/quadrature.hpp"

using namespace renyi;
constexpr double pi = std::numbers::pi;

TEST_SUITE("quadrature") {
    TEST_CASE("interval integrals") {
        const auto r = integrate_interval([](double x) { return std::sin(x); }, 0.0, pi, Tolerance(1e-12));
        CHECK(r.converged);
        CHECK(std::abs(r.value - 2.0) <= 1e-12);
        const auto s = integrate_interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, Tolerance(1e-10),
                                          EndpointExponents{-0.5, 0.0});
        CHECK(std::abs(s.value - 2.0) <= 1e-10);
        const auto c = integrate_interval([](double x) { return 2.0 / pi * std::cos(x) * std::cos(x); }, -pi / 2,
                                          pi / 2, Tolerance(1e-12));
        CHECK(std::abs(c.value - 1.0) <= 1e-12);
    }

    TEST_CASE("endpoint exponents below -1 are rejected") {
        CHECK_THROWS(integrate_interval([](double x) { return 1.0 / x; }, 0.0, 1.0, Tolerance(1e-8),
                                        EndpointExponents{-1.0, 0.0}));
    }

    TEST_CASE("line integrals with tail envelopes") {
        const auto g = integrate_line([](double x) { return std::exp(-x * x / 2) / std::sqrt(2 * pi); },
                                      Decay::gaussian(0.5), Tolerance(1e-12));
        CHECK(std::abs(g.value - 1.0) <= 1e-12);
        const double zero = 0.0;
        const auto e = integrate_line([](double x) { return 0.5 * std::exp(-std::abs(x)); }, Decay::exponential(1.0),
                                      Tolerance(1e-12), std::span<const double>(&zero, 1));
        CHECK(std::abs(e.value - 1.0) <= 1e-12);
        const auto sech = integrate_line([](double x) { return 1.0 / std::cosh(x); }, Decay::exponential(1.0),
                                         Tolerance(1e-10));
        CHECK(std::abs(sech.value - pi) <= 1e-10);
    }

    TEST_CASE("power tails") {
        const auto r = integrate_line([](double x) { return 1.0 / (pi * (1.0 + x * x)); }, Decay::power(2.0),
                                      Tolerance(1e-10));
        CHECK(std::abs(r.value - 1.0) <= 1e-10);
        CHECK_THROWS_AS(integrate_line([](double x) { return 1.0 / (1.0 + std::abs(x)); }, Decay::power(1.0),
                                       Tolerance(1e-8)),
                        ConvergenceError);
    }

    TEST_CASE("radial integrals") {
        RadialSupport ball;
        ball.radius = 1.0;
        const auto v = integrate_radial([](double) { return 1.0; }, 3, ball, Tolerance(1e-12));
        CHECK(std::abs(v.value - 4.0 * pi / 3.0) <= 1e-12);
        RadialSupport whole;
        whole.decay = Decay::gaussian(0.5);
        const auto g = integrate_radial([](double t) { return std::exp(-t * t / 2) / (2 * pi); }, 2, whole,
                                        Tolerance(1e-12));
        CHECK(std::abs(g.value - 1.0) <= 1e-12);
        RadialSupport heavy;
        heavy.decay = Decay::power(6.0);
        const auto h = integrate_radial([](double t) { return std::pow(1 + t * t, -3.0); }, 3, heavy,
                                        Tolerance(1e-11));
        // 4 pi * (pi/16)
        CHECK(std::abs(h.value - pi * pi / 4.0) <= 1e-10);
    }

    TEST_CASE("linearity") {
        auto f = [](double x) { return std::exp(-x) * std::cos(3 * x); };
        auto g = [](double x) { return x * x * std::sin(x); };
        const Tolerance tol(1e-11);
        const double a = integrate_interval(f, 0.0, 2.0, tol).value;
        const double b = integrate_interval(g, 0.0, 2.0, tol).value;
        const double s = integrate_interval([&](double x) { return f(x) + g(x); }, 0.0, 2.0, tol).value;
        CHECK(std::abs(s - a - b) <= 2e-11);
    }

    TEST_CASE("halving the tolerance never worsens the oracle error") {
        double prev = 1.0;
        for (double tol = 1e-4; tol >= 1e-12; tol /= 2) {
            const double v = integrate_interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                                Tolerance(tol), EndpointExponents{-0.5, 0.0})
                                 .value;
            const double err = std::abs(v - 2.0);
            CHECK(err <= std::max(prev, 1e-15));
            prev = err;
        }
    }

    TEST_CASE("radial at n = 1 is twice the half-line integral") {
        RadialSupport whole;
        whole.decay = Decay::exponential(1.0);
        auto g = [](double t) { return std::exp(-t) * (1 + t); };
        const double r = integrate_radial(g, 1, whole, Tolerance(1e-13)).value;
        CHECK(std::abs(r - 4.0) <= 1e-12);
        CHECK(std::abs(unit_sphere_area(3) - 4 * pi) < 1e-13);
    }
}
