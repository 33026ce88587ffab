#include <doctest.h>

#include <cmath>
#include <numbers>

#include "renyi/constants.hpp"
#include "renyi/density.hpp"
#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"

using namespace renyi;
constexpr double pi = std::numbers::pi;
constexpr double e = std::numbers::e;

namespace {
bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }
}

TEST_SUITE("functionals") {
    TEST_CASE("entropies of reference densities") {
        const auto u = make_uniform_interval(pi, 0.3);  // length 1
        for (double a : {0.5, 1.0, 2.0, 3.0}) {
            CHECK(std::abs(renyi_entropy(*u, a)) <= 1e-12);
            CHECK(std::abs(renyi_power(*u, a) - 1.0) <= 1e-12);
            CHECK(std::abs(tsallis_entropy(*u, a)) <= 1e-12);
        }
        const auto g = make_gaussian(1, 1.0);
        CHECK(rel_close(renyi_entropy(*g, 2.0), std::log(2 * std::sqrt(pi)), 1e-11));
        CHECK(rel_close(renyi_entropy(*g, 1.0), 0.5 * std::log(2 * pi * e), 1e-12));
        CHECK(rel_close(renyi_entropy(*g, 1.0 + 1e-10), renyi_entropy(*g, 1.0), 1e-12));
    }

    TEST_CASE("entropy powers") {
        for (double s2 : {0.5, 3.0})
            for (double a : {0.5, 2.0, 4.0})
                CHECK(rel_close(renyi_power(*make_gaussian(1, s2), a), 2 * pi * s2 * std::pow(a, 1 / (a - 1)), 1e-10));
        for (const DensityPtr& d : {make_cos_power(2.0), make_two_sided_exp(), make_barenblatt(2, 1.5)})
            for (double a : {0.7, 1.5, 3.0}) {
                const int n = d->dim();
                CHECK(rel_close(renyi_power(*d, a), std::pow(alpha_th_power(*d, a), 2.0 / (n * (a - 1) + 2)), 1e-12));
            }
    }

    TEST_CASE("Renyi Fisher information of Gaussians does not depend on the order") {
        for (double s2 : {0.5, 1.0, 4.0})
            for (double a : {0.5, 1.0, 2.0, 5.0})
                CHECK(std::abs(renyi_fisher(*make_gaussian(1, s2), a) - 1 / s2) <= 1e-8);
        CHECK(rel_close(fisher_information(*make_gaussian(1, 0.25)), 4.0, 1e-10));
    }

    TEST_CASE("extremal products") {
        const auto d = make_cos_power(2.0);
        CHECK(rel_close(renyi_power(*d, 2.0) * renyi_fisher(*d, 2.0), 32 * pi * pi / 27, 1e-9));
        const auto x = make_two_sided_exp();
        for (double a : {1e-2, 1e-3, 1e-4}) {
            const double prod = a * renyi_power(*x, a) * renyi_fisher(*x, a);
            CHECK(rel_close(prod, 4.0 * std::pow(a, -2 * a / (1 - a)), 1e-8));
        }
    }

    TEST_CASE("Renyi Fisher information of compact cosine powers, including strongly singular edges") {
        auto lbeta = [](double x, double y) { return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y); };
        for (auto [ad, k] : {std::pair{2.0, 2.0}, std::pair{5.0 / 3.0, 3.0}})
            for (double a : {0.52, 0.6, 1.0, 2.0}) {
                const double ref = a * k * k * std::exp(lbeta((k * a - 1) / 2, 1.5) - lbeta((k * a + 1) / 2, 0.5));
                CHECK(rel_close(renyi_fisher(*make_cos_power(ad), a), ref, 1e-9));
            }
    }

    TEST_CASE("Tsallis-Fisher information") {
        for (const DensityPtr& d : {make_gaussian(1, 2.0), make_cos_power(2.0), make_cosh_power(0.6)})
            for (double a : {0.6, 2.0})
                CHECK(rel_close(tsallis_fisher(*d, a), renyi_fisher(*d, a) * power_integral(*d, a), 1e-10));
        CHECK(rel_close(tsallis_fisher(*make_gaussian(1, 1.0), 2.0), 1 / (2 * std::sqrt(pi)), 1e-10));
        Eigen::MatrixXd K(2, 2);
        K << 1.0, 0.4, 0.4, 2.0;
        const auto g = make_gaussian(K, Eigen::VectorXd::Zero(2));
        const auto M = tsallis_fisher_matrix(*g, 1.5);
        CHECK(rel_close(M.trace(), tsallis_fisher(*g, 1.5), 1e-10));
        CHECK((M - M.transpose()).norm() <= 1e-14 * M.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * M.trace());
    }

    TEST_CASE("weighted Fisher information") {
        for (auto [n, a] : {std::pair{1, 2.0}, std::pair{1, 0.8}, std::pair{2, 1.5}, std::pair{3, 0.9}}) {
            const auto B = make_barenblatt(n, a);
            CHECK(rel_close(weighted_fisher(*B, a), 2 * a * n / std::abs(a - 1), 1e-8));
            CHECK(rel_close(alpha_th_power(*B, a) * weighted_fisher(*B, a), weighted_isoperimetric_constant(n, a), 1e-8));
        }
        CHECK(rel_close(weighted_fisher(*make_gaussian(1, 0.5), 1.0), 2.0, 1e-10));
    }

    TEST_CASE("Tsallis entropy and log-Tsallis quotient") {
        const double s = 3.0;
        const auto g = make_gaussian(1, s * s);
        const double h2 = tsallis_entropy(*g, 2.0);
        CHECK(rel_close(h2, 1 - 1 / (2 * s * std::sqrt(pi)), 1e-12));
        CHECK(rel_close(renyi_fisher(*g, 2.0), tsallis_fisher(*g, 2.0) / (1 - h2), 1e-10));
        CHECK(rel_close(log_tsallis2_fisher(*g), tsallis_fisher(*g, 2.0) / h2, 1e-10));
        CHECK_THROWS_AS(log_tsallis2_fisher(*make_gaussian(1, 0.01)), ConditionError);
    }

    TEST_CASE("generalized Fisher functionals") {
        for (const DensityPtr& d : {make_gaussian(1, 1.5), make_cos_power(2.0), make_tsallis_g(1, 2.0)})
            for (double a : {0.8, 2.0}) {
                const double lam = (a + 1) / 2;
                const auto p = phi_functionals(*d, lam);
                const double Ih = tsallis_fisher(*d, a);
                CHECK(rel_close(p.Phi, Ih / a, 1e-8));
                CHECK(rel_close(p.phi, std::pow(Ih / a, 1 / (a + 1)), 1e-8));
                CHECK(rel_close(a * std::pow(p.phi, a + 1), Ih, 1e-8));
            }
        const auto g = make_gaussian(1, 2.0);
        CHECK(rel_close(phi_functionals(*g, 1.0).Phi, fisher_information(*g), 1e-10));
    }

    TEST_CASE("gradient functionals of compact densities reject orders with a divergent edge") {
        CHECK_THROWS_AS(tsallis_fisher(*make_cos_power(3.0), 0.6), DomainError);
    }

    TEST_CASE("substitution identity") {
        CHECK(substitution_identity_check(*make_gaussian(1, 1.0), 2.0) <= 1e-8);
        CHECK(substitution_identity_check(*make_cos_power(3.0), 3.0) <= 1e-8);
        CHECK(substitution_identity_check(*make_cosh_power(0.5), 0.5) <= 1e-8);
    }

    TEST_CASE("scale covariance and translation invariance") {
        for (const DensityPtr& d : {make_cos_power(2.0), make_cosh_power(0.6), make_two_sided_exp()})
            for (double a : {0.5, 2.0, 5.0})
                for (double al : {0.6, 2.0}) {
                    const auto da = rescale(d, a);
                    CHECK(std::abs(renyi_entropy(*da, al) - renyi_entropy(*d, al) - std::log(a)) <= 1e-8);
                    CHECK(rel_close(renyi_power(*da, al), a * a * renyi_power(*d, al), 1e-8));
                    CHECK(rel_close(renyi_fisher(*da, al), renyi_fisher(*d, al) / (a * a), 1e-8));
                    CHECK(rel_close(renyi_power(*da, al) * renyi_fisher(*da, al),
                                    renyi_power(*d, al) * renyi_fisher(*d, al), 1e-8));
                }
        Eigen::VectorXd c(1);
        c << 1.3;
        for (const DensityPtr& d : {make_cos_power(2.0), make_gaussian(1, 1.0), make_two_sided_exp()}) {
            const auto dc = rescale(d, 1.0, c);
            for (auto k : {FunctionalKind::h_alpha, FunctionalKind::I_alpha, FunctionalKind::I_hat_alpha,
                           FunctionalKind::I_tilde_alpha, FunctionalKind::h_hat_alpha})
                CHECK(rel_close(evaluate_functional(*dc, k, 1.5).value, evaluate_functional(*d, k, 1.5).value, 1e-8));
        }
    }

    TEST_CASE("Renyi entropy decreases in the order") {
        for (const DensityPtr& d : {make_gaussian(1, 1.0), make_cos_power(2.0), make_two_sided_exp()}) {
            double prev = INFINITY;
            for (double a : {0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0}) {
                const double h = renyi_entropy(*d, a);
                CHECK(h < prev);
                prev = h;
            }
        }
    }

    TEST_CASE("functional dispatcher agrees with direct calls") {
        const auto d = make_cos_power(3.0);
        CHECK(evaluate_functional(*d, FunctionalKind::N_alpha, 2.0).value == doctest::Approx(renyi_power(*d, 2.0)));
        CHECK(evaluate_functional(*d, FunctionalKind::sigma2, 2.0).value == doctest::Approx(second_moment(*d)));
        const auto m = evaluate_functional(*d, FunctionalKind::I_hat_matrix, 2.0);
        REQUIRE(m.matrix);
        CHECK(m.value == doctest::Approx(tsallis_fisher(*d, 2.0)));
        CHECK(functional_name(FunctionalKind::script_I2) == "script_I2");
    }
}
