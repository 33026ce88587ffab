#include <doctest.h>

#include <cmath>
#include <numbers>

#include "renyi/constants.hpp"
#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"
#include "renyi/verify.hpp"

using namespace renyi;
constexpr double pi = std::numbers::pi;
constexpr double e = std::numbers::e;

namespace {
void check_report_invariants(const VerdictReport& r) {
    CHECK(r.pass == (r.margin >= -r.tolerance));
    if (r.equality_expected && r.pass) CHECK(std::abs(r.margin) <= 10 * r.tolerance);
}
} // namespace

TEST_SUITE("verify") {
    TEST_CASE("isoperimetric verdicts") {
        const auto c = isoperimetric_check(make_cos_power(2.0), 2.0);
        CHECK(c.pass);
        CHECK(c.equality_expected);
        CHECK(c.equality_met());
        const auto g = isoperimetric_check(make_gaussian(1, 1.0), 2.0);
        CHECK(g.lhs == doctest::Approx(4 * pi).epsilon(1e-9));
        CHECK(g.margin > g.tolerance);
        const auto s = isoperimetric_check(make_gaussian(1, 3.0), 1.0);
        CHECK(s.equality_expected);
        CHECK(s.lhs == doctest::Approx(2 * pi * e).epsilon(1e-9));
        check_report_invariants(s);
    }

    TEST_CASE("isoperimetric verdicts are affine invariant") {
        for (const DensityPtr& d : {make_cos_power(3.0), make_two_sided_exp(), make_cosh_power(0.6)}) {
            const auto base = isoperimetric_check(d, 1.5);
            for (double b : {0.5, 2.0}) {
                Eigen::VectorXd c(1);
                c << 1.0;
                const auto r = isoperimetric_check(rescale(d, b, c), 1.5);
                CHECK(r.pass == base.pass);
                CHECK(r.margin == doctest::Approx(base.margin).epsilon(1e-7));
            }
        }
    }

    TEST_CASE("Renyi Cramer-Rao") {
        const auto g = cramer_rao_renyi(make_gaussian(1, 1.0), 1.0);
        CHECK(g.equality_expected);
        CHECK(g.equality_met());
        CHECK(g.rhs == doctest::Approx(2 * pi * e));
        const auto c = cramer_rao_renyi(make_cos_power(2.0), 2.0);
        CHECK(c.pass);
        CHECK_FALSE(c.equality_expected);
        CHECK(c.margin > c.tolerance);
        CHECK(c.details.at("omega_form_lhs") >= c.details.at("omega_form_rhs"));
        CHECK_THROWS_AS(cramer_rao_renyi(make_gaussian(3, 1.0), 0.5), DomainError);
    }

    TEST_CASE("weighted Cramer-Rao: stated form fails on its own equality case") {
        for (auto [n, a] : {std::pair{1, 2.0}, std::pair{1, 0.8}, std::pair{2, 1.5}}) {
            const auto B = make_barenblatt(n, a);
            const auto stated = cramer_rao_weighted(B, a);
            CHECK(stated.lhs == doctest::Approx(2 * a * n / std::abs(a - 1)).epsilon(1e-8));
            CHECK_FALSE(stated.pass);
            const auto chain = cramer_rao_weighted_chain(B, a);
            CHECK(chain.pass);
            CHECK(chain.equality_met());
            CHECK(std::abs(chain.margin) <= 1e-6 * chain.rhs);
            const auto iso = weighted_isoperimetric_check(B, a);
            CHECK(std::abs(iso.margin) <= 1e-6 * iso.rhs);
            const auto me = moment_entropy_check(B, a);
            CHECK(me.equality_met());
        }
        const auto g = cramer_rao_weighted_chain(make_gaussian(1, 1.0), 2.0);
        CHECK(g.margin > g.tolerance);
        const auto me = moment_entropy_check(make_gaussian(1, 1.0), 2.0);
        CHECK(me.margin > me.tolerance);
        CHECK_THROWS_AS(cramer_rao_weighted(make_gaussian(1, 1.0), 1.0), DomainError);
    }

    TEST_CASE("moment-entropy at the Shannon order") {
        const auto g = moment_entropy_check(make_gaussian(2, 1.5), 1.0);
        CHECK(g.equality_met());
        const auto x = moment_entropy_check(make_two_sided_exp(), 1.0);
        CHECK(x.margin > x.tolerance);
    }

    TEST_CASE("Tsallis Cramer-Rao") {
        const auto G = make_tsallis_g(1, 2.0);
        for (double s : {1.0, 2.0}) {
            const auto r = cramer_rao_tsallis(rescale(G, s), 2.0);
            CHECK(r.equality_expected);
            CHECK(std::abs(r.margin) <= 1e-6 * r.rhs);
        }
        const auto g = cramer_rao_tsallis(make_gaussian(1, 1.0), 2.0);
        CHECK(g.margin > g.tolerance);
        const auto g3 = cramer_rao_tsallis(make_tsallis_g(3, 1.5), 1.5);
        CHECK(std::abs(g3.margin) <= 1e-6);
        CHECK_THROWS_AS(cramer_rao_tsallis(make_gaussian(2, 1.0), 1.5), UnsupportedRegion);
        CHECK_THROWS_AS(cramer_rao_tsallis(make_gaussian(3, 1.0), 0.2), DomainError);
    }

    TEST_CASE("matrix Cramer-Rao") {
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2, 2);
        K(0, 0) = 1.0;
        K(1, 1) = 2.0;
        const auto r = cramer_rao_matrix(make_g_lambda(1.25, K), 1.5);
        CHECK(r.details.at("max_abs_eigenvalue_over_trace") <= 1e-6);
        CHECK(r.equality_met());
        const auto one = cramer_rao_matrix(make_g_lambda(1.5, Eigen::MatrixXd::Identity(1, 1)), 2.0);
        CHECK(std::abs(one.margin) <= 1e-8);
        const auto g = cramer_rao_matrix(make_gaussian(2, 1.0), 2.0);
        CHECK(g.margin > 0.0);
        const auto s = cramer_rao_matrix(make_gaussian(K, Eigen::VectorXd::Zero(2)), 1.0);
        CHECK(s.equality_expected);
        CHECK(s.details.at("max_abs_eigenvalue_over_trace") <= 1e-8);
    }

    TEST_CASE("Bell polynomials") {
        const auto b = bell_polynomials({1, 1, 1, 1});
        CHECK(b.values == std::vector<double>{1, 2, 5, 15});
        for (double x1 : {-2.0, 1.0, 3.0})
            for (double x2 : {-1.0, 2.0})
                for (double x3 : {0.0, 5.0})
                    for (double x4 : {-3.0, 7.0}) {
                        const auto v = bell_polynomials({x1, x2, x3, x4}).values;
                        CHECK(v[0] == x1);
                        CHECK(v[1] == x1 * x1 + x2);
                        CHECK(v[2] == x1 * x1 * x1 + 3 * x1 * x2 + x3);
                        CHECK(v[3] == std::pow(x1, 4) + 6 * x1 * x1 * x2 + 4 * x1 * x3 + 3 * x2 * x2 + x4);
                        const auto w = bell_polynomials({-x1, x2, -x3, x4}).values;
                        CHECK(w[2] == -v[2]);
                        CHECK(w[3] == v[3]);
                    }
        CHECK_THROWS_AS(bell_polynomials({}), DomainError);
    }

    TEST_CASE("derivative bounds along the flow") {
        const auto g = cm_bound_check(make_gaussian(1, 1.0), 1.0, std::nullopt, 1, 0.5);
        CHECK(g.pass);
        CHECK(g.equality_met());
        CHECK(g.rhs == doctest::Approx(1.0 / 3.0));
        const auto half = cm_bound_check(make_gaussian(1, 1.0), 0.5, std::nullopt, 1, 0.5);
        CHECK(half.pass);
        CHECK(half.lhs == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
        for (double t0 : {0.2, 0.5})
            for (int j : {1, 2}) {
                CHECK(cm_bound_check(make_gaussian(1, 1.0), 2.0, std::nullopt, j, t0).pass);
                CHECK(cm_bound_check(make_cos_power(2.0), 2.0, std::nullopt, j, t0).pass);
            }
        CHECK_THROWS_AS(cm_bound_check(make_gaussian(1, 1.0), 0.3, std::nullopt, 1, 0.5), DomainError);
        CHECK_THROWS_AS(cm_bound_check(make_gaussian(1, 1.0), 2.0, 0.3, 1, 0.5), DomainError);
        CHECK_THROWS_AS(cm_bound_check(make_gaussian(2, 1.0), 2.0, std::nullopt, 1, 0.5), DomainError);
    }

    TEST_CASE("log-Tsallis bound") {
        const auto r = log_tsallis_cm_check(make_gaussian(1, 4.0), 0.5, 1);
        CHECK(r.pass);
        CHECK(r.rhs == doctest::Approx(r.details.at("rhs_closed_form_1d")).epsilon(1e-12));
        // closed form along the Gaussian flow: Ihat2 = (s2 + t)^{-3/2} / (2 sqrt(pi))
        const double v = 4.5;
        CHECK(r.details.at("Ihat2") == doctest::Approx(std::pow(v, -1.5) / (2 * std::sqrt(pi))).epsilon(1e-9));
        CHECK(r.details.at("Ihat2_signed_derivative_1") ==
              doctest::Approx(1.5 * std::pow(v, -2.5) / (2 * std::sqrt(pi))).epsilon(1e-6));
        CHECK(r.details.at("Ihat2_signed_derivative_2") ==
              doctest::Approx(3.75 * std::pow(v, -3.5) / (2 * std::sqrt(pi))).epsilon(1e-4));
        CHECK_THROWS_AS(log_tsallis_cm_check(make_gaussian(1, 0.01), 0.0, 1), ConditionError);
    }

    TEST_CASE("suites") {
        const auto all = run_suite("all", make_gaussian(1, 1.0), 2.0);
        CHECK(all.size() > 8);
        for (const auto& r : all) check_report_invariants(r);
        CHECK_THROWS_AS(run_suite("nope", make_gaussian(1, 1.0), 2.0), InputError);
    }
}
