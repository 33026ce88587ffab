#include "renyi/constants.hpp"

#include <cmath>
#include <numbers>

#include "renyi/errors.hpp"
#include "renyi/special_functions.hpp"

namespace renyi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

double log_r_1d(double a) {
    if (a > 1.0) {
        const double q = (a + 1.0) / (a - 1.0);
        return std::log(2.0 * kPi / (a - 1.0)) + q * std::log1p((a - 1.0) / (a + 1.0)) +
               2.0 * (log_gamma((a + 1.0) / (2.0 * (a - 1.0))) - log_gamma(a / (a - 1.0)));
    }
    return std::log(4.0 * kPi * a / (1.0 - a * a)) + (2.0 * a / (1.0 - a)) * std::log1p((1.0 - a) / (2.0 * a)) +
           2.0 * (log_gamma(a / (1.0 - a)) - log_gamma((a + 1.0) / (2.0 * (1.0 - a))));
}

} // namespace

std::string_view route_name(ConstantRoute route) {
    switch (route) {
    case ConstantRoute::closed_form_1d: return "closed_form_1d";
    case ConstantRoute::ode_profile: return "ode_profile";
    case ConstantRoute::sobolev: return "sobolev";
    case ConstantRoute::zero_region: return "zero_region";
    case ConstantRoute::limit_alpha0: return "limit_alpha0";
    case ConstantRoute::limit_alphainf: return "limit_alphainf";
    case ConstantRoute::shannon: return "shannon";
    }
    return "unknown";
}

ConstantRecord r_closed_form_1d(double alpha) {
    if (!(alpha >= 0.0)) throw DomainError("r_closed_form_1d: alpha must be nonnegative");
    ConstantRecord rec;
    rec.alpha = alpha;
    rec.n = 1;
    if (alpha == 0.0) {
        rec.value = std::numeric_limits<double>::infinity();
        rec.route = ConstantRoute::limit_alpha0;
        rec.limit_scaled = 4.0;
        return rec;
    }
    if (std::isinf(alpha)) {
        rec.value = 0.0;
        rec.route = ConstantRoute::limit_alphainf;
        rec.limit_scaled = 4.0 * kPi * kPi;
        return rec;
    }
    if (is_shannon(alpha)) {
        rec.value = 2.0 * kPi * kE;
        rec.route = ConstantRoute::shannon;
        return rec;
    }
    rec.value = std::exp(log_r_1d(alpha));
    rec.route = ConstantRoute::closed_form_1d;
    return rec;
}

ConstantRecord r_sobolev(int n) {
    if (n < 3) throw DomainError("r_sobolev: need n >= 3");
    const double dn = n;
    ConstantRecord rec;
    rec.n = n;
    rec.alpha = (dn - 2.0) / dn;
    rec.value = std::exp(std::log(4.0 * kPi * dn * dn) + (2.0 / dn) * (log_gamma(dn / 2.0) - log_gamma(dn)));
    rec.route = ConstantRoute::sobolev;
    return rec;
}

ConstantRecord r_zero_region(int n, double alpha) {
    if (n < 3) throw DomainError("r_zero_region: need n >= 3");
    if (!(alpha > 0.0 && alpha < (n - 2.0) / n)) throw DomainError("r_zero_region: need 0 < alpha < (n-2)/n");
    ConstantRecord rec;
    rec.n = n;
    rec.alpha = alpha;
    rec.value = 0.0;
    rec.route = ConstantRoute::zero_region;
    return rec;
}

double gaussian_isoperimetric_value(double alpha) {
    if (!(alpha > 0.0)) throw DomainError("gaussian_isoperimetric_value: alpha must be positive");
    if (is_shannon(alpha)) return 2.0 * kPi * kE;
    return 2.0 * kPi * std::exp(std::log(alpha) / (alpha - 1.0));
}

double weighted_isoperimetric_constant(int n, double alpha) {
    const double dn = n;
    if (n < 1) throw DomainError("weighted_isoperimetric_constant: n must be positive");
    if (!(alpha > dn / (dn + 2.0))) throw DomainError("weighted_isoperimetric_constant: need alpha > n/(n+2)");
    if (is_shannon(alpha)) return 2.0 * kPi * kE * dn;
    const double tail = ((2.0 + dn * (alpha - 1.0)) / (dn * (alpha - 1.0))) *
                        std::log(((dn + 2.0) * alpha - dn) / (2.0 * alpha));
    double lg;
    double lead;
    if (alpha > 1.0) {
        lead = std::log(dn * kPi * 2.0 * alpha / (alpha - 1.0));
        lg = log_gamma(alpha / (alpha - 1.0)) - log_gamma(dn / 2.0 + alpha / (alpha - 1.0));
    } else {
        lead = std::log(dn * kPi * 2.0 * alpha / (1.0 - alpha));
        lg = log_gamma(1.0 / (1.0 - alpha) - dn / 2.0) - log_gamma(1.0 / (1.0 - alpha));
    }
    return std::exp(lead + (2.0 / dn) * lg + tail);
}

double omega_bounds_1d(double alpha) {
    if (!(alpha > 1.0 / 3.0)) throw DomainError("omega_bounds_1d: need alpha > 1/3");
    if (is_shannon(alpha)) return 1.0;
    const double a = alpha;
    double lw;
    if (a < 1.0) {
        const double m = 1.0 - a;
        lw = std::log(4.0 * a) + ((3.0 * a - 1.0) / m) * std::log(a + 1.0) + ((1.0 + a) / m) * std::log(3.0 * a - 1.0) -
             (2.0 * (a + 1.0) / m) * std::log(2.0 * a) +
             2.0 * (log_gamma(a / m) + log_gamma(1.0 / m) - 2.0 * log_gamma((a + 1.0) / (2.0 * m)));
    } else {
        const double m = a - 1.0;
        lw = (4.0 / m) * std::log(2.0) + 2.0 * std::log(m) + ((a + 3.0) / m) * std::log(a) +
             ((a - 3.0) / m) * std::log(a + 1.0) - ((1.0 + a) / m) * std::log(3.0 * a - 1.0) +
             4.0 * (log_gamma((a + 1.0) / (2.0 * m)) - log_gamma(1.0 / m));
    }
    return std::exp(lw);
}

double cm_bound_coefficients(double alpha, double beta, int j, double t, double K) {
    if (j < 1) throw DomainError("cm_bound_coefficients: j must be >= 1");
    if (!(K > 0.0)) throw DomainError("cm_bound_coefficients: K must be positive");
    if (!(t >= 0.0)) throw DomainError("cm_bound_coefficients: t must be nonnegative");
    if (!(beta > 0.0)) throw DomainError("cm_bound_coefficients: beta must be positive");
    const double omega = omega_bounds_1d(alpha);
    const double lc = std::lgamma(static_cast<double>(j)) + (j - 1) * std::log(beta) - std::log(2.0) +
                      j * std::log(omega / (K + t));
    return std::exp(lc);
}

double tsallis2_of_max_entropy_1d(double K) {
    if (!(K > 0.0)) throw DomainError("tsallis2_of_max_entropy_1d: K must be positive");
    const double g52 = std::exp(log_gamma(2.5));
    const double g72 = std::exp(log_gamma(3.5));
    return 1.0 - 2.0 * g52 * g52 / (std::sqrt(5.0 * kPi * K) * g72);
}

double log_tsallis_cm_bound(double K, double t, int j) {
    if (j < 1) throw DomainError("log_tsallis_cm_bound: j must be >= 1");
    if (!(K > 0.0) || !(t >= 0.0)) throw DomainError("log_tsallis_cm_bound: need K > 0, t >= 0");
    const double g32 = std::exp(log_gamma(1.5));
    const double g52 = std::exp(log_gamma(2.5));
    const double g72 = std::exp(log_gamma(3.5));
    const double gap0 = std::sqrt(5.0 * kPi * K) * g72 - 2.0 * g52 * g52;
    if (!(gap0 > 1e-12 * g52 * g52)) throw ConditionError("log_tsallis_cm_bound: the max-entropy density has integral of square >= 1");
    const double s = K + t;
    const double gap = std::sqrt(5.0 * kPi * s) * g72 - 2.0 * g52 * g52;
    const double base = 512.0 * g32 * g32 * std::pow(g52, 6) / (135.0 * s * g72 * g72 * gap);
    return std::exp(std::lgamma(static_cast<double>(j)) + j * std::log(base));
}

} // namespace renyi
