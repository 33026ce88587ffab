#include "renyi/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "renyi/errors.hpp"

namespace renyi {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_log_gamma(double x) {
    // valid for x >= 0.5
    const double z = x - 1.0;
    double a = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

} // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
    if (std::isinf(x)) return x;
    if (x < 0.5) return lanczos_log_gamma(x + 1.0) - std::log(x);
    return lanczos_log_gamma(x);
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

double nagy_w(double u, double v) {
    if (u < 0.0 || v < 0.0) throw DomainError("nagy_w: arguments must be nonnegative");
    if (u == 0.0 || v == 0.0) return 1.0;
    const double s = u + v;
    const double lw = log_gamma(1.0 + s) - log_gamma(1.0 + u) - log_gamma(1.0 + v) + u * std::log(u / s) +
                      v * std::log(v / s);
    return std::exp(lw);
}

double gamma_ratio_gap_check(double x, double s) {
    if (!(x > 0.0) || !(s > 0.0 && s < 1.0)) throw DomainError("gamma_ratio_gap_check: need x > 0 and 0 < s < 1");
    return std::exp(log_gamma(x + 1.0) - log_gamma(x + s)) - std::pow(x + s / 2.0, 1.0 - s);
}

} // namespace renyi
