#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace renyi {

inline constexpr double kAlphaInfinity = std::numeric_limits<double>::infinity();
// |alpha - 1| below this selects the Shannon branch everywhere.
inline constexpr double kShannonBand = 1e-9;

inline bool is_shannon(double alpha) { return std::abs(alpha - 1.0) < kShannonBand; }

enum class ConstantRoute { closed_form_1d, ode_profile, sobolev, zero_region, limit_alpha0, limit_alphainf, shannon };

std::string_view route_name(ConstantRoute route);

struct ConstantRecord {
    double alpha = 0.0;
    int n = 1;
    // r_{alpha,n}; for the two limit routes this is the limit of r itself (+inf at alpha = 0, 0 at alpha = inf).
    double value = 0.0;
    ConstantRoute route = ConstantRoute::closed_form_1d;
    std::optional<double> limit_scaled;  // alpha * r in the alpha -> 0 / alpha -> inf limits
    std::map<std::string, double> metadata;
};

// Sharp constant of N_alpha * I_alpha >= r on the line, for alpha in [0, inf] (inf = kAlphaInfinity).
ConstantRecord r_closed_form_1d(double alpha);

// Sobolev endpoint alpha = (n-2)/n, n >= 3.
ConstantRecord r_sobolev(int n);

// 0 < alpha < (n-2)/n, n >= 3: the constant degenerates to zero.
ConstantRecord r_zero_region(int n, double alpha);

// N_alpha * I_alpha of any one-dimensional Gaussian: 2 pi alpha^(1/(alpha-1)).
double gaussian_isoperimetric_value(double alpha);

// Sharp constant of the alpha-weighted isoperimetric inequality (alpha-th power times weighted Fisher).
double weighted_isoperimetric_constant(int n, double alpha);

// omega(alpha) such that I_alpha(f) * Var(f) >= omega on the line (alpha > 1/3).
double omega_bounds_1d(double alpha);

// (j-1)! beta^(j-1) / 2 * (omega(alpha)/(K+t))^j
double cm_bound_coefficients(double alpha, double beta, int j, double t, double K);

// Right-hand side of the completely-monotone bound for the log-Tsallis Fisher quotient of order 2 on the line.
double log_tsallis_cm_bound(double K, double t, int j);

// Tsallis entropy of order 2 of the variance-K max-entropy density on the line: 1 - 2 G(5/2)^2 / (sqrt(5 pi K) G(7/2)).
double tsallis2_of_max_entropy_1d(double K);

} // namespace renyi
