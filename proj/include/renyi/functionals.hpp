#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>

#include "renyi/density.hpp"

namespace renyi {

enum class FunctionalKind {
    h_alpha,
    N_alpha,
    Ntilde_alpha,
    h_hat_alpha,
    I,
    I_alpha,
    I_hat_alpha,
    I_hat_matrix,
    J_lambda,
    I_tilde_alpha,
    script_I2,
    phi,
    Phi,
    sigma2,
};

std::string_view functional_name(FunctionalKind k);

struct FunctionalValue {
    FunctionalKind kind = FunctionalKind::h_alpha;
    double order = 1.0;  // alpha or lambda
    double value = 0.0;  // scalar value, or trace for matrix kinds
    std::optional<Eigen::MatrixXd> matrix;
    double error_estimate = 0.0;
};

inline constexpr double kFunctionalRelTol = 1e-10;

// integral of p^gamma and integral of |grad p|^2 p^(grad_power), from one shared quadrature
struct PowerGradientIntegrals {
    double power_integral = 0.0;
    double gradient_integral = 0.0;        // scalar (trace) form
    Eigen::MatrixXd gradient_matrix;       // outer-product form
    double power_error = 0.0;
    double gradient_error = 0.0;
};

PowerGradientIntegrals power_gradient_integrals(const Density& d, double gamma, double grad_power,
                                                double rel_tol = kFunctionalRelTol);

double power_integral(const Density& d, double gamma, double rel_tol = kFunctionalRelTol);
double shannon_entropy(const Density& d, double rel_tol = kFunctionalRelTol);

double renyi_entropy(const Density& d, double alpha, double rel_tol = kFunctionalRelTol);
double renyi_power(const Density& d, double alpha, double rel_tol = kFunctionalRelTol);
double alpha_th_power(const Density& d, double alpha, double rel_tol = kFunctionalRelTol);
double fisher_information(const Density& d, double rel_tol = kFunctionalRelTol);
double renyi_fisher(const Density& d, double alpha, double rel_tol = kFunctionalRelTol);
double tsallis_fisher(const Density& d, double alpha, double rel_tol = kFunctionalRelTol);
Eigen::MatrixXd tsallis_fisher_matrix(const Density& d, double alpha, double rel_tol = kFunctionalRelTol);
Eigen::MatrixXd lambda_fisher_matrix(const Density& d, double lambda, double rel_tol = kFunctionalRelTol);
double weighted_fisher(const Density& d, double alpha, double rel_tol = kFunctionalRelTol);
double tsallis_entropy(const Density& d, double alpha, double rel_tol = kFunctionalRelTol);
// Tsallis-Fisher of order 2 divided by Tsallis entropy of order 2; requires integral of p^2 < 1.
double log_tsallis2_fisher(const Density& d, double rel_tol = kFunctionalRelTol);

struct PhiPair {
    double phi = 0.0;
    double Phi = 0.0;
};
PhiPair phi_functionals(const Density& d, double lambda, double rel_tol = kFunctionalRelTol);

// |I_alpha(p) - (4/alpha) int |grad f|^2 / int f^2| with f = p^(alpha/2), grad f by finite differences.
double substitution_identity_check(const Density& d, double alpha, double rel_tol = kFunctionalRelTol);

FunctionalValue evaluate_functional(const Density& d, FunctionalKind kind, double order,
                                    double rel_tol = kFunctionalRelTol);

} // namespace renyi
