#pragma once

#include <optional>
#include <string>
#include <vector>

#include "renyi/density.hpp"
#include "renyi/heatflow.hpp"
#include "renyi/report.hpp"

namespace renyi {

struct VerifyTolerances {
    double closed_vs_quad = 1e-6;
    double quad_vs_quad = 1e-5;
    double fd_first = 1e-3;
    double fd_second = 5e-2;
    double psd = 1e-8;            // matrix margin, relative to the trace
    double entropy_gate = 1e-8;   // max-Renyi entropy: quadrature vs Beta-integral closed form
};

struct VerifyOptions {
    VerifyTolerances tol;
    FlowOptions flow;
    double grid_spacing = 0.01;  // sampling step for heat-flow checks of non-Gaussian densities
};

// N_alpha(d) I_alpha(d) >= r_{alpha,n}
VerdictReport isoperimetric_check(const DensityPtr& d, double alpha, const VerifyOptions& opt = {});

// exp(2 h_alpha(f_alpha[K]) / n) I_alpha(d) >= r_{alpha,n}, f_alpha[K] the max-Renyi density with d's covariance
VerdictReport cramer_rao_renyi(const DensityPtr& d, double alpha, const VerifyOptions& opt = {});

// weighted Fisher CRI with the reference second moment taken as n, as it is usually stated
VerdictReport cramer_rao_weighted(const DensityPtr& d, double alpha, const VerifyOptions& opt = {});
// the same bound assembled from the moment-entropy and weighted isoperimetric inequalities:
// (sigma2(B)/sigma2(d))^{n(alpha-1)/2+1} Itilde(B)
VerdictReport cramer_rao_weighted_chain(const DensityPtr& d, double alpha, const VerifyOptions& opt = {});
// weighted isoperimetric product Ntilde * Itilde >= gamma_{n,alpha}
VerdictReport weighted_isoperimetric_check(const DensityPtr& d, double alpha, const VerifyOptions& opt = {});

// (sigma2(d)/sigma2(B))^{n(alpha-1)/2+1} >= Ntilde(d)/Ntilde(B)
VerdictReport moment_entropy_check(const DensityPtr& d, double alpha, const VerifyOptions& opt = {});

// n = 1: sigma2^{1/2} Ihat^{1/(alpha+1)} >= same at G; n >= 3: (sigma2(d)/sigma2(G))^{(alpha-1)n/2+1} >= Ihat(G)/Ihat(d)
VerdictReport cramer_rao_tsallis(const DensityPtr& d, double alpha, const VerifyOptions& opt = {});

// Ihat_alpha matrix - 4 alpha (int p^{(alpha+1)/2})^2/(alpha+1)^2 K^{-1} is PSD
VerdictReport cramer_rao_matrix(const DensityPtr& d, double alpha, const VerifyOptions& opt = {});

struct BellValues {
    int order = 0;
    std::vector<double> inputs;
    std::vector<double> values;  // B_1..B_m
};

// Complete exponential Bell polynomials via B_{m+1} = sum_i C(m,i) B_{m-i} x_{i+1}, B_0 = 1.
BellValues bell_polynomials(const std::vector<double>& x);

// Bound on (-1)^{j-1} d^j/dt^j h_alpha(X_t) at t0 (n = 1, j = 1 or 2) in the regimes where the
// entropy power N_alpha^beta(X_t) is known to be concave. beta defaults to the regime's value.
VerdictReport cm_bound_check(const DensityPtr& d, double alpha, std::optional<double> beta, int j, double t0,
                             const VerifyOptions& opt = {});

// (-1)^{j-1}/2 d^{j-1}/dt^{j-1} of Ihat_2/hhat_2 along the flow against its max-entropy bound, plus the
// sign chain (-1)^k d^k/dt^k Ihat_2(X_t) >= 0 for k <= 3.
VerdictReport log_tsallis_cm_check(const DensityPtr& d, double t0, int j = 1, const VerifyOptions& opt = {});

// Named groups: isoperimetric, cramer_rao, moment_entropy, tsallis, matrix, cm, epi, all.
std::vector<VerdictReport> run_suite(const std::string& name, const DensityPtr& d, double alpha,
                                     const VerifyOptions& opt = {});
std::vector<std::string> suite_names();

} // namespace renyi
