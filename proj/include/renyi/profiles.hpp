#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "renyi/constants.hpp"
#include "renyi/density.hpp"

namespace renyi {

// Ground state u of u'' + (n-1)/t u' + u^{r-1} = u^{s-1}, u'(0) = 0, u positive and decreasing.
//   compact_support (1 < alpha <= 2): r = 2, s = 2/alpha, u(T) = u'(T) = 0
//   infinite_decay  (alpha < 1):      r = 2/alpha, s = 2, u -> 0
enum class ProfileCase { compact_support, infinite_decay };

std::string_view profile_case_name(ProfileCase c);

struct ProfileNode {
    double t = 0.0;
    double u = 0.0;
    double du = 0.0;
    double d2u = 0.0;
};

struct ProfileOptions {
    double ode_rel_tol = 1e-12;
    int max_bisections = 200;
};

struct ProfileSolution {
    int n = 1;
    double alpha = 2.0;
    ProfileCase kind = ProfileCase::compact_support;
    double u0 = 0.0;
    std::optional<double> T;  // support radius (compact case)
    double r_exponent = 2.0;
    double s_exponent = 1.0;
    std::vector<ProfileNode> nodes;  // integrator nodes, t ascending from 0
    // decay case: u = tail_scale * t^{-nu} K_nu(t) beyond tail_start, nu = (n-2)/2
    double tail_start = std::numeric_limits<double>::infinity();
    double tail_scale = 0.0;
    double t_max = 0.0;  // compact: T; decay: where the discarded tail of u^2 t^{n-1} is below 1e-12 M_2
    double Ms = 0.0;     // M_{2/alpha} (compact) or M_2 (decay)
    double mass = 0.0;   // M_{2/alpha}: integral of u^{2/alpha} over R^n
    int bisection_steps = 0;

    double u(double t) const;
    double du(double t) const;
    double d2u(double t) const;
    double log_u(double t) const;
    // radial samples (t, u, u') on [0, t_max]
    std::vector<ProfileNode> samples() const;
};

using ProfilePtr = std::shared_ptr<const ProfileSolution>;

// Which ODE applies; throws UnsupportedRegion outside the orders with a known ground state.
ProfileCase profile_case(int n, double alpha);

ProfileSolution solve_profile(int n, double alpha, const ProfileOptions& opt = {});
// Memoized solve keyed by (n, alpha) with default options.
ProfilePtr cached_profile(int n, double alpha);

// Integral over R^n of u^s(|x|).
double profile_moment(const ProfileSolution& sol, double s);
// M_{2/alpha} in the compact case, M_2 in the decay case.
double compute_Ms(const ProfileSolution& sol);

// max over step midpoints of |u'' + (n-1)/t u' + u^{r-1} - u^{s-1}| / u0 with u'' from the interpolant.
double ode_residual(const ProfileSolution& sol);

// Constant from the ground-state mass: general-dimension formula (also valid at n = 1, 2).
double ode_constant_formula(int n, double alpha, double Ms);
// The planar (n = 2) form of the same constant.
double planar_constant_formula(double alpha, double Ms);

// Extremal density b^n / M_{2/alpha} * u^{2/alpha}(|b x + c|).
DensityPtr profile_density(const ProfilePtr& sol, double b = 1.0, const Eigen::VectorXd& c = {});

// r_{alpha,n} across all regimes; throws UnsupportedRegion where no formula is available.
ConstantRecord optimal_constant(int n, double alpha);

} // namespace renyi
