#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "renyi/density.hpp"
#include "renyi/report.hpp"

namespace renyi {

using GridPtr = std::shared_ptr<const GridDensity>;

struct FlowOptions {
    double rel_tol = 1e-11;         // functional quadrature
    double fd_rel_step = 0.05;      // time step as a fraction of t
    double fd_min_step = 1e-3;      // used at t = 0 (one-sided stencils)
    double richardson_gate = 0.1;   // relative disagreement between step and step/2 that counts as noise
    int threads = 0;                // 0: hardware concurrency
};

// Samples a one-dimensional density on spacing h over its support, or out to where p < 1e-30 max p.
GridPtr sample_grid(const Density& d, double h);

// Density of X + sqrt(t) Z: exact convolution of the cubic Hermite interpolant with N(0, t), sampled on the
// input lattice extended by 6 sqrt(t) each side. Requires h <= sqrt(t)/4.
GridPtr evolve(const GridDensity& d, double t);

// Evolves to every t (in parallel); t = 0 returns the input.
std::vector<GridPtr> evolve_many(const GridDensity& d, const std::vector<double>& ts, int threads = 0);

struct FlowTrace {
    double alpha = 1.0;
    std::vector<double> t;
    std::vector<double> h;
    std::vector<double> N;
    std::vector<double> I;
    std::vector<double> dh_dt_fd;
    std::vector<double> d2N_dt2_fd;
    std::vector<double> residual;     // dh_dt_fd - I/2
    std::vector<double> fd_gap;       // |dh/dt(step) - dh/dt(step/2)|
    std::vector<double> fd_step;
};

FlowTrace trace(const GridDensity& d, double alpha, const std::vector<double>& t_grid, const FlowOptions& opt = {});
// Several orders sharing one set of evolved grids.
std::vector<FlowTrace> trace_orders(const GridDensity& d, const std::vector<double>& alphas,
                                    const std::vector<double>& t_grid, const FlowOptions& opt = {});

// Log-spaced points from t_lo to 0.1, then uniform to t_hi.
std::vector<double> default_time_grid(double t_lo, double t_hi, int log_points = 6, int uniform_points = 10);

struct FlowDerivative {
    double t = 0.0;
    int order = 1;
    double value = 0.0;   // estimate with step/2
    double coarse = 0.0;  // estimate with step
    double step = 0.0;
    bool one_sided = false;
};

// t -> density of X_t, with the smallest positive time the representation resolves.
struct Flow {
    std::function<DensityPtr(double)> at;
    double min_time = 0.0;
    int dim = 1;
    bool closed_form = false;
};

Flow grid_flow(const GridPtr& g);
// Gaussians evolve in closed form (K + t I, any dimension); grids evolve directly; other one-dimensional
// densities are sampled on spacing h first.
Flow make_flow(const DensityPtr& d, double h);

// order-th time derivative (1..3) of f(X_t) at t0 by 4th-order differences with a step-halving check.
// Throws ConvergenceError when the two estimates disagree by more than the gate (relative to the larger),
// unless both are below noise_floor.
FlowDerivative flow_derivative(const Flow& flow, const std::function<double(const Density&)>& f, double t0,
                               int order, double step, const FlowOptions& opt = {}, double noise_floor = 0.0);
FlowDerivative flow_derivative(const GridDensity& d, const std::function<double(const Density&)>& f, double t0,
                               int order, double step, const FlowOptions& opt = {}, double noise_floor = 0.0);

// N_alpha(X_t) >= N_alpha(X) + r_{alpha,1} t on each t; pass iff every margin >= -1e-6 N_alpha(X).
VerdictReport epi_gaussian_check(const GridDensity& d, double alpha, const std::vector<double>& t_grid,
                                 const FlowOptions& opt = {});

struct ConcavityEstimate {
    double t0 = 0.0;
    double step = 0.0;
    double second_derivative = 0.0;
    double coarse = 0.0;
    double noise_floor = 0.0;
};

// d^2/dt^2 N_alpha(X_t) at t0 with step t0/20.
ConcavityEstimate concavity_probe(const GridDensity& d, double alpha, double t0, const FlowOptions& opt = {});

struct SecantWitness {
    double T = 0.0;
    double N0 = 0.0;
    double NT = 0.0;
    double initial_slope = 0.0;    // N_alpha(X) I_alpha(X)
    double secant_slope = 0.0;     // (N_alpha(X_T) - N_alpha(X)) / T
    double gaussian_slope = 0.0;   // 2 pi alpha^{1/(alpha-1)}, the long-run lower bound
    bool contradicts_concavity = false;
};

// T defaults to 2 N_alpha(X) / (2 pi alpha^{1/(alpha-1)} - r_{alpha,1}); it is a tuning constant.
SecantWitness secant_witness(const GridDensity& d, double alpha, double T = 0.0, const FlowOptions& opt = {});

} // namespace renyi
