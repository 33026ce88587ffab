#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace renyi {

struct IntegralResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int subdivisions = 0;
    double truncation_bound = 0.0;
    bool converged = true;
};

template <std::size_t M>
struct IntegralResultN {
    std::array<double, M> value{};
    double abs_error_estimate = 0.0;  // max over components
    int subdivisions = 0;
    double truncation_bound = 0.0;
    bool converged = true;
};

// Success when error <= max(abs, rel * |value|); for vector integrands every component is checked.
struct Tolerance {
    double abs = 1e-10;
    double rel = 0.0;
    Tolerance(double a = 1e-10, double r = 0.0) : abs(a), rel(r) {}
    static Tolerance relative(double r) { return {1e-300, r}; }
    double target(double v) const;
};

// Envelope of an integrand's tail, measured as y = max(|x - center| - offset, 0):
//   exponential: y^d e^{-rate y}; gaussian: y^d e^{-rate y^2}; power: y^{-rate} (d lowers the rate).
struct Decay {
    enum class Kind { exponential, gaussian, power };
    Kind kind = Kind::exponential;
    double rate = 1.0;
    double center = 0.0;
    double offset = 0.0;
    int poly_degree = 0;

    static Decay exponential(double rate, double center = 0.0) { return {Kind::exponential, rate, center, 0.0, 0}; }
    static Decay gaussian(double rate, double center = 0.0) { return {Kind::gaussian, rate, center, 0.0, 0}; }
    static Decay power(double rate, double center = 0.0) { return {Kind::power, rate, center, 0.0, 0}; }

    // Envelope of f^gamma when this describes f.
    Decay raised(double gamma) const;
    Decay with_poly(int extra_degree) const;
    // Envelope after the change of variable x -> center + scale * x.
    Decay rescaled(double scale, double new_center) const;
    // (integral of the envelope beyond distance y) / (envelope at y); infinite when not yet in the asymptotic range.
    double remainder_ratio(double y) const;
    double natural_scale() const;
};

struct EndpointExponents {
    double left = 0.0;   // integrand ~ (x - a)^left
    double right = 0.0;  // integrand ~ (b - x)^right
};

struct RadialSupport {
    double radius = std::numeric_limits<double>::infinity();
    double edge_exponent = 0.0;  // integrand g ~ (radius - t)^edge_exponent
    std::optional<Decay> decay;  // for radius = inf, envelope of g in t
    std::vector<double> breakpoints;
};

struct QuadOptions {
    int max_subdivisions = 20000;
};

using Integrand = std::function<double(double)>;
template <std::size_t M>
using IntegrandN = std::function<std::array<double, M>(double)>;

// Endpoint exponents below -1 are rejected; fractional ones trigger a power substitution.
IntegralResult integrate_interval(const Integrand& f, double a, double b, Tolerance tol, EndpointExponents ends = {},
                                  QuadOptions opt = {});

// Integral over [breaks.front(), breaks.back()] with the interior break points as initial partition.
IntegralResult integrate_piecewise(const Integrand& f, std::span<const double> breaks, Tolerance tol,
                                   EndpointExponents ends = {}, QuadOptions opt = {});

// Integral over the whole line; breakpoints (finite, sorted) mark kinks.
IntegralResult integrate_line(const Integrand& f, const Decay& decay, Tolerance tol,
                              std::span<const double> breakpoints = {}, QuadOptions opt = {});

// (2 pi^{n/2} / Gamma(n/2)) * integral of g(t) t^{n-1} over the radial support.
IntegralResult integrate_radial(const Integrand& g, int n, const RadialSupport& support, Tolerance tol,
                                QuadOptions opt = {});

double unit_sphere_area(int n);

// Vector-valued versions (one shared evaluation per node).
// lo/hi may be infinite; infinite ends require a decay descriptor.
template <std::size_t M>
IntegralResultN<M> integrate_general(const IntegrandN<M>& f, double lo, double hi, std::span<const double> breakpoints,
                                     EndpointExponents ends, const std::optional<Decay>& decay, Tolerance tol,
                                     QuadOptions opt = {});

extern template IntegralResultN<1> integrate_general<1>(const IntegrandN<1>&, double, double, std::span<const double>,
                                                        EndpointExponents, const std::optional<Decay>&, Tolerance,
                                                        QuadOptions);
extern template IntegralResultN<2> integrate_general<2>(const IntegrandN<2>&, double, double, std::span<const double>,
                                                        EndpointExponents, const std::optional<Decay>&, Tolerance,
                                                        QuadOptions);
extern template IntegralResultN<3> integrate_general<3>(const IntegrandN<3>&, double, double, std::span<const double>,
                                                        EndpointExponents, const std::optional<Decay>&, Tolerance,
                                                        QuadOptions);
extern template IntegralResultN<4> integrate_general<4>(const IntegrandN<4>&, double, double, std::span<const double>,
                                                        EndpointExponents, const std::optional<Decay>&, Tolerance,
                                                        QuadOptions);

} // namespace renyi
