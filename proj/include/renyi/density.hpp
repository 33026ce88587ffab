#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "renyi/quadrature.hpp"

namespace renyi {

enum class Family {
    cos_power,
    cosh_power,
    two_sided_exp,
    uniform_interval,
    gaussian,
    max_renyi,
    barenblatt,
    sobolev_extremal,
    tsallis_g,
    g_lambda,
    profile_density,
    grid_1d,
    heat_evolved,
};

std::string_view family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);

using ParamMap = std::map<std::string, double>;

struct Support {
    enum class Kind { full_space, ball, interval };
    Kind kind = Kind::full_space;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double radius = std::numeric_limits<double>::infinity();  // ball {center + factor * y : |y| <= radius}
    Eigen::VectorXd center;
    Eigen::MatrixXd factor;
};

// Integration layout of a one-dimensional density.
struct LineLayout {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    std::vector<double> breakpoints;
    double edge_order = 0.0;    // p ~ dist^edge_order at finite ends (0: jump or smooth cut)
    std::optional<Decay> tail;  // envelope of p when a side is unbounded
};

// Standardized radial profile: integral over R^n of rho(|y|) dy is 1.
struct RadialProfile {
    std::function<double(double)> rho;
    std::function<double(double)> drho;
    // optional log-space forms for profiles whose tails underflow
    std::function<double(double)> log_rho;
    std::function<double(double)> log_slope;
    // optional forms in the gap u = radius - t, which keep full precision next to a compact edge
    std::function<double(double)> edge_log_rho;
    std::function<double(double)> edge_log_slope;
    double radius = std::numeric_limits<double>::infinity();
    double edge_order = 0.0;
    std::optional<Decay> decay;
    std::vector<double> breakpoints;
    bool kink_at_origin = false;
};

// p(x) = rho(|F^{-1}(x - center)|) / |det F|
struct EllipticalForm {
    Eigen::VectorXd center;
    Eigen::MatrixXd factor;
    Eigen::MatrixXd factor_inverse;
    double det = 1.0;
    RadialProfile profile;
};

class Density {
public:
    Density(int dim, Family family, ParamMap params);
    virtual ~Density() = default;

    int dim() const { return dim_; }
    Family family() const { return family_; }
    const ParamMap& params() const { return params_; }
    double param(const std::string& key, double fallback = std::numeric_limits<double>::quiet_NaN()) const;

    virtual double value(std::span<const double> x) const = 0;
    virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;
    virtual double value1(double x) const;
    virtual double slope1(double x) const;
    double value(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

    virtual Support support() const = 0;
    virtual const LineLayout* line_layout() const { return nullptr; }
    virtual const EllipticalForm* elliptical() const { return nullptr; }

    std::string describe() const;
    void annotate(const std::string& key, double v) { params_[key] = v; }

protected:
    int dim_;
    Family family_;
    ParamMap params_;
};

using DensityPtr = std::shared_ptr<const Density>;

class EllipticalDensity : public Density {
public:
    EllipticalDensity(int dim, Family family, ParamMap params, EllipticalForm form);

    double value(std::span<const double> x) const override;
    void gradient(std::span<const double> x, std::span<double> out) const override;
    double value1(double x) const override;
    double slope1(double x) const override;
    Support support() const override;
    const LineLayout* line_layout() const override { return dim_ == 1 ? &layout_ : nullptr; }
    const EllipticalForm* elliptical() const override { return &form_; }

private:
    double radial_slope(double r) const;
    EllipticalForm form_;
    LineLayout layout_;
};

// Samples on a uniform grid; cubic Hermite interpolation with 4th-order finite-difference slopes.
class GridDensity : public Density {
public:
    GridDensity(double x0, double h, std::vector<double> values, bool renormalize = true);
    // Interpolation slopes supplied by the caller instead of finite differences.
    GridDensity(double x0, double h, std::vector<double> values, std::vector<double> slopes, bool renormalize = true);

    double value(std::span<const double> x) const override { return value1(x[0]); }
    void gradient(std::span<const double> x, std::span<double> out) const override { out[0] = slope1(x[0]); }
    double value1(double x) const override;
    double slope1(double x) const override;
    Support support() const override;
    const LineLayout* line_layout() const override { return &layout_; }

    double x0() const { return x0_; }
    double spacing() const { return h_; }
    const std::vector<double>& samples() const { return p_; }
    const std::vector<double>& slopes() const { return dp_; }
    // exact integral of the interpolant
    double hermite_mass() const;
    double x_at(std::size_t i) const { return x0_ + h_ * static_cast<double>(i); }

private:
    void finish(bool renormalize);
    double x0_, h_;
    std::vector<double> p_, dp_;
    LineLayout layout_;
};

// x -> scale * x + shift applied to a one-dimensional density without elliptical structure.
class AffineLineDensity : public Density {
public:
    AffineLineDensity(DensityPtr base, double scale, double shift);
    double value(std::span<const double> x) const override { return value1(x[0]); }
    void gradient(std::span<const double> x, std::span<double> out) const override { out[0] = slope1(x[0]); }
    double value1(double x) const override;
    double slope1(double x) const override;
    Support support() const override;
    const LineLayout* line_layout() const override { return &layout_; }

private:
    DensityPtr base_;
    double a_, s_;
    LineLayout layout_;
};

// Radial profile A (1 - r^2)_+^k (compact) or A (1 + r^2)^{-k} (heavy tail) with unit mass in R^n.
RadialProfile power_quadratic_profile(int n, bool compact, double k);
RadialProfile gaussian_profile(int n);
// p(x) = rho(|F^{-1}(x - center)|) / |det F|
EllipticalForm make_elliptical_form(const Eigen::VectorXd& center, const Eigen::MatrixXd& factor, RadialProfile prof);

DensityPtr make_cos_power(double alpha, double b = 1.0, double c = 0.0);
// a*cosh(bx+c)^{-power}; the default power 2/(1-alpha) is the equality case of N_alpha*I_alpha >= r.
// power = alpha/(1-alpha) gives the tabulated form 1/(pi cosh x) at alpha = 1/2, which is not extremal.
DensityPtr make_cosh_power(double alpha, double b = 1.0, double c = 0.0, std::optional<double> power = std::nullopt);
double cosh_extremal_power(double alpha);
DensityPtr make_two_sided_exp(double b = 1.0, double c = 0.0);
DensityPtr make_uniform_interval(double b = 1.0, double c = 0.0);
DensityPtr make_gaussian(const Eigen::MatrixXd& cov, const Eigen::VectorXd& mean);
DensityPtr make_gaussian(int n, double var = 1.0);
DensityPtr make_max_renyi(double alpha, const Eigen::MatrixXd& K);
// Closed form of the integral of f^alpha for the max-Renyi density (Beta integrals).
double max_renyi_power_integral(double alpha, const Eigen::MatrixXd& K);
DensityPtr make_barenblatt(int n, double alpha);
DensityPtr make_sobolev_extremal(int n, double b = 1.0, const Eigen::VectorXd& x0 = {});
DensityPtr make_tsallis_g(int n, double alpha);
DensityPtr make_g_lambda(double lambda, const Eigen::MatrixXd& K);
DensityPtr make_grid_1d(double x0, double h, std::vector<double> values);
DensityPtr load_grid_csv(const std::string& path);

// Density of scale * X + shift.
DensityPtr rescale(const DensityPtr& d, double scale, const Eigen::VectorXd& shift = {});

// Barenblatt constant C solved by bisection on the quadrature normalization.
double barenblatt_constant(int n, double alpha);

double second_moment(const Density& d);
Eigen::VectorXd mean(const Density& d);
Eigen::MatrixXd covariance(const Density& d);

// Shape of an integrand built from the density, used to derive endpoint exponents and tail envelopes.
struct IntegrandShape {
    double power = 1.0;             // integrand ~ p^power
    bool gradient_squared = false;  // carries a |grad p|^2 factor (with p^{power-2})
    int moment_degree = 0;          // carries |x|^moment_degree
};

// Components of a vector integrand may have different shapes; the most singular edge and slowest tail win.
using Shapes = std::vector<IntegrandShape>;

template <std::size_t M>
IntegralResultN<M> integrate_line_layout(const LineLayout& layout, const IntegrandN<M>& f, const Shapes& shapes,
                                         Tolerance tol);

// Radial integrands receive the radius t and the gap radius - t to the edge of the support.
template <std::size_t M>
using RadialIntegrandN = std::function<std::array<double, M>(double, double)>;

// Integral over R^n of g(|y|) dy where g is composed with the standardized radial profile. Compact profiles are
// integrated in the gap coordinate over their outer half.
template <std::size_t M>
IntegralResultN<M> integrate_radial_profile(const RadialProfile& prof, int n, const RadialIntegrandN<M>& g,
                                            const Shapes& shapes, Tolerance tol);

} // namespace renyi
