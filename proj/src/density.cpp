#include "renyi/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "renyi/constants.hpp"
#include "renyi/errors.hpp"
#include "renyi/special_functions.hpp"

namespace renyi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct FamilyEntry {
    Family family;
    std::string_view name;
};

constexpr std::array<FamilyEntry, 13> kFamilies = {{
    {Family::cos_power, "cos_power"},
    {Family::cosh_power, "cosh_power"},
    {Family::two_sided_exp, "two_sided_exp"},
    {Family::uniform_interval, "uniform_interval"},
    {Family::gaussian, "gaussian"},
    {Family::max_renyi, "max_renyi"},
    {Family::barenblatt, "barenblatt"},
    {Family::sobolev_extremal, "sobolev_extremal"},
    {Family::tsallis_g, "tsallis_g"},
    {Family::g_lambda, "g_lambda"},
    {Family::profile_density, "profile_density"},
    {Family::grid_1d, "grid_1d"},
    {Family::heat_evolved, "heat_evolved"},
}};

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

Eigen::MatrixXd checked_cholesky(const Eigen::MatrixXd& K, const char* who) {
    require(K.rows() == K.cols() && K.rows() >= 1, std::string(who) + ": matrix must be square");
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    require(llt.info() == Eigen::Success && K.isApprox(K.transpose()),
            std::string(who) + ": matrix must be symmetric positive definite");
    return llt.matrixL();
}

EllipticalForm make_form(const Eigen::VectorXd& center, const Eigen::MatrixXd& factor, RadialProfile prof) {
    EllipticalForm f;
    f.center = center;
    f.factor = factor;
    f.factor_inverse = factor.inverse();
    f.det = std::abs(factor.determinant());
    f.profile = std::move(prof);
    return f;
}

ParamMap with_matrix(ParamMap p, const Eigen::MatrixXd& K, const std::string& prefix) {
    p["n"] = static_cast<double>(K.rows());
    for (Eigen::Index i = 0; i < K.rows(); ++i)
        for (Eigen::Index j = i; j < K.cols(); ++j)
            p[prefix + std::to_string(i + 1) + std::to_string(j + 1)] = K(i, j);
    return p;
}

// (1 - r^2)^k or (1 + r^2)^{-k} without the normalizer.
double log_mass_power_quadratic(int n, bool compact, double k) {
    const double hn = 0.5 * n;
    if (compact) return hn * std::log(kPi) + log_gamma(k + 1.0) - log_gamma(k + 1.0 + hn);
    return hn * std::log(kPi) + log_gamma(k - hn) - log_gamma(k);
}

double log_cosh(double y) {
    const double a = std::abs(y);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

} // namespace

std::string_view family_name(Family f) {
    for (const auto& e : kFamilies)
        if (e.family == f) return e.name;
    return "unknown";
}

std::optional<Family> family_from_name(std::string_view name) {
    for (const auto& e : kFamilies)
        if (e.name == name) return e.family;
    if (name == "uniform") return Family::uniform_interval;
    if (name == "sobolev") return Family::sobolev_extremal;
    if (name == "G" || name == "g_1d" || name == "g_nd") return Family::tsallis_g;
    if (name == "profile") return Family::profile_density;
    return std::nullopt;
}

Density::Density(int dim, Family family, ParamMap params) : dim_(dim), family_(family), params_(std::move(params)) {
    if (dim < 1) throw DomainError("density dimension must be positive");
}

double Density::param(const std::string& key, double fallback) const {
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
}

double Density::value1(double x) const {
    if (dim_ != 1) throw DomainError("value1 requires a one-dimensional density");
    return value(std::span<const double>(&x, 1));
}

double Density::slope1(double x) const {
    if (dim_ != 1) throw DomainError("slope1 requires a one-dimensional density");
    double g = 0.0;
    gradient(std::span<const double>(&x, 1), std::span<double>(&g, 1));
    return g;
}

double Density::value(const Eigen::VectorXd& x) const {
    return value(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

Eigen::VectorXd Density::gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g(dim_);
    gradient(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
             std::span<double>(g.data(), static_cast<std::size_t>(g.size())));
    return g;
}

std::string Density::describe() const {
    std::ostringstream os;
    os << family_name(family_) << "(";
    bool first = true;
    for (const auto& [k, v] : params_) {
        os << (first ? "" : ",") << k << "=" << v;
        first = false;
    }
    os << ")";
    return os.str();
}

// ---------------------------------------------------------------------------------------------------------------
// Elliptical densities

EllipticalDensity::EllipticalDensity(int dim, Family family, ParamMap params, EllipticalForm form)
    : Density(dim, family, std::move(params)), form_(std::move(form)) {
    require(form_.center.size() == dim && form_.factor.rows() == dim && form_.factor.cols() == dim,
            "elliptical density: center/factor dimension mismatch");
    require(form_.det > 0.0, "elliptical density: singular factor");
    if (dim == 1) {
        const double f = std::abs(form_.factor(0, 0));
        const double mu = form_.center(0);
        const auto& pr = form_.profile;
        layout_.lo = std::isinf(pr.radius) ? -kInf : mu - f * pr.radius;
        layout_.hi = std::isinf(pr.radius) ? kInf : mu + f * pr.radius;
        if (pr.kink_at_origin) layout_.breakpoints.push_back(mu);
        for (double b : pr.breakpoints) {
            layout_.breakpoints.push_back(mu - f * b);
            layout_.breakpoints.push_back(mu + f * b);
        }
        std::sort(layout_.breakpoints.begin(), layout_.breakpoints.end());
        layout_.edge_order = pr.edge_order;
        if (pr.decay) layout_.tail = pr.decay->rescaled(f, mu);
    }
}

double EllipticalDensity::radial_slope(double r) const {
    const double R = form_.profile.radius;
    if (r >= R) return 0.0;
    if (!std::isinf(R) && R - r < 1e-8 * R) r = R * (1.0 - 1e-8);
    return form_.profile.drho(r);
}

double EllipticalDensity::value(std::span<const double> x) const {
    if (dim_ == 1) return value1(x[0]);
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim_);
    const double r = (form_.factor_inverse * (xv - form_.center)).norm();
    if (r > form_.profile.radius) return 0.0;
    return form_.profile.rho(r) / form_.det;
}

void EllipticalDensity::gradient(std::span<const double> x, std::span<double> out) const {
    if (dim_ == 1) {
        out[0] = slope1(x[0]);
        return;
    }
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim_);
    Eigen::Map<Eigen::VectorXd> g(out.data(), dim_);
    const Eigen::VectorXd y = form_.factor_inverse * (xv - form_.center);
    const double r = y.norm();
    if (r == 0.0 || r >= form_.profile.radius) {
        g.setZero();
        return;
    }
    g = (radial_slope(r) / (form_.det * r)) * (form_.factor_inverse.transpose() * y);
}

double EllipticalDensity::value1(double x) const {
    const double f = std::abs(form_.factor(0, 0));
    const double r = std::abs(x - form_.center(0)) / f;
    if (r > form_.profile.radius) return 0.0;
    return form_.profile.rho(r) / f;
}

double EllipticalDensity::slope1(double x) const {
    const double f = std::abs(form_.factor(0, 0));
    const double d = x - form_.center(0);
    const double r = std::abs(d) / f;
    if (r == 0.0) return 0.0;
    return (d > 0 ? 1.0 : -1.0) * radial_slope(r) / (f * f);
}

Support EllipticalDensity::support() const {
    Support s;
    if (std::isinf(form_.profile.radius)) {
        s.kind = Support::Kind::full_space;
    } else if (dim_ == 1) {
        s.kind = Support::Kind::interval;
        s.lo = layout_.lo;
        s.hi = layout_.hi;
    } else {
        s.kind = Support::Kind::ball;
    }
    s.radius = form_.profile.radius;
    s.center = form_.center;
    s.factor = form_.factor;
    return s;
}

RadialProfile power_quadratic_profile(int n, bool compact, double k) {
    RadialProfile p;
    if (compact) {
        require(k > 0.0, "power_quadratic_profile: exponent must be positive");
        const double A = std::exp(-log_mass_power_quadratic(n, true, k));
        p.rho = [A, k](double r) {
            if (r >= 1.0) return 0.0;
            return A * std::pow((1.0 - r) * (1.0 + r), k);
        };
        p.drho = [A, k](double r) {
            if (r >= 1.0) return 0.0;
            return -2.0 * k * A * r * std::pow((1.0 - r) * (1.0 + r), k - 1.0);
        };
        p.edge_log_rho = [lA = std::log(A), k](double u) { return lA + k * std::log(u * (2.0 - u)); };
        p.edge_log_slope = [k](double u) { return -2.0 * k * (1.0 - u) / (u * (2.0 - u)); };
        p.radius = 1.0;
        p.edge_order = k;
    } else {
        require(k > 0.5 * n, "power_quadratic_profile: heavy tail not integrable");
        const double A = std::exp(-log_mass_power_quadratic(n, false, k));
        p.rho = [A, k](double r) { return A * std::pow(1.0 + r * r, -k); };
        p.drho = [A, k](double r) { return -2.0 * k * A * r * std::pow(1.0 + r * r, -k - 1.0); };
        p.log_rho = [lA = std::log(A), k](double r) { return lA - k * std::log1p(r * r); };
        p.log_slope = [k](double r) { return -2.0 * k * r / (1.0 + r * r); };
        p.decay = Decay::power(2.0 * k);
    }
    return p;
}

EllipticalForm make_elliptical_form(const Eigen::VectorXd& center, const Eigen::MatrixXd& factor, RadialProfile prof) {
    return make_form(center, factor, std::move(prof));
}

RadialProfile gaussian_profile(int n) {
    RadialProfile p;
    const double A = std::pow(2.0 * kPi, -0.5 * n);
    p.rho = [A](double r) { return A * std::exp(-0.5 * r * r); };
    p.drho = [A](double r) { return -r * A * std::exp(-0.5 * r * r); };
    p.log_rho = [lA = std::log(A)](double r) { return lA - 0.5 * r * r; };
    p.log_slope = [](double r) { return -r; };
    p.decay = Decay::gaussian(0.5);
    return p;
}

namespace {

DensityPtr line_elliptical(Family fam, ParamMap params, RadialProfile prof, double b, double c) {
    require(b > 0.0, "scale parameter b must be positive");
    Eigen::VectorXd mu(1);
    mu(0) = -c / b;
    Eigen::MatrixXd F(1, 1);
    F(0, 0) = 1.0 / b;
    params["b"] = b;
    params["c"] = c;
    return std::make_shared<EllipticalDensity>(1, fam, std::move(params), make_form(mu, F, std::move(prof)));
}

} // namespace

DensityPtr make_cos_power(double alpha, double b, double c) {
    require(alpha > 1.0, "cos_power: need alpha > 1");
    const double k = 2.0 / (alpha - 1.0);
    const double a = std::exp(log_gamma(0.5 * k + 1.0) - 0.5 * std::log(kPi) - log_gamma(0.5 * (k + 1.0)));
    RadialProfile p;
    p.rho = [a, k](double y) {
        if (y >= 0.5 * kPi) return 0.0;
        return a * std::pow(std::sin(0.5 * kPi - y), k);
    };
    p.drho = [a, k](double y) {
        if (y >= 0.5 * kPi) return 0.0;
        return -a * k * std::pow(std::sin(0.5 * kPi - y), k - 1.0) * std::sin(y);
    };
    p.edge_log_rho = [la = std::log(a), k](double u) { return la + k * std::log(std::sin(u)); };
    p.edge_log_slope = [k](double u) { return -k * std::cos(u) / std::sin(u); };
    p.radius = 0.5 * kPi;
    p.edge_order = k;
    return line_elliptical(Family::cos_power, {{"alpha", alpha}, {"a", a}}, std::move(p), b, c);
}

double cosh_extremal_power(double alpha) { return 2.0 / (1.0 - alpha); }

DensityPtr make_cosh_power(double alpha, double b, double c, std::optional<double> power) {
    require(alpha > 0.0 && alpha < 1.0, "cosh_power: need 0 < alpha < 1");
    // p = f^{2/alpha} / int f^{2/alpha} with f = cosh^{-alpha/(1-alpha)}
    const double q = power.value_or(cosh_extremal_power(alpha));
    require(q > 0.0, "cosh_power: power must be positive");
    const double a = std::exp(log_gamma(0.5 * (q + 1.0)) - 0.5 * std::log(kPi) - log_gamma(0.5 * q));
    RadialProfile p;
    p.rho = [a, q](double y) { return a * std::exp(-q * log_cosh(y)); };
    p.drho = [a, q](double y) { return -q * std::tanh(y) * a * std::exp(-q * log_cosh(y)); };
    p.log_rho = [la = std::log(a), q](double y) { return la - q * log_cosh(y); };
    p.log_slope = [q](double y) { return -q * std::tanh(y); };
    p.decay = Decay::exponential(q);
    return line_elliptical(Family::cosh_power, {{"alpha", alpha}, {"a", a}, {"power", q}}, std::move(p), b, c);
}

DensityPtr make_two_sided_exp(double b, double c) {
    RadialProfile p;
    p.rho = [](double y) { return 0.5 * std::exp(-y); };
    p.drho = [](double y) { return -0.5 * std::exp(-y); };
    p.log_rho = [](double y) { return -std::log(2.0) - y; };
    p.log_slope = [](double) { return -1.0; };
    p.decay = Decay::exponential(1.0);
    p.kink_at_origin = true;
    return line_elliptical(Family::two_sided_exp, {}, std::move(p), b, c);
}

DensityPtr make_uniform_interval(double b, double c) {
    RadialProfile p;
    p.rho = [](double y) { return y <= 0.5 * kPi ? 1.0 / kPi : 0.0; };
    p.drho = [](double) { return 0.0; };
    p.radius = 0.5 * kPi;
    p.edge_order = 0.0;
    return line_elliptical(Family::uniform_interval, {}, std::move(p), b, c);
}

DensityPtr make_gaussian(const Eigen::MatrixXd& cov, const Eigen::VectorXd& mean) {
    const Eigen::MatrixXd L = checked_cholesky(cov, "gaussian");
    const int n = static_cast<int>(cov.rows());
    Eigen::VectorXd mu = mean.size() == 0 ? Eigen::VectorXd::Zero(n) : mean;
    require(mu.size() == n, "gaussian: mean dimension mismatch");
    ParamMap params = with_matrix({}, cov, "cov");
    for (int i = 0; i < n; ++i) params["mean" + std::to_string(i + 1)] = mu(i);
    return std::make_shared<EllipticalDensity>(n, Family::gaussian, std::move(params),
                                               make_form(mu, L, gaussian_profile(n)));
}

DensityPtr make_gaussian(int n, double var) {
    require(n >= 1 && var > 0.0, "gaussian: need n >= 1 and var > 0");
    return make_gaussian(Eigen::MatrixXd::Identity(n, n) * var, Eigen::VectorXd::Zero(n));
}

double max_renyi_power_integral(double alpha, const Eigen::MatrixXd& K) {
    const int n = static_cast<int>(K.rows());
    const double dn = n;
    require(alpha > dn / (dn + 2.0), "max_renyi: need alpha > n/(n+2)");
    const double logdetK = 2.0 * std::log(checked_cholesky(K, "max_renyi").diagonal().prod());
    if (is_shannon(alpha)) return 1.0;
    const bool compact = alpha > 1.0;
    const double k = 1.0 / std::abs(alpha - 1.0);
    const double scale = compact ? dn + 2.0 / (alpha - 1.0) + 2.0 : 2.0 / (1.0 - alpha) - dn - 2.0;
    const double log_det_F = 0.5 * logdetK + 0.5 * dn * std::log(scale);
    const double log_int = log_mass_power_quadratic(n, compact, k * alpha) - alpha * log_mass_power_quadratic(n, compact, k);
    return std::exp((1.0 - alpha) * log_det_F + log_int);
}

DensityPtr make_max_renyi(double alpha, const Eigen::MatrixXd& K) {
    const int n = static_cast<int>(K.rows());
    const double dn = n;
    require(alpha > dn / (dn + 2.0), "max_renyi: need alpha > n/(n+2)");
    const Eigen::MatrixXd L = checked_cholesky(K, "max_renyi");
    ParamMap params = with_matrix({{"alpha", alpha}}, K, "K");
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    if (is_shannon(alpha))
        return std::make_shared<EllipticalDensity>(n, Family::max_renyi, std::move(params),
                                                   make_form(mu, L, gaussian_profile(n)));
    double m;
    double scale;
    RadialProfile prof;
    if (alpha > 1.0) {
        m = dn + 2.0 / (alpha - 1.0);
        scale = m + 2.0;
        prof = power_quadratic_profile(n, true, 1.0 / (alpha - 1.0));
    } else {
        m = 2.0 / (1.0 - alpha) - dn;
        scale = m - 2.0;
        prof = power_quadratic_profile(n, false, 1.0 / (1.0 - alpha));
    }
    params["m"] = m;
    return std::make_shared<EllipticalDensity>(n, Family::max_renyi, std::move(params),
                                               make_form(mu, L * std::sqrt(scale), std::move(prof)));
}

namespace {

RadialProfile barenblatt_profile(double alpha, double C) {
    RadialProfile p;
    if (alpha > 1.0) {
        const double k = 1.0 / (alpha - 1.0);
        const double R = std::sqrt(C);
        p.rho = [C, k, R](double r) { return r >= R ? 0.0 : std::pow(C - r * r, k); };
        p.drho = [C, k, R](double r) { return r >= R ? 0.0 : -2.0 * k * r * std::pow(C - r * r, k - 1.0); };
        p.edge_log_rho = [k, R](double u) { return k * std::log(u * (2.0 * R - u)); };
        p.edge_log_slope = [k, R](double u) { return -2.0 * k * (R - u) / (u * (2.0 * R - u)); };
        p.radius = R;
        p.edge_order = k;
    } else {
        const double k = 1.0 / (1.0 - alpha);
        p.rho = [C, k](double r) { return std::pow(C + r * r, -k); };
        p.drho = [C, k](double r) { return -2.0 * k * r * std::pow(C + r * r, -k - 1.0); };
        p.log_rho = [C, k](double r) { return -k * std::log(C + r * r); };
        p.log_slope = [C, k](double r) { return -2.0 * k * r / (C + r * r); };
        p.decay = Decay::power(2.0 * k);
    }
    return p;
}

} // namespace

double barenblatt_constant(int n, double alpha) {
    const double dn = n;
    require(n >= 1 && alpha > dn / (dn + 2.0) && !is_shannon(alpha), "barenblatt: need alpha > n/(n+2), alpha != 1");
    auto mass = [&](double logC) {
        const RadialProfile p = barenblatt_profile(alpha, std::exp(logC));
        return integrate_radial(p.rho, n, {p.radius, p.edge_order, p.decay, {}}, Tolerance(1e-300, 1e-13)).value;
    };
    // mass is increasing in C for alpha > 1, decreasing for alpha < 1
    const double sgn = alpha > 1.0 ? 1.0 : -1.0;
    double lo = -1.0, hi = 1.0;
    while (sgn * (mass(lo) - 1.0) > 0.0) lo -= 2.0;
    while (sgn * (mass(hi) - 1.0) < 0.0) hi += 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sgn * (mass(mid) - 1.0) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double logC = 0.5 * (lo + hi);
    if (std::abs(mass(logC) - 1.0) > 1e-10) throw ConvergenceError("barenblatt: normalization bisection failed");
    return std::exp(logC);
}

DensityPtr make_barenblatt(int n, double alpha) {
    const double C = barenblatt_constant(n, alpha);
    return std::make_shared<EllipticalDensity>(
        n, Family::barenblatt, ParamMap{{"alpha", alpha}, {"n", static_cast<double>(n)}, {"C", C}},
        make_form(Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n), barenblatt_profile(alpha, C)));
}

DensityPtr make_sobolev_extremal(int n, double b, const Eigen::VectorXd& x0) {
    require(n >= 3, "sobolev_extremal: need n >= 3");
    require(b > 0.0, "sobolev_extremal: need b > 0");
    Eigen::VectorXd mu = x0.size() == 0 ? Eigen::VectorXd::Zero(n) : x0;
    require(mu.size() == n, "sobolev_extremal: center dimension mismatch");
    const double dn = n;
    const double a = std::exp(-(0.5 * dn * std::log(kPi / b) + log_gamma(0.5 * dn) - log_gamma(dn)));
    ParamMap params{{"n", dn}, {"b", b}, {"a", a}};
    for (int i = 0; i < n; ++i) params["x0_" + std::to_string(i + 1)] = mu(i);
    return std::make_shared<EllipticalDensity>(
        n, Family::sobolev_extremal, std::move(params),
        make_form(mu, Eigen::MatrixXd::Identity(n, n) / std::sqrt(b), power_quadratic_profile(n, false, dn)));
}

DensityPtr make_tsallis_g(int n, double alpha) {
    require(n >= 1 && alpha > 0.0, "tsallis_g: need n >= 1, alpha > 0");
    const double dn = n;
    ParamMap params{{"alpha", alpha}, {"n", dn}};
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    if (is_shannon(alpha)) {
        // limit of the power-quadratic shape: exp(-x^2) on the line, standard normal for n >= 2
        const double var = n == 1 ? 0.5 : 1.0;
        return std::make_shared<EllipticalDensity>(n, Family::tsallis_g, std::move(params),
                                                   make_form(mu, I * std::sqrt(var), gaussian_profile(n)));
    }
    double c;
    if (n == 1) {
        c = std::abs(alpha - 1.0) / 2.0;
    } else {
        const double den = (dn + 2.0) * (alpha + 1.0) - 2.0 * dn;
        require(den > 0.0, "tsallis_g: need (n+2)(alpha+1) > 2n");
        c = std::abs(alpha - 1.0) / den;
    }
    const double k = 2.0 / std::abs(alpha - 1.0);
    if (alpha < 1.0) require(k > 0.5 * dn, "tsallis_g: heavy tail not integrable for this alpha");
    params["c"] = c;
    return std::make_shared<EllipticalDensity>(n, Family::tsallis_g, std::move(params),
                                               make_form(mu, I / std::sqrt(c), power_quadratic_profile(n, alpha > 1.0, k)));
}

DensityPtr make_g_lambda(double lambda, const Eigen::MatrixXd& K) {
    const int n = static_cast<int>(K.rows());
    const double dn = n;
    require(lambda > dn / (dn + 2.0), "g_lambda: need lambda > n/(n+2)");
    const Eigen::MatrixXd L = checked_cholesky(K, "g_lambda");
    ParamMap params = with_matrix({{"lambda", lambda}}, K, "K");
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    if (is_shannon(lambda))
        return std::make_shared<EllipticalDensity>(n, Family::g_lambda, std::move(params),
                                                   make_form(mu, L, gaussian_profile(n)));
    const double beta = 1.0 / (2.0 * lambda - dn * (1.0 - lambda));
    const double c = std::abs(lambda - 1.0) * beta;
    params["beta"] = beta;
    return std::make_shared<EllipticalDensity>(
        n, Family::g_lambda, std::move(params),
        make_form(mu, L / std::sqrt(c), power_quadratic_profile(n, lambda > 1.0, 1.0 / std::abs(lambda - 1.0))));
}

DensityPtr rescale(const DensityPtr& d, double scale, const Eigen::VectorXd& shift) {
    require(scale > 0.0, "rescale: scale must be positive");
    const int n = d->dim();
    Eigen::VectorXd s = shift.size() == 0 ? Eigen::VectorXd::Zero(n) : shift;
    require(s.size() == n, "rescale: shift dimension mismatch");
    if (const EllipticalForm* f = d->elliptical()) {
        ParamMap params = d->params();
        params["scale"] = d->param("scale", 1.0) * scale;
        for (int i = 0; i < n; ++i) params["shift" + std::to_string(i + 1)] = d->param("shift" + std::to_string(i + 1), 0.0) * scale + s(i);
        return std::make_shared<EllipticalDensity>(
            n, d->family(), std::move(params), make_form(f->center * scale + s, f->factor * scale, f->profile));
    }
    require(n == 1, "rescale: only elliptical densities are supported for n > 1");
    return std::make_shared<AffineLineDensity>(d, scale, s(0));
}

// ---------------------------------------------------------------------------------------------------------------
// Grid densities

GridDensity::GridDensity(double x0, double h, std::vector<double> values, bool renormalize)
    : Density(1, Family::grid_1d, {}), x0_(x0), h_(h), p_(std::move(values)) {
    require(p_.size() >= 5, "grid_1d: need at least 5 samples");
    const std::size_t N = p_.size();
    dp_.assign(N, 0.0);
    const double w = 12.0 * h;
    for (std::size_t i = 2; i + 2 < N; ++i) dp_[i] = (p_[i - 2] - 8.0 * p_[i - 1] + 8.0 * p_[i + 1] - p_[i + 2]) / w;
    dp_[0] = (-25.0 * p_[0] + 48.0 * p_[1] - 36.0 * p_[2] + 16.0 * p_[3] - 3.0 * p_[4]) / w;
    dp_[1] = (-3.0 * p_[0] - 10.0 * p_[1] + 18.0 * p_[2] - 6.0 * p_[3] + p_[4]) / w;
    dp_[N - 1] = -(-25.0 * p_[N - 1] + 48.0 * p_[N - 2] - 36.0 * p_[N - 3] + 16.0 * p_[N - 4] - 3.0 * p_[N - 5]) / w;
    dp_[N - 2] = -(-3.0 * p_[N - 1] - 10.0 * p_[N - 2] + 18.0 * p_[N - 3] - 6.0 * p_[N - 4] + p_[N - 5]) / w;
    finish(renormalize);
}

GridDensity::GridDensity(double x0, double h, std::vector<double> values, std::vector<double> slopes, bool renormalize)
    : Density(1, Family::grid_1d, {}), x0_(x0), h_(h), p_(std::move(values)), dp_(std::move(slopes)) {
    require(p_.size() >= 5 && dp_.size() == p_.size(), "grid_1d: need at least 5 samples with matching slopes");
    for (double v : dp_) require(std::isfinite(v), "grid_1d: slopes must be finite");
    finish(renormalize);
}

double GridDensity::hermite_mass() const {
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < p_.size(); ++i)
        mass += 0.5 * h_ * (p_[i] + p_[i + 1]) + h_ * h_ * (dp_[i] - dp_[i + 1]) / 12.0;
    return mass;
}

void GridDensity::finish(bool renormalize) {
    require(h_ > 0.0, "grid_1d: spacing must be positive");
    for (double v : p_) require(std::isfinite(v) && v >= 0.0, "grid_1d: samples must be finite and nonnegative");
    const std::size_t N = p_.size();
    if (renormalize) {
        const double mass = hermite_mass();
        require(mass > 0.0, "grid_1d: zero mass");
        for (std::size_t i = 0; i < N; ++i) {
            p_[i] /= mass;
            dp_[i] /= mass;
        }
        params_["mass_correction"] = mass;
    }
    params_["x0"] = x0_;
    params_["h"] = h_;
    params_["samples"] = static_cast<double>(N);
    layout_.lo = x0_;
    layout_.hi = x_at(N - 1);
    for (std::size_t i = 1; i + 1 < N; ++i) layout_.breakpoints.push_back(x_at(i));
    layout_.edge_order = 0.0;
}

double GridDensity::value1(double x) const {
    if (!(x >= layout_.lo && x <= layout_.hi)) return 0.0;
    const std::size_t N = p_.size();
    std::size_t i = static_cast<std::size_t>(std::floor((x - x0_) / h_));
    if (i >= N - 1) i = N - 2;
    const double s = (x - x_at(i)) / h_;
    const double s2 = s * s, s3 = s2 * s;
    const double v = (2 * s3 - 3 * s2 + 1) * p_[i] + (s3 - 2 * s2 + s) * h_ * dp_[i] + (-2 * s3 + 3 * s2) * p_[i + 1] +
                     (s3 - s2) * h_ * dp_[i + 1];
    return std::max(v, 0.0);
}

double GridDensity::slope1(double x) const {
    if (!(x >= layout_.lo && x <= layout_.hi)) return 0.0;
    const std::size_t N = p_.size();
    std::size_t i = static_cast<std::size_t>(std::floor((x - x0_) / h_));
    if (i >= N - 1) i = N - 2;
    const double s = (x - x_at(i)) / h_;
    const double s2 = s * s;
    const double v = (2 * s2 * s - 3 * s2 + 1) * p_[i] + (s2 * s - 2 * s2 + s) * h_ * dp_[i] +
                     (-2 * s2 * s + 3 * s2) * p_[i + 1] + (s2 * s - s2) * h_ * dp_[i + 1];
    if (v <= 0.0) return 0.0;
    return ((6 * s2 - 6 * s) * p_[i] + (3 * s2 - 4 * s + 1) * h_ * dp_[i] + (-6 * s2 + 6 * s) * p_[i + 1] +
            (3 * s2 - 2 * s) * h_ * dp_[i + 1]) /
           h_;
}

Support GridDensity::support() const {
    Support s;
    s.kind = Support::Kind::interval;
    s.lo = layout_.lo;
    s.hi = layout_.hi;
    return s;
}

DensityPtr make_grid_1d(double x0, double h, std::vector<double> values) {
    return std::make_shared<GridDensity>(x0, h, std::move(values));
}

DensityPtr load_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("grid: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("grid: empty file " + path);
    std::string header;
    for (char ch : line)
        if (!std::isspace(static_cast<unsigned char>(ch))) header += ch;
    if (header != "x,p") throw InputError("grid: header must be 'x,p' in " + path);
    std::vector<double> xs, ps;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b))
            throw InputError("grid: malformed line " + std::to_string(lineno));
        try {
            xs.push_back(std::stod(a));
            ps.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw InputError("grid: malformed number on line " + std::to_string(lineno));
        }
    }
    if (xs.size() < 5) throw InputError("grid: need at least 5 samples");
    const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::abs(xs[i] - xs[i - 1] - h) > 1e-6 * h) throw InputError("grid: x spacing is not uniform");
    return make_grid_1d(xs.front(), h, std::move(ps));
}

AffineLineDensity::AffineLineDensity(DensityPtr base, double scale, double shift)
    : Density(1, base->family(), base->params()), base_(std::move(base)), a_(scale), s_(shift) {
    require(base_->dim() == 1 && base_->line_layout(), "affine wrapper requires a one-dimensional density");
    params_["scale"] = base_->param("scale", 1.0) * scale;
    params_["shift1"] = base_->param("shift1", 0.0) * scale + shift;
    const LineLayout& b = *base_->line_layout();
    layout_.lo = a_ * b.lo + s_;
    layout_.hi = a_ * b.hi + s_;
    for (double x : b.breakpoints) layout_.breakpoints.push_back(a_ * x + s_);
    layout_.edge_order = b.edge_order;
    if (b.tail) layout_.tail = b.tail->rescaled(a_, a_ * b.tail->center + s_);
}

double AffineLineDensity::value1(double x) const { return base_->value1((x - s_) / a_) / a_; }
double AffineLineDensity::slope1(double x) const { return base_->slope1((x - s_) / a_) / (a_ * a_); }

Support AffineLineDensity::support() const {
    Support s;
    s.kind = std::isinf(layout_.lo) || std::isinf(layout_.hi) ? Support::Kind::full_space : Support::Kind::interval;
    s.lo = layout_.lo;
    s.hi = layout_.hi;
    return s;
}

// ---------------------------------------------------------------------------------------------------------------
// Integration over a density's layout

namespace {

double edge_exponent(double edge_order, const Shapes& shapes) {
    if (edge_order <= 0.0) return 0.0;
    double nu = std::numeric_limits<double>::infinity();
    for (const auto& s : shapes) nu = std::min(nu, edge_order * s.power - (s.gradient_squared ? 2.0 : 0.0));
    return nu;
}

// effective decay speed; smaller is slower
double decay_speed(const Decay& d) {
    if (d.kind == Decay::Kind::power) return d.rate - d.poly_degree;
    return d.rate - 1e-9 * d.poly_degree;
}

std::optional<Decay> integrand_tail(const std::optional<Decay>& tail, const Shapes& shapes) {
    if (!tail) return std::nullopt;
    std::optional<Decay> worst;
    for (const auto& s : shapes) {
        Decay d = tail->raised(s.power);
        if (s.gradient_squared)
            d = d.with_poly(d.kind == Decay::Kind::gaussian ? 2 : (d.kind == Decay::Kind::power ? -2 : 0));
        if (s.moment_degree) d = d.with_poly(s.moment_degree);
        if (!worst || decay_speed(d) < decay_speed(*worst)) worst = d;
    }
    return worst;
}

} // namespace

template <std::size_t M>
IntegralResultN<M> integrate_line_layout(const LineLayout& layout, const IntegrandN<M>& f, const Shapes& shapes,
                                         Tolerance tol) {
    const double nu = edge_exponent(layout.edge_order, shapes);
    if (nu <= -1.0) throw DomainError("integrand is not integrable at the support boundary");
    return integrate_general<M>(f, layout.lo, layout.hi, layout.breakpoints, {nu, nu},
                                integrand_tail(layout.tail, shapes), tol);
}

template <std::size_t M>
IntegralResultN<M> integrate_radial_profile(const RadialProfile& prof, int n, const RadialIntegrandN<M>& g,
                                            const Shapes& shapes, Tolerance tol) {
    const double nu = edge_exponent(prof.edge_order, shapes);
    if (nu <= -1.0) throw DomainError("integrand is not integrable at the support boundary");
    const double area = unit_sphere_area(n);
    const double R = prof.radius;
    auto weighted = [&g, n, area](double t, double gap) {
        std::array<double, M> v = g(t, gap);
        const double w = area * std::pow(t, n - 1);
        for (auto& x : v) x *= w;
        return v;
    };
    if (std::isinf(R) || prof.edge_order <= 0.0) {
        std::optional<Decay> tail = integrand_tail(prof.decay, shapes);
        if (tail) tail = tail->with_poly(n - 1);
        return integrate_general<M>([&](double t) { return weighted(t, R - t); }, 0.0, R, prof.breakpoints,
                                    {0.0, nu}, tail, tol);
    }
    const double mid = 0.5 * R;
    std::vector<double> inner, outer;
    for (double b : prof.breakpoints) {
        if (b < mid) inner.push_back(b);
        else if (b > mid && b < R) outer.push_back(R - b);
    }
    const Tolerance half(0.5 * tol.abs, tol.rel);
    IntegralResultN<M> a = integrate_general<M>([&](double t) { return weighted(t, R - t); }, 0.0, mid, inner,
                                                {0.0, 0.0}, std::nullopt, half);
    const IntegralResultN<M> b = integrate_general<M>([&](double u) { return weighted(R - u, u); }, 0.0, R - mid,
                                                      outer, {nu, 0.0}, std::nullopt, half);
    for (std::size_t m = 0; m < M; ++m) a.value[m] += b.value[m];
    a.abs_error_estimate += b.abs_error_estimate;
    a.truncation_bound += b.truncation_bound;
    a.subdivisions += b.subdivisions;
    a.converged = a.converged && b.converged;
    return a;
}

template IntegralResultN<1> integrate_line_layout<1>(const LineLayout&, const IntegrandN<1>&, const Shapes&, Tolerance);
template IntegralResultN<2> integrate_line_layout<2>(const LineLayout&, const IntegrandN<2>&, const Shapes&, Tolerance);
template IntegralResultN<3> integrate_line_layout<3>(const LineLayout&, const IntegrandN<3>&, const Shapes&, Tolerance);
template IntegralResultN<4> integrate_line_layout<4>(const LineLayout&, const IntegrandN<4>&, const Shapes&, Tolerance);
template IntegralResultN<1> integrate_radial_profile<1>(const RadialProfile&, int, const RadialIntegrandN<1>&, const Shapes&,
                                                        Tolerance);
template IntegralResultN<2> integrate_radial_profile<2>(const RadialProfile&, int, const RadialIntegrandN<2>&, const Shapes&,
                                                        Tolerance);
template IntegralResultN<3> integrate_radial_profile<3>(const RadialProfile&, int, const RadialIntegrandN<3>&, const Shapes&,
                                                        Tolerance);
template IntegralResultN<4> integrate_radial_profile<4>(const RadialProfile&, int, const RadialIntegrandN<4>&, const Shapes&,
                                                        Tolerance);

// ---------------------------------------------------------------------------------------------------------------
// Moments

namespace {

constexpr double kMomentTol = 1e-11;

void check_moment(const IntegralResultN<2>& r) {
    if (!r.converged) throw ConvergenceError("moment integral did not converge (moment may diverge)");
}

} // namespace

Eigen::VectorXd mean(const Density& d) {
    if (const EllipticalForm* f = d.elliptical()) return f->center;
    const LineLayout* lay = d.line_layout();
    if (!lay) throw DomainError("mean: unsupported density layout");
    auto r = integrate_line_layout<2>(
        *lay, [&d](double x) { const double p = d.value1(x); return std::array<double, 2>{p, x * p}; },
        {{1.0, false, 1}}, Tolerance::relative(kMomentTol));
    check_moment(r);
    Eigen::VectorXd m(1);
    m(0) = r.value[1] / r.value[0];
    return m;
}

Eigen::MatrixXd covariance(const Density& d) {
    const int n = d.dim();
    if (const EllipticalForm* f = d.elliptical()) {
        const auto& prof = f->profile;
        auto r = integrate_radial_profile<2>(
            prof, n, [&prof](double t, double) { const double v = prof.rho(t); return std::array<double, 2>{v, t * t * v}; },
            {{1.0, false, 2}}, Tolerance::relative(kMomentTol));
        check_moment(r);
        return f->factor * (r.value[1] / (n * r.value[0])) * f->factor.transpose();
    }
    const Eigen::VectorXd mu = mean(d);
    const double m = mu(0);
    auto r = integrate_line_layout<2>(
        *d.line_layout(),
        [&d, m](double x) { const double p = d.value1(x); return std::array<double, 2>{p, (x - m) * (x - m) * p}; },
        {{1.0, false, 2}}, Tolerance::relative(kMomentTol));
    check_moment(r);
    Eigen::MatrixXd K(1, 1);
    K(0, 0) = r.value[1] / r.value[0];
    return K;
}

double second_moment(const Density& d) {
    const Eigen::VectorXd mu = mean(d);
    return covariance(d).trace() + mu.squaredNorm();
}

} // namespace renyi
