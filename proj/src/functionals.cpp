#include "renyi/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "renyi/constants.hpp"
#include "renyi/errors.hpp"

namespace renyi {

namespace {

constexpr double kFloor = 1e-300;
constexpr double kAcceptRel = 1e-6;

template <std::size_t M>
void check(const IntegralResultN<M>& r, const char* what) {
    if (r.converged) return;
    double scale = 0.0;
    for (double v : r.value) scale = std::max(scale, std::abs(v));
    if (!(r.abs_error_estimate <= kAcceptRel * scale))
        throw ConvergenceError(std::string(what) + ": quadrature did not converge (integral may diverge)");
}

// log of the density value rho(t)/D, -inf outside the support; gap = radius - t
double log_value(const RadialProfile& prof, double t, double gap, double logD) {
    if (!(gap > 0.0)) return -std::numeric_limits<double>::infinity();
    if (prof.edge_log_rho) return prof.edge_log_rho(gap) - logD;
    if (prof.log_rho) return prof.log_rho(t) - logD;
    const double rho = prof.rho(t);
    return rho > 0.0 ? std::log(rho) - logD : -std::numeric_limits<double>::infinity();
}

double log_slope(const RadialProfile& prof, double t, double gap) {
    if (!(gap > 0.0)) return 0.0;
    if (prof.edge_log_slope) return prof.edge_log_slope(gap);
    if (prof.log_slope) return prof.log_slope(t);
    const double rho = prof.rho(t);
    return rho > 0.0 ? prof.drho(t) / rho : 0.0;
}

Eigen::MatrixXd shape_inverse(const EllipticalForm& f) { return f.factor_inverse.transpose() * f.factor_inverse; }

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& A) { return 0.5 * (A + A.transpose()); }

void require_positive_order(double a, const char* who) {
    if (!(a > 0.0)) throw DomainError(std::string(who) + ": order must be positive");
}

} // namespace

std::string_view functional_name(FunctionalKind k) {
    switch (k) {
    case FunctionalKind::h_alpha: return "h_alpha";
    case FunctionalKind::N_alpha: return "N_alpha";
    case FunctionalKind::Ntilde_alpha: return "Ntilde_alpha";
    case FunctionalKind::h_hat_alpha: return "h_hat_alpha";
    case FunctionalKind::I: return "I";
    case FunctionalKind::I_alpha: return "I_alpha";
    case FunctionalKind::I_hat_alpha: return "I_hat_alpha";
    case FunctionalKind::I_hat_matrix: return "I_hat_matrix";
    case FunctionalKind::J_lambda: return "J_lambda";
    case FunctionalKind::I_tilde_alpha: return "I_tilde_alpha";
    case FunctionalKind::script_I2: return "script_I2";
    case FunctionalKind::phi: return "phi";
    case FunctionalKind::Phi: return "Phi";
    case FunctionalKind::sigma2: return "sigma2";
    }
    return "unknown";
}

PowerGradientIntegrals power_gradient_integrals(const Density& d, double gamma, double grad_power, double rel_tol) {
    const Shapes shapes{{gamma, false, 0}, {grad_power + 2.0, true, 0}};
    const Tolerance tol = Tolerance::relative(rel_tol);
    PowerGradientIntegrals out;
    if (const EllipticalForm* f = d.elliptical()) {
        const int n = d.dim();
        const double D = f->det;
        const RadialProfile& prof = f->profile;
        const double logD = std::log(D);
        auto g = [&](double t, double gap) {
            const double lq = log_value(prof, t, gap, logD);
            if (std::isinf(lq)) return std::array<double, 2>{0.0, 0.0};
            const double ls = std::abs(log_slope(prof, t, gap));
            const double grad = ls > 0.0 ? std::exp(2.0 * std::log(ls * D) + (grad_power + 2.0) * lq) : 0.0;
            return std::array<double, 2>{std::exp(gamma * lq), grad};
        };
        auto r = integrate_radial_profile<2>(prof, n, g, shapes, tol);
        check(r, "power_gradient_integrals");
        const Eigen::MatrixXd Sinv = shape_inverse(*f);
        const double G = r.value[1] / (n * D);
        out.power_integral = D * r.value[0];
        out.gradient_matrix = symmetrized(G * Sinv);
        out.gradient_integral = G * Sinv.trace();
        out.power_error = D * (r.abs_error_estimate + r.truncation_bound);
        out.gradient_error = (r.abs_error_estimate + r.truncation_bound) / (n * D) * Sinv.trace();
        return out;
    }
    const LineLayout* lay = d.line_layout();
    if (!lay) throw DomainError("functionals: density has no supported integration layout");
    auto g = [&](double x) {
        const double p = d.value1(x);
        if (!(p > kFloor)) return std::array<double, 2>{0.0, 0.0};
        const double ls = d.slope1(x) / p;
        return std::array<double, 2>{std::pow(p, gamma), ls * ls * std::pow(p, grad_power + 2.0)};
    };
    auto r = integrate_line_layout<2>(*lay, g, shapes, tol);
    check(r, "power_gradient_integrals");
    out.power_integral = r.value[0];
    out.gradient_integral = r.value[1];
    out.gradient_matrix = Eigen::MatrixXd::Constant(1, 1, r.value[1]);
    out.power_error = out.gradient_error = r.abs_error_estimate + r.truncation_bound;
    return out;
}

double power_integral(const Density& d, double gamma, double rel_tol) {
    const Shapes shapes{{gamma, false, 0}};
    const Tolerance tol = Tolerance::relative(rel_tol);
    if (const EllipticalForm* f = d.elliptical()) {
        const double D = f->det;
        const RadialProfile& prof = f->profile;
        auto r = integrate_radial_profile<1>(
            prof, d.dim(),
            [&, logD = std::log(D)](double t, double gap) {
                const double lq = log_value(prof, t, gap, logD);
                return std::array<double, 1>{std::isinf(lq) ? 0.0 : std::exp(gamma * lq)};
            },
            shapes, tol);
        check(r, "power_integral");
        return D * r.value[0];
    }
    const LineLayout* lay = d.line_layout();
    if (!lay) throw DomainError("functionals: density has no supported integration layout");
    auto r = integrate_line_layout<1>(
        *lay,
        [&](double x) {
            const double p = d.value1(x);
            return std::array<double, 1>{p > kFloor ? std::pow(p, gamma) : 0.0};
        },
        shapes, tol);
    check(r, "power_integral");
    return r.value[0];
}

double shannon_entropy(const Density& d, double rel_tol) {
    const Shapes shapes{{1.0, false, 0}};
    const Tolerance tol(1e-300, rel_tol);
    auto plogp = [](double p) { return p > kFloor ? -p * std::log(p) : 0.0; };
    if (const EllipticalForm* f = d.elliptical()) {
        const double D = f->det;
        const RadialProfile& prof = f->profile;
        auto r = integrate_radial_profile<1>(
            prof, d.dim(),
            [&, logD = std::log(D)](double t, double gap) {
                const double lq = log_value(prof, t, gap, logD);
                return std::array<double, 1>{std::isinf(lq) ? 0.0 : -std::exp(lq) * lq};
            },
            shapes, tol);
        check(r, "shannon_entropy");
        return D * r.value[0];
    }
    const LineLayout* lay = d.line_layout();
    if (!lay) throw DomainError("functionals: density has no supported integration layout");
    auto r = integrate_line_layout<1>(
        *lay, [&](double x) { return std::array<double, 1>{plogp(d.value1(x))}; }, shapes, tol);
    check(r, "shannon_entropy");
    return r.value[0];
}

double renyi_entropy(const Density& d, double alpha, double rel_tol) {
    require_positive_order(alpha, "renyi_entropy");
    if (is_shannon(alpha)) return shannon_entropy(d, rel_tol);
    return std::log(power_integral(d, alpha, rel_tol)) / (1.0 - alpha);
}

double renyi_power(const Density& d, double alpha, double rel_tol) {
    return std::exp(2.0 * renyi_entropy(d, alpha, rel_tol) / d.dim());
}

double alpha_th_power(const Density& d, double alpha, double rel_tol) {
    return std::exp((2.0 / d.dim() + alpha - 1.0) * renyi_entropy(d, alpha, rel_tol));
}

double fisher_information(const Density& d, double rel_tol) {
    return power_gradient_integrals(d, 1.0, -1.0, rel_tol).gradient_integral;
}

double renyi_fisher(const Density& d, double alpha, double rel_tol) {
    require_positive_order(alpha, "renyi_fisher");
    if (is_shannon(alpha)) return fisher_information(d, rel_tol);
    const auto b = power_gradient_integrals(d, alpha, alpha - 2.0, rel_tol);
    return alpha * b.gradient_integral / b.power_integral;
}

double tsallis_fisher(const Density& d, double alpha, double rel_tol) {
    require_positive_order(alpha, "tsallis_fisher");
    if (is_shannon(alpha)) return fisher_information(d, rel_tol);
    return alpha * power_gradient_integrals(d, alpha, alpha - 2.0, rel_tol).gradient_integral;
}

Eigen::MatrixXd tsallis_fisher_matrix(const Density& d, double alpha, double rel_tol) {
    require_positive_order(alpha, "tsallis_fisher_matrix");
    const double a = is_shannon(alpha) ? 1.0 : alpha;
    return a * power_gradient_integrals(d, a, a - 2.0, rel_tol).gradient_matrix;
}

Eigen::MatrixXd lambda_fisher_matrix(const Density& d, double lambda, double rel_tol) {
    require_positive_order(lambda, "lambda_fisher_matrix");
    const auto b = power_gradient_integrals(d, lambda, 2.0 * lambda - 3.0, rel_tol);
    return b.gradient_matrix / b.power_integral;
}

double weighted_fisher(const Density& d, double alpha, double rel_tol) {
    require_positive_order(alpha, "weighted_fisher");
    if (is_shannon(alpha)) return fisher_information(d, rel_tol);
    const auto b = power_gradient_integrals(d, alpha, 2.0 * alpha - 3.0, rel_tol);
    return alpha * alpha * b.gradient_integral / b.power_integral;
}

double tsallis_entropy(const Density& d, double alpha, double rel_tol) {
    require_positive_order(alpha, "tsallis_entropy");
    if (is_shannon(alpha)) return shannon_entropy(d, rel_tol);
    return (power_integral(d, alpha, rel_tol) - 1.0) / (1.0 - alpha);
}

double log_tsallis2_fisher(const Density& d, double rel_tol) {
    const auto b = power_gradient_integrals(d, 2.0, 0.0, rel_tol);
    const double hhat = 1.0 - b.power_integral;
    if (!(hhat > 0.0)) throw ConditionError("log_tsallis2_fisher: requires integral of p^2 < 1");
    return 2.0 * b.gradient_integral / hhat;
}

PhiPair phi_functionals(const Density& d, double lambda, double rel_tol) {
    if (!(lambda > 1.0 / 3.0)) throw DomainError("phi_functionals: need lambda > 1/3");
    const auto b = power_gradient_integrals(d, lambda, 2.0 * lambda - 3.0, rel_tol);
    PhiPair out;
    out.Phi = b.gradient_integral;
    out.phi = std::pow(out.Phi, 1.0 / (2.0 * lambda));
    return out;
}

namespace {

// 4th-order central difference with the step limited so the stencil stays inside one smooth piece
template <class F>
double fd_slope(const F& f, double x, double h0, double gap) {
    const double h = std::min(h0, gap / 1000.0);
    if (!(h > 0.0)) return 0.0;
    return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
}

} // namespace

double substitution_identity_check(const Density& d, double alpha, double rel_tol) {
    require_positive_order(alpha, "substitution_identity_check");
    const double direct = renyi_fisher(d, alpha, rel_tol);
    const double half = 0.5 * alpha;
    const Shapes shapes{{alpha, true, 0}, {alpha, false, 0}};
    const Tolerance tol = Tolerance::relative(rel_tol);
    double via_f;
    if (const EllipticalForm* ef = d.elliptical()) {
        const double D = ef->det;
        const RadialProfile& prof = ef->profile;
        const double R = prof.radius;
        const double logD = std::log(D);
        const double h0 = 5e-4 * (prof.decay ? std::min(1.0, prof.decay->natural_scale()) : std::min(1.0, R));
        // f as a function of the gap when the profile has an edge form, else of the radius
        const bool by_gap = static_cast<bool>(prof.edge_log_rho);
        auto f = [&](double x) {
            const double t = std::abs(x);
            const double lq = by_gap ? log_value(prof, R - x, x, logD) : log_value(prof, t, R - t, logD);
            return std::isinf(lq) ? 0.0 : std::exp(half * lq);
        };
        auto g = [&](double t, double edge) {
            double gap = std::isinf(R) ? 1e300 : edge;
            if (prof.kink_at_origin) gap = std::min(gap, t);
            for (double b : prof.breakpoints) gap = std::min(gap, std::abs(t - b));
            const double x = by_gap ? edge : t;
            const double s = fd_slope(f, x, h0, gap);
            const double v = f(x);
            return std::array<double, 2>{s * s, v * v};
        };
        auto r = integrate_radial_profile<2>(prof, d.dim(), g, shapes, tol);
        check(r, "substitution_identity_check");
        via_f = (4.0 / alpha) * (shape_inverse(*ef).trace() / d.dim()) * r.value[0] / r.value[1];
    } else {
        const LineLayout* lay = d.line_layout();
        if (!lay) throw DomainError("functionals: density has no supported integration layout");
        const double width = std::isinf(lay->hi - lay->lo) ? (lay->tail ? lay->tail->natural_scale() : 1.0)
                                                           : (lay->hi - lay->lo);
        const double h0 = 5e-4 * std::min(1.0, width);
        auto f = [&](double x) {
            const double p = d.value1(x);
            return p > kFloor ? std::pow(p, half) : 0.0;
        };
        auto g = [&](double x) {
            double gap = std::min(x - lay->lo, lay->hi - x);
            auto it = std::lower_bound(lay->breakpoints.begin(), lay->breakpoints.end(), x);
            if (it != lay->breakpoints.end()) gap = std::min(gap, *it - x);
            if (it != lay->breakpoints.begin()) gap = std::min(gap, x - *std::prev(it));
            const double v = f(x);
            // next to a support edge the coordinate itself carries too few digits for a difference quotient
            const double s = gap >= 1e-4 * width ? fd_slope(f, x, h0, gap)
                                                 : (v > 0.0 ? half * v / d.value1(x) * d.slope1(x) : 0.0);
            return std::array<double, 2>{s * s, v * v};
        };
        auto r = integrate_line_layout<2>(*lay, g, shapes, tol);
        check(r, "substitution_identity_check");
        via_f = (4.0 / alpha) * r.value[0] / r.value[1];
    }
    return std::abs(direct - via_f);
}

namespace {

FunctionalValue evaluate_once(const Density& d, FunctionalKind kind, double order, double rel_tol) {
    FunctionalValue v;
    v.kind = kind;
    v.order = order;
    switch (kind) {
    case FunctionalKind::h_alpha: v.value = renyi_entropy(d, order, rel_tol); break;
    case FunctionalKind::N_alpha: v.value = renyi_power(d, order, rel_tol); break;
    case FunctionalKind::Ntilde_alpha: v.value = alpha_th_power(d, order, rel_tol); break;
    case FunctionalKind::h_hat_alpha: v.value = tsallis_entropy(d, order, rel_tol); break;
    case FunctionalKind::I: v.value = fisher_information(d, rel_tol); break;
    case FunctionalKind::I_alpha: v.value = renyi_fisher(d, order, rel_tol); break;
    case FunctionalKind::I_hat_alpha: v.value = tsallis_fisher(d, order, rel_tol); break;
    case FunctionalKind::I_hat_matrix:
        v.matrix = tsallis_fisher_matrix(d, order, rel_tol);
        v.value = v.matrix->trace();
        break;
    case FunctionalKind::J_lambda:
        v.matrix = lambda_fisher_matrix(d, order, rel_tol);
        v.value = v.matrix->trace();
        break;
    case FunctionalKind::I_tilde_alpha: v.value = weighted_fisher(d, order, rel_tol); break;
    case FunctionalKind::script_I2: v.value = log_tsallis2_fisher(d, rel_tol); break;
    case FunctionalKind::phi: v.value = phi_functionals(d, order, rel_tol).phi; break;
    case FunctionalKind::Phi: v.value = phi_functionals(d, order, rel_tol).Phi; break;
    case FunctionalKind::sigma2: v.value = second_moment(d); break;
    }
    return v;
}

} // namespace

FunctionalValue evaluate_functional(const Density& d, FunctionalKind kind, double order, double rel_tol) {
    FunctionalValue v = evaluate_once(d, kind, order, rel_tol);
    // error estimate: change against a 100x tighter evaluation
    const FunctionalValue fine = evaluate_once(d, kind, order, std::max(rel_tol * 1e-2, 1e-14));
    v.error_estimate = std::abs(fine.value - v.value);
    if (v.matrix && fine.matrix) v.error_estimate = std::max(v.error_estimate, (*fine.matrix - *v.matrix).cwiseAbs().maxCoeff());
    return v;
}

} // namespace renyi
