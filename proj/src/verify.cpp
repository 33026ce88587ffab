#include "renyi/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "renyi/constants.hpp"
#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"
#include "renyi/profiles.hpp"

namespace renyi {

namespace {

constexpr double kOrderMatch = 1e-12;

bool same_order(const Density& d, const char* key, double v) {
    const double p = d.param(key);
    return std::isfinite(p) && std::abs(p - v) <= kOrderMatch * std::max(1.0, std::abs(v));
}

bool centered(const Density& d) {
    const Eigen::VectorXd mu = mean(d);
    return mu.norm() <= 1e-9 * std::sqrt(std::max(covariance(d).trace(), 1e-300));
}

VerdictReport base_report(const std::string& id, const std::string& anchor, const Density& d, double alpha) {
    VerdictReport r;
    r.inequality_id = id;
    r.anchor = anchor;
    r.inputs["alpha"] = alpha;
    r.inputs["n"] = d.dim();
    r.labels["density"] = d.describe();
    return r;
}

void require_weighted_region(int n, double alpha, const char* who) {
    if (!(alpha > n / (n + 2.0)))
        throw DomainError(std::string(who) + ": alpha must exceed n/(n+2) = " + std::to_string(n / (n + 2.0)) +
                          " for n = " + std::to_string(n));
}

bool isoperimetric_extremal(const Density& d, double alpha) {
    const int n = d.dim();
    if (is_shannon(alpha)) return d.family() == Family::gaussian;
    if (n == 1) {
        if (alpha > 1.0) return d.family() == Family::cos_power && same_order(d, "alpha", alpha);
        return d.family() == Family::cosh_power && same_order(d, "alpha", alpha) &&
               same_order(d, "power", cosh_extremal_power(alpha));
    }
    if (n >= 3 && std::abs(alpha - (n - 2.0) / n) < 1e-12) return d.family() == Family::sobolev_extremal;
    return d.family() == Family::profile_density && same_order(d, "alpha", alpha);
}

double fd_tolerance(const VerifyOptions& opt, int order) {
    return order <= 1 ? opt.tol.fd_first : opt.tol.fd_second;
}

// max-entropy Tsallis entropy of order 2 at covariance K
double hhat2_of_covariance(const Eigen::MatrixXd& K) { return 1.0 - max_renyi_power_integral(2.0, K); }

} // namespace

VerdictReport isoperimetric_check(const DensityPtr& d, double alpha, const VerifyOptions& opt) {
    const int n = d->dim();
    VerdictReport r = base_report("isoperimetric", "entropic isoperimetric inequality N_alpha I_alpha >= r", *d, alpha);
    const ConstantRecord c = optimal_constant(n, alpha);
    const double N = renyi_power(*d, alpha);
    const double I = renyi_fisher(*d, alpha);
    r.lhs = N * I;
    r.rhs = c.value;
    r.margin = r.lhs - r.rhs;
    r.tolerance = opt.tol.closed_vs_quad * r.rhs;
    r.equality_expected = isoperimetric_extremal(*d, alpha);
    r.details["N_alpha"] = N;
    r.details["I_alpha"] = I;
    r.labels["constant_route"] = std::string(route_name(c.route));
    r.settle();
    return r;
}

VerdictReport cramer_rao_renyi(const DensityPtr& d, double alpha, const VerifyOptions& opt) {
    const int n = d->dim();
    require_weighted_region(n, alpha, "cramer_rao_renyi");
    VerdictReport r = base_report("cramer_rao_renyi", "Renyi Cramer-Rao inequality via the max-Renyi density", *d, alpha);
    const Eigen::MatrixXd K = covariance(*d);
    const DensityPtr f = make_max_renyi(alpha, K);
    const double h_quad = renyi_entropy(*f, alpha);
    const double h_closed = is_shannon(alpha)
                                ? 0.5 * (n * std::log(2.0 * std::numbers::pi * std::numbers::e) + std::log(K.determinant()))
                                : std::log(max_renyi_power_integral(alpha, K)) / (1.0 - alpha);
    const double gap = std::abs(h_quad - h_closed) / std::max(1.0, std::abs(h_closed));
    if (gap > opt.tol.entropy_gate)
        throw ConvergenceError("cramer_rao_renyi: max-Renyi entropy quadrature and closed form disagree by " +
                               std::to_string(gap));
    const double I = renyi_fisher(*d, alpha);
    const ConstantRecord c = optimal_constant(n, alpha);
    r.lhs = std::exp(2.0 * h_closed / n) * I;
    r.rhs = c.value;
    r.margin = r.lhs - r.rhs;
    r.tolerance = opt.tol.closed_vs_quad * r.rhs;
    r.equality_expected = is_shannon(alpha) && d->family() == Family::gaussian;
    r.details["h_alpha_max_renyi"] = h_closed;
    r.details["h_alpha_max_renyi_quadrature"] = h_quad;
    r.details["I_alpha"] = I;
    if (n == 1 && alpha > 1.0 / 3.0) {
        r.details["omega_form_lhs"] = I * K(0, 0);
        r.details["omega_form_rhs"] = omega_bounds_1d(alpha);
    }
    r.settle();
    return r;
}

VerdictReport cramer_rao_weighted(const DensityPtr& d, double alpha, const VerifyOptions& opt) {
    const int n = d->dim();
    require_weighted_region(n, alpha, "cramer_rao_weighted");
    if (is_shannon(alpha)) throw DomainError("cramer_rao_weighted: alpha = 1 is excluded");
    VerdictReport r = base_report("weighted_cramer_rao",
                                  "weighted Fisher Cramer-Rao inequality, reference second moment n", *d, alpha);
    const double e = n * (alpha - 1.0) / 2.0 + 1.0;
    const double s2 = second_moment(*d);
    r.lhs = weighted_fisher(*d, alpha);
    r.rhs = std::pow(n / s2, e) * 2.0 * alpha * n / std::abs(alpha - 1.0);
    r.margin = r.lhs - r.rhs;
    r.tolerance = opt.tol.closed_vs_quad * r.rhs;
    r.equality_expected = d->family() == Family::barenblatt && same_order(*d, "alpha", alpha) &&
                          d->param("scale", 1.0) == 1.0 && centered(*d);
    r.details["sigma2"] = s2;
    r.details["sigma2_barenblatt"] = second_moment(*make_barenblatt(n, alpha));
    r.notes.push_back("the reference second moment n differs from sigma2 of the unit-mass Barenblatt profile");
    r.settle();
    return r;
}

VerdictReport cramer_rao_weighted_chain(const DensityPtr& d, double alpha, const VerifyOptions& opt) {
    const int n = d->dim();
    require_weighted_region(n, alpha, "cramer_rao_weighted_chain");
    if (is_shannon(alpha)) throw DomainError("cramer_rao_weighted_chain: alpha = 1 is excluded");
    VerdictReport r = base_report("weighted_cramer_rao_chain",
                                  "weighted Fisher Cramer-Rao inequality from the moment-entropy and weighted "
                                  "isoperimetric inequalities",
                                  *d, alpha);
    const DensityPtr B = make_barenblatt(n, alpha);
    const double e = n * (alpha - 1.0) / 2.0 + 1.0;
    const double s2 = second_moment(*d);
    const double s2B = second_moment(*B);
    const double ItB = weighted_fisher(*B, alpha);
    r.lhs = weighted_fisher(*d, alpha);
    r.rhs = std::pow(s2B / s2, e) * ItB;
    r.margin = r.lhs - r.rhs;
    r.tolerance = opt.tol.quad_vs_quad * r.rhs;
    r.equality_expected = d->family() == Family::barenblatt && same_order(*d, "alpha", alpha) && centered(*d);
    r.details["sigma2"] = s2;
    r.details["sigma2_barenblatt"] = s2B;
    r.details["Itilde_barenblatt"] = ItB;
    r.details["Itilde_barenblatt_closed"] = 2.0 * alpha * n / std::abs(alpha - 1.0);
    r.settle();
    return r;
}

VerdictReport weighted_isoperimetric_check(const DensityPtr& d, double alpha, const VerifyOptions& opt) {
    const int n = d->dim();
    require_weighted_region(n, alpha, "weighted_isoperimetric_check");
    VerdictReport r = base_report("weighted_isoperimetric", "weighted isoperimetric inequality Ntilde Itilde >= gamma",
                                  *d, alpha);
    const double Nt = alpha_th_power(*d, alpha);
    const double It = weighted_fisher(*d, alpha);
    r.lhs = Nt * It;
    r.rhs = weighted_isoperimetric_constant(n, alpha);
    r.margin = r.lhs - r.rhs;
    r.tolerance = opt.tol.closed_vs_quad * r.rhs;
    r.equality_expected = (is_shannon(alpha) && d->family() == Family::gaussian) ||
                          (d->family() == Family::barenblatt && same_order(*d, "alpha", alpha));
    r.details["Ntilde_alpha"] = Nt;
    r.details["Itilde_alpha"] = It;
    r.settle();
    return r;
}

VerdictReport moment_entropy_check(const DensityPtr& d, double alpha, const VerifyOptions& opt) {
    const int n = d->dim();
    require_weighted_region(n, alpha, "moment_entropy_check");
    VerdictReport r = base_report("moment_entropy", "moment-entropy inequality against the Barenblatt profile", *d,
                                  alpha);
    const double s2 = second_moment(*d);
    const double Nt = alpha_th_power(*d, alpha);
    double s2B, NtB;
    if (is_shannon(alpha)) {
        // the Barenblatt family tends to the standard Gaussian
        s2B = n;
        NtB = 2.0 * std::numbers::pi * std::numbers::e;
        r.notes.push_back("alpha = 1: reference is the standard Gaussian");
    } else {
        const DensityPtr B = make_barenblatt(n, alpha);
        s2B = second_moment(*B);
        NtB = alpha_th_power(*B, alpha);
    }
    const double e = n * (alpha - 1.0) / 2.0 + 1.0;
    r.lhs = std::pow(s2 / s2B, e);
    r.rhs = Nt / NtB;
    r.margin = r.lhs - r.rhs;
    r.tolerance = opt.tol.quad_vs_quad * std::max(std::abs(r.rhs), 1.0);
    r.equality_expected = centered(*d) && ((is_shannon(alpha) && d->family() == Family::gaussian) ||
                                           (d->family() == Family::barenblatt && same_order(*d, "alpha", alpha)));
    r.details["sigma2"] = s2;
    r.details["sigma2_barenblatt"] = s2B;
    r.details["Ntilde_alpha"] = Nt;
    r.details["Ntilde_alpha_barenblatt"] = NtB;
    r.settle();
    return r;
}

VerdictReport cramer_rao_tsallis(const DensityPtr& d, double alpha, const VerifyOptions& opt) {
    const int n = d->dim();
    if (n == 2) throw UnsupportedRegion("cramer_rao_tsallis: no bound is available for n = 2");
    if (n == 1 && !(alpha > 0.0)) throw DomainError("cramer_rao_tsallis: alpha must be positive");
    if (n >= 3 && !(alpha > (n - 2.0) / n))
        throw DomainError("cramer_rao_tsallis: alpha must exceed (n-2)/n = " + std::to_string((n - 2.0) / n) +
                          " for n = " + std::to_string(n));
    VerdictReport r = base_report("tsallis_cramer_rao", "Tsallis-Fisher Cramer-Rao inequality against G", *d, alpha);
    const DensityPtr G = make_tsallis_g(n, alpha);
    const double s2 = second_moment(*d), s2G = second_moment(*G);
    const double Ih = tsallis_fisher(*d, alpha), IhG = tsallis_fisher(*G, alpha);
    if (n == 1) {
        r.lhs = std::sqrt(s2) * std::pow(Ih, 1.0 / (alpha + 1.0));
        r.rhs = std::sqrt(s2G) * std::pow(IhG, 1.0 / (alpha + 1.0));
    } else {
        r.lhs = std::pow(s2 / s2G, (alpha - 1.0) * n / 2.0 + 1.0);
        r.rhs = IhG / Ih;
    }
    r.margin = r.lhs - r.rhs;
    r.tolerance = opt.tol.quad_vs_quad * std::abs(r.rhs);
    r.equality_expected = d->family() == Family::tsallis_g && same_order(*d, "alpha", alpha) && centered(*d);
    r.details["sigma2"] = s2;
    r.details["sigma2_G"] = s2G;
    r.details["Ihat_alpha"] = Ih;
    r.details["Ihat_alpha_G"] = IhG;
    r.settle();
    return r;
}

VerdictReport cramer_rao_matrix(const DensityPtr& d, double alpha, const VerifyOptions& opt) {
    const int n = d->dim();
    if (!(alpha > (n - 2.0) / (n + 2.0)))
        throw DomainError("cramer_rao_matrix: alpha must exceed (n-2)/(n+2) = " +
                          std::to_string((n - 2.0) / (n + 2.0)));
    VerdictReport r = base_report("tsallis_cramer_rao_matrix", "matrix Tsallis-Fisher Cramer-Rao inequality", *d,
                                  alpha);
    const Eigen::MatrixXd K = covariance(*d);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
    if (ldlt.info() != Eigen::Success || !(std::abs(K.determinant()) > 1e-300))
        throw DomainError("cramer_rao_matrix: covariance is singular");
    const Eigen::MatrixXd Kinv = K.inverse();
    const Eigen::MatrixXd Ih = tsallis_fisher_matrix(*d, alpha);
    const double lam = (alpha + 1.0) / 2.0;
    const double m = is_shannon(alpha) ? 1.0 : power_integral(*d, lam);
    const double coef = 4.0 * alpha * m * m / ((alpha + 1.0) * (alpha + 1.0));
    const Eigen::MatrixXd diff = Ih - coef * Kinv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (diff + diff.transpose()));
    const double tr = Ih.trace();
    for (int i = 0; i < n; ++i) r.eigenvalues.push_back(es.eigenvalues()(i));
    r.lhs = es.eigenvalues().minCoeff();
    r.rhs = 0.0;
    r.margin = r.lhs / tr;
    r.tolerance = opt.tol.psd;
    r.equality_expected = (d->family() == Family::g_lambda && same_order(*d, "lambda", lam)) ||
                          (is_shannon(alpha) && d->family() == Family::gaussian);
    r.details["trace_Ihat"] = tr;
    r.details["max_abs_eigenvalue_over_trace"] = es.eigenvalues().cwiseAbs().maxCoeff() / tr;
    r.details["power_integral"] = m;
    r.settle();
    return r;
}

BellValues bell_polynomials(const std::vector<double>& x) {
    if (x.empty()) throw DomainError("bell_polynomials: need at least one input");
    const std::size_t m = x.size();
    std::vector<double> B(m + 1, 0.0);
    B[0] = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
        double acc = 0.0, binom = 1.0;
        for (std::size_t i = 0; i <= k; ++i) {
            acc += binom * B[k - i] * x[i];
            binom = binom * static_cast<double>(k - i) / static_cast<double>(i + 1);
        }
        B[k + 1] = acc;
    }
    return {static_cast<int>(m), x, std::vector<double>(B.begin() + 1, B.end())};
}

VerdictReport cm_bound_check(const DensityPtr& d, double alpha, std::optional<double> beta, int j, double t0,
                             const VerifyOptions& opt) {
    if (d->dim() != 1) throw DomainError("cm_bound_check: only n = 1 is supported");
    if (j < 1 || j > 2) throw DomainError("cm_bound_check: j must be 1 or 2");
    if (!(t0 > 0.0)) throw DomainError("cm_bound_check: t0 must be positive");
    double b;
    std::string regime;
    if (is_shannon(alpha)) {
        b = 1.0;
        regime = "shannon";
    } else if (alpha > 1.0 / 3.0 && alpha < 1.0) {
        b = (alpha + 1.0) / 2.0;
        regime = "below_one";
    } else if (alpha > 1.0 && alpha <= 1.5 + std::sqrt(2.0)) {
        b = 0.5;
        regime = "above_one";
    } else {
        throw DomainError("cm_bound_check: alpha must lie in (1/3, 1) or (1, 3/2 + sqrt 2]");
    }
    if (beta && std::abs(*beta - b) > 1e-12)
        throw DomainError("cm_bound_check: beta must be " + std::to_string(b) + " for alpha = " + std::to_string(alpha));
    VerdictReport r = base_report("cm_entropy_bound", "derivative bound for the Renyi entropy along the heat flow", *d,
                                  alpha);
    r.inputs["beta"] = b;
    r.inputs["j"] = j;
    r.inputs["t0"] = t0;
    r.labels["regime"] = regime;
    const double K = covariance(*d)(0, 0);
    const Flow flow = make_flow(d, opt.grid_spacing);
    const auto h_of = [alpha, &opt](const Density& g) { return renyi_entropy(g, alpha, opt.flow.rel_tol); };
    const FlowDerivative fd = flow_derivative(flow, h_of, t0, j, 2.0 * opt.flow.fd_rel_step * t0, opt.flow);
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    r.lhs = sign * fd.value;
    r.rhs = cm_bound_coefficients(alpha, b, j, t0, K);
    r.margin = r.lhs - r.rhs;
    r.tolerance = fd_tolerance(opt, j) * std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.equality_expected = is_shannon(alpha) && d->family() == Family::gaussian;
    r.details["K"] = K;
    r.details["fd_step"] = 0.5 * fd.step;
    r.details["fd_coarse"] = sign * fd.coarse;
    r.settle();
    return r;
}

VerdictReport log_tsallis_cm_check(const DensityPtr& d, double t0, int j, const VerifyOptions& opt) {
    const int n = d->dim();
    if (j < 1 || j > 3) throw DomainError("log_tsallis_cm_check: j must be 1, 2 or 3");
    if (!(t0 >= 0.0)) throw DomainError("log_tsallis_cm_check: t0 must be nonnegative");
    VerdictReport r = base_report("log_tsallis_cm", "completely monotone bound for the log-Tsallis Fisher quotient", *d,
                                  2.0);
    r.inputs["t0"] = t0;
    r.inputs["j"] = j;
    const Eigen::MatrixXd K = covariance(*d);
    const Eigen::MatrixXd Kt = K + t0 * Eigen::MatrixXd::Identity(n, n);
    const double hK = hhat2_of_covariance(Kt);
    if (!(hK > 1e-12)) throw ConditionError("log_tsallis_cm_check: the max-entropy density at K + t0 I has integral of square >= 1");
    const Flow flow = make_flow(d, opt.grid_spacing);
    const DensityPtr dt = flow.at(t0);
    if (!(power_integral(*dt, 2.0, opt.flow.rel_tol) < 1.0))
        throw ConditionError("log_tsallis_cm_check: requires integral of p_t^2 < 1");
    const double r2 = optimal_constant(n, 2.0).value;
    const double base = r2 * std::pow(1.0 - hK, 2.0 / n + 1.0) / (2.0 * hK);
    r.rhs = std::tgamma(static_cast<double>(j)) * std::pow(base, j);
    const auto quotient = [&opt](const Density& g) { return log_tsallis2_fisher(g, opt.flow.rel_tol); };
    if (j == 1) {
        r.lhs = 0.5 * quotient(*dt);
        r.tolerance = opt.tol.closed_vs_quad * r.rhs;
    } else {
        const FlowDerivative fd = flow_derivative(flow, quotient, t0, j - 1, 2.0 * opt.flow.fd_rel_step * std::max(t0, 0.02), opt.flow);
        r.lhs = ((j - 1) % 2 == 0 ? 0.5 : -0.5) * fd.value;
        r.tolerance = fd_tolerance(opt, j - 1) * std::max(std::abs(r.lhs), r.rhs);
    }
    r.margin = r.lhs - r.rhs;
    r.details["hhat2_max_entropy"] = hK;
    if (n == 1) r.details["rhs_closed_form_1d"] = log_tsallis_cm_bound(K(0, 0), t0, j);
    r.settle();

    // sign chain of the Tsallis-Fisher information
    const auto ihat = [&opt](const Density& g) { return tsallis_fisher(g, 2.0, opt.flow.rel_tol); };
    const double I0 = ihat(*dt);
    r.details["Ihat2"] = I0;
    bool signs_ok = true;
    const double step = 2.0 * opt.flow.fd_rel_step * std::max(t0, 0.02);
    for (int k = 1; k <= 3; ++k) {
        const std::string key = "Ihat2_signed_derivative_" + std::to_string(k);
        try {
            const FlowDerivative fd = flow_derivative(flow, ihat, t0, k, step, opt.flow);
            const double s = (k % 2 == 0 ? 1.0 : -1.0) * fd.value;
            r.details[key] = s;
            const double noise = fd_tolerance(opt, k) * std::abs(fd.value) + 1e-9 * I0 / std::pow(0.5 * step, k);
            if (s < -noise) {
                signs_ok = false;
                r.notes.push_back("sign of derivative " + std::to_string(k) + " of Ihat2 is violated");
            }
        } catch (const ConvergenceError& e) {
            r.notes.push_back("derivative " + std::to_string(k) + " of Ihat2 is noise-dominated: " + e.what());
        }
    }
    r.pass = r.pass && signs_ok;
    return r;
}

std::vector<std::string> suite_names() {
    return {"isoperimetric", "cramer_rao", "moment_entropy", "tsallis", "matrix", "cm", "epi", "all"};
}

std::vector<VerdictReport> run_suite(const std::string& name, const DensityPtr& d, double alpha,
                                     const VerifyOptions& opt) {
    const auto names = suite_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw InputError("suite: unknown suite '" + name + "'");
    const bool all = name == "all";
    const int n = d->dim();
    std::vector<VerdictReport> out;
    auto want = [&](const char* s) { return all || name == s; };
    if (want("isoperimetric")) out.push_back(isoperimetric_check(d, alpha, opt));
    if (want("cramer_rao")) {
        if (alpha > n / (n + 2.0)) {
            out.push_back(cramer_rao_renyi(d, alpha, opt));
            if (!is_shannon(alpha)) {
                out.push_back(cramer_rao_weighted(d, alpha, opt));
                out.push_back(cramer_rao_weighted_chain(d, alpha, opt));
            }
            out.push_back(weighted_isoperimetric_check(d, alpha, opt));
        }
    }
    if (want("moment_entropy") && alpha > n / (n + 2.0)) out.push_back(moment_entropy_check(d, alpha, opt));
    if (want("tsallis") && n != 2 && (n == 1 || alpha > (n - 2.0) / n)) out.push_back(cramer_rao_tsallis(d, alpha, opt));
    if (want("matrix") && alpha > (n - 2.0) / (n + 2.0)) out.push_back(cramer_rao_matrix(d, alpha, opt));
    if (want("cm") && n == 1) {
        const bool regime = is_shannon(alpha) || (alpha > 1.0 / 3.0 && alpha < 1.0) ||
                            (alpha > 1.0 && alpha <= 1.5 + std::sqrt(2.0));
        if (regime)
            for (double t0 : {0.2, 0.5})
                for (int j : {1, 2}) out.push_back(cm_bound_check(d, alpha, std::nullopt, j, t0, opt));
        out.push_back(log_tsallis_cm_check(d, 0.5, 1, opt));
    }
    if (want("epi") && n == 1 && !is_shannon(alpha)) {
        const Flow flow = make_flow(d, std::min(opt.grid_spacing, 0.005));
        auto g = std::dynamic_pointer_cast<const GridDensity>(flow.at(0.0));
        if (g) out.push_back(epi_gaussian_check(*g, alpha, {1e-3, 1e-2, 0.1, 1.0}, opt.flow));
    }
    return out;
}

} // namespace renyi
