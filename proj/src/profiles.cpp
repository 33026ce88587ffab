#include "renyi/profiles.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "renyi/errors.hpp"
#include "renyi/quadrature.hpp"
#include "renyi/special_functions.hpp"

namespace renyi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
constexpr double kSeriesStart = 1e-4;
constexpr double kHorizon = 1000.0;

struct Rhs {
    int n;
    ProfileCase kind;
    double lin_exp;  // exponent of the non-linear term

    double nonlinear(double u) const {
        if (kind == ProfileCase::compact_support) {
            if (u <= 0.0) return 0.0;
            return lin_exp == 0.0 ? 1.0 : std::pow(u, lin_exp);
        }
        return std::copysign(std::pow(std::abs(u), lin_exp), u);
    }
    double dnonlinear(double u) const {
        if (lin_exp == 0.0) return 0.0;
        return lin_exp * std::pow(std::abs(u), lin_exp - 1.0);
    }
    // u'' given (t, u, u'); the origin uses the limit (n-1) u'/t -> (n-1) u''(0)
    double accel(double t, double u, double v) const {
        const double src = kind == ProfileCase::compact_support ? nonlinear(u) - u : u - nonlinear(u);
        if (t == 0.0) return src / n;
        return src - (n - 1) * v / t;
    }
};

struct State {
    double u, v;
};

// Dormand-Prince 5(4) step; returns the 5th-order state and an error estimate.
struct StepResult {
    State y;
    double err;
};

StepResult dp45_step(const Rhs& f, double t, State y, double h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    auto F = [&](double tt, State s) { return State{s.v, f.accel(tt, s.u, s.v)}; };
    auto add = [](State s, double h, std::initializer_list<std::pair<double, State>> terms) {
        for (auto& [c, k] : terms) {
            s.u += h * c * k.u;
            s.v += h * c * k.v;
        }
        return s;
    };
    const State k1 = F(t, y);
    const State k2 = F(t + c2 * h, add(y, h, {{a21, k1}}));
    const State k3 = F(t + c3 * h, add(y, h, {{a31, k1}, {a32, k2}}));
    const State k4 = F(t + c4 * h, add(y, h, {{a41, k1}, {a42, k2}, {a43, k3}}));
    const State k5 = F(t + c5 * h, add(y, h, {{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}}));
    const State k6 = F(t + h, add(y, h, {{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}}));
    const State y5 = add(y, h, {{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}});
    const State k7 = F(t + h, y5);
    const State e = add(State{0.0, 0.0}, h, {{e1, k1}, {e3, k3}, {e4, k4}, {e5, k5}, {e6, k6}, {e7, k7}});
    return {y5, std::max(std::abs(e.u), std::abs(e.v))};
}

// Quintic Hermite on [a, b] from values, slopes and second derivatives; returns (p, p', p'').
std::array<double, 3> quintic(const ProfileNode& a, const ProfileNode& b, double t) {
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    const double c0 = a.u, c1 = h * a.du, c2 = 0.5 * h * h * a.d2u;
    const double A = b.u - (c0 + c1 + c2);
    const double B = h * b.du - (c1 + 2.0 * c2);
    const double C = h * h * b.d2u - 2.0 * c2;
    const double c3 = 10.0 * A - 4.0 * B + 0.5 * C;
    const double c4 = -15.0 * A + 7.0 * B - C;
    const double c5 = 6.0 * A - 3.0 * B + 0.5 * C;
    const double p = c0 + s * (c1 + s * (c2 + s * (c3 + s * (c4 + s * c5))));
    const double dp = c1 + s * (2.0 * c2 + s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5)));
    const double d2p = 2.0 * c2 + s * (6.0 * c3 + s * (12.0 * c4 + s * 20.0 * c5));
    return {p, dp / h, d2p / (h * h)};
}

enum class Outcome { undershoot, overshoot };

struct Trajectory {
    Outcome outcome = Outcome::undershoot;
    std::vector<ProfileNode> nodes;
    double t_event = 0.0;
};

// Root of the event component (0: u, 1: u') of the interpolant of [a, b] inside [lo, hi] by bisection.
double locate(const ProfileNode& a, const ProfileNode& b, int comp, double lo, double hi) {
    auto g = [&](double t) { return quintic(a, b, t)[comp]; };
    const double glo = g(lo);
    for (int i = 0; i < 100 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((g(mid) > 0.0) == (glo > 0.0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Trajectory shoot(const Rhs& f, double u0, double rel_tol, bool keep) {
    Trajectory tr;
    // even series u0 + c2 t^2 + c4 t^4 off the singular origin
    const double a0 = f.accel(0.0, u0, 0.0);
    const double c2 = 0.5 * a0;
    const double slope = f.kind == ProfileCase::compact_support ? f.dnonlinear(u0) - 1.0 : 1.0 - f.dnonlinear(u0);
    const double c4 = slope * c2 / (4.0 * (f.n + 2));
    const double t0 = kSeriesStart;
    ProfileNode cur{t0, u0 + c2 * t0 * t0 + c4 * std::pow(t0, 4), 2.0 * c2 * t0 + 4.0 * c4 * std::pow(t0, 3), 0.0};
    cur.d2u = f.accel(cur.t, cur.u, cur.du);
    if (keep) tr.nodes.push_back({0.0, u0, 0.0, a0});
    if (keep) tr.nodes.push_back(cur);
    const double atol = rel_tol * u0 * 1e-2;
    double h = 1e-3;
    while (cur.t < kHorizon) {
        const StepResult st = dp45_step(f, cur.t, {cur.u, cur.du}, h);
        const double scale = atol + rel_tol * std::max(std::abs(cur.u), std::abs(st.y.u));
        const double ratio = st.err / scale;
        if (ratio > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(ratio, -0.2));
            if (h < 1e-14) throw ConvergenceError("solve_profile: step size underflow");
            continue;
        }
        ProfileNode next{cur.t + h, st.y.u, st.y.v, 0.0};
        next.d2u = f.accel(next.t, next.u, next.du);
        bool crossed = next.u <= 0.0;
        const bool turned = next.du >= 0.0;
        if (crossed || turned) {
            double tv = turned ? locate(cur, next, 1, cur.t, next.t) : kHorizon;
            // u may dip below zero and recover inside one step; its minimum is at the turning point
            if (turned && !crossed && quintic(cur, next, tv)[0] <= 0.0) crossed = true;
            double tc = crossed ? locate(cur, next, 0, cur.t, std::min(tv, next.t)) : kHorizon;
            if (tc <= tv) {
                tr.outcome = Outcome::overshoot;
                tr.t_event = tc;
            } else {
                tr.outcome = Outcome::undershoot;
                tr.t_event = tv;
            }
            if (keep) {
                const auto q = quintic(cur, next, tr.t_event);
                ProfileNode end{tr.t_event, q[0], q[1], 0.0};
                // one-sided limit at the free boundary
                end.d2u = f.accel(end.t, std::max(end.u, std::numeric_limits<double>::min()), end.du);
                tr.nodes.push_back(end);
            }
            return tr;
        }
        cur = next;
        if (keep) tr.nodes.push_back(cur);
        h *= std::min(5.0, 0.9 * std::pow(std::max(ratio, 1e-10), -0.2));
    }
    tr.outcome = Outcome::undershoot;
    tr.t_event = kHorizon;
    return tr;
}

std::size_t node_index(const std::vector<ProfileNode>& nodes, double t) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t, [](double x, const ProfileNode& nd) { return x < nd.t; });
    std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    if (i == 0) return 0;
    return std::min(i - 1, nodes.size() - 2);
}

double log_bessel_k(double nu, double t) {
    if (t < 600.0) return std::log(boost::math::cyl_bessel_k(nu, t));
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 6; ++k) {
        term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * t);
        sum += term;
    }
    return 0.5 * std::log(kPi / (2.0 * t)) - t + std::log(sum);
}

double bessel_k_log_slope(double nu, double t) {
    // d/dt log(t^{-nu} K_nu(t)) = -K_{nu+1}(t)/K_nu(t)
    if (t < 600.0) return -boost::math::cyl_bessel_k(nu + 1.0, t) / boost::math::cyl_bessel_k(nu, t);
    return -std::exp(log_bessel_k(nu + 1.0, t) - log_bessel_k(nu, t));
}

void require_dimension(int n) {
    if (n < 1) throw DomainError("profiles: dimension must be positive");
}

} // namespace

std::string_view profile_case_name(ProfileCase c) {
    return c == ProfileCase::compact_support ? "compact_support" : "infinite_decay";
}

ProfileCase profile_case(int n, double alpha) {
    require_dimension(n);
    if (!(alpha > 0.0)) throw DomainError("profiles: alpha must be positive");
    if (is_shannon(alpha)) throw UnsupportedRegion("profiles: alpha = 1 has no ground-state ODE");
    if (alpha > 2.0) throw UnsupportedRegion("profiles: no ground-state ODE for alpha > 2");
    double lower = 0.0;
    if (n >= 3) lower = (n - 2.0) / n;
    if (n >= 6) lower = std::max(lower, 2.0 * (n - 2.0) / (n + 2.0));
    if (!(alpha > lower))
        throw UnsupportedRegion("profiles: alpha = " + std::to_string(alpha) + " needs alpha > " + std::to_string(lower) +
                                " for n = " + std::to_string(n));
    return alpha > 1.0 ? ProfileCase::compact_support : ProfileCase::infinite_decay;
}

double ProfileSolution::u(double t) const {
    t = std::abs(t);
    if (t >= tail_start) return std::exp(log_u(t));
    if (t >= nodes.back().t) return 0.0;
    const std::size_t i = node_index(nodes, t);
    return std::max(0.0, quintic(nodes[i], nodes[i + 1], t)[0]);
}

double ProfileSolution::du(double t) const {
    t = std::abs(t);
    if (t >= tail_start) return u(t) * bessel_k_log_slope(0.5 * (n - 2), t);
    if (t >= nodes.back().t) return 0.0;
    const std::size_t i = node_index(nodes, t);
    return std::min(0.0, quintic(nodes[i], nodes[i + 1], t)[1]);
}

double ProfileSolution::d2u(double t) const {
    t = std::abs(t);
    if (t >= tail_start) {
        // linearized tail: u'' = u - (n-1)/t u'
        return u(t) - (n - 1) * du(t) / t;
    }
    if (t >= nodes.back().t) return 0.0;
    const std::size_t i = node_index(nodes, t);
    return quintic(nodes[i], nodes[i + 1], t)[2];
}

double ProfileSolution::log_u(double t) const {
    t = std::abs(t);
    if (t >= tail_start) {
        const double nu = 0.5 * (n - 2);
        return std::log(tail_scale) - nu * std::log(t) + log_bessel_k(nu, t);
    }
    const double v = u(t);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

std::vector<ProfileNode> ProfileSolution::samples() const {
    std::vector<ProfileNode> out;
    for (const auto& nd : nodes) {
        if (nd.t > tail_start) break;
        out.push_back(nd);
    }
    if (kind == ProfileCase::infinite_decay) {
        const double step = 0.25;
        for (double t = tail_start + step; t <= t_max + 0.5 * step; t += step) out.push_back({t, u(t), du(t), d2u(t)});
    }
    return out;
}

ProfileSolution solve_profile(int n, double alpha, const ProfileOptions& opt) {
    const ProfileCase kind = profile_case(n, alpha);
    ProfileSolution sol;
    sol.n = n;
    sol.alpha = alpha;
    sol.kind = kind;
    if (kind == ProfileCase::compact_support) {
        sol.r_exponent = 2.0;
        sol.s_exponent = 2.0 / alpha;
    } else {
        sol.r_exponent = 2.0 / alpha;
        sol.s_exponent = 2.0;
    }
    const Rhs f{n, kind, kind == ProfileCase::compact_support ? sol.s_exponent - 1.0 : sol.r_exponent - 1.0};
    const double tol = opt.ode_rel_tol;

    double lo = 1.0 + 1e-6;
    if (shoot(f, lo, tol, false).outcome != Outcome::undershoot)
        throw ConvergenceError("solve_profile: lower shooting bracket does not undershoot");
    double hi = 2.0;
    while (shoot(f, hi, tol, false).outcome != Outcome::overshoot) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) throw ConvergenceError("solve_profile: no overshooting initial value found");
    }
    int steps = 0;
    while (hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi) {
        if (++steps > opt.max_bisections) throw ConvergenceError("solve_profile: bisection did not converge");
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (shoot(f, mid, tol, false).outcome == Outcome::undershoot)
            lo = mid;
        else
            hi = mid;
    }
    sol.bisection_steps = steps;
    sol.u0 = lo;
    Trajectory below = shoot(f, lo, tol, true);

    if (kind == ProfileCase::compact_support) {
        sol.nodes = std::move(below.nodes);
        sol.nodes.back().u = 0.0;
        sol.nodes.back().du = 0.0;
        sol.T = below.t_event;
        sol.t_max = below.t_event;
    } else {
        // keep the part where the bracketing trajectories agree, then attach the linearized tail
        Trajectory above = shoot(f, hi, tol, true);
        const auto& A = above.nodes;
        std::size_t cut = 1;
        for (std::size_t i = 1; i < below.nodes.size() - 1; ++i) {
            const ProfileNode& nd = below.nodes[i];
            if (nd.t >= A.back().t) break;
            const std::size_t j = node_index(A, nd.t);
            const double ua = quintic(A[j], A[j + 1], nd.t)[0];
            if (nd.u <= 1e-7 * sol.u0 || std::abs(ua - nd.u) > 1e-6 * nd.u || nd.du >= 0.0) break;
            cut = i;
        }
        below.nodes.resize(cut + 1);
        sol.nodes = std::move(below.nodes);
        const ProfileNode& last = sol.nodes.back();
        const double nu = 0.5 * (n - 2);
        sol.tail_start = last.t;
        sol.tail_scale = std::exp(std::log(last.u) + nu * std::log(last.t) - log_bessel_k(nu, last.t));
        // t_max from the tail bound u^2 t^{n-1} / 2 on the remaining mass of u^2
        double t = sol.tail_start;
        while (true) {
            const double lu = sol.log_u(t);
            if (2.0 * lu + (n - 1) * std::log(t) - std::log(2.0) < std::log(1e-14) && lu < std::log(1e-10 * sol.u0))
                break;
            t += 0.25;
        }
        sol.t_max = t;
    }
    sol.mass = profile_moment(sol, 2.0 / alpha);
    sol.Ms = kind == ProfileCase::compact_support ? sol.mass : profile_moment(sol, 2.0);
    return sol;
}

ProfilePtr cached_profile(int n, double alpha) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, ProfilePtr> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({n, alpha});
        if (it != cache.end()) return it->second;
    }
    auto sol = std::make_shared<const ProfileSolution>(solve_profile(n, alpha));
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(std::make_pair(n, alpha), sol).first->second;
}

double profile_moment(const ProfileSolution& sol, double s) {
    RadialSupport sup;
    if (sol.kind == ProfileCase::compact_support) {
        sup.radius = *sol.T;
        // u ~ (T - t)^{alpha/(alpha-1)} at the free boundary
        sup.edge_exponent = s * sol.alpha / (sol.alpha - 1.0);
        if (sup.edge_exponent > 2.0) sup.edge_exponent = 0.0;
    } else {
        sup.decay = Decay::exponential(s);
        sup.breakpoints = {sol.tail_start};
    }
    auto g = [&](double t) {
        const double lu = sol.log_u(t);
        return std::isinf(lu) ? 0.0 : std::exp(s * lu);
    };
    const IntegralResult r = integrate_radial(g, sol.n, sup, Tolerance(1e-300, 1e-13));
    if (!r.converged && r.abs_error_estimate > 1e-8 * std::abs(r.value))
        throw ConvergenceError("profile_moment: quadrature did not converge");
    return r.value;
}

double compute_Ms(const ProfileSolution& sol) { return sol.Ms; }

double ode_residual(const ProfileSolution& sol) {
    const Rhs f{sol.n, sol.kind,
                sol.kind == ProfileCase::compact_support ? sol.s_exponent - 1.0 : sol.r_exponent - 1.0};
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < sol.nodes.size(); ++i) {
        const ProfileNode& a = sol.nodes[i];
        const ProfileNode& b = sol.nodes[i + 1];
        // the non-linear term is not Lipschitz at u = 0, so the free-boundary layer is excluded
        if (b.u < 1e-6 * sol.u0) continue;
        const double tm = 0.5 * (a.t + b.t);
        // near the origin (n-1)/t amplifies the rounding of the interpolated slope
        if (tm < 1e-2) continue;
        const auto q = quintic(a, b, tm);
        const double res = q[2] - f.accel(tm, q[0], q[1]);
        worst = std::max(worst, std::abs(res));
    }
    return worst / sol.u0;
}

double ode_constant_formula(int n, double alpha, double Ms) {
    if (alpha > 1.0) {
        const double d = n * (alpha - 1.0) + 2.0;
        return std::exp(std::log(4.0 * n * (alpha - 1.0) / (alpha * d)) + 2.0 / (n * (alpha - 1.0)) * std::log(2.0 / d) +
                        2.0 / n * std::log(Ms));
    }
    const double m = n * (1.0 - alpha);
    if (!(2.0 - m > 0.0)) throw DomainError("ode_constant_formula: need alpha > (n-2)/n");
    return std::exp(std::log(2.0 * m / alpha) + (2.0 * alpha - m) / m * std::log((2.0 - m) / 2.0) +
                    2.0 / n * std::log(Ms));
}

double planar_constant_formula(double alpha, double Ms) {
    if (alpha > 1.0) return 4.0 * (alpha - 1.0) * std::pow(alpha, (2.0 * alpha - 1.0) / (1.0 - alpha)) * Ms;
    return 4.0 * (1.0 - alpha) * std::pow(alpha, (3.0 * alpha - 2.0) / (1.0 - alpha)) * Ms;
}

DensityPtr profile_density(const ProfilePtr& sol, double b, const Eigen::VectorXd& c) {
    if (!sol) throw DomainError("profile_density: empty profile");
    if (!(b > 0.0)) throw DomainError("profile_density: scale b must be positive");
    const int n = sol->n;
    Eigen::VectorXd cc = c.size() == 0 ? Eigen::VectorXd::Zero(n) : c;
    if (cc.size() != n) throw DomainError("profile_density: shift dimension mismatch");
    const double p = 2.0 / sol->alpha;
    const double log_mass = std::log(sol->mass);
    RadialProfile prof;
    prof.log_rho = [sol, p, log_mass](double t) { return p * sol->log_u(t) - log_mass; };
    prof.rho = [sol, p, log_mass](double t) {
        const double lu = sol->log_u(t);
        return std::isinf(lu) ? 0.0 : std::exp(p * lu - log_mass);
    };
    prof.log_slope = [sol, p](double t) {
        const double v = sol->u(t);
        return v > 0.0 ? p * sol->du(t) / v : 0.0;
    };
    prof.drho = [sol, p, log_mass](double t) {
        const double v = sol->u(t);
        if (!(v > 0.0)) return 0.0;
        return p * std::exp((p - 1.0) * std::log(v) - log_mass) * sol->du(t);
    };
    if (sol->kind == ProfileCase::compact_support) {
        prof.radius = *sol->T;
        prof.edge_order = p * sol->alpha / (sol->alpha - 1.0);
    } else {
        prof.decay = Decay::exponential(p);
        prof.breakpoints = {sol->tail_start};
    }
    ParamMap params{{"alpha", sol->alpha}, {"n", static_cast<double>(n)}, {"b", b}, {"u0", sol->u0},
                    {"M", sol->mass}};
    if (sol->T) params["T"] = *sol->T;
    for (int i = 0; i < n; ++i) params["c" + std::to_string(i + 1)] = cc(i);
    const Eigen::MatrixXd F = Eigen::MatrixXd::Identity(n, n) / b;
    return std::make_shared<EllipticalDensity>(n, Family::profile_density, std::move(params),
                                               make_elliptical_form(-cc / b, F, std::move(prof)));
}

ConstantRecord optimal_constant(int n, double alpha) {
    require_dimension(n);
    if (!(alpha >= 0.0)) throw DomainError("optimal_constant: alpha must be nonnegative");
    if (n == 1) return r_closed_form_1d(alpha);
    ConstantRecord rec;
    rec.alpha = alpha;
    rec.n = n;
    if (alpha == 0.0 || std::isinf(alpha))
        throw UnsupportedRegion("optimal_constant: limit orders are only available for n = 1");
    if (is_shannon(alpha)) {
        rec.value = 2.0 * kPi * kE * n;
        rec.route = ConstantRoute::shannon;
        return rec;
    }
    if (n >= 3) {
        const double sob = (n - 2.0) / n;
        if (std::abs(alpha - sob) < 1e-12) return r_sobolev(n);
        if (alpha < sob) return r_zero_region(n, alpha);
    }
    const ProfilePtr sol = cached_profile(n, alpha);
    rec.route = ConstantRoute::ode_profile;
    rec.value = n == 2 ? planar_constant_formula(alpha, sol->Ms) : ode_constant_formula(n, alpha, sol->Ms);
    rec.metadata["u0"] = sol->u0;
    rec.metadata["M_s"] = sol->Ms;
    rec.metadata["s"] = sol->kind == ProfileCase::compact_support ? 2.0 / alpha : 2.0;
    if (sol->T) rec.metadata["T"] = *sol->T;
    rec.metadata["bisection_steps"] = sol->bisection_steps;
    return rec;
}

} // namespace renyi
