#include "renyi/heatflow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "renyi/constants.hpp"
#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"
#include "renyi/parallel.hpp"

namespace renyi {

namespace {

constexpr double kSampleCutoff = 1e-30;
constexpr double kKernelReach = 14.0;  // standard deviations; exp(-98) relative to the peak
constexpr double kMassDriftLimit = 1e-8;

// 8-point Gauss-Legendre on [0, 1]
constexpr std::array<double, 8> kGLx = {0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                        0.4082826787521751,   0.5917173212478249,  0.7627662049581645,
                                        0.8983332387068134,   0.9801449282487681};
constexpr std::array<double, 8> kGLw = {0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                                        0.18134189168918100, 0.18134189168918100, 0.15685332293894363,
                                        0.11119051722668724, 0.05061426814518813};

// Fornberg weights for the m-th derivative at x0 from nodes x.
std::vector<double> fd_weights(const std::vector<double>& x, double x0, int m) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

// Integer offsets of a 4th-order stencil for the given derivative order.
std::vector<int> stencil(int order, bool one_sided) {
    std::vector<int> s;
    if (one_sided) {
        for (int k = 0; k <= order + 3; ++k) s.push_back(k);
    } else {
        const int half = order <= 2 ? 2 : 3;
        for (int k = -half; k <= half; ++k) s.push_back(k);
    }
    return s;
}

double min_flow_time(const GridDensity& d) { return 16.0 * d.spacing() * d.spacing(); }

// Evaluates f on X_t for t = t0 + m * step / 2, m in the union of both stencils, and returns the two estimates.
struct StencilPlan {
    double t0, step;
    bool one_sided;
    std::vector<int> offsets;  // in half-steps
};

StencilPlan plan_stencil(double min_time, double t0, int order, double step) {
    StencilPlan p{t0, step, false, {}};
    const int half = order <= 2 ? 2 : 3;
    p.one_sided = t0 - half * step < min_time;
    for (int k : stencil(order, p.one_sided)) {
        p.offsets.push_back(2 * k);
        p.offsets.push_back(k);
    }
    std::sort(p.offsets.begin(), p.offsets.end());
    p.offsets.erase(std::unique(p.offsets.begin(), p.offsets.end()), p.offsets.end());
    return p;
}

double apply_stencil(const std::map<int, double>& values, int order, bool one_sided, double step, int scale) {
    const std::vector<int> s = stencil(order, one_sided);
    std::vector<double> x(s.begin(), s.end());
    const std::vector<double> w = fd_weights(x, 0.0, order);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) acc += w[i] * values.at(s[i] * scale);
    return acc / std::pow(step, order);
}

} // namespace

GridPtr sample_grid(const Density& d, double h) {
    if (d.dim() != 1) throw DomainError("heat flow: only one-dimensional densities are supported");
    if (!(h > 0.0)) throw DomainError("sample_grid: spacing must be positive");
    const LineLayout* lay = d.line_layout();
    if (!lay) throw DomainError("sample_grid: density has no line layout");
    double lo = lay->lo, hi = lay->hi;
    if (std::isinf(lo) || std::isinf(hi)) {
        const double anchor = lay->tail ? lay->tail->center : (std::isinf(lo) ? (std::isinf(hi) ? 0.0 : hi) : lo);
        const double stride = 0.25 * (lay->tail ? lay->tail->natural_scale() : 1.0);
        double peak = d.value1(anchor);
        for (double x : lay->breakpoints) peak = std::max(peak, d.value1(x));
        auto walk = [&](double dir) {
            double x = anchor;
            for (int k = 0;; ++k) {
                if (k > 4000000 || std::abs(x - anchor) > 1e5)
                    throw DomainError("sample_grid: tail decays too slowly for a finite grid");
                const double v = d.value1(x);
                peak = std::max(peak, v);
                if (k > 0 && v <= kSampleCutoff * peak) return x;
                x += dir * stride;
            }
        };
        if (std::isinf(hi)) hi = walk(1.0);
        if (std::isinf(lo)) lo = walk(-1.0);
    }
    const double x0 = lo - 3.5 * h;
    const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 8;
    if (count > 5000000) throw DomainError("sample_grid: grid would exceed 5e6 samples");
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = std::max(d.value1(x0 + h * static_cast<double>(i)), 0.0);
    auto g = std::make_shared<GridDensity>(x0, h, std::move(v));
    return g;
}

GridPtr evolve(const GridDensity& g, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("evolve: time must be finite and nonnegative");
    if (t == 0.0) return std::make_shared<GridDensity>(g);
    const double h = g.spacing();
    const double sd = std::sqrt(t);
    if (h > 0.25 * sd)
        throw DomainError("evolve: grid spacing " + std::to_string(h) + " exceeds sqrt(t)/4 = " +
                          std::to_string(0.25 * sd));
    const std::vector<double>& p = g.samples();
    const std::vector<double>& dp = g.slopes();
    const long N = static_cast<long>(p.size());
    const long P = static_cast<long>(std::ceil(6.0 * sd / h));
    const long W = static_cast<long>(std::ceil(kKernelReach * sd / h)) + 2;

    // Per-cell basis weights V_b(d) = h int_0^1 B_b(s) phi_t((d - s) h) ds and the same with phi_t', d = k - cell.
    const long span = 2 * W + 1;
    std::vector<std::array<double, 4>> V(span), S(span);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * t);
    for (long d = -W; d <= W; ++d) {
        std::array<double, 4> v{}, s{};
        for (std::size_t q = 0; q < kGLx.size(); ++q) {
            const double u = kGLx[q];
            const double z = (static_cast<double>(d) - u) * h;
            const double phi = norm * std::exp(-0.5 * z * z / t);
            const double dphi = -z / t * phi;
            const double u2 = u * u, u3 = u2 * u;
            const std::array<double, 4> B = {2 * u3 - 3 * u2 + 1, (u3 - 2 * u2 + u) * h, -2 * u3 + 3 * u2, (u3 - u2) * h};
            for (int b = 0; b < 4; ++b) {
                v[b] += kGLw[q] * h * B[b] * phi;
                s[b] += kGLw[q] * h * B[b] * dphi;
            }
        }
        V[d + W] = v;
        S[d + W] = s;
    }
    auto at = [&](const std::vector<std::array<double, 4>>& T, long d, int b) {
        return (d < -W || d > W) ? 0.0 : T[d + W][b];
    };
    // Node kernels: node i is the left end of cell i (offset d) and the right end of cell i-1 (offset d+1).
    std::vector<double> A(span), Bk(span), SA(span), SB(span);
    for (long d = -W; d <= W; ++d) {
        A[d + W] = at(V, d, 0) + at(V, d + 1, 2);
        Bk[d + W] = at(V, d, 1) + at(V, d + 1, 3);
        SA[d + W] = at(S, d, 0) + at(S, d + 1, 2);
        SB[d + W] = at(S, d, 1) + at(S, d + 1, 3);
    }

    const long M = N + 2 * P;
    std::vector<double> out(M), slope(M);
    for (long o = 0; o < M; ++o) {
        const long k = o - P;
        double v = 0.0, s = 0.0;
        const long i0 = std::max(0L, k - W), i1 = std::min(N - 1, k + W);
        for (long i = i0; i <= i1; ++i) {
            const long d = k - i + W;
            v += p[i] * A[d] + dp[i] * Bk[d];
            s += p[i] * SA[d] + dp[i] * SB[d];
        }
        // cells -1 and N-1 do not exist
        v -= p[0] * at(V, k + 1, 2) + dp[0] * at(V, k + 1, 3);
        s -= p[0] * at(S, k + 1, 2) + dp[0] * at(S, k + 1, 3);
        v -= p[N - 1] * at(V, k - N + 1, 0) + dp[N - 1] * at(V, k - N + 1, 1);
        s -= p[N - 1] * at(S, k - N + 1, 0) + dp[N - 1] * at(S, k - N + 1, 1);
        out[o] = v;
        slope[o] = s;
    }
    double raw = 0.0;
    for (long o = 0; o + 1 < M; ++o) raw += 0.5 * h * (out[o] + out[o + 1]) + h * h * (slope[o] - slope[o + 1]) / 12.0;
    const double base = g.hermite_mass();
    const double drift = std::abs(raw / base - 1.0);
    if (!(drift <= kMassDriftLimit))
        throw ConvergenceError("evolve: mass drift " + std::to_string(drift) + " exceeds 1e-8");
    for (long o = 0; o < M; ++o)
        if (out[o] < 0.0) {
            out[o] = 0.0;
            slope[o] = 0.0;
        }
    auto res = std::make_shared<GridDensity>(g.x0() - static_cast<double>(P) * h, h, std::move(out), std::move(slope));
    res->annotate("t", t + g.param("t", 0.0));
    res->annotate("mass_drift", drift);
    return res;
}

std::vector<GridPtr> evolve_many(const GridDensity& d, const std::vector<double>& ts, int threads) {
    std::vector<GridPtr> out(ts.size());
    parallel_for(ts.size(), threads, [&](std::size_t i) { out[i] = evolve(d, ts[i]); });
    return out;
}

std::vector<double> default_time_grid(double t_lo, double t_hi, int log_points, int uniform_points) {
    if (!(t_lo > 0.0 && t_hi > t_lo)) throw DomainError("time grid: need 0 < t_lo < t_hi");
    std::vector<double> ts;
    const double knee = std::min(0.1, t_hi);
    if (t_lo < knee && log_points > 1) {
        for (int i = 0; i < log_points; ++i)
            ts.push_back(t_lo * std::pow(knee / t_lo, static_cast<double>(i) / (log_points - 1)));
    } else {
        ts.push_back(t_lo);
    }
    const double start = ts.back();
    for (int i = 1; i <= uniform_points; ++i) ts.push_back(start + (t_hi - start) * i / uniform_points);
    return ts;
}

Flow grid_flow(const GridPtr& g) {
    Flow f;
    f.at = [g](double t) -> DensityPtr { return evolve(*g, t); };
    f.min_time = min_flow_time(*g);
    f.dim = 1;
    return f;
}

Flow make_flow(const DensityPtr& d, double h) {
    if (d->family() == Family::gaussian) {
        const Eigen::MatrixXd K = covariance(*d);
        const Eigen::VectorXd mu = mean(*d);
        Flow f;
        f.at = [K, mu](double t) -> DensityPtr {
            return make_gaussian(K + t * Eigen::MatrixXd::Identity(K.rows(), K.cols()), mu);
        };
        f.min_time = 0.0;
        f.dim = d->dim();
        f.closed_form = true;
        return f;
    }
    if (auto g = std::dynamic_pointer_cast<const GridDensity>(d)) return grid_flow(g);
    return grid_flow(sample_grid(*d, h));
}

FlowDerivative flow_derivative(const Flow& flow, const std::function<double(const Density&)>& f, double t0,
                               int order, double step, const FlowOptions& opt, double noise_floor) {
    if (order < 1 || order > 3) throw DomainError("flow_derivative: order must be 1, 2 or 3");
    if (!(step > 0.0)) throw DomainError("flow_derivative: step must be positive");
    const StencilPlan plan = plan_stencil(flow.min_time, t0, order, step);
    std::vector<double> ts;
    for (int m : plan.offsets) ts.push_back(t0 + m * 0.5 * step);
    for (double t : ts)
        if (t < 0.0) throw DomainError("flow_derivative: stencil reaches negative time");
    std::vector<double> vals(ts.size());
    parallel_for(ts.size(), opt.threads, [&](std::size_t i) { vals[i] = f(*flow.at(ts[i])); });
    std::map<int, double> byhalf;
    for (std::size_t i = 0; i < ts.size(); ++i) byhalf[plan.offsets[i]] = vals[i];
    FlowDerivative r;
    r.t = t0;
    r.order = order;
    r.step = step;
    r.one_sided = plan.one_sided;
    r.coarse = apply_stencil(byhalf, order, plan.one_sided, step, 2);
    r.value = apply_stencil(byhalf, order, plan.one_sided, 0.5 * step, 1);
    const double big = std::max(std::abs(r.value), std::abs(r.coarse));
    if (big > noise_floor && std::abs(r.value - r.coarse) > opt.richardson_gate * big)
        throw ConvergenceError("flow_derivative: step and half-step estimates disagree by more than " +
                               std::to_string(opt.richardson_gate * 100.0) + "% at t = " + std::to_string(t0));
    return r;
}

FlowDerivative flow_derivative(const GridDensity& d, const std::function<double(const Density&)>& f, double t0,
                               int order, double step, const FlowOptions& opt, double noise_floor) {
    return flow_derivative(grid_flow(std::make_shared<GridDensity>(d)), f, t0, order, step, opt, noise_floor);
}

std::vector<FlowTrace> trace_orders(const GridDensity& d, const std::vector<double>& alphas, const std::vector<double>& t_grid,
                                    const FlowOptions& opt) {
    if (alphas.empty()) throw DomainError("trace: no orders requested");
    if (t_grid.empty()) throw DomainError("trace: empty time grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0)) throw DomainError("trace: times must be nonnegative");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw DomainError("trace: times must be increasing");
    }
    struct Point {
        StencilPlan plan;
        StencilPlan plan2;
    };
    std::vector<Point> pts;
    std::map<double, std::size_t> slots;
    std::vector<double> times;
    std::vector<bool> need_fisher;
    auto slot = [&](double t, bool fisher) {
        auto [it, fresh] = slots.emplace(t, times.size());
        if (fresh) {
            times.push_back(t);
            need_fisher.push_back(fisher);
        } else if (fisher) {
            need_fisher[it->second] = true;
        }
        return it->second;
    };
    for (double t : t_grid) {
        const double step = t > 0.0 ? opt.fd_rel_step * t : opt.fd_min_step;
        Point p{plan_stencil(min_flow_time(d), t, 1, step), plan_stencil(min_flow_time(d), t, 2, step)};
        slot(t, true);
        for (int m : p.plan.offsets) slot(t + m * 0.5 * step, false);
        for (int m : p.plan2.offsets) slot(t + m * 0.5 * step, false);
        pts.push_back(p);
    }
    const std::size_t na = alphas.size();
    std::vector<double> hv_all(times.size() * na), Iv_all(times.size() * na, 0.0);
    parallel_for(times.size(), opt.threads, [&](std::size_t i) {
        const GridPtr g = evolve(d, times[i]);
        for (std::size_t a = 0; a < na; ++a) {
            hv_all[i * na + a] = renyi_entropy(*g, alphas[a], opt.rel_tol);
            if (need_fisher[i]) Iv_all[i * na + a] = renyi_fisher(*g, alphas[a], opt.rel_tol);
        }
    });
    std::vector<FlowTrace> out;
    for (std::size_t a = 0; a < na; ++a) {
        std::vector<double> hv(times.size()), Iv(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            hv[i] = hv_all[i * na + a];
            Iv[i] = Iv_all[i * na + a];
        }
        FlowTrace tr;
        tr.alpha = alphas[a];
        for (std::size_t j = 0; j < t_grid.size(); ++j) {
            const double t = t_grid[j];
            const Point& p = pts[j];
            std::map<int, double> hh, NN;
            for (int m : p.plan.offsets) hh[m] = hv[slots.at(t + m * 0.5 * p.plan.step)];
            for (int m : p.plan2.offsets) NN[m] = std::exp(2.0 * hv[slots.at(t + m * 0.5 * p.plan2.step)]);
            const std::size_t c = slots.at(t);
            const double coarse = apply_stencil(hh, 1, p.plan.one_sided, p.plan.step, 2);
            const double fine = apply_stencil(hh, 1, p.plan.one_sided, 0.5 * p.plan.step, 1);
            tr.t.push_back(t);
            tr.h.push_back(hv[c]);
            tr.N.push_back(std::exp(2.0 * hv[c]));
            tr.I.push_back(Iv[c]);
            tr.dh_dt_fd.push_back(fine);
            tr.fd_gap.push_back(std::abs(fine - coarse));
            tr.fd_step.push_back(0.5 * p.plan.step);
            tr.d2N_dt2_fd.push_back(apply_stencil(NN, 2, p.plan2.one_sided, 0.5 * p.plan2.step, 1));
            tr.residual.push_back(fine - 0.5 * Iv[c]);
        }
        out.push_back(std::move(tr));
    }
    return out;
}

FlowTrace trace(const GridDensity& d, double alpha, const std::vector<double>& t_grid, const FlowOptions& opt) {
    return trace_orders(d, {alpha}, t_grid, opt).front();
}

VerdictReport epi_gaussian_check(const GridDensity& d, double alpha, const std::vector<double>& t_grid,
                                 const FlowOptions& opt) {
    if (t_grid.empty()) throw DomainError("epi_gaussian_check: empty time grid");
    const double r = r_closed_form_1d(alpha).value;
    std::vector<double> ts{0.0};
    ts.insert(ts.end(), t_grid.begin(), t_grid.end());
    std::vector<double> N(ts.size());
    parallel_for(ts.size(), opt.threads,
                 [&](std::size_t i) { N[i] = renyi_power(*evolve(d, ts[i]), alpha, opt.rel_tol); });
    VerdictReport rep;
    rep.inequality_id = "entropy_power_gaussian";
    rep.anchor = "sharp Renyi EPI with a Gaussian summand";
    rep.inputs = {{"alpha", alpha}, {"n", 1.0}, {"r", r}, {"N0", N[0]}};
    rep.labels["density"] = d.describe();
    rep.tolerance = 1e-6 * N[0];
    rep.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double m = N[i] - N[0] - r * ts[i];
        rep.details["margin_t=" + std::to_string(ts[i])] = m;
        if (m < rep.margin) {
            rep.margin = m;
            rep.lhs = N[i] - N[0];
            rep.rhs = r * ts[i];
            rep.inputs["t_worst"] = ts[i];
        }
    }
    rep.equality_expected = false;
    rep.settle();
    return rep;
}

ConcavityEstimate concavity_probe(const GridDensity& d, double alpha, double t0, const FlowOptions& opt) {
    if (!(t0 > 0.0)) throw DomainError("concavity_probe: t0 must be positive");
    const double step = t0 / 20.0;
    const double N0 = renyi_power(*evolve(d, t0), alpha, opt.rel_tol);
    const double floor = 1e-9 * N0 / (step * step);
    auto f = [&](const Density& g) { return renyi_power(g, alpha, opt.rel_tol); };
    const FlowDerivative fd = flow_derivative(d, f, t0, 2, 2.0 * step, opt, floor);
    return {t0, step, fd.value, fd.coarse, floor};
}

SecantWitness secant_witness(const GridDensity& d, double alpha, double T, const FlowOptions& opt) {
    if (is_shannon(alpha)) throw DomainError("secant_witness: alpha = 1 has a concave entropy power");
    SecantWitness w;
    w.gaussian_slope = gaussian_isoperimetric_value(alpha);
    const double r = r_closed_form_1d(alpha).value;
    w.N0 = renyi_power(d, alpha, opt.rel_tol);
    w.initial_slope = w.N0 * renyi_fisher(d, alpha, opt.rel_tol);
    w.T = T > 0.0 ? T : 2.0 * w.N0 / (w.gaussian_slope - r);
    w.NT = renyi_power(*evolve(d, w.T), alpha, opt.rel_tol);
    w.secant_slope = (w.NT - w.N0) / w.T;
    w.contradicts_concavity = w.secant_slope > w.initial_slope;
    return w;
}

} // namespace renyi
