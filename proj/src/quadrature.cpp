#include "renyi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "renyi/errors.hpp"
#include "renyi/special_functions.hpp"

namespace renyi {

namespace {

constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452, 0.930157491355708226001207180059508,
    0.865063366688984510732096688423493, 0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784, 0.294392862701460198131126603103866,
    0.148874338981631210884826001129720, 0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390, 0.054755896574351996031381300244580,
    0.075039674810919952767043140916190, 0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208089287570, 0.134709217311473325928054001771707, 0.142775938577060080797094273138717,
    0.147739104901338491374841515972068, 0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                                       0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                                       0.295524224714752870173892994651338};
constexpr double kEps = std::numeric_limits<double>::epsilon();

template <std::size_t M>
using Vec = std::array<double, M>;

template <std::size_t M>
struct Cell {
    double lo, hi;
    int piece;
    Vec<M> value;
    Vec<M> err;
    double priority;
};

template <std::size_t M>
void gk21(const IntegrandN<M>& g, double lo, double hi, Vec<M>& res, Vec<M>& err) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    std::array<Vec<M>, 21> fv;
    fv[0] = g(c);
    for (int j = 0; j < 10; ++j) {
        fv[1 + 2 * j] = g(c - h * kXgk[j]);
        fv[2 + 2 * j] = g(c + h * kXgk[j]);
    }
    for (std::size_t m = 0; m < M; ++m) {
        double rk = kWgk[10] * fv[0][m];
        double rg = 0.0;
        double rabs = std::abs(rk);
        for (int j = 0; j < 10; ++j) {
            const double s = fv[1 + 2 * j][m] + fv[2 + 2 * j][m];
            rk += kWgk[j] * s;
            rabs += kWgk[j] * (std::abs(fv[1 + 2 * j][m]) + std::abs(fv[2 + 2 * j][m]));
            if (j % 2 == 1) rg += kWg[j / 2] * s;
        }
        const double mean = 0.5 * rk;
        double rasc = kWgk[10] * std::abs(fv[0][m] - mean);
        for (int j = 0; j < 10; ++j)
            rasc += kWgk[j] * (std::abs(fv[1 + 2 * j][m] - mean) + std::abs(fv[2 + 2 * j][m] - mean));
        double e = std::abs((rk - rg) * h);
        rasc *= std::abs(h);
        rabs *= std::abs(h);
        if (rasc != 0.0 && e != 0.0) e = rasc * std::min(1.0, std::pow(200.0 * e / rasc, 1.5));
        if (rabs > std::numeric_limits<double>::min() / (50.0 * kEps)) e = std::max(50.0 * kEps * rabs, e);
        if (!std::isfinite(rk)) e = std::numeric_limits<double>::infinity();
        res[m] = rk * h;
        err[m] = e;
    }
}

double substitution_power(double nu) {
    if (nu <= -1.0) throw DomainError("quadrature: non-integrable endpoint singularity");
    if (nu >= 2.0 || std::abs(nu - std::round(nu)) < 1e-12) return 1.0;
    return 3.0 / (nu + 1.0);
}

template <std::size_t M>
struct Piece {
    IntegrandN<M> g;
    double lo, hi;
};

template <std::size_t M>
Piece<M> make_piece(const IntegrandN<M>& f, double a, double b, double left_nu, double right_nu, bool left_end,
                    bool right_end) {
    const double kl = left_end ? substitution_power(left_nu) : 1.0;
    const double kr = right_end ? substitution_power(right_nu) : 1.0;
    const double w = b - a;
    if (kl > 1.0) {
        return {[f, a, w, kl](double s) {
                    Vec<M> v = f(a + w * std::pow(s, kl));
                    const double jac = w * kl * std::pow(s, kl - 1.0);
                    for (auto& x : v) x *= jac;
                    return v;
                },
                0.0, 1.0};
    }
    if (kr > 1.0) {
        return {[f, b, w, kr](double s) {
                    Vec<M> v = f(b - w * std::pow(s, kr));
                    const double jac = w * kr * std::pow(s, kr - 1.0);
                    for (auto& x : v) x *= jac;
                    return v;
                },
                0.0, 1.0};
    }
    return {f, a, b};
}

template <std::size_t M>
IntegralResultN<M> adaptive(const std::vector<Piece<M>>& pieces, Tolerance tol, QuadOptions opt) {
    std::vector<Cell<M>> done;
    std::vector<Cell<M>> cells;
    cells.reserve(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        Cell<M> c{pieces[i].lo, pieces[i].hi, static_cast<int>(i), {}, {}, 0.0};
        gk21<M>(pieces[i].g, c.lo, c.hi, c.value, c.err);
        cells.push_back(c);
    }
    auto totals = [&](Vec<M>& val, Vec<M>& err) {
        val.fill(0.0);
        err.fill(0.0);
        for (const auto* list : {&cells, &done})
            for (const auto& c : *list)
                for (std::size_t m = 0; m < M; ++m) {
                    val[m] += c.value[m];
                    err[m] += c.err[m];
                }
    };
    Vec<M> val, err;
    totals(val, err);
    Vec<M> scale;
    for (std::size_t m = 0; m < M; ++m) scale[m] = std::max(tol.target(val[m]), 1e-300);
    auto prio = [&](Cell<M>& c) {
        double p = 0.0;
        for (std::size_t m = 0; m < M; ++m) p = std::max(p, c.err[m] / scale[m]);
        c.priority = std::isfinite(p) ? p : std::numeric_limits<double>::max();
    };
    for (auto& c : cells) prio(c);
    auto cmp = [](const Cell<M>& x, const Cell<M>& y) { return x.priority < y.priority; };
    std::make_heap(cells.begin(), cells.end(), cmp);

    int subdivisions = 0;
    bool converged = false;
    while (true) {
        bool ok = true;
        for (std::size_t m = 0; m < M; ++m)
            if (!(err[m] <= tol.target(val[m]))) ok = false;
        if (ok) {
            converged = true;
            break;
        }
        if (cells.empty() || subdivisions >= opt.max_subdivisions) break;
        std::pop_heap(cells.begin(), cells.end(), cmp);
        Cell<M> c = cells.back();
        cells.pop_back();
        const double mid = 0.5 * (c.lo + c.hi);
        if (!(mid > c.lo && mid < c.hi) || (c.hi - c.lo) < 64.0 * kEps * std::max(std::abs(c.lo), std::abs(c.hi))) {
            done.push_back(c);
            continue;
        }
        Cell<M> l{c.lo, mid, c.piece, {}, {}, 0.0};
        Cell<M> r{mid, c.hi, c.piece, {}, {}, 0.0};
        gk21<M>(pieces[c.piece].g, l.lo, l.hi, l.value, l.err);
        gk21<M>(pieces[c.piece].g, r.lo, r.hi, r.value, r.err);
        for (std::size_t m = 0; m < M; ++m) {
            val[m] += l.value[m] + r.value[m] - c.value[m];
            err[m] += l.err[m] + r.err[m] - c.err[m];
        }
        prio(l);
        prio(r);
        cells.push_back(l);
        std::push_heap(cells.begin(), cells.end(), cmp);
        cells.push_back(r);
        std::push_heap(cells.begin(), cells.end(), cmp);
        ++subdivisions;
        if (subdivisions % 64 == 0) totals(val, err);
    }
    // Deterministic final sum in interval order.
    std::vector<Cell<M>> all = cells;
    all.insert(all.end(), done.begin(), done.end());
    std::sort(all.begin(), all.end(), [](const Cell<M>& x, const Cell<M>& y) {
        return x.piece != y.piece ? x.piece < y.piece : x.lo < y.lo;
    });
    IntegralResultN<M> out;
    Vec<M> e{};
    out.value.fill(0.0);
    for (const auto& c : all)
        for (std::size_t m = 0; m < M; ++m) {
            out.value[m] += c.value[m];
            e[m] += c.err[m];
        }
    out.abs_error_estimate = *std::max_element(e.begin(), e.end());
    out.subdivisions = subdivisions;
    out.converged = converged;
    if (!converged) {
        converged = true;
        for (std::size_t m = 0; m < M; ++m)
            if (!(e[m] <= tol.target(out.value[m]))) converged = false;
        out.converged = converged;
    }
    return out;
}

template <std::size_t M>
std::vector<Piece<M>> build_pieces(const IntegrandN<M>& f, double a, double b, std::span<const double> breakpoints,
                                   EndpointExponents ends, bool a_is_end, bool b_is_end) {
    std::vector<double> br{a};
    for (double x : breakpoints)
        if (x > a && x < b) br.push_back(x);
    std::sort(br.begin() + 1, br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    br.push_back(b);
    const bool sl = a_is_end && substitution_power(ends.left) > 1.0;
    const bool sr = b_is_end && substitution_power(ends.right) > 1.0;
    if (br.size() == 2 && sl && sr) br.insert(br.begin() + 1, 0.5 * (a + b));
    std::vector<Piece<M>> pieces;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const bool le = (i == 0) && sl;
        const bool re = (i + 2 == br.size()) && sr;
        pieces.push_back(make_piece<M>(f, br[i], br[i + 1], ends.left, ends.right, le, re));
    }
    return pieces;
}

template <std::size_t M>
double max_abs(const Vec<M>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

double Tolerance::target(double v) const { return std::max(abs, rel * std::abs(v)); }

Decay Decay::raised(double gamma) const {
    Decay d = *this;
    d.rate = rate * gamma;
    return d;
}

Decay Decay::with_poly(int extra_degree) const {
    Decay d = *this;
    d.poly_degree += extra_degree;
    return d;
}

Decay Decay::rescaled(double scale, double new_center) const {
    Decay d = *this;
    d.center = new_center;
    d.offset = offset * scale;
    switch (kind) {
    case Kind::exponential: d.rate = rate / scale; break;
    case Kind::gaussian: d.rate = rate / (scale * scale); break;
    case Kind::power: break;
    }
    return d;
}

double Decay::natural_scale() const {
    switch (kind) {
    case Kind::exponential: return 1.0 / rate;
    case Kind::gaussian: return 1.0 / std::sqrt(rate);
    case Kind::power: return 1.0;
    }
    return 1.0;
}

double Decay::remainder_ratio(double y) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!(y > 0.0)) return inf;
    const double d = poly_degree;
    switch (kind) {
    case Kind::exponential: {
        const double s = rate * y - d;
        return s > 0.5 * rate * y ? y / s : inf;
    }
    case Kind::gaussian: {
        const double s = 2.0 * rate * y * y - d;
        return s > rate * y * y ? y / s : inf;
    }
    case Kind::power: {
        const double q = rate - d;
        if (q <= 1.0) throw ConvergenceError("integrate_line: envelope decays too slowly to be integrable");
        return y / (q - 1.0);
    }
    }
    return inf;
}

template <std::size_t M>
IntegralResultN<M> integrate_general(const IntegrandN<M>& f, double lo, double hi, std::span<const double> breakpoints,
                                     EndpointExponents ends, const std::optional<Decay>& decay, Tolerance tol,
                                     QuadOptions opt) {
    if (!(lo < hi)) {
        IntegralResultN<M> z;
        return z;
    }
    const bool left_inf = std::isinf(lo);
    const bool right_inf = std::isinf(hi);
    if (!left_inf && !right_inf) {
        return adaptive<M>(build_pieces<M>(f, lo, hi, breakpoints, ends, true, true), tol, opt);
    }
    if (!decay) throw DomainError("integrate: infinite range requires a decay descriptor");
    const Decay& dk = *decay;
    // Initial core extent: cover finite ends, breakpoints and a few natural scales.
    double reach = dk.offset + 4.0 * dk.natural_scale();
    for (double x : breakpoints) reach = std::max(reach, std::abs(x - dk.center) * 1.05 + 1e-3);
    if (!left_inf) reach = std::max(reach, std::abs(lo - dk.center) + dk.natural_scale());
    if (!right_inf) reach = std::max(reach, std::abs(hi - dk.center) + dk.natural_scale());

    auto tail_bound = [&](double L, bool right) {
        const double x = right ? dk.center + L : dk.center - L;
        const double x2 = right ? dk.center + 1.001 * L : dk.center - 1.001 * L;
        const double y = L - dk.offset;
        const double ratio = dk.remainder_ratio(y);
        const Vec<M> v1 = f(x), v2 = f(x2);
        Vec<M> b;
        for (std::size_t m = 0; m < M; ++m) b[m] = std::max(std::abs(v1[m]), std::abs(v2[m])) * ratio;
        return b;
    };
    auto core = [&](double L, Tolerance t) {
        const double a = left_inf ? dk.center - L : lo;
        const double b = right_inf ? dk.center + L : hi;
        return adaptive<M>(build_pieces<M>(f, a, b, breakpoints, ends, !left_inf, !right_inf), t, opt);
    };
    auto bounds = [&](double L) {
        Vec<M> tb{};
        if (left_inf) tb = tail_bound(L, false);
        if (right_inf) {
            const Vec<M> r = tail_bound(L, true);
            for (std::size_t m = 0; m < M; ++m) tb[m] += r[m];
        }
        return tb;
    };

    if (dk.kind == Decay::Kind::power) {
        // Tails mapped onto (0, 1] by x = center +- L/s; the integrand behaves like s^{q-2} at s = 0.
        const double q = dk.rate - dk.poly_degree;
        if (q <= 1.0) throw ConvergenceError("integrate_line: envelope decays too slowly to be integrable");
        const double L = std::max(reach, dk.offset + 1.0);
        const int parts = 1 + int(left_inf) + int(right_inf);
        const Tolerance t(tol.abs / parts, tol.rel);
        IntegralResultN<M> res = core(L, t);
        for (int side = 0; side < 2; ++side) {
            if (side == 0 ? !left_inf : !right_inf) continue;
            const double sign = side == 0 ? -1.0 : 1.0;
            IntegrandN<M> g = [&, sign](double s) {
                Vec<M> v = f(dk.center + sign * L / s);
                for (std::size_t m = 0; m < M; ++m) v[m] *= L / (s * s);
                return v;
            };
            const IntegralResultN<M> tail =
                adaptive<M>(build_pieces<M>(g, 0.0, 1.0, {}, EndpointExponents{q - 2.0, 0.0}, true, false), t, opt);
            for (std::size_t m = 0; m < M; ++m) res.value[m] += tail.value[m];
            res.abs_error_estimate += tail.abs_error_estimate;
            res.subdivisions += tail.subdivisions;
            res.converged = res.converged && tail.converged;
        }
        res.truncation_bound = 0.0;
        return res;
    }

    double L = reach;
    IntegralResultN<M> pilot;
    for (int iter = 0;; ++iter) {
        if (iter > 80) throw ConvergenceError("integrate: tail envelope did not fall below tolerance");
        pilot = core(L, Tolerance(std::max(tol.abs, 1e-300), 1e-6));
        const Vec<M> tb = bounds(L);
        bool small = true;
        for (std::size_t m = 0; m < M; ++m)
            if (!(tb[m] <= 1e-3 * std::max(std::abs(pilot.value[m]), tol.abs))) small = false;
        if (small) break;
        L *= 1.5;
    }
    Vec<M> tb;
    for (int iter = 0;; ++iter) {
        if (iter > 200) throw ConvergenceError("integrate: tail envelope did not fall below tolerance");
        tb = bounds(L);
        bool small = true;
        for (std::size_t m = 0; m < M; ++m)
            if (!(tb[m] <= 0.25 * tol.target(pilot.value[m]))) small = false;
        if (small) break;
        L *= 1.25;
    }
    IntegralResultN<M> res = core(L, Tolerance(0.5 * tol.abs, 0.5 * tol.rel));
    res.truncation_bound = max_abs<M>(tb);
    return res;
}

template IntegralResultN<1> integrate_general<1>(const IntegrandN<1>&, double, double, std::span<const double>,
                                                 EndpointExponents, const std::optional<Decay>&, Tolerance,
                                                 QuadOptions);
template IntegralResultN<2> integrate_general<2>(const IntegrandN<2>&, double, double, std::span<const double>,
                                                 EndpointExponents, const std::optional<Decay>&, Tolerance,
                                                 QuadOptions);
template IntegralResultN<3> integrate_general<3>(const IntegrandN<3>&, double, double, std::span<const double>,
                                                 EndpointExponents, const std::optional<Decay>&, Tolerance,
                                                 QuadOptions);
template IntegralResultN<4> integrate_general<4>(const IntegrandN<4>&, double, double, std::span<const double>,
                                                 EndpointExponents, const std::optional<Decay>&, Tolerance,
                                                 QuadOptions);

namespace {

IntegralResult scalar(const IntegralResultN<1>& r) {
    return {r.value[0], r.abs_error_estimate, r.subdivisions, r.truncation_bound, r.converged};
}

IntegrandN<1> lift(const Integrand& f) {
    return [f](double x) { return Vec<1>{f(x)}; };
}

} // namespace

IntegralResult integrate_interval(const Integrand& f, double a, double b, Tolerance tol, EndpointExponents ends,
                                  QuadOptions opt) {
    if (std::isinf(a) || std::isinf(b)) throw DomainError("integrate_interval: finite limits required");
    if (a > b) {
        IntegralResult r = integrate_interval(f, b, a, tol, {ends.right, ends.left}, opt);
        r.value = -r.value;
        return r;
    }
    return scalar(integrate_general<1>(lift(f), a, b, {}, ends, std::nullopt, tol, opt));
}

IntegralResult integrate_piecewise(const Integrand& f, std::span<const double> breaks, Tolerance tol,
                                   EndpointExponents ends, QuadOptions opt) {
    if (breaks.size() < 2) throw DomainError("integrate_piecewise: need at least two break points");
    return scalar(integrate_general<1>(lift(f), breaks.front(), breaks.back(), breaks.subspan(1, breaks.size() - 2),
                                       ends, std::nullopt, tol, opt));
}

IntegralResult integrate_line(const Integrand& f, const Decay& decay, Tolerance tol,
                              std::span<const double> breakpoints, QuadOptions opt) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return scalar(integrate_general<1>(lift(f), -inf, inf, breakpoints, {}, decay, tol, opt));
}

double unit_sphere_area(int n) {
    if (n < 1) throw DomainError("unit_sphere_area: n must be positive");
    return 2.0 * std::exp(0.5 * n * std::log(std::numbers::pi) - log_gamma(0.5 * n));
}

IntegralResult integrate_radial(const Integrand& g, int n, const RadialSupport& support, Tolerance tol,
                                QuadOptions opt) {
    const double area = unit_sphere_area(n);
    auto h = [&g, n](double t) { return Vec<1>{g(t) * std::pow(t, n - 1)}; };
    std::optional<Decay> dk;
    if (std::isinf(support.radius)) {
        if (!support.decay) throw DomainError("integrate_radial: unbounded support requires a decay descriptor");
        dk = support.decay->with_poly(n - 1);
    }
    const Tolerance scaled(tol.abs / area, tol.rel);
    IntegralResult r = scalar(integrate_general<1>(h, 0.0, support.radius, support.breakpoints,
                                                   {0.0, support.edge_exponent}, dk, scaled, opt));
    r.value *= area;
    r.abs_error_estimate *= area;
    r.truncation_bound *= area;
    return r;
}

} // namespace renyi
