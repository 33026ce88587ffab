#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "renyi/constants.hpp"
#include "renyi/density_spec.hpp"
#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"
#include "renyi/heatflow.hpp"
#include "renyi/parallel.hpp"
#include "renyi/profiles.hpp"
#include "renyi/verify.hpp"

using nlohmann::json;
using namespace renyi;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// nlohmann's own dump prints the shortest round-trip form; this one pins %.17g for every float.
void dump(std::ostream& os, const json& j, bool pretty = true, int depth = 0) {
    const std::string nl = pretty ? "\n" : "", sep = pretty ? ": " : ":";
    const std::string pad = pretty ? std::string(2 * (depth + 1), ' ') : "";
    const std::string close = pretty ? std::string(2 * depth, ' ') : "";
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) { os << "{}"; return; }
        os << "{" << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            os << (first ? "" : "," + nl) << pad << json(it.key()).dump() << sep;
            dump(os, it.value(), pretty, depth + 1);
            first = false;
        }
        os << nl << close << "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) { os << "[]"; return; }
        os << "[" << nl;
        for (std::size_t i = 0; i < j.size(); ++i) {
            os << (i ? "," + nl : "") << pad;
            dump(os, j[i], pretty, depth + 1);
        }
        os << nl << close << "]";
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        os << (std::isfinite(v) ? num(v) : "null");
        return;
    }
    default: os << j.dump();
    }
}

struct Config {
    std::string alpha;
    int dim = 1;
    std::string density;
    std::string t_grid;
    std::string output;
    std::string format = "json";
    std::optional<double> tol_quad, tol_fd;
    int threads = 0;
    // per command
    std::vector<std::string> kinds;
    double grid_spacing = 0.02;
    std::string inequality;
    std::optional<double> beta;
    int j = 1;
    double t0 = 0.5;
    std::string suite;
};

class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("--output: cannot write " + path);
        }
    }
    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::vector<double> alphas(const Config& c, const char* fallback = nullptr) {
    if (c.alpha.empty()) {
        if (!fallback) throw UsageError("--alpha is required");
        return parse_sweep(fallback);
    }
    return parse_sweep(c.alpha);
}

DensityPtr density(const Config& c) {
    if (c.density.empty()) throw UsageError("--density is required, e.g. \"family:cos_power(alpha=2,b=1,c=0)\"");
    return parse_density_spec(c.density, c.dim);
}

VerifyOptions verify_options(const Config& c) {
    VerifyOptions o;
    if (c.tol_quad) o.tol.closed_vs_quad = o.tol.quad_vs_quad = *c.tol_quad;
    if (c.tol_fd) {
        o.tol.fd_second *= *c.tol_fd / o.tol.fd_first;
        o.tol.fd_first = *c.tol_fd;
    }
    o.flow.threads = c.threads;
    o.grid_spacing = c.grid_spacing;
    return o;
}

json map_json(const std::map<std::string, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

json report_json(const VerdictReport& r) {
    json j;
    j["inequality_id"] = r.inequality_id;
    j["anchor"] = r.anchor;
    j["inputs"] = map_json(r.inputs);
    j["labels"] = r.labels;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["margin"] = r.margin;
    j["pass"] = r.pass;
    j["tolerance"] = r.tolerance;
    j["equality_expected"] = r.equality_expected;
    j["equality_met"] = r.equality_met();
    j["eigenvalues"] = r.eigenvalues;
    j["details"] = map_json(r.details);
    j["notes"] = r.notes;
    return j;
}

int emit_verdicts(const Config& c, const std::vector<VerdictReport>& reports) {
    bool all = true;
    for (const auto& r : reports) all = all && r.pass && r.equality_met();
    Sink sink(c.output);
    if (c.format == "csv") {
        auto& os = sink.out();
        os << "inequality_id,alpha,lhs,rhs,margin,tolerance,pass,equality_expected,equality_met\n";
        for (const auto& r : reports) {
            const auto a = r.inputs.find("alpha");
            os << r.inequality_id << "," << num(a == r.inputs.end() ? NAN : a->second) << "," << num(r.lhs) << ","
               << num(r.rhs) << "," << num(r.margin) << "," << num(r.tolerance) << "," << (r.pass ? 1 : 0) << ","
               << (r.equality_expected ? 1 : 0) << "," << (r.equality_met() ? 1 : 0) << "\n";
        }
    } else {
        json j;
        j["verdicts"] = json::array();
        for (const auto& r : reports) j["verdicts"].push_back(report_json(r));
        j["all_pass"] = all;
        dump(sink.out(), j);
        sink.out() << "\n";
    }
    return all ? 0 : 1;
}

template <class T, class Fn>
std::vector<T> sweep(const std::vector<double>& xs, int threads, Fn fn) {
    std::vector<T> out(xs.size());
    parallel_for(xs.size(), threads, [&](std::size_t i) { out[i] = fn(xs[i]); });
    return out;
}

int cmd_constants(const Config& c) {
    const auto as = alphas(c);
    const auto recs = sweep<ConstantRecord>(as, c.threads, [&](double a) { return optimal_constant(c.dim, a); });
    Sink sink(c.output);
    if (c.format == "csv") {
        sink.out() << "alpha,n,value,route\n";
        for (const auto& r : recs)
            sink.out() << num(r.alpha) << "," << r.n << "," << num(r.value) << "," << route_name(r.route) << "\n";
        return 0;
    }
    json arr = json::array();
    for (const auto& r : recs) {
        json j;
        j["alpha"] = r.alpha;
        j["n"] = r.n;
        j["value"] = r.value;
        j["route"] = std::string(route_name(r.route));
        if (r.limit_scaled) j["limit_scaled"] = *r.limit_scaled;
        j["metadata"] = map_json(r.metadata);
        arr.push_back(j);
    }
    dump(sink.out(), arr.size() == 1 ? arr[0] : json{{"results", arr}});
    sink.out() << "\n";
    return 0;
}

int cmd_profile(const Config& c) {
    const auto as = alphas(c);
    if (as.size() != 1) throw UsageError("--alpha: profile takes a single order");
    const ProfileSolution sol = solve_profile(c.dim, as[0]);
    json head;
    head["n"] = sol.n;
    head["alpha"] = sol.alpha;
    head["u0"] = sol.u0;
    head["T"] = sol.T ? json(*sol.T) : json(nullptr);
    head["Ms"] = sol.Ms;
    head["case"] = std::string(profile_case_name(sol.kind));
    const auto nodes = sol.samples();
    Sink sink(c.output);
    auto& os = sink.out();
    if (c.format == "csv") {
        os << "# ";
        dump(os, head, false);
        os << "\n";
        os << "t,u,uprime\n";
        for (const auto& nd : nodes) os << num(nd.t) << "," << num(nd.u) << "," << num(nd.du) << "\n";
        return 0;
    }
    std::vector<double> t, u, du;
    for (const auto& nd : nodes) {
        t.push_back(nd.t);
        u.push_back(nd.u);
        du.push_back(nd.du);
    }
    head["samples"] = {{"t", t}, {"u", u}, {"uprime", du}};
    dump(os, head);
    os << "\n";
    return 0;
}

const std::vector<std::pair<std::string, FunctionalKind>>& functional_table() {
    static const std::vector<std::pair<std::string, FunctionalKind>> table = [] {
        std::vector<std::pair<std::string, FunctionalKind>> t;
        for (auto k : {FunctionalKind::h_alpha, FunctionalKind::N_alpha, FunctionalKind::Ntilde_alpha,
                       FunctionalKind::h_hat_alpha, FunctionalKind::I, FunctionalKind::I_alpha,
                       FunctionalKind::I_hat_alpha, FunctionalKind::I_hat_matrix, FunctionalKind::J_lambda,
                       FunctionalKind::I_tilde_alpha, FunctionalKind::script_I2, FunctionalKind::phi,
                       FunctionalKind::Phi, FunctionalKind::sigma2})
            t.emplace_back(std::string(functional_name(k)), k);
        return t;
    }();
    return table;
}

int cmd_functionals(const Config& c) {
    const DensityPtr d = density(c);
    const auto as = alphas(c);
    std::vector<std::pair<std::string, FunctionalKind>> kinds;
    if (c.kinds.empty()) {
        for (const auto& e : functional_table())
            if (e.second != FunctionalKind::I_hat_matrix && e.second != FunctionalKind::J_lambda &&
                e.second != FunctionalKind::phi && e.second != FunctionalKind::Phi)
                kinds.push_back(e);
    } else {
        for (const auto& name : c.kinds) {
            auto it = std::find_if(functional_table().begin(), functional_table().end(),
                                   [&](const auto& e) { return e.first == name; });
            if (it == functional_table().end()) {
                std::string valid;
                for (const auto& e : functional_table()) valid += (valid.empty() ? "" : ", ") + e.first;
                throw UsageError("--kinds: unknown functional '" + name + "' (valid: " + valid + ")");
            }
            kinds.push_back(*it);
        }
    }
    struct Cell {
        std::optional<FunctionalValue> v;
        std::string error;
    };
    const std::size_t K = kinds.size();
    std::vector<Cell> cells(as.size() * K);
    parallel_for(cells.size(), c.threads, [&](std::size_t i) {
        try {
            cells[i].v = evaluate_functional(*d, kinds[i % K].second, as[i / K]);
        } catch (const std::exception& e) {
            cells[i].error = e.what();
        }
    });
    Sink sink(c.output);
    auto& os = sink.out();
    if (c.format == "csv") {
        os << "order,kind,value,error_estimate\n";
        for (std::size_t i = 0; i < cells.size(); ++i)
            os << num(as[i / K]) << "," << kinds[i % K].first << "," << num(cells[i].v ? cells[i].v->value : NAN)
               << "," << num(cells[i].v ? cells[i].v->error_estimate : NAN) << "\n";
        return 0;
    }
    json j;
    j["density"] = d->describe();
    j["results"] = json::array();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        json r;
        r["order"] = as[i / K];
        r["kind"] = kinds[i % K].first;
        if (cells[i].v) {
            r["value"] = cells[i].v->value;
            r["error_estimate"] = cells[i].v->error_estimate;
            if (cells[i].v->matrix) {
                const auto& m = *cells[i].v->matrix;
                json rows = json::array();
                for (int a = 0; a < m.rows(); ++a) {
                    std::vector<double> row(m.cols());
                    for (int b = 0; b < m.cols(); ++b) row[b] = m(a, b);
                    rows.push_back(row);
                }
                r["matrix"] = rows;
            }
        } else {
            r["value"] = nullptr;
            r["error"] = cells[i].error;
        }
        j["results"].push_back(r);
    }
    dump(os, j);
    os << "\n";
    return 0;
}

std::shared_ptr<const GridDensity> as_grid(const DensityPtr& d, double h) {
    if (d->dim() != 1) throw UsageError("--density: heat-flow traces need a one-dimensional density");
    if (auto g = std::dynamic_pointer_cast<const GridDensity>(d)) return g;
    return sample_grid(*d, h);
}

int cmd_heatflow(const Config& c) {
    const auto grid = as_grid(density(c), c.grid_spacing);
    const auto as = alphas(c);
    const auto ts = c.t_grid.empty() ? default_time_grid(0.05, 1.0) : parse_sweep(c.t_grid);
    FlowOptions fo;
    fo.threads = c.threads;
    const auto traces = trace_orders(*grid, as, ts, fo);
    json summary = json::array();
    for (const auto& tr : traces) {
        double worst = 0.0, gap = 0.0;
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            worst = std::max(worst, std::abs(tr.residual[i]));
            gap = std::max(gap, tr.fd_gap[i]);
        }
        summary.push_back({{"alpha", tr.alpha},
                           {"max_abs_residual", worst},
                           {"max_fd_gap", gap},
                           {"grid_spacing", grid->spacing()},
                           {"t_min", tr.t.front()},
                           {"t_max", tr.t.back()},
                           {"points", tr.t.size()}});
    }
    Sink sink(c.output);
    auto& os = sink.out();
    if (c.format == "csv") {
        const bool multi = traces.size() > 1;
        os << (multi ? "alpha," : "") << "t,h,N,I,dh_dt_fd,residual\n";
        for (const auto& tr : traces)
            for (std::size_t i = 0; i < tr.t.size(); ++i)
                os << (multi ? num(tr.alpha) + "," : "") << num(tr.t[i]) << "," << num(tr.h[i]) << ","
                   << num(tr.N[i]) << "," << num(tr.I[i]) << "," << num(tr.dh_dt_fd[i]) << ","
                   << num(tr.residual[i]) << "\n";
        json s{{"density", c.density}, {"summary", summary}};
        if (c.output.empty()) {
            dump(std::cerr, s);
            std::cerr << "\n";
        } else {
            std::ofstream js(c.output + ".summary.json");
            dump(js, s);
            js << "\n";
        }
        return 0;
    }
    json j;
    j["density"] = c.density;
    j["summary"] = summary;
    j["traces"] = json::array();
    for (const auto& tr : traces)
        j["traces"].push_back({{"alpha", tr.alpha},
                               {"t", tr.t},
                               {"h", tr.h},
                               {"N", tr.N},
                               {"I", tr.I},
                               {"dh_dt_fd", tr.dh_dt_fd},
                               {"d2N_dt2_fd", tr.d2N_dt2_fd},
                               {"residual", tr.residual},
                               {"fd_gap", tr.fd_gap},
                               {"fd_step", tr.fd_step}});
    dump(os, j);
    os << "\n";
    return 0;
}

const std::vector<std::string>& inequality_ids() {
    static const std::vector<std::string> ids = {
        "isoperimetric",          "cramer_rao_renyi",   "weighted_cramer_rao", "weighted_cramer_rao_chain",
        "weighted_isoperimetric", "moment_entropy",     "tsallis_cramer_rao",  "tsallis_cramer_rao_matrix",
        "cm_entropy_bound",       "log_tsallis_cm",     "entropy_power_gaussian"};
    return ids;
}

VerdictReport verify_one(const Config& c, const std::string& id, const DensityPtr& d, double a,
                         const VerifyOptions& o) {
    if (id == "isoperimetric") return isoperimetric_check(d, a, o);
    if (id == "cramer_rao_renyi") return cramer_rao_renyi(d, a, o);
    if (id == "weighted_cramer_rao") return cramer_rao_weighted(d, a, o);
    if (id == "weighted_cramer_rao_chain") return cramer_rao_weighted_chain(d, a, o);
    if (id == "weighted_isoperimetric") return weighted_isoperimetric_check(d, a, o);
    if (id == "moment_entropy") return moment_entropy_check(d, a, o);
    if (id == "tsallis_cramer_rao") return cramer_rao_tsallis(d, a, o);
    if (id == "tsallis_cramer_rao_matrix") return cramer_rao_matrix(d, a, o);
    if (id == "cm_entropy_bound") return cm_bound_check(d, a, c.beta, c.j, c.t0, o);
    if (id == "log_tsallis_cm") return log_tsallis_cm_check(d, c.t0, c.j, o);
    if (id == "entropy_power_gaussian") {
        const auto ts = c.t_grid.empty() ? std::vector<double>{1e-3, 1e-2, 0.1, 1.0} : parse_sweep(c.t_grid);
        return epi_gaussian_check(*as_grid(d, std::min(c.grid_spacing, 0.005)), a, ts, o.flow);
    }
    throw UsageError("--inequality: unknown id '" + id + "'");
}

int cmd_verify(const Config& c) {
    const DensityPtr d = density(c);
    const auto as = alphas(c, "2");
    const VerifyOptions o = verify_options(c);
    const auto reports =
        sweep<VerdictReport>(as, c.threads, [&](double a) { return verify_one(c, c.inequality, d, a, o); });
    return emit_verdicts(c, reports);
}

int cmd_suite(const Config& c) {
    const DensityPtr d = density(c);
    const auto as = alphas(c);
    const VerifyOptions o = verify_options(c);
    const auto groups = sweep<std::vector<VerdictReport>>(as, c.threads,
                                                          [&](double a) { return run_suite(c.suite, d, a, o); });
    std::vector<VerdictReport> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    return emit_verdicts(c, all);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Renyi entropy, Fisher information and their sharp inequalities"};
    app.require_subcommand(1);
    app.fallthrough();
    Config c;
    app.add_option("--alpha", c.alpha, "order: value, list a,b,c or sweep start:stop:count");
    app.add_option("--dim", c.dim, "dimension n")->check(CLI::PositiveNumber);
    app.add_option("--density", c.density, "family:name(key=value,...) or grid:path.csv");
    app.add_option("--t-grid", c.t_grid, "heat-flow times: list or sweep start:stop:count");
    app.add_option("--output", c.output, "output path (default standard output)");
    app.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--tol-quad", c.tol_quad, "relative tolerance for quadrature verdicts")->check(CLI::PositiveNumber);
    app.add_option("--tol-fd", c.tol_fd, "relative tolerance for first-derivative verdicts")->check(CLI::PositiveNumber);
    app.add_option("--threads", c.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

    auto* constants = app.add_subcommand("constants", "sharp constant r_{alpha,n}");
    auto* profile = app.add_subcommand("profile", "radial ground state of the extremal ODE");
    auto* functionals = app.add_subcommand("functionals", "entropies and Fisher informations of a density");
    functionals->add_option("--kinds", c.kinds, "functionals to evaluate (default: all scalar ones)")->delimiter(',');
    auto* heatflow = app.add_subcommand("heatflow", "entropy and Fisher information along the heat flow");
    heatflow->add_option("--grid-spacing", c.grid_spacing, "sampling step for non-grid densities")
        ->check(CLI::PositiveNumber);
    auto* verify = app.add_subcommand("verify", "one inequality verdict per order");
    verify->add_option("--inequality", c.inequality, "inequality id")->required()->check(CLI::IsMember(inequality_ids()));
    verify->add_option("--beta", c.beta, "entropy power exponent for cm_entropy_bound");
    verify->add_option("--j", c.j, "derivative order for cm_entropy_bound and log_tsallis_cm");
    verify->add_option("--t0", c.t0, "flow time for cm_entropy_bound and log_tsallis_cm");
    verify->add_option("--grid-spacing", c.grid_spacing, "sampling step for heat-flow checks")->check(CLI::PositiveNumber);
    auto* suite = app.add_subcommand("suite", "a named group of verdicts");
    suite->add_option("--name", c.suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
    suite->add_option("--grid-spacing", c.grid_spacing, "sampling step for heat-flow checks")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*constants) return cmd_constants(c);
        if (*profile) return cmd_profile(c);
        if (*functionals) return cmd_functionals(c);
        if (*heatflow) return cmd_heatflow(c);
        if (*verify) return cmd_verify(c);
        if (*suite) return cmd_suite(c);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const DomainError& e) {
        std::cerr << "error: outside the valid region: " << e.what() << "\n";
    } catch (const UnsupportedRegion& e) {
        std::cerr << "error: unsupported region: " << e.what() << "\n";
    } catch (const ConditionError& e) {
        std::cerr << "error: hypothesis not met: " << e.what() << "\n";
    } catch (const ConvergenceError& e) {
        std::cerr << "error: numerical failure: " << e.what() << "\n";
    }
    return 2;
}
