#include "renyi/density_spec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "renyi/errors.hpp"
#include "renyi/profiles.hpp"

namespace renyi {

namespace {

std::string trim(std::string s) {
    auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

double parse_number(const std::string& text, const std::string& what) {
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw InputError(what + ": '" + text + "' is not a number");
    return v;
}

class Args {
public:
    Args(std::string family, std::map<std::string, double> kv) : family_(std::move(family)), kv_(std::move(kv)) {}

    double get(const std::string& key, double fallback) {
        used_.insert(key);
        const auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }
    double need(const std::string& key) {
        used_.insert(key);
        const auto it = kv_.find(key);
        if (it == kv_.end()) throw InputError("density " + family_ + ": missing parameter '" + key + "'");
        return it->second;
    }
    int dim(int fallback) {
        const double v = kv_.count("n") ? get("n", fallback) : get("dim", fallback);
        used_.insert("n");
        used_.insert("dim");
        if (v < 1 || v != std::floor(v)) throw InputError("density " + family_ + ": n must be a positive integer");
        return static_cast<int>(v);
    }
    // var (isotropic) or var1..varn (diagonal)
    Eigen::MatrixXd covariance(int n) {
        Eigen::MatrixXd K = Eigen::MatrixXd::Identity(n, n) * get("var", 1.0);
        for (int i = 0; i < n; ++i) K(i, i) = get("var" + std::to_string(i + 1), K(i, i));
        return K;
    }
    Eigen::VectorXd vec(const std::string& stem, int n) {
        Eigen::VectorXd v = Eigen::VectorXd::Constant(n, get(stem, 0.0));
        for (int i = 0; i < n; ++i) v(i) = get(stem + std::to_string(i + 1), v(i));
        return v;
    }
    void finish() const {
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) throw InputError("density " + family_ + ": unknown parameter '" + k + "'");
    }

private:
    std::string family_;
    std::map<std::string, double> kv_;
    std::set<std::string> used_;
};

DensityPtr build(Family fam, Args& a, int default_dim) {
    switch (fam) {
    case Family::cos_power: return make_cos_power(a.need("alpha"), a.get("b", 1.0), a.get("c", 0.0));
    case Family::cosh_power: {
        const double alpha = a.need("alpha");
        const double b = a.get("b", 1.0), c = a.get("c", 0.0);
        const double p = a.get("power", std::nan(""));
        return make_cosh_power(alpha, b, c, std::isnan(p) ? std::nullopt : std::optional<double>(p));
    }
    case Family::two_sided_exp: return make_two_sided_exp(a.get("b", 1.0), a.get("c", 0.0));
    case Family::uniform_interval: return make_uniform_interval(a.get("b", 1.0), a.get("c", 0.0));
    case Family::gaussian: {
        const int n = a.dim(default_dim);
        return make_gaussian(a.covariance(n), a.vec("mean", n));
    }
    case Family::max_renyi: {
        const double alpha = a.need("alpha");
        return make_max_renyi(alpha, a.covariance(a.dim(default_dim)));
    }
    case Family::g_lambda: {
        const double lambda = a.need("lambda");
        return make_g_lambda(lambda, a.covariance(a.dim(default_dim)));
    }
    case Family::barenblatt: {
        const int n = a.dim(default_dim);
        return make_barenblatt(n, a.need("alpha"));
    }
    case Family::sobolev_extremal: {
        const int n = a.dim(default_dim);
        return make_sobolev_extremal(n, a.get("b", 1.0));
    }
    case Family::tsallis_g: {
        const int n = a.dim(default_dim);
        return make_tsallis_g(n, a.need("alpha"));
    }
    case Family::profile_density: {
        const int n = a.dim(default_dim);
        const double alpha = a.need("alpha");
        return profile_density(cached_profile(n, alpha), a.get("b", 1.0));
    }
    default: break;
    }
    throw InputError("density family '" + std::string(family_name(fam)) + "' cannot be built from a spec");
}

} // namespace

DensityPtr parse_density_spec(const std::string& raw, int default_dim) {
    const std::string spec = trim(raw);
    if (spec.rfind("grid:", 0) == 0) {
        const std::string path = trim(spec.substr(5));
        if (path.empty()) throw InputError("density spec: grid path is empty");
        return load_grid_csv(path);
    }
    if (spec.rfind("family:", 0) != 0)
        throw InputError("density spec must start with 'family:' or 'grid:', got '" + raw + "'");
    const std::string body = spec.substr(7);
    const auto open = body.find('(');
    std::string name = trim(body.substr(0, open));
    std::map<std::string, double> kv;
    if (open != std::string::npos) {
        if (body.back() != ')') throw InputError("density spec: missing ')' in '" + raw + "'");
        const std::string inner = body.substr(open + 1, body.size() - open - 2);
        std::size_t pos = 0;
        while (pos <= inner.size()) {
            const auto comma = inner.find(',', pos);
            const std::string item = trim(inner.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
            if (!item.empty()) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) throw InputError("density spec: expected key=value, got '" + item + "'");
                const std::string key = trim(item.substr(0, eq));
                if (kv.count(key)) throw InputError("density spec: duplicate parameter '" + key + "'");
                kv[key] = parse_number(item.substr(eq + 1), "density parameter " + key);
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    const auto fam = family_from_name(name);
    if (!fam) throw InputError("density spec: unknown family '" + name + "'");
    Args a(name, kv);
    const double scale = a.get("scale", 1.0);
    DensityPtr d = build(*fam, a, default_dim);
    Eigen::VectorXd sh = a.vec("shift", d->dim());
    a.finish();
    if (scale != 1.0 || sh.cwiseAbs().maxCoeff() != 0.0) d = rescale(d, scale, sh);
    return d;
}

std::vector<double> parse_sweep(const std::string& raw) {
    const std::string spec = trim(raw);
    if (spec.empty()) throw InputError("sweep spec is empty");
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::size_t pos = 0;
        for (auto c = spec.find(':'); ; c = spec.find(':', pos)) {
            parts.push_back(spec.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
            if (c == std::string::npos) break;
            pos = c + 1;
        }
        if (parts.size() != 3) throw InputError("sweep spec must be start:stop:count, got '" + raw + "'");
        const double a = parse_number(parts[0], "sweep start"), b = parse_number(parts[1], "sweep stop");
        const double cnt = parse_number(parts[2], "sweep count");
        if (cnt < 1 || cnt != std::floor(cnt)) throw InputError("sweep count must be a positive integer");
        const int m = static_cast<int>(cnt);
        if (m == 1) {
            if (a != b) throw InputError("sweep with count 1 needs start == stop");
            out.push_back(a);
        } else {
            for (int i = 0; i < m; ++i) out.push_back(i == m - 1 ? b : a + (b - a) * i / (m - 1));
        }
    } else {
        std::size_t pos = 0;
        for (auto c = spec.find(','); ; c = spec.find(',', pos)) {
            out.push_back(parse_number(spec.substr(pos, c == std::string::npos ? std::string::npos : c - pos), "sweep value"));
            if (c == std::string::npos) break;
            pos = c + 1;
        }
    }
    for (double v : out)
        if (!std::isfinite(v)) throw InputError("sweep values must be finite");
    if (out.size() > 1) {
        const bool up = out[1] > out[0];
        for (std::size_t i = 1; i < out.size(); ++i)
            if (up ? !(out[i] > out[i - 1]) : !(out[i] < out[i - 1]))
                throw InputError("sweep spec '" + raw + "' is not strictly monotone");
    }
    return out;
}

} // namespace renyi
