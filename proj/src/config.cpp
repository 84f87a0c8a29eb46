#include "pdg/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "pdg/errors.hpp"

namespace pdg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(x))
        throw ConfigError("config: key '" + key + "' has a non-numeric value '" + value + "'");
    return x;
}

int to_int(const std::string& key, const std::string& value) {
    const double x = to_double(key, value);
    const int i = static_cast<int>(std::lround(x));
    if (std::abs(x - i) > 0.0)
        throw ConfigError("config: key '" + key + "' must be an integer");
    return i;
}

std::vector<double> to_vector(const std::string& key, const std::string& value) {
    std::istringstream is(value);
    std::vector<double> out;
    std::string tok;
    while (is >> tok)
        out.push_back(to_double(key, tok));
    if (out.empty())
        throw ConfigError("config: key '" + key + "' has an empty value");
    return out;
}

Vec3 to_vec3(const std::string& key, const std::string& value) {
    const auto v = to_vector(key, value);
    if (v.size() != 3)
        throw ConfigError("config: key '" + key + "' must hold exactly 3 numbers");
    return Vec3(v[0], v[1], v[2]);
}

}  // namespace

ProfileMode parse_profile_mode(const std::string& s) {
    if (s == "min-max") return ProfileMode::ForceMinMax;
    if (s == "max-min-max") return ProfileMode::ForceMaxMinMax;
    if (s == "auto") return ProfileMode::Auto;
    throw ConfigError("config: profile must be min-max, max-min-max, or auto (got '" + s + "')");
}

const char* profile_mode_name(ProfileMode mode) {
    switch (mode) {
        case ProfileMode::ForceMinMax: return "min-max";
        case ProfileMode::ForceMaxMinMax: return "max-min-max";
        default: return "auto";
    }
}

const char* profile_kind_name(ProfileKind kind) {
    return kind == ProfileKind::MinMax ? "min-max" : "max-min-max";
}

RunConfig parse_config_text(const std::string& text, const std::string& default_name) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key or value");
        if (!kv.emplace(key, value).second)
            throw ConfigError("config: duplicate key '" + key + "'");
    }

    RunConfig rc;
    rc.name = default_name;

    std::set<std::string> seen;
    auto take = [&](const std::string& key) -> const std::string* {
        const auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        seen.insert(key);
        return &it->second;
    };
    auto num = [&](const std::string& key, double& slot) {
        if (const auto* v = take(key)) slot = to_double(key, *v);
    };
    auto integer = [&](const std::string& key, int& slot) {
        if (const auto* v = take(key)) slot = to_int(key, *v);
    };
    auto vec3 = [&](const std::string& key, Vec3& slot) {
        if (const auto* v = take(key)) slot = to_vec3(key, *v);
    };

    if (const auto* v = take("case.name")) rc.name = *v;

    LanderConfig raw;
    vec3("lander.gravity", raw.a_g);
    num("lander.isp", raw.isp);
    num("lander.g0", raw.g0);
    num("lander.thrust_per_engine", raw.thrust_per_engine);
    integer("lander.n_engines", raw.n_engines);
    if (const auto* v = take("lander.cant_angle_deg"))
        raw.cant_angle = to_double("lander.cant_angle_deg", *v) * std::numbers::pi / 180.0;
    num("lander.throttle_min", raw.throttle_min);
    num("lander.throttle_max", raw.throttle_max);
    rc.lander = derive_params(raw);

    bool have_r0 = false, have_v0 = false, have_m0 = false;
    if (const auto* v = take("bc.r0")) { rc.bc.r0 = to_vec3("bc.r0", *v); have_r0 = true; }
    if (const auto* v = take("bc.v0")) { rc.bc.v0 = to_vec3("bc.v0", *v); have_v0 = true; }
    vec3("bc.rf", rc.bc.rf);
    vec3("bc.vf", rc.bc.vf);
    if (const auto* v = take("bc.m0")) { rc.bc.m0 = to_double("bc.m0", *v); have_m0 = true; }
    if (!have_r0 || !have_v0 || !have_m0)
        throw ConfigError("config: bc.r0, bc.v0, and bc.m0 are required");
    if (rc.bc.m0 <= 0.0)
        throw ConfigError("config: bc.m0 must be positive");

    if (const auto* v = take("solver.profile"))
        rc.outer.profile_mode = parse_profile_mode(*v);
    integer("solver.n_basis", rc.outer.n_basis);
    integer("solver.nodes", rc.outer.nodes);
    if (const auto* v = take("solver.initial_times")) {
        rc.outer.initial_times = to_vector("solver.initial_times", *v);
        if (rc.outer.initial_times.size() < 2 || rc.outer.initial_times.size() > 3)
            throw ConfigError("config: solver.initial_times must hold 2 or 3 times");
    }
    if (rc.outer.n_basis < 6 || rc.outer.n_basis > 64)
        throw ConfigError("config: solver.n_basis must lie in [6, 64]");
    if (rc.outer.nodes < 8 || rc.outer.nodes > 256)
        throw ConfigError("config: solver.nodes must lie in [8, 256]");

    num("outer.time_tolerance", rc.outer.time_tolerance);
    num("outer.residual_accept", rc.outer.residual_accept);
    num("outer.fd_step", rc.outer.fd_step);
    integer("outer.max_iterations", rc.outer.max_iterations);
    integer("outer.auto_max_iterations", rc.outer.auto_max_iterations);
    integer("outer.polish_max_iterations", rc.outer.polish_max_iterations);

    integer("inner.max_iterations", rc.outer.inner.max_iterations);
    num("inner.step_tolerance", rc.outer.inner.step_tolerance);
    num("inner.residual_tolerance", rc.outer.inner.residual_tolerance);
    num("inner.lambda_floor", rc.outer.inner.lambda_floor);
    if (const auto* v = take("inner.damping")) {
        if (*v == "backtracking") rc.outer.inner.damping = InnerDamping::Backtracking;
        else if (*v == "none") rc.outer.inner.damping = InnerDamping::None;
        else throw ConfigError("config: inner.damping must be backtracking or none");
    }

    num("validate.r_tol", rc.validate_r_tol);
    num("validate.v_tol", rc.validate_v_tol);
    num("validate.lambda_m_tol", rc.validate_lambda_m_tol);

    for (const auto& [key, value] : kv) {
        if (key.rfind("reference.", 0) == 0) {
            rc.reference[key.substr(10)] = to_double(key, value);
            seen.insert(key);
        }
    }

    for (const auto& [key, value] : kv)
        if (!seen.count(key))
            throw ConfigError("config: unknown key '" + key + "'");
    return rc;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();

    std::string stem = path;
    if (const auto slash = stem.find_last_of('/'); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos)
        stem = stem.substr(0, dot);
    return parse_config_text(buf.str(), stem);
}

}  // namespace pdg
