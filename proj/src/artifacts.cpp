#include "pdg/artifacts.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "pdg/errors.hpp"

namespace pdg {

using nlohmann::json;

const char* const kTrajectoryHeader =
    "t,rx,ry,rz,vx,vy,vz,ax,ay,az,T,m,"
    "lam_vx,lam_vy,lam_vz,lam_rx,lam_ry,lam_rz,lam_m,H,sigma";

MatX build_trajectory(const GuidanceSolution& sol) {
    const NodeHistories& h = sol.hist;
    const Eigen::Index n = h.t.size();
    MatX tab(n, kTrajectoryColumns);
    tab.col(0) = h.t;
    tab.middleCols(1, 3) = h.r;
    tab.middleCols(4, 3) = h.v;
    tab.middleCols(7, 3) = h.a;
    tab.col(10) = h.thrust;
    tab.col(11) = h.mass;
    tab.middleCols(12, 3) = h.lam_v;
    for (int i = 0; i < 3; ++i)
        tab.col(15 + i).setConstant(h.lam_r(i));
    tab.col(18) = h.lam_m;
    tab.col(19) = h.hamiltonian;
    tab.col(20) = h.sigma;
    return tab;
}

void write_trajectory_csv(const std::string& path, const MatX& table) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("write_trajectory_csv: cannot open '" + path + "'");
    out << kTrajectoryHeader << "\n";
    char buf[40];
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", table(i, j));
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
    if (!out)
        throw ValidationError("write_trajectory_csv: write failed for '" + path + "'");
}

MatX read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("read_trajectory_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("read_trajectory_csv: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryHeader)
        throw ValidationError("read_trajectory_csv: unexpected header");

    std::vector<std::array<double, kTrajectoryColumns>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, kTrajectoryColumns> row{};
        const char* p = line.c_str();
        for (int j = 0; j < kTrajectoryColumns; ++j) {
            char* end = nullptr;
            row[j] = std::strtod(p, &end);
            if (end == p)
                throw ValidationError("read_trajectory_csv: bad number at line " +
                                      std::to_string(lineno));
            p = end;
            if (j + 1 < kTrajectoryColumns) {
                if (*p != ',')
                    throw ValidationError("read_trajectory_csv: expected " +
                                          std::to_string(kTrajectoryColumns) +
                                          " columns at line " + std::to_string(lineno));
                ++p;
            }
        }
        if (*p != '\0')
            throw ValidationError("read_trajectory_csv: trailing data at line " +
                                  std::to_string(lineno));
        rows.push_back(row);
    }
    if (rows.empty())
        throw ValidationError("read_trajectory_csv: no data rows");

    MatX tab(static_cast<Eigen::Index>(rows.size()), kTrajectoryColumns);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < kTrajectoryColumns; ++j)
            tab(static_cast<Eigen::Index>(i), j) = rows[i][j];
    return tab;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("fnv1a64_file: cannot open '" + path + "'");
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    return h;
}

std::string checksum_string(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

json vec3_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

Vec3 vec3_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3)
        throw ValidationError(std::string("metrics: field '") + what + "' must be a 3-array");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

json metrics_json(const GuidanceSolution& sol, const RunConfig& rc,
                  std::uint64_t trajectory_checksum) {
    const SolveMetrics& m = sol.metrics;
    json times;
    times["t1"] = m.times[1];
    if (m.times.size() == 4) times["t2"] = m.times[2];
    times["tf"] = m.times.back();

    json doc;
    doc["case"] = rc.name;
    doc["profile"] = profile_kind_name(sol.kind);
    doc["times"] = times;
    doc["m_used"] = m.m_used;
    doc["residuals"] = {
        {"l2_loss", m.l2_loss},
        {"l2_hamiltonian", m.l2_hamiltonian},
        {"max_hamiltonian", m.max_hamiltonian},
        {"hamiltonian_spread", m.hamiltonian_spread},
        {"outer_final", std::vector<double>(m.outer_residual_final.begin(),
                                            m.outer_residual_final.end())},
    };
    doc["costates"] = {
        {"lambda_r0", vec3_json(sol.hist.lam_r)},
        {"lambda_v0", vec3_json(sol.costate.col(0) - sol.costate.col(1))},  // z(t0) = -1
        {"lambda_m0", sol.lambda_m0},
    };
    doc["iterations"] = {
        {"outer", m.outer_iterations},
        {"inner_first", m.inner_first},
        {"inner_median", m.inner_median},
        {"inner_max", m.inner_max},
        {"inner_counts", m.inner_iterations},
    };
    doc["wall_seconds"] = m.wall_seconds;
    doc["termination"] = m.termination;
    doc["sigma"] = {
        {"pattern_ok", m.sigma_pattern_ok},
        {"max_at_switch", m.max_sigma_at_switch},
    };
    doc["discretization"] = {{"nodes", sol.nodes}, {"n_basis", sol.n_basis}};
    if (!sol.selection_note.empty()) doc["selection"] = sol.selection_note;

    doc["config"] = {
        {"bc",
         {{"r0", vec3_json(sol.bc.r0)},
          {"v0", vec3_json(sol.bc.v0)},
          {"rf", vec3_json(sol.bc.rf)},
          {"vf", vec3_json(sol.bc.vf)},
          {"m0", sol.bc.m0}}},
        {"lander",
         {{"gravity", vec3_json(sol.cfg.a_g)},
          {"isp", sol.cfg.isp},
          {"g0", sol.cfg.g0},
          {"thrust_per_engine", sol.cfg.thrust_per_engine},
          {"n_engines", sol.cfg.n_engines},
          {"cant_angle", sol.cfg.cant_angle},
          {"throttle_min", sol.cfg.throttle_min},
          {"throttle_max", sol.cfg.throttle_max},
          {"t_min", sol.cfg.t_min},
          {"t_max", sol.cfg.t_max},
          {"alpha", sol.cfg.alpha}}},
        {"segment_bounds", sol.profile.times.bounds},
        {"levels", sol.profile.levels},
    };
    if (!rc.reference.empty()) doc["reference"] = rc.reference;
    doc["validate_tolerances"] = {
        {"r", rc.validate_r_tol}, {"v", rc.validate_v_tol}, {"lambda_m", rc.validate_lambda_m_tol}};
    doc["trajectory_checksum"] = checksum_string(trajectory_checksum);
    return doc;
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("write_json: cannot open '" + path + "'");
    out << doc.dump(2) << "\n";
    if (!out)
        throw ValidationError("write_json: write failed for '" + path + "'");
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("read_json: cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ValidationError("read_json: parse failure in '" + path + "': " + e.what());
    }
    return doc;
}

StoredSolution stored_solution(const json& doc) {
    StoredSolution st;
    try {
        const json& cfg = doc.at("config");
        const json& lander = cfg.at("lander");
        LanderConfig raw;
        raw.a_g = vec3_from(lander.at("gravity"), "gravity");
        raw.isp = lander.at("isp").get<double>();
        raw.g0 = lander.at("g0").get<double>();
        raw.thrust_per_engine = lander.at("thrust_per_engine").get<double>();
        raw.n_engines = lander.at("n_engines").get<int>();
        raw.cant_angle = lander.at("cant_angle").get<double>();
        raw.throttle_min = lander.at("throttle_min").get<double>();
        raw.throttle_max = lander.at("throttle_max").get<double>();
        st.cfg = derive_params(raw);

        const json& bc = cfg.at("bc");
        st.bc.r0 = vec3_from(bc.at("r0"), "r0");
        st.bc.v0 = vec3_from(bc.at("v0"), "v0");
        st.bc.rf = vec3_from(bc.at("rf"), "rf");
        st.bc.vf = vec3_from(bc.at("vf"), "vf");
        st.bc.m0 = bc.at("m0").get<double>();

        const auto bounds = cfg.at("segment_bounds").get<std::vector<double>>();
        const std::string kind = doc.at("profile").get<std::string>();
        st.profile = make_profile(
            kind == "min-max" ? ProfileKind::MinMax : ProfileKind::MaxMinMax,
            segment_times(bounds), st.cfg);

        const json& co = doc.at("costates");
        st.lambda_r0 = vec3_from(co.at("lambda_r0"), "lambda_r0");
        st.lambda_v0 = vec3_from(co.at("lambda_v0"), "lambda_v0");
        st.lambda_m0 = co.at("lambda_m0").get<double>();
        st.max_hamiltonian = doc.at("residuals").at("max_hamiltonian").get<double>();

        const json& tol = doc.at("validate_tolerances");
        st.r_tol = tol.at("r").get<double>();
        st.v_tol = tol.at("v").get<double>();
        st.lambda_m_tol = tol.at("lambda_m").get<double>();
        st.name = doc.at("case").get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("metrics: missing or malformed field: ") + e.what());
    }
    return st;
}

}  // namespace pdg
