#include "pdg/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pdg/errors.hpp"

namespace pdg {

using nlohmann::json;

ValidationOutcome validate_artifacts(const std::string& dir, double rel_tol) {
    const std::string metrics_path = dir + "/metrics.json";
    const std::string traj_path = dir + "/trajectory.csv";

    const json metrics = read_json(metrics_path);

    std::string stored_checksum;
    try {
        stored_checksum = metrics.at("trajectory_checksum").get<std::string>();
    } catch (const json::exception&) {
        throw ValidationError("validate: metrics document lacks a trajectory checksum");
    }
    const std::string actual = checksum_string(fnv1a64_file(traj_path));
    if (actual != stored_checksum)
        throw ValidationError("validate: trajectory file does not match its recorded checksum");

    const MatX table = read_trajectory_csv(traj_path);
    const StoredSolution st = stored_solution(metrics);

    const int nodes = metrics.at("discretization").at("nodes").get<int>();
    const Eigen::Index expect_rows =
        static_cast<Eigen::Index>(st.profile.segments()) * (nodes + 1);
    if (table.rows() != expect_rows)
        throw ValidationError("validate: trajectory row count does not match the discretization");

    ValidationOutcome out;
    out.report = propagate_oracle(st.bc, st.lambda_r0, st.lambda_v0, st.lambda_m0, st.profile,
                                  st.cfg, rel_tol);
    out.mass_profile_error = std::abs(
        out.report.mass_final -
        mass_at(st.profile, st.bc.m0, st.cfg.alpha, st.profile.times.tf()));

    const double half_tol = std::max(rel_tol * 0.5, 1e-13);
    const PropagationReport rep2 = propagate_oracle(st.bc, st.lambda_r0, st.lambda_v0,
                                                    st.lambda_m0, st.profile, st.cfg, half_tol);
    out.stability_r_delta = std::abs(rep2.r_error - out.report.r_error);
    out.stability_v_delta = std::abs(rep2.v_error - out.report.v_error);

    out.oracle_max_hamiltonian =
        hamiltonian_samples(st.bc, st.lambda_r0, st.lambda_v0, st.lambda_m0, st.profile, st.cfg,
                            rel_tol)
            .cwiseAbs()
            .maxCoeff();

    const bool r_ok = out.report.r_error <= st.r_tol;
    const bool v_ok = out.report.v_error <= st.v_tol;
    const bool lm_ok = std::abs(out.report.lambda_m_final) <= st.lambda_m_tol;
    out.tolerances_met = r_ok && v_ok && lm_ok;

    out.doc = {
        {"case", st.name},
        {"rel_tol", out.report.rel_tol},
        {"steps", out.report.steps},
        {"r_error", out.report.r_error},
        {"v_error", out.report.v_error},
        {"lambda_m_final", out.report.lambda_m_final},
        {"mass_final", out.report.mass_final},
        {"mass_profile_error", out.mass_profile_error},
        {"stability", {{"r_delta", out.stability_r_delta}, {"v_delta", out.stability_v_delta}}},
        {"oracle_max_hamiltonian", out.oracle_max_hamiltonian},
        {"tolerances",
         {{"r", st.r_tol}, {"v", st.v_tol}, {"lambda_m", st.lambda_m_tol}}},
        {"pass", {{"r", r_ok}, {"v", v_ok}, {"lambda_m", lm_ok}, {"all", out.tolerances_met}}},
    };
    return out;
}

namespace {

double ref_or(const json& ref, const char* key, double fallback) {
    if (ref.contains(key)) return ref.at(key).get<double>();
    return fallback;
}

}  // namespace

ReportRow metrics_report(const json& metrics) {
    ReportRow row;
    row.name = metrics.at("case").get<std::string>();
    row.profile = metrics.at("profile").get<std::string>();

    const json& times = metrics.at("times");
    row.values.emplace_back("t1", times.at("t1").get<double>());
    if (times.contains("t2"))
        row.values.emplace_back("t2", times.at("t2").get<double>());
    row.values.emplace_back("tf", times.at("tf").get<double>());
    row.values.emplace_back("m_used", metrics.at("m_used").get<double>());
    row.values.emplace_back("l2_loss", metrics.at("residuals").at("l2_loss").get<double>());
    row.values.emplace_back("l2_hamiltonian",
                            metrics.at("residuals").at("l2_hamiltonian").get<double>());
    row.values.emplace_back("wall_seconds", metrics.at("wall_seconds").get<double>());

    if (metrics.contains("reference")) {
        const json& ref = metrics.at("reference");
        const double tol_times = ref_or(ref, "tol_times", 1e-2);
        const double tol_mass = ref_or(ref, "tol_mass", 1e-2);
        for (const char* key : {"t1", "t2", "tf", "m_used"}) {
            if (!ref.contains(key)) continue;
            const double expect = ref.at(key).get<double>();
            row.references.emplace_back(key, expect);
            row.has_reference = true;
            const auto it = std::find_if(row.values.begin(), row.values.end(),
                                         [&](const auto& kv) { return kv.first == key; });
            const double tol = std::string(key) == "m_used" ? tol_mass : tol_times;
            if (it == row.values.end() || std::abs(it->second - expect) > tol)
                row.pass = false;
        }
    }
    return row;
}

std::string format_report_table(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    char buf[64];
    for (const ReportRow& row : rows) {
        os << row.name << " (" << row.profile << ")";
        if (row.has_reference) os << (row.pass ? "  [PASS]" : "  [FAIL]");
        os << "\n";
        for (const auto& [key, value] : row.values) {
            std::snprintf(buf, sizeof buf, "  %-16s %.10g", key.c_str(), value);
            os << buf;
            const auto it = std::find_if(row.references.begin(), row.references.end(),
                                         [&](const auto& kv) { return kv.first == key; });
            if (it != row.references.end()) {
                std::snprintf(buf, sizeof buf, "   reference %.10g (delta %.3g)", it->second,
                              value - it->second);
                os << buf;
            }
            os << "\n";
        }
    }
    return os.str();
}

json format_report_json(const std::vector<ReportRow>& rows) {
    json out = json::array();
    for (const ReportRow& row : rows) {
        json r;
        r["case"] = row.name;
        r["profile"] = row.profile;
        for (const auto& [key, value] : row.values) r["values"][key] = value;
        if (row.has_reference) {
            for (const auto& [key, value] : row.references) r["reference"][key] = value;
            r["pass"] = row.pass;
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace pdg
