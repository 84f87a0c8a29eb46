#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "pdg/config.hpp"

namespace pdg {

// One row per node: t, r(3), v(3), a(3), T, m, lambda_v(3), lambda_r(3),
// lambda_m, H, sigma. 21 comma-separated columns, fixed header, 17
// significant digits so a re-read reproduces every double bit-exactly.
inline constexpr int kTrajectoryColumns = 21;
extern const char* const kTrajectoryHeader;

MatX build_trajectory(const GuidanceSolution& sol);
void write_trajectory_csv(const std::string& path, const MatX& table);
MatX read_trajectory_csv(const std::string& path);  // throws ValidationError on schema violations

std::uint64_t fnv1a64_file(const std::string& path);
std::string checksum_string(std::uint64_t h);

// metrics.json carries the solve results plus enough of the config to rerun
// the propagation oracle without the original config file.
nlohmann::json metrics_json(const GuidanceSolution& sol, const RunConfig& rc,
                            std::uint64_t trajectory_checksum);
void write_json(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::string& path);  // throws ValidationError

// Rebuild the inputs the oracle needs from a metrics document.
struct StoredSolution {
    LanderConfig cfg;
    BoundaryConditions bc;
    ThrustProfile profile;
    Vec3 lambda_r0, lambda_v0;
    double lambda_m0 = 0.0;
    double max_hamiltonian = 0.0;
    double r_tol = 1e-3, v_tol = 1e-3, lambda_m_tol = 1e-8;
    std::string name;
};
StoredSolution stored_solution(const nlohmann::json& metrics);

}  // namespace pdg
