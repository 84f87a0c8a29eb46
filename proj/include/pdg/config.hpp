#pragma once

#include <map>
#include <string>

#include "pdg/outer.hpp"

namespace pdg {

// A run is described by a flat key = value file with dotted section prefixes.
// Vectors are space-separated. '#' starts a comment. Unknown keys are errors.
struct RunConfig {
    std::string name;
    LanderConfig lander;  // derived constants filled in
    BoundaryConditions bc;
    OuterSettings outer;
    std::map<std::string, double> reference;  // optional reference.* values
    double validate_r_tol = 1e-3;             // m
    double validate_v_tol = 1e-3;             // m/s
    double validate_lambda_m_tol = 1e-8;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& default_name);

const char* profile_mode_name(ProfileMode mode);
const char* profile_kind_name(ProfileKind kind);
ProfileMode parse_profile_mode(const std::string& s);

}  // namespace pdg
