#pragma once

#include "pdg/artifacts.hpp"
#include "pdg/oracle.hpp"

namespace pdg {

// Full check of a solve's artifacts: integrity gates (checksum, schema), then
// independent propagation from the stored initial costates.
struct ValidationOutcome {
    PropagationReport report;
    double mass_profile_error = 0.0;   // |oracle m(tf) - analytic m(tf)|
    double stability_r_delta = 0.0;    // change in r_error when rel_tol is halved
    double stability_v_delta = 0.0;
    double oracle_max_hamiltonian = 0.0;
    bool tolerances_met = false;
    nlohmann::json doc;  // report.json content
};

ValidationOutcome validate_artifacts(const std::string& dir, double rel_tol);

// Side-by-side comparison of one or more metrics documents against their
// stored reference values. Rows without references get no pass/fail marks.
struct ReportRow {
    std::string name;
    std::string profile;
    std::vector<std::pair<std::string, double>> values;       // field -> solved value
    std::vector<std::pair<std::string, double>> references;   // field -> reference
    bool has_reference = false;
    bool pass = true;  // meaningful only when has_reference
};

ReportRow metrics_report(const nlohmann::json& metrics);
std::string format_report_table(const std::vector<ReportRow>& rows);
nlohmann::json format_report_json(const std::vector<ReportRow>& rows);

}  // namespace pdg
