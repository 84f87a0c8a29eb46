#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "pdg/errors.hpp"
#include "pdg/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;       // validation tolerances unmet
constexpr int kExitConfig = 2;        // config or artifact errors
constexpr int kExitInner = 3;
constexpr int kExitOuter = 4;
constexpr int kExitClassification = 5;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const pdg::ClassificationError*>(&e)) return kExitClassification;
    if (dynamic_cast<const pdg::OuterSolveError*>(&e)) return kExitOuter;
    if (dynamic_cast<const pdg::InnerSolveError*>(&e)) return kExitInner;
    if (dynamic_cast<const pdg::SingularCostateError*>(&e)) return kExitInner;
    if (dynamic_cast<const pdg::ConfigError*>(&e)) return kExitConfig;
    if (dynamic_cast<const pdg::ValidationError*>(&e)) return kExitConfig;
    return kExitFailure;
}

struct SolveFlags {
    std::string profile;
    int n_basis = 0;
    int nodes = 0;
    double t1 = 0.0, t2 = 0.0, tf = 0.0;
    bool has_t1 = false, has_t2 = false, has_tf = false;
};

void apply_flags(pdg::RunConfig& rc, const SolveFlags& f) {
    if (!f.profile.empty()) rc.outer.profile_mode = pdg::parse_profile_mode(f.profile);
    if (f.n_basis > 0) rc.outer.n_basis = f.n_basis;
    if (f.nodes > 0) rc.outer.nodes = f.nodes;
    if (f.has_t1 || f.has_t2 || f.has_tf) {
        if (!f.has_t1 || !f.has_tf)
            throw pdg::ConfigError("solve: overriding initial times needs at least --t1 and --tf");
        std::vector<double> tt{f.t1};
        if (f.has_t2) tt.push_back(f.t2);
        tt.push_back(f.tf);
        rc.outer.initial_times = tt;
    }
}

int run_solve_one(const std::string& config_path, const fs::path& out_dir,
                  const SolveFlags& flags) {
    pdg::RunConfig rc = pdg::parse_config(config_path);
    apply_flags(rc, flags);

    pdg::GuidanceSolution sol = pdg::solve(rc.bc, rc.lander, rc.outer);

    fs::create_directories(out_dir);
    const fs::path traj_path = out_dir / "trajectory.csv";
    pdg::write_trajectory_csv(traj_path.string(), pdg::build_trajectory(sol));
    const std::uint64_t checksum = pdg::fnv1a64_file(traj_path.string());
    pdg::write_json((out_dir / "metrics.json").string(), pdg::metrics_json(sol, rc, checksum));

    const pdg::SolveMetrics& m = sol.metrics;
    std::printf("%s: %s profile\n", rc.name.c_str(), pdg::profile_kind_name(sol.kind));
    if (!sol.selection_note.empty()) std::printf("  %s\n", sol.selection_note.c_str());
    std::printf("  switching times:");
    for (size_t i = 1; i < m.times.size(); ++i) std::printf(" %.9f", m.times[i]);
    std::printf(" s\n");
    std::printf("  propellant used: %.6f kg\n", m.m_used);
    std::printf("  residuals: L2(loss) %.3e, L2(H) %.3e, max|H| %.3e\n", m.l2_loss,
                m.l2_hamiltonian, m.max_hamiltonian);
    std::printf("  iterations: outer %d, inner median %.1f (first %d, max %d)\n",
                m.outer_iterations, m.inner_median, m.inner_first, m.inner_max);
    std::printf("  sigma pattern %s, max|sigma| at switches %.3e\n",
                m.sigma_pattern_ok ? "consistent" : "VIOLATED", m.max_sigma_at_switch);
    std::printf("  wall time: %.3f s (%s)\n", m.wall_seconds, m.termination.c_str());
    std::printf("  artifacts: %s\n", out_dir.string().c_str());
    return kExitOk;
}

int run_solve(const std::vector<std::string>& configs, const std::string& out,
              const SolveFlags& flags, int jobs) {
    if (configs.size() == 1)
        return run_solve_one(configs[0], out, flags);

    // Batch mode: independent solves, each in its own subdirectory.
    std::vector<int> codes(configs.size(), kExitOk);
    std::vector<std::string> names(configs.size());
    for (size_t i = 0; i < configs.size(); ++i) {
        fs::path stem = fs::path(configs[i]).stem();
        names[i] = (fs::path(out) / stem).string();
    }
    const int workers = std::max(1, jobs);
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
                try {
                    codes[i] = run_solve_one(configs[i], names[i], flags);
                } catch (const std::exception& e) {
                    std::fprintf(stderr, "%s: %s\n", configs[i].c_str(), e.what());
                    codes[i] = exit_code_for(e);
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    int rc = kExitOk;
    for (int c : codes) rc = std::max(rc, c);
    return rc;
}

int run_validate(const std::string& in_dir, double rtol) {
    const pdg::ValidationOutcome out = pdg::validate_artifacts(in_dir, rtol);
    pdg::write_json((fs::path(in_dir) / "report.json").string(), out.doc);

    std::printf("%s: propagation at rel_tol %.1e (%ld steps)\n",
                out.doc.at("case").get<std::string>().c_str(), out.report.rel_tol,
                out.report.steps);
    std::printf("  terminal errors: ||r|| %.6e m, ||v|| %.6e m/s, lambda_m %.6e\n",
                out.report.r_error, out.report.v_error, out.report.lambda_m_final);
    std::printf("  mass profile agreement: %.3e kg\n", out.mass_profile_error);
    std::printf("  tolerance-halving stability: dr %.3e, dv %.3e\n", out.stability_r_delta,
                out.stability_v_delta);
    std::printf("  oracle max|H|: %.3e\n", out.oracle_max_hamiltonian);
    std::printf("  verdict: %s\n", out.tolerances_met ? "PASS" : "FAIL");
    return out.tolerances_met ? kExitOk : kExitFailure;
}

int run_report(const std::vector<std::string>& files, const std::string& format) {
    std::vector<pdg::ReportRow> rows;
    for (const std::string& f : files)
        rows.push_back(pdg::metrics_report(pdg::read_json(f)));
    if (format == "json")
        std::printf("%s\n", pdg::format_report_json(rows).dump(2).c_str());
    else
        std::printf("%s", pdg::format_report_table(rows).c_str());
    for (const pdg::ReportRow& row : rows)
        if (row.has_reference && !row.pass) return kExitFailure;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuel-optimal powered-descent guidance solver"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "Solve a descent problem from a config file");
    std::vector<std::string> config_paths;
    std::string out_dir;
    SolveFlags flags;
    int jobs = 1;
    solve->add_option("--config", config_paths, "Config file (repeat to batch)")
        ->required()
        ->check(CLI::ExistingFile);
    solve->add_option("--out", out_dir, "Output directory for artifacts")->required();
    solve->add_option("--profile", flags.profile, "min-max | max-min-max | auto");
    solve->add_option("--n-basis", flags.n_basis, "Free coefficients per axis per segment");
    solve->add_option("--nodes", flags.nodes, "Collocation order per segment");
    auto* t1 = solve->add_option("--t1", flags.t1, "Initial guess for the first switch, s");
    auto* t2 = solve->add_option("--t2", flags.t2, "Initial guess for the second switch, s");
    auto* tf = solve->add_option("--tf", flags.tf, "Initial guess for the final time, s");
    solve->add_option("--jobs", jobs, "Concurrent solves in batch mode");

    auto* validate = app.add_subcommand("validate", "Propagate stored artifacts through the oracle");
    std::string in_dir;
    double rtol = 1e-12;
    validate->add_option("--in", in_dir, "Directory holding trajectory.csv and metrics.json")
        ->required();
    validate->add_option("--rtol", rtol, "Integrator relative tolerance");

    auto* report = app.add_subcommand("report", "Compare metrics documents against references");
    std::vector<std::string> metrics_files;
    std::string format = "table";
    report->add_option("metrics", metrics_files, "metrics.json files")->required();
    report->add_option("--format", format, "table | json")
        ->check(CLI::IsMember({"table", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitConfig : kExitOk;
    }

    try {
        if (solve->parsed()) {
            flags.has_t1 = t1->count() > 0;
            flags.has_t2 = t2->count() > 0;
            flags.has_tf = tf->count() > 0;
            return run_solve(config_paths, out_dir, flags, jobs);
        }
        if (validate->parsed()) return run_validate(in_dir, rtol);
        if (report->parsed()) return run_report(metrics_files, format);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    }
    return kExitOk;
}
