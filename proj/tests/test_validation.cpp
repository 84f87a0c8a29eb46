#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "pdg/errors.hpp"
#include "pdg/validation.hpp"

using namespace pdg;
namespace fs = std::filesystem;

namespace {

const char* kCaseText = R"(
case.name = case1
bc.r0 = -900 10 1500
bc.v0 = 30 -10 -70
bc.rf = 0 0 0
bc.vf = 0 0 0
bc.m0 = 1905
solver.profile = min-max
solver.n_basis = 24
solver.nodes = 60
outer.residual_accept = 5e-8
validate.r_tol = 1e-4
validate.v_tol = 1e-5
validate.lambda_m_tol = 1e-9
reference.t1 = 7.25708176
reference.tf = 31.26836378
reference.m_used = 180.2714
reference.tol_times = 1e-3
reference.tol_mass = 0.01
)";

struct Solved {
    RunConfig rc;
    GuidanceSolution sol;
};

// One shared solve; every artifact test reuses it.
const Solved& solved1() {
    static const Solved s = [] {
        Solved out;
        out.rc = parse_config_text(kCaseText, "fallback");
        out.sol = solve(out.rc.bc, out.rc.lander, out.rc.outer);
        return out;
    }();
    return s;
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "pdg_test_validation";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_artifacts(const fs::path& dir) {
    const Solved& s = solved1();
    fs::create_directories(dir);
    const std::string traj = (dir / "trajectory.csv").string();
    write_trajectory_csv(traj, build_trajectory(s.sol));
    write_json((dir / "metrics.json").string(),
               metrics_json(s.sol, s.rc, fnv1a64_file(traj)));
    return dir.string();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("config text parses into a run description") {
    const RunConfig rc = parse_config_text(kCaseText, "fallback");
    CHECK(rc.name == "case1");
    CHECK((rc.bc.r0 - Vec3(-900, 10, 1500)).norm() == 0.0);
    CHECK(rc.bc.m0 == 1905.0);
    CHECK(rc.outer.profile_mode == ProfileMode::ForceMinMax);
    CHECK(rc.outer.n_basis == 24);
    CHECK(rc.outer.nodes == 60);
    CHECK(rc.outer.residual_accept == 5e-8);
    CHECK(rc.validate_r_tol == 1e-4);
    CHECK(rc.reference.at("t1") == 7.25708176);
    CHECK(rc.reference.at("tol_mass") == 0.01);
    CHECK(rc.lander.t_min == doctest::Approx(4971.81640512).epsilon(1e-10));

    CHECK_THROWS_AS(parse_config_text("bc.r0 = 0 0 0\nbc.v0 = 1 0 0\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(std::string(kCaseText) + "\nwhat.ever = 1\n", "x"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(std::string(kCaseText) + "\nbc.m0 = 2\n", "x"),
                    ConfigError);  // duplicate key
    CHECK_THROWS_AS(parse_config_text(std::string(kCaseText) + "\nsolver.n_basis\n", "x"),
                    ConfigError);  // not key = value
    CHECK(parse_config_text("bc.r0 = 1 0 0\nbc.v0 = 1 0 0\nbc.m0 = 10\n", "y").name == "y");
}

TEST_CASE("trajectory table round trips through csv bit exactly") {
    CHECK(kTrajectoryColumns == 21);
    CHECK(std::string(kTrajectoryHeader) ==
          "t,rx,ry,rz,vx,vy,vz,ax,ay,az,T,m,"
          "lam_vx,lam_vy,lam_vz,lam_rx,lam_ry,lam_rz,lam_m,H,sigma");

    const double awkward[] = {0.0,       -0.0,    1.0 / 3.0, 3.14159265358979312e8,
                              -1.25e-300, 1905.0, 6.5e-10,   -3.7114,
                              1.0e308,    -7.0 / 11.0};
    MatX table(4, kTrajectoryColumns);
    int k = 0;
    for (Eigen::Index i = 0; i < table.rows(); ++i)
        for (Eigen::Index j = 0; j < table.cols(); ++j, ++k)
            table(i, j) = awkward[k % 10] * (1.0 + 1e-13 * k);

    const fs::path path = scratch_dir() / "roundtrip.csv";
    write_trajectory_csv(path.string(), table);
    const MatX back = read_trajectory_csv(path.string());
    REQUIRE(back.rows() == table.rows());
    REQUIRE(back.cols() == table.cols());
    for (Eigen::Index i = 0; i < table.rows(); ++i)
        for (Eigen::Index j = 0; j < table.cols(); ++j)
            CHECK(std::bit_cast<std::uint64_t>(back(i, j)) ==
                  std::bit_cast<std::uint64_t>(table(i, j)));
}

TEST_CASE("csv reader rejects malformed files") {
    const fs::path dir = scratch_dir();
    const std::string row20(
        "0,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19");
    const std::string row21 = row20 + ",20";

    write_text(dir / "empty.csv", "");
    CHECK_THROWS_AS(read_trajectory_csv((dir / "empty.csv").string()), ValidationError);

    write_text(dir / "header_only.csv", std::string(kTrajectoryHeader) + "\n");
    CHECK_THROWS_AS(read_trajectory_csv((dir / "header_only.csv").string()), ValidationError);

    write_text(dir / "bad_header.csv", "time,stuff\n" + row21 + "\n");
    CHECK_THROWS_AS(read_trajectory_csv((dir / "bad_header.csv").string()), ValidationError);

    write_text(dir / "short_row.csv", std::string(kTrajectoryHeader) + "\n" + row20 + "\n");
    CHECK_THROWS_AS(read_trajectory_csv((dir / "short_row.csv").string()), ValidationError);

    write_text(dir / "long_row.csv",
               std::string(kTrajectoryHeader) + "\n" + row21 + ",21\n");
    CHECK_THROWS_AS(read_trajectory_csv((dir / "long_row.csv").string()), ValidationError);

    write_text(dir / "bad_number.csv",
               std::string(kTrajectoryHeader) + "\n" + row20 + ",oops\n");
    CHECK_THROWS_AS(read_trajectory_csv((dir / "bad_number.csv").string()), ValidationError);

    CHECK_THROWS_AS(read_trajectory_csv((dir / "does_not_exist.csv").string()),
                    ValidationError);
}

TEST_CASE("checksums match the reference vectors and format") {
    const fs::path dir = scratch_dir();
    write_text(dir / "empty.bin", "");
    write_text(dir / "a.bin", "a");
    // standard FNV-1a 64 test vectors
    CHECK(fnv1a64_file((dir / "empty.bin").string()) == 0xcbf29ce484222325ull);
    CHECK(fnv1a64_file((dir / "a.bin").string()) == 0xaf63dc4c8601ec8cull);
    CHECK(checksum_string(0xaf63dc4c8601ec8cull) == "fnv1a64:af63dc4c8601ec8c");
    CHECK(checksum_string(0x1ull) == "fnv1a64:0000000000000001");
    CHECK_THROWS_AS(fnv1a64_file((dir / "missing.bin").string()), ValidationError);
}

TEST_CASE("metrics document carries the full schema") {
    const Solved& s = solved1();
    const nlohmann::json doc = metrics_json(s.sol, s.rc, 0x1234u);

    CHECK(doc.at("case") == "case1");
    CHECK(doc.at("profile") == "min-max");
    CHECK(doc.at("times").contains("t1"));
    CHECK(!doc.at("times").contains("t2"));
    CHECK(doc.at("times").at("tf").get<double>() == s.sol.metrics.times.back());
    CHECK(doc.at("m_used").get<double>() == s.sol.metrics.m_used);
    for (const char* key :
         {"l2_loss", "l2_hamiltonian", "max_hamiltonian", "hamiltonian_spread", "outer_final"})
        CHECK(doc.at("residuals").contains(key));
    CHECK(doc.at("costates").at("lambda_v0").size() == 3);
    CHECK(doc.at("costates").at("lambda_m0").get<double>() == s.sol.lambda_m0);
    CHECK(doc.at("iterations").contains("inner_median"));
    CHECK(doc.at("sigma").at("pattern_ok").get<bool>());
    CHECK(doc.at("discretization").at("nodes").get<int>() == 60);
    CHECK(doc.at("config").at("segment_bounds").size() == 3);
    CHECK(doc.at("config").at("levels").size() == 2);
    CHECK(doc.at("reference").at("t1").get<double>() == 7.25708176);
    CHECK(doc.at("validate_tolerances").at("r").get<double>() == 1e-4);
    CHECK(doc.at("trajectory_checksum") == "fnv1a64:0000000000001234");

    // the stored initial costate is the affine expression at the left end
    const Vec3 lv0 = s.sol.costate_expr().lambda_v(0.0);
    const auto& j = doc.at("costates").at("lambda_v0");
    for (int i = 0; i < 3; ++i)
        CHECK(j[i].get<double>() == doctest::Approx(lv0(i)).epsilon(1e-14));
}

TEST_CASE("stored solution rebuilds the oracle inputs") {
    const Solved& s = solved1();
    nlohmann::json doc = metrics_json(s.sol, s.rc, 0x9u);

    const StoredSolution st = stored_solution(doc);
    CHECK(st.name == "case1");
    CHECK(st.cfg.t_min == doctest::Approx(4971.81640512).epsilon(1e-10));
    CHECK(st.cfg.t_max == doctest::Approx(13258.17708033).epsilon(1e-10));
    CHECK(st.cfg.alpha == doctest::Approx(5.086282e-4).epsilon(1e-6));
    CHECK((st.bc.r0 - s.sol.bc.r0).norm() == 0.0);
    CHECK(st.bc.m0 == 1905.0);
    CHECK(st.profile.segments() == 2);
    CHECK(st.profile.levels[0] == st.cfg.t_min);
    CHECK(st.profile.times.bounds == s.sol.profile.times.bounds);
    CHECK(st.lambda_m0 == s.sol.lambda_m0);
    CHECK(st.r_tol == 1e-4);
    CHECK(st.v_tol == 1e-5);
    CHECK(st.lambda_m_tol == 1e-9);

    doc.erase("costates");
    CHECK_THROWS_AS(stored_solution(doc), ValidationError);
}

TEST_CASE("validate accepts a genuine artifact directory") {
    const std::string dir = write_artifacts(scratch_dir() / "ok");
    const ValidationOutcome out = validate_artifacts(dir, 1e-12);

    CHECK(out.report.r_error <= 1e-4);
    CHECK(out.report.v_error <= 1e-5);
    CHECK(std::abs(out.report.lambda_m_final) <= 1e-9);
    CHECK(out.mass_profile_error <= 1e-9);
    CHECK(out.stability_r_delta <= 1e-6);
    CHECK(out.stability_v_delta <= 1e-7);
    CHECK(out.oracle_max_hamiltonian <= 1e-5);
    CHECK(out.tolerances_met);
    CHECK(out.doc.at("pass").at("all").get<bool>());
    CHECK(out.doc.at("case") == "case1");
    CHECK(out.doc.at("steps").get<int>() > 0);
}

TEST_CASE("validate flags a tampered trajectory") {
    const fs::path dir = scratch_dir() / "tampered";
    write_artifacts(dir);
    {
        std::ofstream out(dir / "trajectory.csv", std::ios::app);
        out << "\n";
    }
    try {
        validate_artifacts(dir.string(), 1e-12);
        FAIL("tampered trajectory accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("checksum") != std::string::npos);
    }
}

TEST_CASE("validate flags inconsistent or incomplete metrics") {
    const fs::path rows_dir = scratch_dir() / "rows";
    write_artifacts(rows_dir);
    nlohmann::json doc = read_json((rows_dir / "metrics.json").string());
    doc["discretization"]["nodes"] = doc["discretization"]["nodes"].get<int>() + 1;
    write_json((rows_dir / "metrics.json").string(), doc);
    CHECK_THROWS_AS(validate_artifacts(rows_dir.string(), 1e-12), ValidationError);

    const fs::path nokey_dir = scratch_dir() / "nokey";
    write_artifacts(nokey_dir);
    doc = read_json((nokey_dir / "metrics.json").string());
    doc.erase("trajectory_checksum");
    write_json((nokey_dir / "metrics.json").string(), doc);
    CHECK_THROWS_AS(validate_artifacts(nokey_dir.string(), 1e-12), ValidationError);

    CHECK_THROWS_AS(validate_artifacts((scratch_dir() / "nowhere").string(), 1e-12),
                    ValidationError);
}

TEST_CASE("metrics report scores solved values against references") {
    const Solved& s = solved1();
    const nlohmann::json doc = metrics_json(s.sol, s.rc, 0x2u);

    const ReportRow ok = metrics_report(doc);
    CHECK(ok.name == "case1");
    CHECK(ok.profile == "min-max");
    CHECK(ok.has_reference);
    CHECK(ok.pass);
    REQUIRE(ok.values.size() == 6);  // t1, tf, m_used, l2_loss, l2_hamiltonian, wall_seconds
    CHECK(ok.values[0].first == "t1");
    CHECK(ok.references.size() == 3);

    nlohmann::json drifted = doc;
    drifted["times"]["t1"] = drifted["times"]["t1"].get<double>() + 1.0;
    const ReportRow bad = metrics_report(drifted);
    CHECK(bad.has_reference);
    CHECK(!bad.pass);

    nlohmann::json unrefd = doc;
    unrefd.erase("reference");
    const ReportRow plain = metrics_report(unrefd);
    CHECK(!plain.has_reference);

    const std::string table = format_report_table({ok, bad, plain});
    CHECK(table.find("[PASS]") != std::string::npos);
    CHECK(table.find("[FAIL]") != std::string::npos);
    CHECK(table.find("case1 (min-max)") != std::string::npos);
    CHECK(table.find("reference") != std::string::npos);

    const nlohmann::json arr = format_report_json({ok, bad, plain});
    REQUIRE(arr.size() == 3);
    CHECK(arr[0].at("pass").get<bool>());
    CHECK(!arr[1].at("pass").get<bool>());
    CHECK(!arr[2].contains("pass"));
    CHECK(arr[0].at("values").at("m_used").get<double>() ==
          doctest::Approx(180.2714).epsilon(1e-4));
}
