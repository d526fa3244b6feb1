#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <unistd.h>

#include <json.hpp>

#include "wavehf/error.hpp"
#include "wavehf/snapshot.hpp"
#include "wavehf/shell/commands.hpp"
#include "wavehf/shell/config.hpp"
#include "wavehf/shell/csv.hpp"

using namespace wavehf;
using namespace wavehf::shell;
namespace fs = std::filesystem;

namespace {

// A fresh directory per test case, removed on exit.
struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("wavehf_shell_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

const char* kSmall = R"({
  "dimension": 1,
  "points_per_axis": 16,
  "half_extent": 5.0,
  "nuclei": [{"position": [0.0], "charge": 2}],
  "electron_count": 2,
  "initial_state": "scf_projector",
  "perturbation": 0.1,
  "seed": 4,
  "dt": 0.001,
  "T": 0.02,
  "record_stride": 5
})";

RunConfig small_config() {
    return parse_config(kSmall);
}

nlohmann::json report_json(const std::string& text) {
    return nlohmann::json::parse(text);
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("fields") {
        const RunConfig c = small_config();
        CHECK(c.points_per_axis == 16);
        CHECK(c.half_extent == 5.0);
        CHECK(c.nuclei.size() == 1);
        CHECK(c.nuclei[0].charge == 2);
        CHECK(c.electrons() == 2);
        CHECK(c.initial == InitialKind::scf_projector);
        CHECK(c.seed == 4);
        CHECK(c.record_stride == 5);
        CHECK(c.mode() == EnergyMode::reduced);
        CHECK_NOTHROW(c.validate());
    }
    SUBCASE("electron count defaults to the nuclear charge") {
        const RunConfig c = parse_config(R"({"nuclei": [{"position": [1.0], "charge": 3}]})");
        CHECK(c.electrons() == 3);
    }
    SUBCASE("file initial state") {
        const RunConfig c = parse_config(R"({"initial_state": "file:some/w.wvhf"})");
        CHECK(c.initial == InitialKind::file);
        CHECK(c.initial_file == fs::path("some/w.wvhf"));
    }
    SUBCASE("unknown key names the field") {
        try {
            parse_config(R"({"dtt": 0.1})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("dtt") != std::string::npos);
        }
    }
    SUBCASE("syntax error reports the line") {
        try {
            parse_config("{\n  \"dt\": 0.1,\n  oops\n}");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("type errors") {
        CHECK_THROWS_AS(parse_config(R"({"dt": "small"})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"points_per_axis": 1.5})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"initial_state": "bogus"})"), ConfigError);
        CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
    }
    SUBCASE("validation") {
        RunConfig c = small_config();
        c.T = 0.0005;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = small_config();
        c.T = 0.0205;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = small_config();
        c.electron_count = 17;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = small_config();
        c.snapshot_stride = 2;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    SUBCASE("overrides") {
        RunConfig c = small_config();
        apply_overrides(c, Overrides{0.002, 0.04, true, 9});
        CHECK(c.dt == 0.002);
        CHECK(c.T == 0.04);
        CHECK(c.exchange);
        CHECK(c.seed == 9);
        CHECK(c.mode() == EnergyMode::full);
    }
    SUBCASE("shipped configs parse and validate") {
        for (const char* name : {"reference.json", "free.json", "gradcheck.json"}) {
            CHECK_NOTHROW(load_config(fs::path(WAVEHF_CONFIG_DIR) / name).validate());
        }
    }
    SUBCASE("missing file is an I/O error") {
        CHECK_THROWS_AS(load_config("/nonexistent/wavehf.json"), IoError);
    }
}

TEST_CASE("csv rows") {
    TrajectoryRecord r;
    r.t = 0.5;
    r.energy.total = -1.25;
    r.picard_iters = 3;
    std::ostringstream out;
    write_csv_row(out, r);
    const std::string row = out.str();
    CHECK(row.rfind("0.5,-1.25,", 0) == 0);
    // trailing vn_residual is empty when absent
    CHECK(row.substr(row.size() - 4) == ",3,\n");

    r.vn_residual = 0.125;
    std::ostringstream with;
    write_csv_row(with, r);
    CHECK(with.str().substr(with.str().size() - 9) == ",3,0.125\n");

    std::ostringstream header;
    write_csv_header(header);
    CHECK(header.str() ==
          "t,E_total,E_kinetic,E_nuclear,E_hartree,E_exchange,charge,hs_norm,h1_norm,h2_norm,op_norm,"
          "k_min_eig,k_max_eig,picard_iters,vn_residual\n");
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("evolve command") {
    TempDir dir;
    std::ostringstream report;

    SUBCASE("writes CSV, snapshots and a drift summary") {
        RunConfig c = small_config();
        c.snapshot_dir = dir.path / "snaps";
        c.snapshot_stride = 10;
        const fs::path csv = dir.path / "out" / "run.csv";
        CHECK(cmd_evolve(c, csv, report) == kOk);

        std::istringstream lines(read_file(csv));
        std::string line;
        int rows = -1;
        while (std::getline(lines, line)) {
            ++rows;
        }
        CHECK(rows == 5);  // t = 0, 0.005, ..., 0.02

        const auto doc = report_json(report.str());
        CHECK(doc["status"] == "ok");
        CHECK(doc["steps"] == 20);
        CHECK(doc["drift"]["charge_drift"].get<double>() < 1e-10);

        CHECK(fs::exists(c.snapshot_dir / "snapshot_00000000.wvhf"));
        CHECK(fs::exists(c.snapshot_dir / "snapshot_00000010.wvhf"));
        const Snapshot last = load_snapshot(c.snapshot_dir / "snapshot_00000020.wvhf");
        CHECK(last.time == doctest::Approx(0.02));
        CHECK(last.state.grid().points_per_axis() == 16);
    }
    SUBCASE("identical config gives identical bytes") {
        RunConfig c = small_config();
        c.snapshot_dir = dir.path / "a";
        c.snapshot_stride = 20;
        CHECK(cmd_evolve(c, dir.path / "a.csv", report) == kOk);
        c.snapshot_dir = dir.path / "b";
        CHECK(cmd_evolve(c, dir.path / "b.csv", report) == kOk);
        CHECK(read_file(dir.path / "a.csv") == read_file(dir.path / "b.csv"));
        CHECK(read_file(dir.path / "a" / "snapshot_00000020.wvhf") ==
              read_file(dir.path / "b" / "snapshot_00000020.wvhf"));
    }
    SUBCASE("a snapshot can seed the next run") {
        RunConfig c = small_config();
        c.snapshot_dir = dir.path / "s";
        c.snapshot_stride = 20;
        REQUIRE(cmd_evolve(c, dir.path / "first.csv", report) == kOk);

        RunConfig next = small_config();
        next.initial = InitialKind::file;
        next.initial_file = c.snapshot_dir / "snapshot_00000020.wvhf";
        next.perturbation = 0.0;
        CHECK(cmd_evolve(next, dir.path / "second.csv", report) == kOk);

        // the second run starts where the first one ended
        const std::string first = read_file(dir.path / "first.csv");
        const std::string second = read_file(dir.path / "second.csv");
        const auto last_row = first.substr(first.rfind('\n', first.size() - 2) + 1);
        const auto first_row = second.substr(second.find('\n') + 1);
        CHECK(last_row.substr(last_row.find(',') + 1, 40) == first_row.substr(first_row.find(',') + 1, 40));
    }
    SUBCASE("snapshot on a different grid is a config error") {
        RunConfig c = small_config();
        c.snapshot_dir = dir.path / "s";
        c.snapshot_stride = 20;
        REQUIRE(cmd_evolve(c, dir.path / "first.csv", report) == kOk);
        RunConfig other = small_config();
        other.points_per_axis = 12;
        other.initial = InitialKind::file;
        other.initial_file = c.snapshot_dir / "snapshot_00000020.wvhf";
        std::ostringstream err;
        CHECK(run_guarded([&] { return cmd_evolve(other, dir.path / "x.csv", report); }, err) == kConfig);
    }
    SUBCASE("coupling off conserves energy to roundoff") {
        RunConfig c = small_config();
        c.coupling = false;
        c.T = 0.2;
        CHECK(cmd_evolve(c, dir.path / "free.csv", report) == kOk);
        CHECK(report_json(report.str())["drift"]["energy_drift"].get<double>() < 1e-12);
    }
    SUBCASE("malformed config exits with 2 and writes nothing") {
        const fs::path cfg = dir.path / "bad.json";
        const fs::path csv = dir.path / "never.csv";
        write_file(cfg, "{ \"dt\": 0.001, \"T\": }");
        std::ostringstream err;
        const int code = run_guarded(
            [&] {
                const RunConfig c = load_config(cfg);
                return cmd_evolve(c, csv, report);
            },
            err);
        CHECK(code == kConfig);
        CHECK_FALSE(fs::exists(csv));
        CHECK(err.str().find("config") != std::string::npos);
    }
    SUBCASE("invalid values exit with 2 and write nothing") {
        RunConfig c = small_config();
        c.dt = 0.05;
        const fs::path csv = dir.path / "never.csv";
        std::ostringstream err;
        CHECK(run_guarded([&] { return cmd_evolve(c, csv, report); }, err) == kConfig);
        CHECK_FALSE(fs::exists(csv));
    }
    SUBCASE("unwritable output exits with 3") {
        write_file(dir.path / "blocker", "");
        std::ostringstream err;
        CHECK(run_guarded([&] { return cmd_evolve(small_config(), dir.path / "blocker" / "x.csv", report); }, err) ==
              kIo);
    }
    SUBCASE("Picard failure exits with 1 and reports the time") {
        RunConfig c = small_config();
        c.picard_max_iter = 1;
        CHECK(cmd_evolve(c, dir.path / "fail.csv", report) == kNumerical);
        const auto doc = report_json(report.str());
        CHECK(doc["status"] == "numerical_failure");
        CHECK(doc["failure_time"].get<double>() == 0.0);
        CHECK(fs::exists(dir.path / "fail.csv"));
    }
}

TEST_CASE("check commands") {
    TempDir dir;
    std::ostringstream report;
    const RunConfig gc = load_config(fs::path(WAVEHF_CONFIG_DIR) / "gradcheck.json");

    SUBCASE("gradcheck in both modes and with coupling off") {
        CHECK(cmd_gradcheck(gc, dir.path / "g.json", report) == kOk);
        CHECK(nlohmann::json::parse(read_file(dir.path / "g.json"))["max_relative_deviation"].get<double>() < 1e-6);

        RunConfig full = gc;
        full.exchange = true;
        CHECK(cmd_gradcheck(full, std::nullopt, report) == kOk);
        CHECK(report_json(report.str())["mode"] == "full");
        CHECK(report_json(report.str())["max_relative_deviation"].get<double>() < 1e-6);

        RunConfig off = gc;
        off.coupling = false;
        std::ostringstream off_report;
        CHECK(cmd_gradcheck(off, std::nullopt, off_report) == kOk);
        CHECK(report_json(off_report.str())["max_relative_deviation"].get<double>() < 1e-9);
    }
    SUBCASE("vncheck") {
        CHECK(cmd_vncheck(small_config(), std::nullopt, report) == kOk);
        const auto doc = report_json(report.str());
        CHECK(doc["order"].get<double>() == doctest::Approx(2.0).epsilon(0.1));
        CHECK(doc["slater_defect"].get<double>() < 1e-12);
    }
    SUBCASE("groundstate") {
        RunConfig c = small_config();
        CHECK(cmd_groundstate(c, dir.path / "gs.json", report) == kOk);
        const auto doc = nlohmann::json::parse(read_file(dir.path / "gs.json"));
        CHECK(doc["status"] == "ok");
        CHECK(doc["abs_diff"].get<double>() < 1e-6);
    }
    SUBCASE("groundstate non-convergence exits with 1") {
        RunConfig c = small_config();
        c.min_max_iter = 2;
        CHECK(cmd_groundstate(c, std::nullopt, report) == kNumerical);
        CHECK(report_json(report.str())["status"] == "numerical_failure");
    }
}
