#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "bohmsemi/io/config.hpp"
#include "bohmsemi/io/csv.hpp"
#include "bohmsemi/io/errors.hpp"
#include "bohmsemi/io/runner.hpp"
#include "bohmsemi/io/svg.hpp"

using namespace bohmsemi::io;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bohmsemi_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_json(const fs::path& dir, const std::string& name, const json& j) {
    const fs::path p = dir / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(BOHMSEMI_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json mode_r_config() {
    return json::parse(R"({
      "kind": "minisuperspace",
      "minisuperspace": {
        "packet": {"u": 2.0, "sigma": 1.0, "mode": "R"},
        "tau_span": [-3.0, 3.0],
        "dtau": 0.05,
        "fan": {"phi": [-1.0, 1.0], "alpha": 0.0, "count": 3}
      }
    })");
}

json ensemble_config() {
    return json::parse(R"({
      "kind": "minisuperspace",
      "seed": 3,
      "minisuperspace": {
        "task": "sc-ensemble",
        "packet": {"u": 3.0, "v": 6.0, "sigma": 2.0},
        "alpha0": -20.0,
        "tau_span": [0.0, 4.0],
        "dtau": 0.02,
        "sample_count": 12
      }
    })");
}

std::vector<fs::path> csv_files(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.path().extension() == ".csv") out.push_back(fs::relative(e.path(), dir));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("doubles are written with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-2.0) == "-2");
    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -1e-300})
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
}

TEST_CASE("CSV round trip with LF endings") {
    const auto dir = scratch("csv");
    const auto path = (dir / "t.csv").string();
    CsvWriter w(path, {"a", "b"});
    w.row(std::vector<double>{1.0 / 3.0, 2.0});
    w.row(std::vector<std::string>{"x", "7"});
    CHECK_THROWS_AS(w.row(std::vector<double>{1.0}), IoError);
    w.close();
    const auto text = slurp(path);
    CHECK(text == "a,b\n0.33333333333333331,2\nx,7\n");
    const auto t = read_csv(path);
    CHECK(t.header.size() == 2);
    CHECK(t.rows.size() == 2);
    CHECK(t.column("b") == 1);
    CHECK_THROWS_AS(t.column("c"), MissingData);
    CHECK_THROWS_AS(read_csv((dir / "none.csv").string()), MissingData);
}

TEST_CASE("SVG output is deterministic and labelled") {
    SvgPlot p;
    p.title = "t < 1";
    p.x_label = "φ";
    p.y_label = "α";
    p.series.push_back({{0.0, 1.0}, {0.0, 1.0}, false, "a"});
    p.series.push_back({{0.0, 1.0}, {1.0, 0.0}, true, "b"});
    p.fit();
    const auto s = p.render();
    CHECK(s == p.render());
    CHECK(s.find("t &lt; 1") != std::string::npos);
    CHECK(s.find(">φ<") != std::string::npos);
    CHECK(s.find(">α<") != std::string::npos);
    std::size_t count = 0;
    for (auto pos = s.find("<polyline"); pos != std::string::npos; pos = s.find("<polyline", pos + 1)) ++count;
    CHECK(count == 2);
}

TEST_CASE("configuration parsing and validation") {
    const auto ok = parse_config(mode_r_config());
    REQUIRE(ok.minisuperspace);
    CHECK(ok.minisuperspace->seeds.size() == 3);
    CHECK(ok.minisuperspace->seeds[2].phi == doctest::Approx(1.0));
    CHECK(ok.minisuperspace->classify.alpha_asym == doctest::Approx(10.0));

    auto bad = mode_r_config();
    bad["minisuperspace"]["packet"]["sigma"] = -1.0;
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("minisuperspace.packet.sigma"), ConfigError);

    auto extra = mode_r_config();
    extra["minisuperspace"]["packet"]["colour"] = "red";
    CHECK_THROWS_WITH_AS(parse_config(extra), doctest::Contains("minisuperspace.packet.colour"), ConfigError);

    auto top = mode_r_config();
    top["verbose"] = true;
    CHECK_THROWS_WITH_AS(parse_config(top), doctest::Contains("unknown key verbose"), ConfigError);

    auto kind = mode_r_config();
    kind["kind"] = "relativistic";
    CHECK_THROWS_AS(parse_config(kind), ConfigError);

    auto mass = json::parse(R"({"kind": "equivariance", "equivariance": {
        "grid": {"min": -5, "max": 5, "n": 64}, "packet": {"sigma": 1}, "mass": 0, "count": 10, "T": 1}})");
    CHECK_THROWS_WITH_AS(parse_config(mass), doctest::Contains("equivariance.mass"), ConfigError);

    auto grid = json::parse(R"({"kind": "schroedinger-newton", "schroedinger_newton": {
        "grid": {"min": -5, "max": 5, "n": 4}, "packets": [{"sigma": 1}], "dt": 0.1, "steps": 1}})");
    CHECK_THROWS_WITH_AS(parse_config(grid), doctest::Contains("schroedinger_newton.grid.n"), ConfigError);

    auto tp = json::parse(R"({"kind": "two-particle", "two_particle": {
        "grid": {"x1": {"min": -5, "max": 5, "n": 32}, "x2": {"min": -2, "max": 2, "n": 16}},
        "coupling": {"type": "bilinear", "strength": 0.5},
        "chi0": [{"center": 0, "sigma": 1}], "env0": {"sigma": 0.5}, "X1": 9, "dt": 0.1, "steps": 2}})");
    CHECK_THROWS_WITH_AS(parse_config(tp), doctest::Contains("two_particle.X1"), ConfigError);
}

TEST_CASE("thread count resolution") {
    CHECK(resolve_threads(3u) == 3);
    ::setenv("BOHMSEMI_THREADS", "5", 1);
    CHECK(resolve_threads(std::nullopt) == 5);
    CHECK(resolve_threads(2u) == 2);
    ::setenv("BOHMSEMI_THREADS", "many", 1);
    CHECK_THROWS_AS(resolve_threads(std::nullopt), ConfigError);
    ::unsetenv("BOHMSEMI_THREADS");
    CHECK(resolve_threads(std::nullopt) >= 1);
}

TEST_CASE("run: mode R trajectories keep alpha - phi fixed") {
    const auto dir = scratch("mode_r");
    const auto cfg = write_json(dir, "r.json", mode_r_config());
    REQUIRE(run_binary("run " + cfg.string() + " --out " + (dir / "out").string() + " --plots") == 0);
    const auto t = read_csv((dir / "out" / "trajectories" / "traj_001.csv").string());
    const auto c = t.numbers("alpha_minus_phi");
    CHECK(c.size() == 121);
    for (double x : c) CHECK(x == doctest::Approx(c.front()).epsilon(1e-12));
    CHECK(fs::exists(dir / "out" / "figures" / "phi_alpha.svg"));
    CHECK_FALSE(fs::exists(dir / "out" / "manifest.json.tmp"));
    const auto m = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(m["version"] == kToolVersion);
    CHECK(m["kind"] == "minisuperspace");
    CHECK(m["config"] == mode_r_config());
    CHECK(m.contains("wall_time_s"));
    CHECK(m["event_flags"]["flagged_steps"] == 0);
    // The echoed configuration runs again to the same bytes.
    const auto echo = write_json(dir, "echo.json", m["config"]);
    REQUIRE(run_binary("run " + echo.string() + " --out " + (dir / "again").string()) == 0);
    CHECK(slurp(dir / "out" / "trajectories" / "traj_001.csv") == slurp(dir / "again" / "trajectories" / "traj_001.csv"));
}

TEST_CASE("run: validation failures exit with 2") {
    const auto dir = scratch("invalid");
    auto bad = mode_r_config();
    bad["minisuperspace"]["packet"]["sigma"] = -1.0;
    const auto cfg = write_json(dir, "bad.json", bad);
    CHECK(run_binary("run " + cfg.string() + " --out " + (dir / "out").string()) == 2);
    CHECK(run_binary("check " + cfg.string()) == 2);
    CHECK(run_binary("check " + write_json(dir, "good.json", mode_r_config()).string()) == 0);
    CHECK(run_binary("run " + (dir / "absent.json").string()) == 2);
    std::ofstream(dir / "broken.json") << "{ \"kind\": ";
    CHECK(run_binary("run " + (dir / "broken.json").string()) == 2);
    CHECK(run_binary("bogus") == 2);
    std::ostringstream out, err;
    CHECK(cli_run(cfg.string(), {}, out, err) == kExitInvalid);
    CHECK(err.str().find("sigma") != std::string::npos);
}

TEST_CASE("run: exceeding the flagged-step budget exits with 3") {
    const auto dir = scratch("budget");
    auto cfg = json::parse(R"({
      "kind": "minisuperspace",
      "max_flagged_steps": 0,
      "minisuperspace": {"task": "compare", "packet": {"u": 1.0, "v": 5.0, "sigma": 1.0},
                         "tau_span": [0.0, 12.0], "dtau": 0.02}
    })");
    CHECK(run_binary("run " + write_json(dir, "b.json", cfg).string() + " --out " + (dir / "out").string()) == 3);
    const auto m = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(m["budget_exceeded"] == true);
    cfg["max_flagged_steps"] = 1000;
    CHECK(run_binary("run " + write_json(dir, "c.json", cfg).string() + " --out " + (dir / "ok").string()) == 0);
}

TEST_CASE("run: identical CSV bytes across reruns and thread counts") {
    const auto dir = scratch("determinism");
    const auto cfg = write_json(dir, "e.json", ensemble_config()).string();
    REQUIRE(run_binary("run " + cfg + " --threads 1 --out " + (dir / "t1").string()) == 0);
    REQUIRE(run_binary("run " + cfg + " --threads 2 --out " + (dir / "t2").string()) == 0);
    ::setenv("BOHMSEMI_THREADS", "8", 1);
    REQUIRE(run_binary("run " + cfg + " --out " + (dir / "t8").string()) == 0);
    ::unsetenv("BOHMSEMI_THREADS");
    const auto files = csv_files(dir / "t1");
    CHECK(files.size() == 13);
    for (const char* other : {"t2", "t8"}) {
        CHECK(csv_files(dir / other) == files);
        for (const auto& f : files) CHECK(slurp(dir / "t1" / f) == slurp(dir / other / f));
    }
    const auto m8 = json::parse(slurp(dir / "t8" / "manifest.json"));
    CHECK(m8["threads"] == 8);
    // A different seed draws a different ensemble.
    REQUIRE(run_binary("run " + cfg + " --seed 4 --out " + (dir / "s4").string()) == 0);
    CHECK(slurp(dir / "t1" / "ensemble.csv") != slurp(dir / "s4" / "ensemble.csv"));
    CHECK(json::parse(slurp(dir / "s4" / "manifest.json"))["config"]["seed"] == 4);
}

TEST_CASE("figures subcommand") {
    const auto dir = scratch("figures");
    CHECK(run_binary("figures " + (dir / "nothing").string()) == 2);
    fs::create_directories(dir / "empty" / "trajectories");
    CHECK(run_binary("figures " + (dir / "empty").string()) == 2);
    CHECK_THROWS_AS(emit_figures((dir / "empty").string()), MissingData);

    auto cfg = mode_r_config();
    cfg["minisuperspace"]["seeds"] = json::array({{{"phi", 0.5}, {"alpha", 0.0}, {"highlight", true}}});
    cfg["minisuperspace"]["view"] = {-5.0, 5.0, -5.0, 5.0};
    REQUIRE(run_binary("run " + write_json(dir, "f.json", cfg).string() + " --out " + (dir / "run").string()) == 0);
    CHECK_FALSE(fs::exists(dir / "run" / "figures"));
    REQUIRE(run_binary("figures " + (dir / "run").string()) == 0);
    const auto first = slurp(dir / "run" / "figures" / "phi_alpha.svg");
    REQUIRE(run_binary("figures " + (dir / "run").string()) == 0);
    CHECK(first == slurp(dir / "run" / "figures" / "phi_alpha.svg"));
    std::size_t count = 0;
    for (auto pos = first.find("<polyline"); pos != std::string::npos; pos = first.find("<polyline", pos + 1)) ++count;
    CHECK(count == 4);
    CHECK(first.find("#1f77b4") != std::string::npos);
}

TEST_CASE("the shipped configurations validate") {
    const fs::path dir = fs::path(BOHMSEMI_SOURCE_DIR) / "configs";
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".json") continue;
        ++n;
        CHECK_NOTHROW(load_config(e.path().string()));
    }
    CHECK(n >= 9);
}
