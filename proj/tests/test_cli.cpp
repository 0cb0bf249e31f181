#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "homeodyn/io.hpp"

using namespace homeodyn;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args, bool quiet = true) {
    std::string cmd = std::string("'") + HOMEODYN_CLI_PATH + "' " + args;
    if (quiet) cmd += " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string f;
    while (std::getline(in, f, ',')) out.push_back(f);
    return out;
}

struct TmpDir {
    fs::path path;
    explicit TmpDir(const std::string& tag) : path(fs::path("cli_test_out") / tag) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TmpDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("help, version and the bare invocation succeed") {
    CHECK(run("--help") == 0);
    CHECK(run("--version") == 0);
    CHECK(run("") == 0);
    CHECK(run("simulate --help") == 0);
}

TEST_CASE("config errors exit with code 1") {
    CHECK(run("simulate nomodel") == 1);
    CHECK(run("simulate fhn --set bogus=1 --t-end 1") == 1);
    CHECK(run("simulate fhn --set alpha=abc --t-end 1") == 1);
    CHECK(run("sweep fhn J 1:2 --t-end 1") == 1);          // malformed range
    CHECK(run("sweep fhn nope -1:1:1") == 1);              // unknown input
    CHECK(run("bifurcate pbm") == 1);                      // no diagram defined
    CHECK(run("reproduce fig99") == 1);                    // unknown recipe
    CHECK(run("simulate fhn --noise gauss:sigma=1 --t-end 1") == 1);
}

TEST_CASE("a diverging integration exits with code 2") {
    TmpDir tmp("blowup");
    CHECK(run("simulate fhn --method euler --dt 0.5 --t-end 50 --out " + tmp.str()) == 2);
}

TEST_CASE("simulate writes a trajectory and a faithful manifest") {
    TmpDir tmp("sim");
    const int rc = run("simulate fhn --set J=1 --set alpha=2.5 --t-end 2 --dt 0.001 --out " +
                       tmp.str());
    REQUIRE(rc == 0);
    REQUIRE(fs::exists(tmp.path / "trajectory.csv"));
    REQUIRE(fs::exists(tmp.path / "manifest.json"));

    const auto rows = lines_of(slurp(tmp.path / "trajectory.csv"));
    CHECK(rows.size() == 2002);  // header + initial sample + 2000 steps
    CHECK(rows[0] == "t,x,y");
    CHECK(fields_of(rows[1]).size() == 3);

    const RunManifest m = read_manifest((tmp.path / "manifest.json").string());
    CHECK(m.command == "simulate");
    CHECK_FALSE(m.version.empty());
    CHECK_FALSE(m.seed.has_value());  // deterministic run records no seed
    CHECK(m.resolved.at("model") == "fhn");
    CHECK(m.resolved.at("J") == "1");
    CHECK(m.resolved.at("alpha") == "2.5");
    CHECK(m.resolved.at("integrator.dt") == "0.001");
    CHECK(m.outputs == std::vector<std::string>{"trajectory.csv"});
}

TEST_CASE("flag > config > default precedence lands in the manifest") {
    TmpDir tmp("prec");
    const fs::path cfg = tmp.path / "run.cfg";
    {
        std::ofstream os(cfg);
        os << "model = fhn\nalpha = 2.5\nintegrator.dt = 0.01\nintegrator.t_end = 3\n";
    }
    REQUIRE(run("simulate --config " + cfg.string() + " --set alpha=3 --dt 0.002 --out " +
                tmp.str()) == 0);
    const RunManifest m = read_manifest((tmp.path / "manifest.json").string());
    CHECK(m.resolved.at("alpha") == "3");                // --set beats config
    CHECK(m.resolved.at("integrator.dt") == "0.002");    // flag beats config
    CHECK(m.resolved.at("integrator.t_end") == "3");     // config beats default
    CHECK(m.resolved.at("mu") == "30");                  // defaults recorded too

    const fs::path bad = tmp.path / "bad.cfg";
    {
        std::ofstream os(bad);
        os << "model = fhn\nunknown_key = 1\n";
    }
    CHECK(run("simulate --config " + bad.string() + " --out " + tmp.str()) == 1);
}

TEST_CASE("stochastic runs are seed-reproducible") {
    TmpDir a("seed_a"), b("seed_b"), c("seed_c");
    const std::string common =
        "simulate fhn --set J=0.5 --noise normal:sigma=5,refresh=0.001 "
        "--t-end 2 --dt 0.001 ";
    REQUIRE(run(common + "--seed 42 --out " + a.str()) == 0);
    REQUIRE(run(common + "--seed 42 --out " + b.str()) == 0);
    REQUIRE(run(common + "--seed 43 --out " + c.str()) == 0);
    const std::string ta = slurp(a.path / "trajectory.csv");
    CHECK(ta == slurp(b.path / "trajectory.csv"));
    CHECK(ta != slurp(c.path / "trajectory.csv"));
    CHECK(read_manifest((a.path / "manifest.json").string()).seed == uint64_t(42));
}

TEST_CASE("sweep: documented range form, per-point rows, correct states") {
    TmpDir tmp("sweep");
    REQUIRE(run("sweep fhn J -2:2:0.5 --observe x,y --dt 0.001 --discard 50 "
                "--window 200 --out " +
                tmp.str()) == 0);
    const fs::path csv = tmp.path / "sweep_fhn_J.csv";
    REQUIRE(fs::exists(csv));
    const auto rows = lines_of(slurp(csv));
    REQUIRE(rows.size() == 10);  // header + 9 grid points
    CHECK(fields_of(rows[0]) ==
          std::vector<std::string>{"input", "average_x", "average_y", "state_label",
                                   "period", "duty_cycle", "seed", "input_effective",
                                   "error"});
    // the instability window of the default model covers |J| < 1.33
    const std::vector<std::string> want = {
        "quiescent", "quiescent", "oscillatory", "oscillatory", "oscillatory",
        "oscillatory", "oscillatory", "quiescent", "quiescent"};
    for (std::size_t i = 0; i < want.size(); ++i) {
        const auto f = fields_of(rows[i + 1]);
        REQUIRE(f.size() >= 4);
        CHECK(f[3] == want[i]);
    }
    const RunManifest m = read_manifest((tmp.path / "manifest.json").string());
    CHECK(m.command == "sweep");
    CHECK(m.outputs == std::vector<std::string>{"sweep_fhn_J.csv"});
    CHECK(m.resolved.at("sweep.input") == "J");
}

TEST_CASE("sweep --observe restricts the average columns") {
    TmpDir tmp("observe");
    REQUIRE(run("sweep fhn J 0.4:0.6:0.1 --observe y --dt 0.001 --discard 30 "
                "--window 100 --out " +
                tmp.str()) == 0);
    const auto rows = lines_of(slurp(tmp.path / "sweep_fhn_J.csv"));
    CHECK(fields_of(rows[0])[1] == "average");  // single observable, no suffix
    CHECK(fields_of(rows[0]).size() == 8);
}

TEST_CASE("reproduce --check verifies and detects tampering") {
    TmpDir tmp("check");
    REQUIRE(run("sweep fhn J 0.4:0.6:0.1 --observe y --dt 0.001 --discard 30 "
                "--window 100 --out " +
                tmp.str()) == 0);
    CHECK(run("reproduce --check " + tmp.str()) == 0);

    std::ofstream(tmp.path / "sweep_fhn_J.csv", std::ios::app) << "tampered\n";
    CHECK(run("reproduce --check " + tmp.str()) == 2);
}

TEST_CASE("bifurcate fhn emits the onset locus over the alpha range") {
    TmpDir tmp("locus");
    REQUIRE(run("bifurcate fhn --alpha 1.5:3:0.5 --out " + tmp.str()) == 0);
    const auto rows = lines_of(slurp(tmp.path / "hopf_locus.csv"));
    REQUIRE(rows.size() == 5);  // header + alpha in {1.5, 2, 2.5, 3}
    CHECK(fields_of(rows[0]) == std::vector<std::string>{"alpha", "j_minus", "j_plus"});
    double prev = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto f = fields_of(rows[i]);
        const double jm = std::stod(f[1]), jp = std::stod(f[2]);
        CHECK(jm == -jp);
        CHECK(jp > prev);
        prev = jp;
    }
}
