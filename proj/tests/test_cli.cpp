#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "maxpot/cli.hpp"
#include "maxpot/field_io.hpp"

using namespace maxpot;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli: gen writes a readable field and validates input") {
    TempDir dir("maxpot_cli_gen");
    const int rc = dispatch({"gen", "--n", "2", "--res", "32", "--f", "gaussian", "--param",
                             "sigma=0.8", "--out", dir.file("f.mpf"), "--csv", dir.file("f.csv")});
    CHECK(rc == 0);
    const Field f = read_field(dir.file("f.mpf"));
    CHECK(f.grid.dims[0] == 32);
    CHECK(f.components == 1);

    std::ifstream csv(dir.file("f.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x1,x2,v1");

    CHECK(dispatch({"gen", "--f", "no_such_function", "--out", dir.file("g.mpf")}) == 2);
    CHECK(dispatch({"gen", "--res", "8", "--out", dir.file("g.mpf")}) == 2);
}

TEST_CASE("cli: apply runs an operator pipeline") {
    TempDir dir("maxpot_cli_apply");
    REQUIRE(dispatch({"gen", "--n", "2", "--res", "32", "--f", "ball_indicator", "--out",
                      dir.file("f.mpf")}) == 0);
    const int rc = dispatch({"apply", "--op", "maximal_potential", "--in", dir.file("f.mpf"),
                             "--symbol", "one", "--out", dir.file("a.mpf")});
    CHECK(rc == 0);
    const Field a = read_field(dir.file("a.mpf"));
    CHECK(a.components == 1);
    CHECK(a.all_finite());
    CHECK(fs::exists(dir.file("a.csv")));  // apply always exports the CSV companion

    // unknown symbol id names the offending field in the diagnostic
    CHECK(dispatch({"apply", "--op", "maximal_potential", "--in", dir.file("f.mpf"), "--symbol",
                    "nope", "--out", dir.file("b.mpf")}) == 2);
    CHECK(dispatch({"apply", "--op", "not_an_op", "--in", dir.file("f.mpf"), "--out",
                    dir.file("b.mpf")}) == 2);
}

TEST_CASE("cli: non-finite input aborts with exit code 3") {
    TempDir dir("maxpot_cli_nan");
    Field f(Grid::centered(2, 16, 1.0), 1);
    f.data[5] = std::numeric_limits<double>::quiet_NaN();
    write_field(f, dir.file("bad.mpf"));
    CHECK(dispatch({"apply", "--op", "riesz_potential", "--in", dir.file("bad.mpf"), "--out",
                    dir.file("out.mpf")}) == 3);
    CHECK(!fs::exists(dir.file("out.mpf")));
}

TEST_CASE("cli: verify representation emits a passing report") {
    TempDir dir("maxpot_cli_verify");
    const int rc = dispatch({"verify", "representation", "--n", "2", "--res", "64", "--f",
                             "gaussian", "--out-dir", dir.file("rep")});
    CHECK(rc == 0);
    const auto j = nlohmann::json::parse(slurp(dir.file("rep/representation.json")));
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("config").contains("cli"));

    std::ifstream csv(dir.file("rep/summary.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "check,grid,ladder,max_residual,violation_fraction,pass");

    CHECK(dispatch({"verify", "representation", "--symbol", "bogus", "--out-dir",
                    dir.file("rep2")}) == 2);
    CHECK(dispatch({"verify", "nonsense_check", "--out-dir", dir.file("rep3")}) == 2);
    // differentiating checks reject non-smooth inputs
    CHECK(dispatch({"verify", "representation", "--f", "ball_indicator", "--out-dir",
                    dir.file("rep4")}) == 2);
    CHECK(dispatch({"verify", "gradient_bound", "--res", "48", "--f", "half_space", "--out-dir",
                    dir.file("rep5")}) == 2);
}

TEST_CASE("cli: probe emits the CSV schema") {
    TempDir dir("maxpot_cli_probe");
    const int rc = dispatch({"probe", "--n", "3", "--res", "24", "--p", "2.0", "--family",
                             "concentrating", "--out-dir", dir.file("probe")});
    CHECK(rc == 0);
    std::ifstream csv(dir.file("probe/probe.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "function,params,norm_pstar,norm_grad_p,ratio");
    int rows = 0;
    for (std::string line; std::getline(csv, line) && !line.empty();) ++rows;
    CHECK(rows == 6);

    // boundedness probes run at n = 3 only
    CHECK(dispatch({"probe", "--n", "2", "--res", "24", "--p", "1.8", "--out-dir",
                    dir.file("probe2")}) == 2);
}

TEST_CASE("cli: study emits the convergence table") {
    TempDir dir("maxpot_cli_study");
    const int rc = dispatch({"study", "--op", "spherical_average", "--f", "gaussian",
                             "--resolutions", "33", "65", "--out-dir", dir.file("study")});
    CHECK(rc == 0);
    std::ifstream csv(dir.file("study/study.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "res,h,error,observed_order");

    CHECK(dispatch({"study", "--op", "riesz_potential", "--f", "gaussian", "--out-dir",
                    dir.file("study2")}) == 2);
}

TEST_CASE("cli: config file supplies defaults and flags override it") {
    TempDir dir("maxpot_cli_config");
    {
        std::ofstream ini(dir.file("run.ini"));
        ini << "[gen]\n" << "n = 2\n" << "res = 24\n" << "f = gaussian\n"
            << "out = " << dir.file("from_config.mpf") << "\n";
    }
    REQUIRE(dispatch({"--config", dir.file("run.ini"), "gen"}) == 0);
    CHECK(read_field(dir.file("from_config.mpf")).grid.dims[0] == 24);

    REQUIRE(dispatch({"--config", dir.file("run.ini"), "gen", "--res", "32", "--out",
                      dir.file("flag_wins.mpf")}) == 0);
    CHECK(read_field(dir.file("flag_wins.mpf")).grid.dims[0] == 32);
}

TEST_CASE("cli: verify outputs are byte-identical across worker counts") {
    TempDir dir("maxpot_cli_det");
    setenv("MAXPOT_THREADS", "1", 1);
    REQUIRE(dispatch({"verify", "domination", "--n", "2", "--res", "48", "--out-dir",
                      dir.file("a")}) == 0);
    setenv("MAXPOT_THREADS", "4", 1);
    REQUIRE(dispatch({"verify", "domination", "--n", "2", "--res", "48", "--out-dir",
                      dir.file("b")}) == 0);
    unsetenv("MAXPOT_THREADS");
    CHECK(slurp(dir.file("a/domination.json")) == slurp(dir.file("b/domination.json")));
    CHECK(slurp(dir.file("a/summary.csv")) == slurp(dir.file("b/summary.csv")));
}
