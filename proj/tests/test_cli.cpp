#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hankelbands/cli.hpp"
#include "hankelbands/errors.hpp"

using namespace hankelbands;
using namespace hankelbands::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "hankelbands");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hankelbands_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("complex parsing") {
    CHECK(parse_complex("0.5") == Complex(0.5, 0.0));
    CHECK(parse_complex("0.5,-0.25") == Complex(0.5, -0.25));
    CHECK_THROWS_AS(parse_complex("abc"), ConfigError);
    CHECK_THROWS_AS(parse_complex("1,2x"), ConfigError);
}

TEST_CASE("config resolution") {
    RunConfig cfg;
    apply_config_json(cfg, nlohmann::json::parse(R"({"builtin": "mathieu:0.25", "grid": 41, "m_top": 3})"));
    CHECK(cfg.is_builtin_mathieu());
    CHECK(cfg.mathieu_A() == 0.25);
    CHECK(cfg.grid == 41);
    CHECK(cfg.truncation(cfg.symbol()) == 60);
    CHECK_THROWS_AS(apply_config_json(cfg, nlohmann::json::parse(R"({"unknown": 1})")), ConfigError);
    CHECK_THROWS_AS(apply_config_json(cfg, nlohmann::json::parse(R"({"grid": "x"})")), ConfigError);

    RunConfig carleman;
    carleman.source = {SymbolSource::Kind::Builtin, "carleman"};
    carleman.omega = 2.0;
    CHECK(carleman.symbol().dual_period() == doctest::Approx(2.0));
    carleman.period = 1.0;
    CHECK_THROWS_AS(carleman.validate(), ConfigError);
    carleman.period.reset();
    carleman.n = 25;
    CHECK(carleman.truncation(carleman.symbol()) == 25);
}

TEST_CASE("bands command writes CSV and metadata") {
    const auto dir = scratch("bands");
    const auto r = invoke({"bands", "--builtin", "carleman", "--grid", "41", "--out", dir.string(), "--dump-matrix", "0.1"});
    CHECK(r.code == kOk);
    CHECK(slurp(dir / "bands.csv").rfind("k,branch_id,sign,value", 0) == 0);
    const auto meta = nlohmann::json::parse(slurp(dir / "bands_meta.json"));
    CHECK(meta.size() == 6);
    CHECK(fs::exists(dir / "matrix.csv"));
}

TEST_CASE("inline symbol JSON, file symbol and config file") {
    const auto dir = scratch("inline");
    const std::string sym = R"({"period": 6.283185307179586, "coefficients": [{"l": 0, "re": 1, "im": 0}, {"l": 1, "re": 0.3, "im": 0}]})";
    auto r = invoke({"dump-matrix", "--symbol", sym, "--n", "4", "--out", dir.string()});
    CHECK(r.code == kOk);
    CHECK(fs::exists(dir / "matrix.csv"));

    fs::create_directories(dir);
    {
        std::ofstream(dir / "sym.json") << sym;
        std::ofstream(dir / "cfg.json") << R"({"symbol": ")" + (dir / "sym.json").string() + R"(", "grid": 34, "m_top": 2})";
    }
    r = invoke({"bands", "--config", (dir / "cfg.json").string(), "--out", dir.string()});
    CHECK(r.code == kOk);
    CHECK(nlohmann::json::parse(slurp(dir / "bands_meta.json")).size() == 4);
}

TEST_CASE("verify reports all-flat for A = 0") {
    const auto dir = scratch("verify");
    const auto r = invoke({"verify", "--builtin", "mathieu:0", "--out", dir.string()});
    CHECK(r.code == kOk);
    CHECK(r.out.find("all-flat: pass") != std::string::npos);
    const auto doc = nlohmann::json::parse(slurp(dir / "verify.json"));
    CHECK(doc["passed"] == true);
}

TEST_CASE("secdet and flat-point commands") {
    const auto dir = scratch("secdet");
    auto r = invoke({"secdet", "--builtin", "mathieu:0.3", "--s", "0.2,0.1", "--s", "0.11", "--lambda", "0.5", "--out",
                     dir.string()});
    CHECK(r.code == kOk);
    CHECK(nlohmann::json::parse(slurp(dir / "secdet_identities.json"))["passed"] == true);
    r = invoke({"mathieu-flat", "--builtin", "mathieu:0", "--out", dir.string()});
    CHECK(r.code == kOk);
    const double a_star = nlohmann::json::parse(slurp(dir / "astar.json"))["A_star"].get<double>();
    CHECK(a_star > 0.45);
    CHECK(a_star < 0.51);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("codes");
    CHECK(invoke({"bands", "--builtin", "nonsense", "--out", dir.string()}).code == kConfigError);
    CHECK(invoke({"bands", "--builtin", "carleman", "--grid", "10", "--out", dir.string()}).code == kConfigError);
    CHECK(invoke({"bands", "--builtin", "carleman", "--n", "10", "--tol", "1e-8"}).code == kConfigError);
    CHECK(invoke({"frobnicate"}).code == kConfigError);
    CHECK(invoke({"dump-matrix", "--builtin", "carleman", "--s", "0,0.5", "--n", "4", "--out", dir.string()}).code ==
          kDomainError);
    CHECK(invoke({"mathieu-flat", "--builtin", "mathieu:0", "--bracket", "0.6", "0.7", "--out", dir.string()}).code ==
          kToleranceBreach);
    CHECK(invoke({"bands", "--builtin", "mathieu:0.5", "--m-top", "8", "--out", dir.string()}).code == kToleranceBreach);
    CHECK(invoke({"bands", "--builtin", "mathieu:0.5", "--m-top", "8", "--truncate", "--out", dir.string()}).code == kOk);
}

TEST_CASE("Carleman bands start at pi") {
    const auto dir = scratch("carleman");
    const auto r = invoke({"bands", "--builtin", "carleman", "--omega", "1", "--grid", "101", "--n", "40", "--out", dir.string()});
    REQUIRE(r.code == kOk);
    std::istringstream csv(slurp(dir / "bands.csv"));
    std::string header, first;
    std::getline(csv, header);
    std::getline(csv, first);
    CHECK(first.rfind("0.0000000000000000e+00,0,+,", 0) == 0);
    CHECK(std::stod(first.substr(first.rfind(',') + 1)) == doctest::Approx(3.14159265358979323846).epsilon(1e-13));
}

TEST_CASE("flat point without an explicit symbol") {
    const auto dir = scratch("flat_default");
    const auto r = invoke({"mathieu-flat", "--bracket", "0.3", "0.7", "--out", dir.string()});
    CHECK(r.code == kOk);
    const auto doc = nlohmann::json::parse(slurp(dir / "astar.json"));
    CHECK(doc["A_star"].get<double>() > 0.45);
    CHECK(doc["A_star"].get<double>() < 0.51);
    CHECK(doc.contains("pair_values"));
    CHECK(doc.contains("iterations"));
}

TEST_CASE("output is byte-identical across thread counts") {
    const auto a = scratch("threads_a"), b = scratch("threads_b");
    setenv("HANKELBANDS_THREADS", "1", 1);
    REQUIRE(invoke({"bands", "--builtin", "mathieu:0.7", "--m-top", "4", "--truncate", "--out", a.string()}).code == kOk);
    setenv("HANKELBANDS_THREADS", "7", 1);
    REQUIRE(invoke({"bands", "--builtin", "mathieu:0.7", "--m-top", "4", "--truncate", "--out", b.string()}).code == kOk);
    unsetenv("HANKELBANDS_THREADS");
    CHECK(slurp(a / "bands.csv") == slurp(b / "bands.csv"));
    CHECK(slurp(a / "bands_meta.json") == slurp(b / "bands_meta.json"));
    CHECK(slurp(a / "bands.csv").find('\r') == std::string::npos);
}
